"""Evenly spaced time series and the transforms applied to them.

A :class:`Series` is immutable: every transform returns a new instance and
the underlying arrays are flagged read-only.  Timestamps are UTC instants
stored as ``datetime64[s]``.
"""

from __future__ import annotations

import datetime as dt
import math
import re
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from perpstat.distributions import chi2_sf
from perpstat.errors import (
    DegenerateSeries,
    IncompleteWindow,
    IrregularSeries,
    LagTooLarge,
    NonPositiveValue,
    SeriesTooShort,
)

__all__ = [
    "CorrelogramRow",
    "Series",
    "acf",
    "correlogram",
    "cumulative_sum",
    "first_difference",
    "log_returns",
    "pacf",
    "parse_duration",
    "square",
    "twap",
]

_DURATION_RE = re.compile(r"^\s*(\d+)\s*(s|sec|min|m|h|d)\s*$")
_UNIT_SECONDS = {"s": 1, "sec": 1, "m": 60, "min": 60, "h": 3600, "d": 86400}

DEFAULT_START = np.datetime64("1970-01-01T04:00:00", "s")


def parse_duration(value: str | dt.timedelta | np.timedelta64 | int,
                   allow_zero: bool = False) -> np.timedelta64:
    """Normalise ``"8h"``, ``"1min"``, timedeltas or integer seconds to
    ``timedelta64[s]``."""
    if isinstance(value, np.timedelta64):
        out = value.astype("timedelta64[s]")
    elif isinstance(value, dt.timedelta):
        out = np.timedelta64(int(value.total_seconds()), "s")
    elif isinstance(value, (int, np.integer)):
        out = np.timedelta64(int(value), "s")
    else:
        m = _DURATION_RE.match(str(value))
        if m is None:
            raise ValueError(f"cannot parse duration {value!r}")
        out = np.timedelta64(int(m.group(1)) * _UNIT_SECONDS[m.group(2)], "s")
    if out < np.timedelta64(0, "s") or (out == np.timedelta64(0, "s") and not allow_zero):
        raise ValueError("duration must be positive")
    return out


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Series:
    """Timestamped observations at a fixed cadence.

    Parameters
    ----------
    timestamps : array_like of datetime64
        Strictly increasing UTC instants.
    values : array_like of float
        One value per timestamp.
    cadence : duration
        Declared spacing.  Every consecutive pair of timestamps must be
        exactly this far apart.
    name : str, optional
        Label used in reports.
    """

    timestamps: np.ndarray
    values: np.ndarray
    cadence: np.timedelta64
    name: str = ""

    def __post_init__(self) -> None:
        ts = np.asarray(self.timestamps).astype("datetime64[s]")
        vals = np.asarray(self.values, dtype=np.float64)
        cadence = parse_duration(self.cadence)
        if ts.ndim != 1 or vals.ndim != 1:
            raise ValueError("timestamps and values must be one-dimensional")
        if ts.shape[0] != vals.shape[0]:
            raise ValueError("timestamps and values differ in length")
        if ts.shape[0] < 1:
            raise SeriesTooShort("a Series needs at least one observation")
        if ts.shape[0] > 1:
            steps = np.diff(ts)
            if np.any(steps <= np.timedelta64(0, "s")):
                raise IrregularSeries("timestamps must be strictly increasing")
            if np.any(steps != cadence):
                bad = int(np.flatnonzero(steps != cadence)[0])
                raise IrregularSeries(
                    f"gap of {steps[bad]} after {ts[bad]} does not match cadence {cadence}"
                )
        object.__setattr__(self, "timestamps", _frozen(ts))
        object.__setattr__(self, "values", _frozen(vals))
        object.__setattr__(self, "cadence", cadence)

    @classmethod
    def regular(
        cls,
        values: Sequence[float] | np.ndarray,
        start: str | np.datetime64 = DEFAULT_START,
        cadence: str | np.timedelta64 = "8h",
        name: str = "",
    ) -> "Series":
        cad = parse_duration(cadence)
        vals = np.asarray(values, dtype=np.float64)
        start64 = np.datetime64(start, "s")
        ts = start64 + np.arange(vals.shape[0]) * cad
        return cls(ts, vals, cad, name)

    def __len__(self) -> int:
        return int(self.values.shape[0])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Series):
            return NotImplemented
        return (
            self.name == other.name
            and self.cadence == other.cadence
            and np.array_equal(self.timestamps, other.timestamps)
            and np.array_equal(self.values, other.values, equal_nan=True)
        )

    __hash__ = None  # type: ignore[assignment]

    def derive(self, values: np.ndarray, timestamps: np.ndarray | None = None,
               name: str | None = None) -> "Series":
        """New series sharing cadence (and by default timestamps) with this one."""
        return Series(
            self.timestamps if timestamps is None else timestamps,
            values,
            self.cadence,
            self.name if name is None else name,
        )


def as_array(s: Series | Sequence[float] | np.ndarray) -> np.ndarray:
    if isinstance(s, Series):
        return s.values
    return np.asarray(s, dtype=np.float64)


def log_returns(s: Series) -> Series:
    """``ln(s_t) - ln(s_{t-1})``, stamped at the later observation."""
    if len(s) < 2:
        raise SeriesTooShort("log returns need at least two observations")
    if np.any(s.values <= 0.0):
        idx = int(np.flatnonzero(s.values <= 0.0)[0])
        raise NonPositiveValue(
            f"value {s.values[idx]!r} at {s.timestamps[idx]} is not positive; "
            "use first_difference for series that can be zero or negative"
        )
    logs = np.log(s.values)
    return s.derive(logs[1:] - logs[:-1], s.timestamps[1:])


def first_difference(s: Series) -> Series:
    if len(s) < 2:
        raise SeriesTooShort("differencing needs at least two observations")
    return s.derive(s.values[1:] - s.values[:-1], s.timestamps[1:])


def cumulative_sum(s: Series) -> Series:
    return s.derive(np.cumsum(s.values))


def square(s: Series) -> Series:
    return s.derive(s.values * s.values)


def twap(
    s: Series,
    window: str | np.timedelta64 = "8h",
    anchor: str | np.timedelta64 = "4h",
    drop_partial: bool = False,
) -> Series:
    """Mean over non-overlapping windows that end on funding timestamps.

    Window ends sit at ``anchor + k * window`` (04:00, 12:00 and 20:00 UTC for
    the defaults).  Windows are right-closed, so an observation stamped exactly
    on a boundary belongs to the window ending there.  Equal spacing reduces
    the time weighting to a plain mean; :func:`math.fsum` makes the result
    independent of the order of values inside a window.

    Raises
    ------
    IncompleteWindow
        If a window is only partly covered and ``drop_partial`` is false.
    """
    win = parse_duration(window)
    off = parse_duration(anchor, allow_zero=True)
    step = int(s.cadence.astype(np.int64))
    w = int(win.astype(np.int64))
    if w % step != 0:
        raise ValueError(f"window {win} is not a whole multiple of cadence {s.cadence}")
    per_window = w // step
    a = int(off.astype(np.int64)) % w

    secs = s.timestamps.astype(np.int64)
    ends = a - ((a - secs) // w) * w
    uniq, first, counts = np.unique(ends, return_index=True, return_counts=True)

    keep = counts == per_window
    if not np.all(keep) and not drop_partial:
        bad = int(np.flatnonzero(~keep)[0])
        raise IncompleteWindow(
            f"window ending {np.datetime64(int(uniq[bad]), 's')} has {counts[bad]} of "
            f"{per_window} observations"
        )
    if not np.any(keep):
        raise IncompleteWindow("no complete window in series")
    means = [
        math.fsum(s.values[i:i + c]) / c for i, c, k in zip(first, counts, keep) if k
    ]
    ends_kept = uniq[keep].astype("datetime64[s]")
    return Series(ends_kept, np.array(means), win, s.name)


@dataclass(frozen=True)
class CorrelogramRow:
    lag: int
    acf: float
    pacf: float
    q_stat: float
    q_pvalue: float


def acf(x: Series | np.ndarray, max_lag: int) -> np.ndarray:
    """Sample autocorrelations for lags 0..max_lag (divide-by-n autocovariance)."""
    v = as_array(x)
    d = v - v.mean()
    denom = float(d @ d)
    if denom == 0.0 or not np.isfinite(denom):
        raise DegenerateSeries("autocorrelation of a zero-variance series is undefined")
    n = d.shape[0]
    out = np.empty(max_lag + 1)
    out[0] = 1.0
    for k in range(1, max_lag + 1):
        out[k] = float(d[k:] @ d[: n - k]) / denom
    return out


def pacf(rho: np.ndarray) -> np.ndarray:
    """Partial autocorrelations at lags 1.. from autocorrelations ``rho``
    (``rho[0] == 1``) via the Durbin-Levinson recursion."""
    max_lag = rho.shape[0] - 1
    out = np.empty(max_lag)
    phi = np.zeros(0)
    for k in range(1, max_lag + 1):
        if k == 1:
            phikk = rho[1]
        else:
            num = rho[k] - phi @ rho[k - 1:0:-1]
            den = 1.0 - phi @ rho[1:k]
            phikk = num / den
        phi = np.append(phi - phikk * phi[::-1], phikk)
        out[k - 1] = phikk
    return out


def correlogram(s: Series | np.ndarray, max_lag: int) -> list[CorrelogramRow]:
    """ACF, PACF and Ljung-Box Q for lags ``1..max_lag``.

    Raises
    ------
    LagTooLarge
        Unless ``max_lag < len(s) / 2``.
    DegenerateSeries
        For a constant series.
    """
    v = as_array(s)
    n = v.shape[0]
    if max_lag < 1:
        raise ValueError("max_lag must be positive")
    if 2 * max_lag >= n:
        raise LagTooLarge(f"max_lag {max_lag} must be below half the length ({n})")
    rho = acf(v, max_lag)
    phi = pacf(rho)
    lags = np.arange(1, max_lag + 1)
    q = n * (n + 2.0) * np.cumsum(rho[1:] ** 2 / (n - lags))
    return [
        CorrelogramRow(int(k), float(rho[k]), float(phi[k - 1]), float(q[k - 1]),
                       chi2_sf(float(q[k - 1]), k))
        for k in lags
    ]
