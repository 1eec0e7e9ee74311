"""CSV ingestion and series alignment.

Accepted layout: a header row, then ``timestamp,value`` rows where the
timestamp is ISO-8601 with an explicit UTC offset (``Z`` or ``+hh:mm``) and
the value uses a decimal point without thousands separators.
"""

from __future__ import annotations

import csv
import datetime as dt
import hashlib
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from perpstat.errors import AlignmentError, IrregularSeries, ParseError
from perpstat.series import Series

__all__ = [
    "Alignment",
    "Ingested",
    "align",
    "file_sha256",
    "iso_utc",
    "read_minute_csv",
    "read_series_csv",
    "write_series_csv",
]


@dataclass(frozen=True)
class Ingested:
    series: Series
    filled: int


@dataclass(frozen=True)
class Alignment:
    first: Series
    second: Series
    dropped_first: int
    dropped_second: int


def file_sha256(path: str | Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def _parse_timestamp(text: str, path: str, line: int) -> np.datetime64:
    raw = text.strip()
    if raw.endswith(("Z", "z")):
        raw = raw[:-1] + "+00:00"
    try:
        stamp = dt.datetime.fromisoformat(raw)
    except ValueError:
        raise ParseError(f"bad timestamp {text!r}", path, line) from None
    if stamp.tzinfo is None:
        raise ParseError(f"timestamp {text!r} has no UTC offset", path, line)
    utc = stamp.astimezone(dt.timezone.utc).replace(tzinfo=None)
    return np.datetime64(utc, "s")


def _parse_value(text: str, path: str, line: int) -> float:
    try:
        v = float(text)
    except ValueError:
        raise ParseError(f"bad number {text!r}", path, line) from None
    if not math.isfinite(v):
        raise ParseError(f"non-finite value {text!r}", path, line)
    return v


def _read_rows(path: str | Path, columns: tuple[str, ...]):
    p = str(path)
    try:
        fh = open(path, newline="", encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"cannot open file: {exc.strerror}", p) from None
    with fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise ParseError("file is empty", p)
        names = tuple(h.strip().lower() for h in header)
        if len(names) != len(columns) or names[0] != "timestamp":
            raise ParseError(f"header must be {','.join(columns)}", p, 1)
        stamps, rows = [], []
        for row in reader:
            line = reader.line_num
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(columns):
                raise ParseError(f"expected {len(columns)} fields, got {len(row)}", p, line)
            stamps.append(_parse_timestamp(row[0], p, line))
            rows.append([_parse_value(c, p, line) for c in row[1:]])
    if not stamps:
        raise ParseError("no data rows", p)
    ts = np.array(stamps, dtype="datetime64[s]")
    if ts.shape[0] > 1:
        steps = np.diff(ts)
        if np.any(steps == np.timedelta64(0, "s")):
            i = int(np.flatnonzero(steps == np.timedelta64(0, "s"))[0])
            raise ParseError(f"duplicate timestamp {ts[i + 1]}", p)
        if np.any(steps < np.timedelta64(0, "s")):
            raise IrregularSeries(f"{p}: timestamps are not in increasing order")
    return ts, np.array(rows, dtype=np.float64)


def _infer_cadence(ts: np.ndarray, path: str, cadence) -> np.timedelta64:
    if cadence is not None:
        return np.timedelta64(cadence, "s") if isinstance(cadence, int) else cadence
    if ts.shape[0] < 2:
        raise ParseError("cannot infer cadence from a single row", path)
    steps, counts = np.unique(np.diff(ts), return_counts=True)
    return steps[int(np.argmax(counts))]


def read_series_csv(
    path: str | Path,
    fill: str = "none",
    name: str | None = None,
    cadence: np.timedelta64 | None = None,
) -> Ingested:
    """Read a ``timestamp,value`` file into a :class:`Series`.

    The cadence is the most common spacing unless given.  With
    ``fill="none"`` any gap raises :class:`IrregularSeries`; with
    ``fill="previous"`` missing grid points repeat the last observation and
    their number is returned in ``filled``.
    """
    if fill not in ("none", "previous"):
        raise ValueError("fill must be 'none' or 'previous'")
    p = str(path)
    ts, rows = _read_rows(path, ("timestamp", "value"))
    values = rows[:, 0]
    label = Path(p).stem if name is None else name
    if ts.shape[0] == 1:
        return Ingested(Series(ts, values, cadence or "8h", label), 0)
    cad = _infer_cadence(ts, p, cadence)
    offsets = (ts - ts[0]) / cad
    if np.any(offsets != np.floor(offsets)):
        raise IrregularSeries(f"{p}: timestamps are off the {cad} grid")
    steps = np.diff(ts)
    if np.all(steps == cad):
        return Ingested(Series(ts, values, cad, label), 0)
    if fill == "none":
        bad = int(np.flatnonzero(steps != cad)[0])
        raise IrregularSeries(
            f"{p}: gap after {ts[bad]} (use fill=previous to carry values forward)"
        )
    idx = offsets.astype(np.int64)
    full = np.full(int(idx[-1]) + 1, np.nan)
    full[idx] = values
    holder = np.where(np.isnan(full), 0, np.arange(full.shape[0]))
    np.maximum.accumulate(holder, out=holder)
    grid = ts[0] + np.arange(full.shape[0]) * cad
    filled = int(full.shape[0] - ts.shape[0])
    return Ingested(Series(grid, full[holder], cad, label), filled)


def read_minute_csv(path: str | Path) -> tuple[Series, Series]:
    """Read ``timestamp,interest,premium`` minute samples for the funding
    engine.  Gaps are not filled."""
    p = str(path)
    ts, rows = _read_rows(path, ("timestamp", "interest", "premium"))
    cad = np.timedelta64(60, "s")
    try:
        return (Series(ts, rows[:, 0], cad, "interest"), Series(ts, rows[:, 1], cad, "premium"))
    except IrregularSeries as exc:
        raise IrregularSeries(f"{p}: {exc}") from None


def align(a: Series, b: Series) -> Alignment:
    """Restrict both series to their common timestamps."""
    if a.cadence != b.cadence:
        raise AlignmentError(f"cadences differ: {a.cadence} vs {b.cadence}")
    common = np.intersect1d(a.timestamps, b.timestamps)
    if common.shape[0] == 0:
        raise AlignmentError("the two series share no timestamps")
    if common.shape[0] > 1 and np.any(np.diff(common) != a.cadence):
        raise AlignmentError("common timestamps contain gaps")
    ia = np.searchsorted(a.timestamps, common)
    ib = np.searchsorted(b.timestamps, common)
    return Alignment(
        a.derive(a.values[ia], common),
        b.derive(b.values[ib], common),
        len(a) - common.shape[0],
        len(b) - common.shape[0],
    )


def iso_utc(ts: np.datetime64) -> str:
    """ISO-8601 text with an explicit UTC offset."""
    return f"{np.datetime_as_string(ts, unit='s')}+00:00"


def write_series_csv(s: Series, path: str | Path, column: str = "value") -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["timestamp", column])
        for t, v in zip(s.timestamps, s.values):
            w.writerow([iso_utc(t), repr(float(v))])
