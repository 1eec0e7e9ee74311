"""Pairwise Granger non-causality F-tests and VAR lag selection."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from perpstat.distributions import f_sf
from perpstat.errors import MisalignedSeries, SeriesTooShort
from perpstat.regression import aic, lag_matrix, ols
from perpstat.series import Series, as_array

__all__ = ["GrangerReport", "granger_test", "select_var_lag"]


@dataclass(frozen=True)
class GrangerReport:
    """One direction of a Granger test; ``cause`` and ``effect`` are the series
    names.  The null is "``cause`` does not Granger cause ``effect``"."""

    direction: str
    cause: str
    effect: str
    lag_order: int
    f_statistic: float
    p_value: float
    reject_noncausality: bool
    n_effective: int
    level: float

    @property
    def null_hypothesis(self) -> str:
        return f"{self.cause} does not Granger Cause {self.effect}"


def _check_pair(x: Series | np.ndarray, y: Series | np.ndarray, need: int):
    if isinstance(x, Series) and isinstance(y, Series):
        if not np.array_equal(x.timestamps, y.timestamps):
            raise MisalignedSeries("x and y must share timestamps")
    xv, yv = as_array(x), as_array(y)
    if xv.shape != yv.shape:
        raise MisalignedSeries(f"x has {xv.shape[0]} observations, y has {yv.shape[0]}")
    if xv.shape[0] < need:
        raise SeriesTooShort(f"need at least {need} observations, got {xv.shape[0]}")
    return xv, yv


def _name(s: Series | np.ndarray, default: str) -> str:
    return s.name if isinstance(s, Series) and s.name else default


def _one_direction(target: np.ndarray, other: np.ndarray, p: int) -> tuple[float, float, int]:
    own = lag_matrix(target, p, p)
    cross = lag_matrix(other, p, p)
    y = target[p:]
    ssr_r = ols(y, own).ssr
    ssr_u = ols(y, np.column_stack([own, cross])).ssr
    m = y.shape[0]
    df2 = m - 2 * p - 1
    if ssr_u <= 1e-28 * max(ssr_r, 1e-300):
        return math.inf, 0.0, m
    fstat = max(ssr_r - ssr_u, 0.0) / p / (ssr_u / df2)
    return fstat, f_sf(fstat, p, df2), m


def granger_test(
    x: Series | np.ndarray,
    y: Series | np.ndarray,
    lag_order: int,
    level: float = 0.05,
) -> tuple[GrangerReport, GrangerReport]:
    """Test both directions between two aligned stationary series.

    For the target series the restricted model has an intercept and its own
    ``lag_order`` lags; the unrestricted model adds ``lag_order`` lags of the
    other series.  Both directions use observations ``lag_order..n-1``.

    Returns
    -------
    (x_to_y, y_to_x) : pair of GrangerReport
    """
    if lag_order < 1:
        raise ValueError("lag_order must be positive")
    xv, yv = _check_pair(x, y, 3 * lag_order + 11)
    xn, yn = _name(x, "x"), _name(y, "y")
    out = []
    for direction, cause, effect, tv, ov in (
        ("x_to_y", xn, yn, yv, xv),
        ("y_to_x", yn, xn, xv, yv),
    ):
        fstat, pval, m = _one_direction(tv, ov, lag_order)
        out.append(
            GrangerReport(
                direction=direction,
                cause=cause,
                effect=effect,
                lag_order=lag_order,
                f_statistic=float(fstat),
                p_value=float(pval),
                reject_noncausality=bool(pval < level),
                n_effective=m,
                level=level,
            )
        )
    return out[0], out[1]


def select_var_lag(x: Series | np.ndarray, y: Series | np.ndarray, max_lag: int) -> int:
    """AIC-minimising lag of the bivariate VAR over ``1..max_lag``.

    Uses the Gaussian system log-likelihood
    ``-m/2 (2 ln 2pi + ln det(Sigma) + 2)`` with ``Sigma`` the MLE residual
    covariance, on the common sample ``max_lag..n-1``; ``k = 2 (1 + 2p)``.
    Ties go to the smaller lag.
    """
    if max_lag < 1:
        raise ValueError("max_lag must be positive")
    xv, yv = _check_pair(x, y, 3 * max_lag + 11)
    if max_lag == 1:
        return 1
    m = xv.shape[0] - max_lag
    targets = np.column_stack([yv[max_lag:], xv[max_lag:]])
    crit = []
    for p in range(1, max_lag + 1):
        regs = np.column_stack([
            lag_matrix(yv, max_lag, max_lag)[:, :p],
            lag_matrix(xv, max_lag, max_lag)[:, :p],
        ])
        resid = np.column_stack([np.asarray(ols(targets[:, i], regs).residuals)
                                 for i in range(2)])
        sigma = resid.T @ resid / m
        _, logdet = np.linalg.slogdet(sigma)
        ll = -0.5 * m * (2.0 * math.log(2.0 * math.pi) + logdet + 2.0)
        crit.append(aic(ll, 2 * (1 + 2 * p)))
    return int(np.argmin(crit)) + 1
