"""Engle's Lagrange-multiplier test for ARCH effects."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from perpstat.distributions import chi2_sf
from perpstat.errors import DegenerateSeries, SeriesTooShort
from perpstat.regression import aic, gaussian_loglik, lag_matrix, nested_ssr, ols
from perpstat.series import Series, as_array

__all__ = ["ArchTestReport", "arch_lm_test", "demean", "select_arch_lag"]


@dataclass(frozen=True)
class ArchTestReport:
    """Outcome of :func:`arch_lm_test`.

    ``constant`` and ``constant_pvalue`` refer to the intercept of the
    auxiliary regression of squared residuals on their own lags.
    """

    lag_order: int
    lm_statistic: float
    lm_pvalue: float
    f_statistic: float
    f_pvalue: float
    alpha_estimates: tuple[float, ...]
    constant: float
    constant_pvalue: float
    n_effective: int
    level: float
    reject_null: bool


def demean(s: Series, ar_order: int = 0) -> Series:
    """Residuals from a constant-mean (``ar_order=0``) or AR(k) mean model."""
    if ar_order == 0:
        return s.derive(s.values - s.values.mean())
    if len(s) <= 2 * ar_order + 1:
        raise SeriesTooShort("series too short for the requested AR mean")
    v = s.values
    fit = ols(v[ar_order:], lag_matrix(v, ar_order, ar_order))
    return s.derive(np.asarray(fit.residuals), s.timestamps[ar_order:])


def _squared(residuals: Series | np.ndarray, min_len: int) -> np.ndarray:
    e = as_array(residuals)
    if e.shape[0] < min_len:
        raise SeriesTooShort(f"need more than {min_len - 1} residuals, got {e.shape[0]}")
    e2 = e * e
    if np.ptp(e) == 0.0 or np.ptp(e2) == 0.0:
        raise DegenerateSeries("residuals have zero variance")
    return e2


def arch_lm_test(residuals: Series | np.ndarray, lag_order: int = 1,
                 level: float = 0.05) -> ArchTestReport:
    """Regress squared residuals on a constant and ``lag_order`` of their own
    lags.  LM = n_effective * R^2 against chi-square(lag_order), with
    ``n_effective = n - lag_order``; the regression F-statistic is reported
    alongside.

    Parameters
    ----------
    residuals : Series or ndarray
        Mean-adjusted series (see :func:`demean`).
    lag_order : int
        Number of lagged squared residuals.
    level : float
        Significance level for ``reject_null``.
    """
    if lag_order < 1:
        raise ValueError("lag_order must be positive")
    e2 = _squared(residuals, lag_order + 11)
    fit = ols(e2[lag_order:], lag_matrix(e2, lag_order, lag_order))
    n_eff = fit.n_obs
    lm = n_eff * fit.r_squared
    lm_p = chi2_sf(lm, lag_order)
    return ArchTestReport(
        lag_order=lag_order,
        lm_statistic=float(lm),
        lm_pvalue=float(lm_p),
        f_statistic=float(fit.f_statistic),
        f_pvalue=float(fit.f_pvalue),
        alpha_estimates=tuple(float(a) for a in fit.coefficients[1:]),
        constant=float(fit.coefficients[0]),
        constant_pvalue=float(fit.pvalues[0]),
        n_effective=n_eff,
        level=level,
        reject_null=bool(lm_p < level),
    )


def select_arch_lag(residuals: Series | np.ndarray, max_lag: int) -> int:
    """AIC-minimising lag order in ``1..max_lag`` for the auxiliary regression.

    All candidates use the same sample (the first ``max_lag`` observations are
    dropped) so their likelihoods are comparable.  Ties go to the smaller lag.
    """
    if max_lag < 1:
        raise ValueError("max_lag must be positive")
    e2 = _squared(residuals, max_lag + 11)
    if max_lag == 1:
        return 1
    y = e2[max_lag:]
    x = np.column_stack([np.ones(y.shape[0]), lag_matrix(e2, max_lag, max_lag)])
    ssr = nested_ssr(y, x)
    m = y.shape[0]
    crit = [aic(gaussian_loglik(float(ssr[p]), m), p + 1) for p in range(1, max_lag + 1)]
    return int(np.argmin(crit)) + 1
