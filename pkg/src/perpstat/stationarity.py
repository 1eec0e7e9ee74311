"""Augmented Dickey-Fuller unit-root test.

Critical values come from MacKinnon's (2010) response surfaces,
``c(T) = b0 + b1/T + b2/T^2 + b3/T^3`` with T the number of observations in
the test regression.  P-values use MacKinnon's (1994) normal-CDF polynomial
approximation of the asymptotic distribution.  Both sets of coefficients are
for a single series (no cointegrating regressors):

    MacKinnon, J.G. (1994) "Approximate asymptotic distribution functions for
    unit-root and cointegration tests", JBES 12, 167-176.
    MacKinnon, J.G. (2010) "Critical values for cointegration tests", Queen's
    Economics Department Working Paper 1227, Table 2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

from perpstat.distributions import norm_cdf
from perpstat.errors import DegenerateSeries, SeriesTooShort
from perpstat.regression import aic, gaussian_loglik, lag_matrix, nested_ssr, ols
from perpstat.series import Series, as_array

__all__ = [
    "AdfReport",
    "SPEC_LABELS",
    "adf_test",
    "default_max_lag",
    "integration_order",
    "mackinnon_critical_values",
    "mackinnon_pvalue",
]

AdfSpec = Literal["none", "constant", "constant_and_trend"]
SPECS: tuple[AdfSpec, ...] = ("constant", "constant_and_trend", "none")
SPEC_LABELS = {
    "none": "None",
    "constant": "Constant",
    "constant_and_trend": "Constant and Linear Trend",
}
LEVEL_KEYS = {0.01: "1%", 0.05: "5%", 0.10: "10%"}

# rows: 1%, 5%, 10%; columns: b0 (asymptotic), b1, b2, b3
_CRIT_2010 = {
    "none": (
        (-2.56574, -2.2358, -3.627, 0.0),
        (-1.94100, -0.2686, -3.365, 31.223),
        (-1.61682, 0.2656, -2.714, 25.364),
    ),
    "constant": (
        (-3.43035, -6.5393, -16.786, -79.433),
        (-2.86154, -2.8903, -4.234, -40.040),
        (-2.56677, -1.5384, -2.809, 0.0),
    ),
    "constant_and_trend": (
        (-3.95877, -9.0531, -28.428, -134.155),
        (-3.41049, -4.3904, -9.036, -45.374),
        (-3.12705, -2.5856, -3.925, -22.380),
    ),
}

# tau_star splits the small-p and large-p polynomials; outside
# [tau_min, tau_max] the p-value is 0 or 1.
_P_1994 = {
    "none": dict(
        star=-1.04, min=-19.04, max=math.inf,
        small=(0.6344, 1.2378, 0.032496),
        large=(0.4797, 0.93557, -0.06999, 0.033066),
    ),
    "constant": dict(
        star=-1.61, min=-18.83, max=2.74,
        small=(2.1659, 1.4412, 0.038269),
        large=(1.7339, 0.93202, -0.12745, -0.010368),
    ),
    "constant_and_trend": dict(
        star=-2.89, min=-16.18, max=0.7,
        small=(3.2512, 1.6047, 0.049588),
        large=(2.5261, 0.61654, -0.37956, -0.060285),
    ),
}


def mackinnon_critical_values(spec: AdfSpec, nobs: int) -> dict[str, float]:
    """1%, 5% and 10% critical values for a regression with ``nobs`` rows."""
    rows = _CRIT_2010[spec]
    t = float(nobs)
    return {
        key: b0 + b1 / t + b2 / t**2 + b3 / t**3
        for key, (b0, b1, b2, b3) in zip(("1%", "5%", "10%"), rows)
    }


def mackinnon_pvalue(tau: float, spec: AdfSpec) -> float:
    c = _P_1994[spec]
    if tau > c["max"]:
        return 1.0
    if tau < c["min"]:
        return 0.0
    coefs = c["small"] if tau <= c["star"] else c["large"]
    z = sum(b * tau**i for i, b in enumerate(coefs))
    return norm_cdf(z)


@dataclass(frozen=True)
class AdfReport:
    spec: str
    lag_order: int
    t_statistic: float
    critical_values: dict[str, float]
    p_value: float
    reject_unit_root: bool
    differencing_level: int
    n_obs: int
    n_params: int
    level: float


def default_max_lag(n: int) -> int:
    """Schwert's rule ``ceil(12 (n/100)^(1/4))``, shrunk so that at least 25
    observations remain."""
    if n < 26:
        raise SeriesTooShort(f"ADF needs at least 26 observations, got {n}")
    return max(0, min(int(math.ceil(12.0 * (n / 100.0) ** 0.25)), n - 25))


def _deterministic(spec: AdfSpec, start: int, m: int) -> np.ndarray:
    if spec == "none":
        return np.empty((m, 0))
    if spec == "constant":
        return np.ones((m, 1))
    return np.column_stack([np.ones(m), np.arange(start + 1, start + m + 1, dtype=float)])


def _design(x: np.ndarray, dx: np.ndarray, spec: AdfSpec, lags: int, start: int):
    y = dx[start:]
    m = y.shape[0]
    level = x[start:start + m]
    cols = np.column_stack([level, _deterministic(spec, start, m), lag_matrix(dx, lags, start)])
    return y, cols


def adf_test(
    s: Series | np.ndarray,
    spec: AdfSpec = "constant",
    max_lag: int | None = None,
    level: float = 0.05,
    difference: int = 0,
    autolag: bool = True,
) -> AdfReport:
    """ADF regression of ``diff(s)`` on the lagged level, lagged differences
    and the deterministic terms of ``spec``.

    Parameters
    ----------
    s : Series or ndarray
        Series to test.
    spec : {"none", "constant", "constant_and_trend"}
        Deterministic terms.
    max_lag : int, optional
        Largest number of lagged differences.  Defaults to Schwert's rule.
    level : {0.01, 0.05, 0.10}
        Level at which ``reject_unit_root`` is decided.
    difference : int
        Difference the input this many times before testing.
    autolag : bool
        Choose the lag in ``0..max_lag`` by AIC (on a common sample, ties to
        the smaller lag).  Otherwise use ``max_lag`` lags.
    """
    if spec not in _CRIT_2010:
        raise ValueError(f"unknown ADF spec {spec!r}")
    key = LEVEL_KEYS.get(round(level, 10))
    if key is None:
        raise ValueError("level must be one of 0.01, 0.05, 0.10")
    x = as_array(s)
    for _ in range(difference):
        x = np.diff(x)
    n = x.shape[0]
    if max_lag is None:
        max_lag = default_max_lag(n)
    if max_lag < 0:
        raise ValueError("max_lag must be non-negative")
    if n < 25 + max_lag:
        raise SeriesTooShort(f"ADF with max_lag={max_lag} needs {25 + max_lag} observations")
    if np.ptp(x) == 0.0:
        raise DegenerateSeries("cannot test a constant series for a unit root")
    dx = np.diff(x)
    n_det = {"none": 0, "constant": 1, "constant_and_trend": 2}[spec]

    lag = max_lag
    if autolag and max_lag > 0:
        y, cols = _design(x, dx, spec, max_lag, max_lag)
        ssr = nested_ssr(y, cols)
        m = y.shape[0]
        crit = []
        for cand in range(max_lag + 1):
            k = 1 + n_det + cand
            crit.append(aic(gaussian_loglik(float(ssr[k - 1]), m), k))
        lag = int(np.argmin(crit))

    y, cols = _design(x, dx, spec, lag, lag)
    fit = ols(y, cols, include_intercept=False)
    tstat = float(fit.tvalues[0])
    cvs = mackinnon_critical_values(spec, fit.n_obs)
    return AdfReport(
        spec=spec,
        lag_order=lag,
        t_statistic=tstat,
        critical_values=cvs,
        p_value=float(mackinnon_pvalue(tstat, spec)),
        reject_unit_root=bool(tstat < cvs[key]),
        differencing_level=difference,
        n_obs=fit.n_obs,
        n_params=fit.n_params,
        level=level,
    )


def integration_order(
    s: Series | np.ndarray,
    spec: AdfSpec = "constant",
    max_lag: int | None = None,
    level: float = 0.05,
) -> int:
    """0 if the level is stationary, 1 if the first difference is; 2 means
    "at least 2" (higher orders are not probed)."""
    if adf_test(s, spec, max_lag, level, difference=0).reject_unit_root:
        return 0
    if adf_test(s, spec, max_lag, level, difference=1).reject_unit_root:
        return 1
    return 2
