"""Ordinary least squares and information criteria.

Every hypothesis test in the package (ARCH LM, ADF, Granger) is built on
:func:`ols`.  The solve goes through a QR factorisation; a regressor matrix is
declared rank deficient when some ``|R_ii|`` falls below ``1e-10`` times the
largest one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_triangular

from perpstat.distributions import f_sf, t_sf_two_sided
from perpstat.errors import RankDeficient, Underdetermined
from perpstat.series import Series, as_array

__all__ = [
    "InformationCriteria",
    "RegressionFit",
    "aic",
    "aic_per_obs",
    "gaussian_loglik",
    "information_criteria",
    "lag_matrix",
    "nested_ssr",
    "ols",
    "sic_hqc",
    "sic_hqc_per_obs",
]

RANK_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class RegressionFit:
    """Result of :func:`ols`.

    ``coefficients`` lists the intercept first when one was included.
    """

    coefficients: np.ndarray
    standard_errors: np.ndarray
    pvalues: np.ndarray
    residuals: Series | np.ndarray
    r_squared: float
    f_statistic: float
    f_pvalue: float
    log_likelihood: float
    ssr: float
    n_obs: int
    n_params: int
    include_intercept: bool

    @property
    def df_resid(self) -> int:
        return self.n_obs - self.n_params

    @property
    def tvalues(self) -> np.ndarray:
        with np.errstate(divide="ignore", invalid="ignore"):
            return self.coefficients / self.standard_errors


def gaussian_loglik(ssr: float, n: int) -> float:
    """Gaussian log-likelihood with the error variance at its MLE ``ssr / n``."""
    if ssr <= 0.0:
        return math.inf
    return -0.5 * n * (math.log(2.0 * math.pi) + math.log(ssr / n) + 1.0)


def _design(regressors: np.ndarray | None, n: int, include_intercept: bool) -> np.ndarray:
    if regressors is None:
        x = np.empty((n, 0))
    else:
        x = np.asarray(regressors, dtype=np.float64)
        if x.ndim == 1:
            x = x[:, None]
        if x.shape[0] != n:
            raise ValueError(f"regressors have {x.shape[0]} rows, expected {n}")
    if include_intercept:
        x = np.column_stack([np.ones(n), x])
    return x


def _qr_checked(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    n, k = x.shape
    if k == 0:
        raise ValueError("regression has no regressors")
    if n <= k:
        raise Underdetermined(f"{n} observations for {k} parameters")
    q, r = np.linalg.qr(x)
    # judge rank on unit-norm columns so that regressor scale does not matter
    norms = np.linalg.norm(x, axis=0)
    diag = np.abs(np.diag(r)) / np.where(norms > 0, norms, 1.0)
    if not np.all(np.isfinite(diag)) or diag.min() <= RANK_TOL:
        raise RankDeficient("regressor matrix is not of full column rank")
    return q, r


def ols(
    y: Series | np.ndarray,
    regressors: np.ndarray | None = None,
    include_intercept: bool = True,
) -> RegressionFit:
    """Least-squares fit of ``y`` on ``regressors`` (plus an intercept).

    The F-statistic tests all non-intercept coefficients jointly zero.  With
    an intercept, R^2 is centred; without one it is uncentred.  A constant
    ``y`` gets R^2 = 0.

    Raises
    ------
    Underdetermined
        If there are no more observations than parameters.
    RankDeficient
        If the regressors are collinear.
    """
    yv = as_array(y)
    n = yv.shape[0]
    x = _design(regressors, n, include_intercept)
    q, r = _qr_checked(x)
    k = x.shape[1]
    beta = solve_triangular(r, q.T @ yv)
    resid = yv - x @ beta
    ssr = float(resid @ resid)
    df_resid = n - k

    rinv = solve_triangular(r, np.eye(k))
    s2 = ssr / df_resid
    se = np.sqrt(s2 * np.sum(rinv * rinv, axis=1))
    with np.errstate(divide="ignore", invalid="ignore"):
        tvals = beta / se
    pvals = np.array([t_sf_two_sided(float(t), df_resid) if np.isfinite(t) else 0.0
                      for t in tvals])

    if include_intercept:
        centred = yv - yv.mean()
        tss = float(centred @ centred)
    else:
        tss = float(yv @ yv)
    r2 = 0.0 if tss <= 0.0 else min(1.0, max(0.0, 1.0 - ssr / tss))

    df_model = k - 1 if include_intercept else k
    if df_model == 0 or tss <= 0.0:
        fstat, fp = 0.0, 1.0
    elif ssr <= 1e-28 * tss:
        fstat, fp = math.inf, 0.0
    else:
        fstat = (max(tss - ssr, 0.0) / df_model) / (ssr / df_resid)
        fp = f_sf(fstat, df_model, df_resid)

    residuals: Series | np.ndarray = resid
    if isinstance(y, Series):
        residuals = y.derive(resid)
    return RegressionFit(
        coefficients=beta,
        standard_errors=se,
        pvalues=pvals,
        residuals=residuals,
        r_squared=r2,
        f_statistic=fstat,
        f_pvalue=fp,
        log_likelihood=gaussian_loglik(ssr, n),
        ssr=ssr,
        n_obs=n,
        n_params=k,
        include_intercept=include_intercept,
    )


def nested_ssr(y: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Residual sums of squares of the regressions of ``y`` on the first
    ``1, 2, ..., k`` columns of ``x``, all from one QR factorisation."""
    q, _ = _qr_checked(x)
    qty = q.T @ y
    total = float(y @ y)
    return np.maximum(total - np.cumsum(qty * qty), 0.0)


def lag_matrix(x: np.ndarray, lags: int, start: int) -> np.ndarray:
    """Columns ``x[t-1], ..., x[t-lags]`` for ``t = start, ..., len(x) - 1``."""
    n = x.shape[0]
    if start < lags:
        raise ValueError("start must be at least the number of lags")
    if lags == 0:
        return np.empty((n - start, 0))
    return np.column_stack([x[start - j:n - j] for j in range(1, lags + 1)])


def aic(log_likelihood: float, k: int) -> float:
    return 2.0 * k - 2.0 * log_likelihood


def aic_per_obs(log_likelihood: float, k: int, n: int) -> float:
    return aic(log_likelihood, k) / n


def sic_hqc(log_likelihood: float, k: int, n: int) -> tuple[float, float]:
    """Schwarz and Hannan-Quinn criteria ``k ln n - 2 logL`` and
    ``2k ln ln n - 2 logL``."""
    if n < 2:
        raise ValueError("n must be at least 2")
    sic = k * math.log(n) - 2.0 * log_likelihood
    hqc = 2.0 * k * math.log(math.log(n)) - 2.0 * log_likelihood
    return sic, hqc


def sic_hqc_per_obs(log_likelihood: float, k: int, n: int) -> tuple[float, float]:
    sic, hqc = sic_hqc(log_likelihood, k, n)
    return sic / n, hqc / n


@dataclass(frozen=True)
class InformationCriteria:
    aic: float
    sic: float
    hqc: float
    aic_per_obs: float
    sic_per_obs: float
    hqc_per_obs: float


def information_criteria(log_likelihood: float, k: int, n: int) -> InformationCriteria:
    a = aic(log_likelihood, k)
    s, h = sic_hqc(log_likelihood, k, n)
    return InformationCriteria(a, s, h, a / n, s / n, h / n)
