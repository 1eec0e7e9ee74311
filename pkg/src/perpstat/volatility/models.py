"""GARCH-family volatility models with Gaussian innovations.

Families
--------
garch   sigma2_t = omega + alpha e_{t-1}^2 + beta sigma2_{t-1}
tarch   adds gamma e_{t-1}^2 1[e_{t-1} < 0]  (GJR form)
egarch  ln sigma2_t = omega + alpha z_{t-1} + gamma (|z_{t-1}| - E|z|) + beta ln sigma2_{t-1}
        (``egarch_form="literal"`` uses alpha z_{t-1}^2 instead of alpha z_{t-1})
parch   sigma_t^delta = omega + alpha (|e_{t-1}| - gamma e_{t-1})^delta + beta sigma_{t-1}^delta
igarch  garch with beta = 1 - alpha

Every recursion starts from the sample variance of the residuals.  The inner
loops live in the compiled ``_recursions`` extension; ``recursions_python``
is used when it is missing or when ``PERPSTAT_PURE_PYTHON`` is set.
"""

from __future__ import annotations

import itertools
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np
from scipy.optimize import minimize
from scipy.special import expit, gammaln, logit

from perpstat.errors import DegenerateSeries, InvalidParams, NotConverged, SeriesTooShort
from perpstat.regression import information_criteria
from perpstat.series import Series

if os.environ.get("PERPSTAT_PURE_PYTHON"):
    from perpstat.volatility import recursions_python as rec
else:
    try:
        from perpstat.volatility import _recursions as rec
    except ImportError:
        from perpstat.volatility import recursions_python as rec

BACKEND = "python" if rec.__name__.endswith("recursions_python") else "compiled"

__all__ = [
    "BACKEND",
    "FAMILIES",
    "LABELS",
    "ModelComparison",
    "VarianceForecast",
    "VolatilityFit",
    "compare",
    "fit",
    "forecast",
    "likelihood_grid_excess",
    "log_likelihood",
    "simulate",
]

FAMILIES = ("garch", "tarch", "egarch", "parch", "igarch")
LABELS = {
    "garch": "GARCH(1,1)",
    "tarch": "TARCH",
    "egarch": "EGARCH(1,1)",
    "parch": "PARCH(1,1,1)",
    "igarch": "IGARCH(1,1)",
}
ABS_Z_MEAN = math.sqrt(2.0 / math.pi)
MIN_OBS = 200
BURN_IN = 500
_EPS = 1e-8
_BAD = 1e10


def _clip01(x: float) -> float:
    return min(max(x, _EPS), 1.0 - _EPS)


def abs_moment(gamma: float, delta: float) -> float:
    """E(|z| - gamma z)^delta for standard normal z."""
    e_abs = math.exp(0.5 * delta * math.log(2.0) + gammaln(0.5 * (delta + 1.0))) / math.sqrt(math.pi)
    return 0.5 * ((1.0 - gamma) ** delta + (1.0 + gamma) ** delta) * e_abs


class _Family:
    """Parameterisation of one family.

    ``theta`` is the vector of free parameters in natural units, ``u`` its
    unconstrained image used by the optimiser.
    """

    name: str
    free_names: tuple[str, ...]
    kernel: str

    @property
    def k(self) -> int:
        return len(self.free_names)

    def kernel_params(self, theta: np.ndarray) -> np.ndarray:
        return np.asarray(theta, dtype=np.float64)

    def kernel_jacobian(self, theta: np.ndarray) -> np.ndarray:
        return np.eye(self.k)

    def named(self, theta: np.ndarray) -> dict[str, float]:
        return {n: float(v) for n, v in zip(self.free_names, theta)}

    def from_named(self, params: Mapping[str, float]) -> np.ndarray:
        missing = [n for n in self.free_names if n not in params]
        if missing:
            raise InvalidParams(f"{self.name} needs parameters {missing}")
        return np.array([float(params[n]) for n in self.free_names])


class _Garch(_Family):
    name = "garch"
    free_names = ("omega", "alpha", "beta")
    kernel = "gjr"

    def transform(self, u):
        om, p, w = math.exp(u[0]), expit(u[1]), expit(u[2])
        dp, dw = p * (1 - p), w * (1 - w)
        theta = np.array([om, p * w, p * (1 - w)])
        jac = np.array([[om, 0, 0], [0, dp * w, p * dw], [0, dp * (1 - w), -p * dw]])
        return theta, jac

    def untransform(self, theta):
        om, a, b = theta
        p = _clip01(a + b)
        w = _clip01(a / (a + b)) if a + b > 0 else 0.5
        return np.array([math.log(om), logit(p), logit(w)])

    def kernel_params(self, theta):
        return np.array([theta[0], theta[1], 0.0, theta[2]])

    def kernel_jacobian(self, theta):
        return np.array([[1.0, 0, 0], [0, 1, 0], [0, 0, 0], [0, 0, 1]])

    def admissible(self, theta, literal=False):
        om, a, b = theta
        return om > 0 and a >= 0 and b >= 0 and a + b < 1

    def starts(self, literal=False):
        for p, share in itertools.product((0.5, 0.8, 0.9, 0.97), (0.1, 0.3)):
            yield np.array([1 - p, p * share, p * (1 - share)])

    def rescale(self, theta, sd):
        return np.array([theta[0] * sd * sd, theta[1], theta[2]])

    def persistence(self, theta, literal=False):
        return theta[1] + theta[2]

    def initial_variance(self, theta, literal=False):
        return theta[0] / max(1.0 - self.persistence(theta), _EPS)

    def forecast(self, theta, e_last, s2_last, horizon, literal=False):
        kp = self.kernel_params(theta)
        om, a, g, b = kp
        neg = e_last * e_last if e_last < 0 else 0.0
        out = np.empty(horizon)
        out[0] = om + a * e_last * e_last + g * neg + b * s2_last
        pers = a + 0.5 * g + b
        for h in range(1, horizon):
            out[h] = om + pers * out[h - 1]
        return out


class _Igarch(_Garch):
    name = "igarch"
    free_names = ("omega", "alpha")

    def transform(self, u):
        om, a = math.exp(u[0]), expit(u[1])
        return np.array([om, a]), np.diag([om, a * (1 - a)])

    def untransform(self, theta):
        return np.array([math.log(theta[0]), logit(_clip01(theta[1]))])

    def kernel_params(self, theta):
        return np.array([theta[0], theta[1], 0.0, 1.0 - theta[1]])

    def kernel_jacobian(self, theta):
        return np.array([[1.0, 0], [0, 1], [0, 0], [0, -1]])

    def named(self, theta):
        return {"omega": float(theta[0]), "alpha": float(theta[1]), "beta": float(1.0 - theta[1])}

    def from_named(self, params):
        theta = super().from_named(params)
        if "beta" in params and abs(params["beta"] + theta[1] - 1.0) > 1e-12:
            raise InvalidParams("igarch requires alpha + beta = 1")
        return theta

    def admissible(self, theta, literal=False):
        return theta[0] > 0 and 0 < theta[1] < 1

    def starts(self, literal=False):
        for a, om in itertools.product((0.03, 0.08, 0.15), (0.005, 0.05)):
            yield np.array([om, a])

    def rescale(self, theta, sd):
        return np.array([theta[0] * sd * sd, theta[1]])

    def persistence(self, theta, literal=False):
        return 1.0

    def initial_variance(self, theta, literal=False):
        return theta[0] / theta[1]


class _Tarch(_Garch):
    name = "tarch"
    free_names = ("omega", "alpha", "gamma", "beta")

    def transform(self, u):
        om, p = math.exp(u[0]), expit(u[1])
        v = np.array([u[2], u[3], 0.0])
        w = np.exp(v - v.max())
        w /= w.sum()
        dp = p * (1 - p)
        theta = np.array([om, p * w[0], 2 * p * w[1], p * w[2]])
        jac = np.zeros((4, 4))
        jac[0, 0] = om
        scale = (1.0, 2.0, 1.0)
        for row, i in ((1, 0), (2, 1), (3, 2)):
            jac[row, 1] = scale[i] * dp * w[i]
            for col, j in ((2, 0), (3, 1)):
                jac[row, col] = scale[i] * p * w[i] * ((1.0 if i == j else 0.0) - w[j])
        return theta, jac

    def untransform(self, theta):
        om, a, g, b = theta
        p = _clip01(a + 0.5 * g + b)
        w = np.maximum(np.array([a, 0.5 * g, b]) / max(a + 0.5 * g + b, _EPS), _EPS)
        w /= w.sum()
        return np.array([math.log(om), logit(p), math.log(w[0] / w[2]), math.log(w[1] / w[2])])

    def kernel_params(self, theta):
        return np.asarray(theta, dtype=np.float64)

    def kernel_jacobian(self, theta):
        return np.eye(4)

    def admissible(self, theta, literal=False):
        om, a, g, b = theta
        return om > 0 and a >= 0 and g >= 0 and b >= 0 and a + 0.5 * g + b < 1

    def starts(self, literal=False):
        shares = ((0.1, 0.05, 0.85), (0.05, 0.1, 0.85), (0.2, 0.1, 0.7))
        for p, (sa, sg, sb) in itertools.product((0.5, 0.8, 0.9, 0.97), shares):
            yield np.array([1 - p, p * sa, 2 * p * sg, p * sb])

    def rescale(self, theta, sd):
        out = np.array(theta, dtype=float)
        out[0] *= sd * sd
        return out

    def persistence(self, theta, literal=False):
        return theta[1] + 0.5 * theta[2] + theta[3]


class _Egarch(_Family):
    name = "egarch"
    free_names = ("omega", "alpha", "gamma", "beta")
    kernel = "egarch"

    def transform(self, u):
        b = math.tanh(u[3])
        return np.array([u[0], u[1], u[2], b]), np.diag([1.0, 1.0, 1.0, 1.0 - b * b])

    def untransform(self, theta):
        b = min(max(theta[3], -1 + 1e-10), 1 - 1e-10)
        return np.array([theta[0], theta[1], theta[2], math.atanh(b)])

    def admissible(self, theta, literal=False):
        return abs(theta[3]) < 1

    def starts(self, literal=False):
        for b, a, g in itertools.product((0.5, 0.8, 0.95), (-0.1, 0.0, 0.1), (0.1, 0.3)):
            yield np.array([-a if literal else 0.0, a, g, b])

    def rescale(self, theta, sd):
        out = np.array(theta, dtype=float)
        out[0] += (1.0 - theta[3]) * 2.0 * math.log(sd)
        return out

    def _mean_logvar(self, theta, literal):
        om, a, _, b = theta
        return (om + (a if literal else 0.0)) / (1.0 - b)

    def initial_variance(self, theta, literal=False):
        return math.exp(self._mean_logvar(theta, literal))

    def forecast(self, theta, e_last, s2_last, horizon, literal=False):
        om, a, g, b = theta
        z = e_last / math.sqrt(s2_last)
        lead = z * z if literal else z
        h = np.empty(horizon)
        h[0] = om + a * lead + g * (abs(z) - ABS_Z_MEAN) + b * math.log(s2_last)
        drift = om + (a if literal else 0.0)
        for i in range(1, horizon):
            h[i] = drift + b * h[i - 1]
        return np.exp(h)


class _Parch(_Family):
    name = "parch"
    free_names = ("omega", "alpha", "gamma", "beta", "delta")
    kernel = "parch"
    delta_min, delta_max = 0.2, 4.0

    def transform(self, u):
        om, p, w = math.exp(u[0]), expit(u[1]), expit(u[2])
        g, q = math.tanh(u[3]), expit(u[4])
        span = self.delta_max - self.delta_min
        dp, dw = p * (1 - p), w * (1 - w)
        theta = np.array([om, p * w, g, p * (1 - w), self.delta_min + span * q])
        jac = np.zeros((5, 5))
        jac[0, 0] = om
        jac[1, 1], jac[1, 2] = dp * w, p * dw
        jac[2, 3] = 1 - g * g
        jac[3, 1], jac[3, 2] = dp * (1 - w), -p * dw
        jac[4, 4] = span * q * (1 - q)
        return theta, jac

    def untransform(self, theta):
        om, a, g, b, d = theta
        p = _clip01(a + b)
        w = _clip01(a / (a + b)) if a + b > 0 else 0.5
        g = min(max(g, -1 + 1e-10), 1 - 1e-10)
        q = _clip01((d - self.delta_min) / (self.delta_max - self.delta_min))
        return np.array([math.log(om), logit(p), logit(w), math.atanh(g), logit(q)])

    def admissible(self, theta, literal=False):
        om, a, g, b, d = theta
        return (om > 0 and a >= 0 and b >= 0 and a + b < 1 and abs(g) < 1
                and self.delta_min < d < self.delta_max)

    def starts(self, literal=False):
        for p, share, g, d in itertools.product((0.8, 0.95), (0.1, 0.2), (0.0, 0.3), (1.0, 2.0)):
            a, b = p * share, p * (1 - share)
            yield np.array([max(1.0 - a * abs_moment(g, d) - b, 0.01), a, g, b, d])

    def rescale(self, theta, sd):
        out = np.array(theta, dtype=float)
        out[0] *= sd ** theta[4]
        return out

    def persistence(self, theta, literal=False):
        _, a, g, b, d = theta
        return a * abs_moment(g, d) + b

    def initial_variance(self, theta, literal=False):
        om, _, _, b, d = theta
        q = self.persistence(theta)
        s = om / (1.0 - q) if q < 1 else om / max(1.0 - b, _EPS)
        return s ** (2.0 / d)

    def forecast(self, theta, e_last, s2_last, horizon, literal=False):
        om, a, g, b, d = theta
        x = abs(e_last) - g * e_last
        s = np.empty(horizon)
        s[0] = om + a * (x ** d if x > 0 else 0.0) + b * s2_last ** (0.5 * d)
        pers = self.persistence(theta)
        for i in range(1, horizon):
            s[i] = om + pers * s[i - 1]
        return s ** (2.0 / d)


_FAMILIES: dict[str, _Family] = {
    f.name: f for f in (_Garch(), _Tarch(), _Egarch(), _Parch(), _Igarch())
}


def _family(name: str) -> _Family:
    try:
        return _FAMILIES[name.lower()]
    except KeyError:
        raise ValueError(f"unknown family {name!r}; choose from {FAMILIES}") from None


def _check_form(egarch_form: str) -> bool:
    if egarch_form not in ("nelson", "literal"):
        raise ValueError("egarch_form must be 'nelson' or 'literal'")
    return egarch_form == "literal"


def _kernel_loglik(fam, kp, resids, backcast, literal, sigma2, grad):
    if fam.kernel == "gjr":
        return rec.gjr_loglik(kp, resids, backcast, sigma2, grad)
    if fam.kernel == "egarch":
        return rec.egarch_loglik(kp, resids, backcast, literal, sigma2, grad)
    return rec.parch_loglik(kp, resids, backcast, sigma2, grad)


def log_likelihood(
    family: str,
    params: Mapping[str, float] | Sequence[float] | np.ndarray,
    resids: Series | np.ndarray,
    backcast: float | None = None,
    egarch_form: str = "nelson",
    gradient: bool = False,
):
    """Gaussian log-likelihood of ``resids`` under ``family`` at ``params``.

    With ``gradient=True`` also returns the analytic derivative with respect
    to the free parameters (in ``free_names`` order).
    """
    fam = _family(family)
    literal = _check_form(egarch_form)
    theta = fam.from_named(params) if isinstance(params, Mapping) else np.asarray(params, float)
    e = np.ascontiguousarray(resids.values if isinstance(resids, Series) else resids,
                             dtype=np.float64)
    bc = float(np.mean(e * e)) if backcast is None else float(backcast)
    sigma2 = np.empty(e.shape[0])
    if not gradient:
        return _kernel_loglik(fam, fam.kernel_params(theta), e, bc, literal, sigma2, None)
    kgrad = np.empty(fam.kernel_params(theta).shape[0])
    ll = _kernel_loglik(fam, fam.kernel_params(theta), e, bc, literal, sigma2, kgrad)
    return ll, fam.kernel_jacobian(theta).T @ kgrad


@dataclass(frozen=True)
class VolatilityFit:
    """Maximum-likelihood fit of one family.

    ``n_params`` counts the estimated mean when the series was demeaned.
    Criteria come raw and divided by ``n_obs``.
    """

    family: str
    params: dict[str, float]
    log_likelihood: float
    n_obs: int
    n_params: int
    aic: float
    sic: float
    hqc: float
    aic_per_obs: float
    sic_per_obs: float
    hqc_per_obs: float
    conditional_variance: Series
    residuals: Series
    mean: float
    converged: bool
    iterations: int
    egarch_form: str = "nelson"

    @property
    def label(self) -> str:
        return LABELS[self.family]

    @property
    def backcast(self) -> float:
        e = self.residuals.values
        return float(np.mean(e * e))


@dataclass(frozen=True)
class VarianceForecast:
    family: str
    horizon: int
    variances: tuple[float, ...]
    origin_timestamp: np.datetime64
    timestamps: tuple[np.datetime64, ...] = field(default=())


@dataclass(frozen=True)
class ModelComparison:
    """Converged fits ranked by AIC, with the SIC and HQC orderings."""

    ranked: list[VolatilityFit]
    sic_ranking: list[str]
    hqc_ranking: list[str]
    excluded: dict[str, str]

    @property
    def best(self) -> VolatilityFit:
        return self.ranked[0]


class _Objective:
    def __init__(self, fam: _Family, z: np.ndarray, literal: bool):
        self.fam, self.z, self.literal = fam, z, literal
        self.n = z.shape[0]
        self.sigma2 = np.empty(self.n)
        self.kgrad = np.empty(fam.kernel_params(np.ones(fam.k)).shape[0])

    def value(self, u: np.ndarray) -> float:
        theta, _ = self.fam.transform(u)
        ll = _kernel_loglik(self.fam, self.fam.kernel_params(theta), self.z, 1.0,
                            self.literal, self.sigma2, None)
        return -ll / self.n if math.isfinite(ll) else _BAD

    def value_and_grad(self, u: np.ndarray):
        theta, jac = self.fam.transform(u)
        ll = _kernel_loglik(self.fam, self.fam.kernel_params(theta), self.z, 1.0,
                            self.literal, self.sigma2, self.kgrad)
        if not math.isfinite(ll):
            return _BAD, np.zeros_like(u)
        g = jac.T @ (self.fam.kernel_jacobian(theta).T @ self.kgrad)
        return -ll / self.n, -g / self.n


def _minimise(obj: _Objective, u0: np.ndarray, max_iter: int, tol: float):
    nm = minimize(obj.value, u0, method="Nelder-Mead",
                  options={"maxiter": 200 * u0.shape[0], "xatol": 1e-4, "fatol": 1e-9})
    qn = minimize(obj.value_and_grad, nm.x, jac=True, method="BFGS",
                  options={"maxiter": max_iter, "gtol": tol})
    _, g = obj.value_and_grad(qn.x)
    converged = bool(np.isfinite(qn.fun) and qn.fun < _BAD
                     and (qn.success or np.max(np.abs(g)) < 1e-5))
    return qn.x, float(qn.fun), converged, int(nm.nit + qn.nit)


def fit(
    returns: Series,
    family: str,
    demean: bool = True,
    egarch_form: str = "nelson",
    seed: int = 0,
    restarts: int = 3,
    max_iter: int = 2000,
    tol: float = 1e-8,
) -> VolatilityFit:
    """Gaussian maximum-likelihood fit.

    The series is standardised internally, a grid of starting values is
    screened, the best is polished by Nelder-Mead and then BFGS with the
    analytic score in unconstrained coordinates.  If BFGS does not converge,
    up to ``restarts`` seeded random perturbations are tried.  Non-convergence
    is reported through ``converged=False`` rather than raised.
    """
    fam = _family(family)
    literal = _check_form(egarch_form)
    if len(returns) < MIN_OBS:
        raise SeriesTooShort(f"volatility fits need at least {MIN_OBS} observations")
    mean = float(np.mean(returns.values)) if demean else 0.0
    e = np.ascontiguousarray(returns.values - mean)
    second = float(np.mean(e * e))
    if not second > 0 or np.ptp(e) == 0.0:
        raise DegenerateSeries("returns have zero variance")
    sd = math.sqrt(second)
    z = e / sd
    obj = _Objective(fam, z, literal)

    starts = [fam.untransform(t) for t in fam.starts(literal)]
    u0 = min(starts, key=obj.value)
    best_u, best_f, converged, iters = _minimise(obj, u0, max_iter, tol)
    rng = np.random.default_rng(seed)
    for _ in range(restarts if not converged else 0):
        u, f, ok, it = _minimise(obj, best_u + rng.normal(0.0, 0.5, best_u.shape),
                                 max_iter, tol)
        iters += it
        if ok and (not converged or f < best_f):
            best_u, best_f, converged = u, f, True
        if converged:
            break

    theta = fam.rescale(fam.transform(best_u)[0], sd)
    sigma2 = np.empty(e.shape[0])
    ll = _kernel_loglik(fam, fam.kernel_params(theta), e, second, literal, sigma2, None)
    k = fam.k + (1 if demean else 0)
    ic = information_criteria(ll, k, e.shape[0])
    return VolatilityFit(
        family=fam.name,
        params=fam.named(theta),
        log_likelihood=float(ll),
        n_obs=int(e.shape[0]),
        n_params=k,
        aic=ic.aic,
        sic=ic.sic,
        hqc=ic.hqc,
        aic_per_obs=ic.aic_per_obs,
        sic_per_obs=ic.sic_per_obs,
        hqc_per_obs=ic.hqc_per_obs,
        conditional_variance=returns.derive(sigma2),
        residuals=returns.derive(e),
        mean=mean,
        converged=converged and math.isfinite(ll),
        iterations=iters,
        egarch_form=egarch_form,
    )


def _resolve_families(families: str | Iterable[str]) -> list[str]:
    if isinstance(families, str):
        names = list(FAMILIES) if families == "all" else families.split(",")
    else:
        names = list(families)
    names = [n.strip().lower() for n in names if n.strip()]
    for n in names:
        _family(n)
    if len(set(names)) < 2:
        raise ValueError("compare needs at least two families")
    return list(dict.fromkeys(names))


def compare(
    returns: Series,
    families: str | Iterable[str] = "all",
    workers: int = 1,
    **fit_kwargs,
) -> ModelComparison:
    """Fit several families and rank the converged ones by AIC (ties keep the
    order in which families were given)."""
    names = _resolve_families(families)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            fits = list(pool.map(lambda n: fit(returns, n, **fit_kwargs), names))
    else:
        fits = [fit(returns, n, **fit_kwargs) for n in names]
    ok = [f for f in fits if f.converged]
    excluded = {f.family: "optimiser did not converge" for f in fits if not f.converged}
    return ModelComparison(
        ranked=sorted(ok, key=lambda f: f.aic),
        sic_ranking=[f.family for f in sorted(ok, key=lambda f: f.sic)],
        hqc_ranking=[f.family for f in sorted(ok, key=lambda f: f.hqc)],
        excluded=excluded,
    )


def forecast(fitted: VolatilityFit, horizon: int) -> VarianceForecast:
    """Multi-step conditional variance forecasts.

    The first step uses the last in-sample residual and variance; later steps
    replace future shocks by their expectations under Gaussian innovations.
    """
    if not fitted.converged:
        raise NotConverged(f"{fitted.family} fit did not converge")
    if horizon < 1:
        raise ValueError("horizon must be at least 1")
    fam = _family(fitted.family)
    theta = fam.from_named(fitted.params)
    e_last = float(fitted.residuals.values[-1])
    s2_last = float(fitted.conditional_variance.values[-1])
    var = fam.forecast(theta, e_last, s2_last, horizon, fitted.egarch_form == "literal")
    origin = fitted.residuals.timestamps[-1]
    stamps = tuple(origin + (i + 1) * fitted.residuals.cadence for i in range(horizon))
    return VarianceForecast(fitted.family, horizon, tuple(float(v) for v in var), origin, stamps)


def simulate(
    family: str,
    params: Mapping[str, float],
    n: int,
    seed: int,
    egarch_form: str = "nelson",
    burn: int = BURN_IN,
    start: str | np.datetime64 = "1970-01-01T04:00:00",
    cadence: str = "8h",
) -> Series:
    """Draw ``r_t = sigma_t w_t`` with standard normal ``w_t``.

    Deterministic in ``seed``; the first ``burn`` draws are discarded.
    """
    fam = _family(family)
    literal = _check_form(egarch_form)
    if n < 1:
        raise ValueError("n must be at least 1")
    theta = fam.from_named(params)
    if not fam.admissible(theta, literal):
        raise InvalidParams(f"{params} outside the admissible region of {family}")
    shocks = np.random.default_rng(seed).standard_normal(n + burn)
    resids = np.empty(n + burn)
    sigma2 = np.empty(n + burn)
    init = fam.initial_variance(theta, literal)
    kp = fam.kernel_params(theta)
    if fam.kernel == "gjr":
        rec.gjr_simulate(kp, shocks, init, resids, sigma2)
    elif fam.kernel == "egarch":
        rec.egarch_simulate(kp, shocks, init, literal, resids, sigma2)
    else:
        rec.parch_simulate(kp, shocks, init, resids, sigma2)
    return Series.regular(resids[burn:], start=start, cadence=cadence, name=family)


def likelihood_grid_excess(fitted: VolatilityFit, rel: float = 0.1, points: int = 5) -> float:
    """Largest gain in log-likelihood found on a ``points``-per-axis grid of
    relative perturbations ``[-rel, +rel]`` around the fitted parameters,
    restricted to admissible points.  Non-positive at a local optimum."""
    fam = _family(fitted.family)
    literal = fitted.egarch_form == "literal"
    theta = fam.from_named(fitted.params)
    e = np.ascontiguousarray(fitted.residuals.values)
    bc = fitted.backcast
    sigma2 = np.empty(e.shape[0])
    base = _kernel_loglik(fam, fam.kernel_params(theta), e, bc, literal, sigma2, None)
    factors = np.linspace(1.0 - rel, 1.0 + rel, points)
    best = -math.inf
    for combo in itertools.product(factors, repeat=fam.k):
        cand = theta * np.array(combo)
        if np.all(np.array(combo) == 1.0) or not fam.admissible(cand, literal):
            continue
        ll = _kernel_loglik(fam, fam.kernel_params(cand), e, bc, literal, sigma2, None)
        best = max(best, ll - base)
    return best
