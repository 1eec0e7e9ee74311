"""Tail probabilities for the reference distributions used by the tests.

All of them reduce to the regularized incomplete beta/gamma functions, taken
from :mod:`scipy.special`.
"""

from __future__ import annotations

import math

from scipy import special


def chi2_sf(x: float, df: float) -> float:
    """P(X > x) for X ~ chi-square(df)."""
    if math.isnan(x):
        return math.nan
    if x <= 0.0:
        return 1.0
    if math.isinf(x):
        return 0.0
    return float(special.gammaincc(0.5 * df, 0.5 * x))


def f_sf(x: float, dfn: float, dfd: float) -> float:
    """P(X > x) for X ~ F(dfn, dfd)."""
    if math.isnan(x):
        return math.nan
    if x <= 0.0:
        return 1.0
    if math.isinf(x):
        return 0.0
    return float(special.betainc(0.5 * dfd, 0.5 * dfn, dfd / (dfd + dfn * x)))


def t_sf_two_sided(t: float, df: float) -> float:
    """P(|T| > |t|) for T ~ Student-t(df)."""
    if math.isnan(t):
        return math.nan
    if math.isinf(t):
        return 0.0
    return float(special.betainc(0.5 * df, 0.5, df / (df + t * t)))


def norm_cdf(x: float) -> float:
    return 0.5 * math.erfc(-x / math.sqrt(2.0))
