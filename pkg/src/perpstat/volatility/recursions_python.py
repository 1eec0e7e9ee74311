"""Pure-Python variance recursions.

Fallback for :mod:`perpstat.volatility._recursions` when the compiled
extension is unavailable; the two modules expose identical functions.
"""

from __future__ import annotations

import math

LOG2PI = math.log(2.0 * math.pi)
ABS_Z_MEAN = math.sqrt(2.0 / math.pi)
LOGVAR_LIMIT = 700.0

__all__ = [
    "egarch_loglik",
    "egarch_simulate",
    "gjr_loglik",
    "gjr_simulate",
    "parch_loglik",
    "parch_simulate",
]


def gjr_loglik(params, resids, backcast, sigma2, grad=None):
    omega, alpha, gamma, beta = (float(p) for p in params)
    want = grad is not None
    d0 = d1 = d2 = d3 = 0.0
    g0 = g1 = g2 = g3 = 0.0
    ll = 0.0
    s2 = float(backcast)
    e_prev = 0.0
    for t, e in enumerate(resids.tolist()):
        if t > 0:
            prev = s2
            e2 = e_prev * e_prev
            neg = e2 if e_prev < 0.0 else 0.0
            s2 = omega + alpha * e2 + gamma * neg + beta * prev
            if want:
                d0 = 1.0 + beta * d0
                d1 = e2 + beta * d1
                d2 = neg + beta * d2
                d3 = prev + beta * d3
        if not (s2 > 0.0 and math.isfinite(s2)):
            ll = -math.inf
            break
        sigma2[t] = s2
        r2 = e * e
        ll -= 0.5 * (LOG2PI + math.log(s2) + r2 / s2)
        if want:
            w = -0.5 * (1.0 / s2 - r2 / (s2 * s2))
            g0 += w * d0
            g1 += w * d1
            g2 += w * d2
            g3 += w * d3
        e_prev = e
    if want:
        grad[:] = (g0, g1, g2, g3)
    return ll


def egarch_loglik(params, resids, backcast, literal, sigma2, grad=None):
    omega, alpha, gamma, beta = (float(p) for p in params)
    want = grad is not None
    d = [0.0, 0.0, 0.0, 0.0]
    g = [0.0, 0.0, 0.0, 0.0]
    ll = 0.0
    h = math.log(backcast)
    e_prev = 0.0
    for t, e in enumerate(resids.tolist()):
        if t > 0:
            prev = h
            z = e_prev * math.exp(-0.5 * prev)
            az = abs(z)
            if literal:
                lead = z * z
                m = beta - alpha * lead - 0.5 * gamma * az
            else:
                lead = z
                m = beta - 0.5 * (alpha * z + gamma * az)
            h = omega + alpha * lead + gamma * (az - ABS_Z_MEAN) + beta * prev
            if want:
                d = [1.0 + m * d[0], lead + m * d[1], (az - ABS_Z_MEAN) + m * d[2],
                     prev + m * d[3]]
        if not abs(h) < LOGVAR_LIMIT:
            ll = -math.inf
            break
        s2 = math.exp(h)
        sigma2[t] = s2
        r2 = e * e
        ll -= 0.5 * (LOG2PI + h + r2 / s2)
        if want:
            w = -0.5 * (1.0 - r2 / s2)
            for j in range(4):
                g[j] += w * d[j]
        e_prev = e
    if want:
        grad[:] = g
    return ll


def parch_loglik(params, resids, backcast, sigma2, grad=None):
    omega, alpha, gamma, beta, delta = (float(p) for p in params)
    want = grad is not None
    s = backcast ** (0.5 * delta)
    d = [0.0, 0.0, 0.0, 0.0, 0.5 * s * math.log(backcast)]
    g = [0.0] * 5
    ll = 0.0
    e_prev = 0.0
    for t, e in enumerate(resids.tolist()):
        if t > 0:
            prev = s
            a = abs(e_prev) - gamma * e_prev
            ad = a ** delta if a > 0.0 else 0.0
            s = omega + alpha * ad + beta * prev
            if want:
                d[0] = 1.0 + beta * d[0]
                d[1] = ad + beta * d[1]
                if a > 0.0:
                    d[2] = -alpha * delta * a ** (delta - 1.0) * e_prev + beta * d[2]
                    d[4] = alpha * ad * math.log(a) + beta * d[4]
                else:
                    d[2] = beta * d[2]
                    d[4] = beta * d[4]
                d[3] = prev + beta * d[3]
        if not (s > 0.0 and math.isfinite(s)):
            ll = -math.inf
            break
        ls = math.log(s)
        h = 2.0 * ls / delta
        if not abs(h) < LOGVAR_LIMIT:
            ll = -math.inf
            break
        s2 = math.exp(h)
        sigma2[t] = s2
        r2 = e * e
        ll -= 0.5 * (LOG2PI + h + r2 / s2)
        if want:
            w = -0.5 * (1.0 - r2 / s2)
            scale = 2.0 / (delta * s)
            for j in range(4):
                g[j] += w * scale * d[j]
            g[4] += w * (scale * d[4] - 2.0 * ls / (delta * delta))
        e_prev = e
    if want:
        grad[:] = g
    return ll


def gjr_simulate(params, shocks, sigma2_init, resids, sigma2):
    omega, alpha, gamma, beta = (float(p) for p in params)
    s2 = float(sigma2_init)
    e = 0.0
    for t, z in enumerate(shocks.tolist()):
        if t > 0:
            e2 = e * e
            s2 = omega + alpha * e2 + beta * s2
            if e < 0.0:
                s2 += gamma * e2
        sigma2[t] = s2
        e = math.sqrt(s2) * z
        resids[t] = e


def egarch_simulate(params, shocks, sigma2_init, literal, resids, sigma2):
    omega, alpha, gamma, beta = (float(p) for p in params)
    h = math.log(sigma2_init)
    z_prev = 0.0
    for t, z in enumerate(shocks.tolist()):
        if t > 0:
            lead = z_prev * z_prev if literal else z_prev
            h = omega + alpha * lead + gamma * (abs(z_prev) - ABS_Z_MEAN) + beta * h
        sigma2[t] = math.exp(h)
        resids[t] = math.exp(0.5 * h) * z
        z_prev = z


def parch_simulate(params, shocks, sigma2_init, resids, sigma2):
    omega, alpha, gamma, beta, delta = (float(p) for p in params)
    s = sigma2_init ** (0.5 * delta)
    e = 0.0
    for t, z in enumerate(shocks.tolist()):
        if t > 0:
            a = abs(e) - gamma * e
            s = omega + alpha * (a ** delta if a > 0.0 else 0.0) + beta * s
        sigma2[t] = s ** (2.0 / delta)
        e = s ** (1.0 / delta) * z
        resids[t] = e
