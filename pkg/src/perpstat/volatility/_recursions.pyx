# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled variance recursions, Gaussian log-likelihoods and scores.

Mirrors :mod:`perpstat.volatility.recursions_python` function for function.
``grad`` (when given) receives the derivative of the log-likelihood with
respect to the kernel parameter vector.  A non-positive or non-finite
variance aborts the recursion and returns ``-inf``.
"""

from libc.math cimport INFINITY, M_PI, exp, fabs, isfinite, log, pow, sqrt

cdef double LOG2PI = log(2.0 * M_PI)
cdef double ABS_Z_MEAN = sqrt(2.0 / M_PI)
cdef double LOGVAR_LIMIT = 700.0


def gjr_loglik(const double[::1] params, const double[::1] resids, double backcast,
               double[::1] sigma2, double[::1] grad=None):
    """sigma2_t = omega + alpha e_{t-1}^2 + gamma e_{t-1}^2 1[e_{t-1} < 0]
    + beta sigma2_{t-1};  params = (omega, alpha, gamma, beta)."""
    cdef Py_ssize_t n = resids.shape[0]
    cdef Py_ssize_t t, j
    cdef double omega = params[0], alpha = params[1], gamma = params[2], beta = params[3]
    cdef double ll = 0.0, s2 = backcast, prev, e2, neg, w, r2
    cdef double d[4]
    cdef double g[4]
    cdef bint want = grad is not None
    for j in range(4):
        d[j] = 0.0
        g[j] = 0.0
    with nogil:
        for t in range(n):
            if t > 0:
                prev = s2
                e2 = resids[t - 1] * resids[t - 1]
                neg = e2 if resids[t - 1] < 0.0 else 0.0
                s2 = omega + alpha * e2 + gamma * neg + beta * prev
                if want:
                    d[0] = 1.0 + beta * d[0]
                    d[1] = e2 + beta * d[1]
                    d[2] = neg + beta * d[2]
                    d[3] = prev + beta * d[3]
            if not (s2 > 0.0 and isfinite(s2)):
                ll = -INFINITY
                break
            sigma2[t] = s2
            r2 = resids[t] * resids[t]
            ll -= 0.5 * (LOG2PI + log(s2) + r2 / s2)
            if want:
                w = -0.5 * (1.0 / s2 - r2 / (s2 * s2))
                for j in range(4):
                    g[j] += w * d[j]
    if want:
        for j in range(4):
            grad[j] = g[j]
    return ll


def egarch_loglik(const double[::1] params, const double[::1] resids, double backcast,
                  bint literal, double[::1] sigma2, double[::1] grad=None):
    """ln sigma2_t = omega + alpha z_{t-1} + gamma (|z_{t-1}| - E|z|) + beta ln sigma2_{t-1}
    with ``z_{t-1}`` replaced by ``z_{t-1}^2`` when ``literal``;
    params = (omega, alpha, gamma, beta)."""
    cdef Py_ssize_t n = resids.shape[0]
    cdef Py_ssize_t t, j
    cdef double omega = params[0], alpha = params[1], gamma = params[2], beta = params[3]
    cdef double ll = 0.0, h = log(backcast), prev, z, az, lead, m, s2, w, r2
    cdef double d[4]
    cdef double g[4]
    cdef bint want = grad is not None
    for j in range(4):
        d[j] = 0.0
        g[j] = 0.0
    with nogil:
        for t in range(n):
            if t > 0:
                prev = h
                z = resids[t - 1] * exp(-0.5 * prev)
                az = fabs(z)
                if literal:
                    lead = z * z
                    m = beta - alpha * lead - 0.5 * gamma * az
                else:
                    lead = z
                    m = beta - 0.5 * (alpha * z + gamma * az)
                h = omega + alpha * lead + gamma * (az - ABS_Z_MEAN) + beta * prev
                if want:
                    d[0] = 1.0 + m * d[0]
                    d[1] = lead + m * d[1]
                    d[2] = (az - ABS_Z_MEAN) + m * d[2]
                    d[3] = prev + m * d[3]
            if not (fabs(h) < LOGVAR_LIMIT):
                ll = -INFINITY
                break
            s2 = exp(h)
            sigma2[t] = s2
            r2 = resids[t] * resids[t]
            ll -= 0.5 * (LOG2PI + h + r2 / s2)
            if want:
                w = -0.5 * (1.0 - r2 / s2)
                for j in range(4):
                    g[j] += w * d[j]
    if want:
        for j in range(4):
            grad[j] = g[j]
    return ll


def parch_loglik(const double[::1] params, const double[::1] resids, double backcast,
                 double[::1] sigma2, double[::1] grad=None):
    """sigma_t^delta = omega + alpha (|e_{t-1}| - gamma e_{t-1})^delta
    + beta sigma_{t-1}^delta;  params = (omega, alpha, gamma, beta, delta)."""
    cdef Py_ssize_t n = resids.shape[0]
    cdef Py_ssize_t t, j
    cdef double omega = params[0], alpha = params[1], gamma = params[2]
    cdef double beta = params[3], delta = params[4]
    cdef double ll = 0.0, s, prev, e, a, ad, ls, h, s2, w, r2, scale
    cdef double d[5]
    cdef double g[5]
    cdef double dh[5]
    cdef bint want = grad is not None
    for j in range(5):
        d[j] = 0.0
        g[j] = 0.0
    s = pow(backcast, 0.5 * delta)
    d[4] = 0.5 * s * log(backcast)
    with nogil:
        for t in range(n):
            if t > 0:
                prev = s
                e = resids[t - 1]
                a = fabs(e) - gamma * e
                ad = pow(a, delta) if a > 0.0 else 0.0
                s = omega + alpha * ad + beta * prev
                if want:
                    d[0] = 1.0 + beta * d[0]
                    d[1] = ad + beta * d[1]
                    if a > 0.0:
                        d[2] = -alpha * delta * pow(a, delta - 1.0) * e + beta * d[2]
                        d[4] = alpha * ad * log(a) + beta * d[4]
                    else:
                        d[2] = beta * d[2]
                        d[4] = beta * d[4]
                    d[3] = prev + beta * d[3]
            if not (s > 0.0 and isfinite(s)):
                ll = -INFINITY
                break
            ls = log(s)
            h = 2.0 * ls / delta
            if not (fabs(h) < LOGVAR_LIMIT):
                ll = -INFINITY
                break
            s2 = exp(h)
            sigma2[t] = s2
            r2 = resids[t] * resids[t]
            ll -= 0.5 * (LOG2PI + h + r2 / s2)
            if want:
                w = -0.5 * (1.0 - r2 / s2)
                scale = 2.0 / (delta * s)
                for j in range(4):
                    g[j] += w * scale * d[j]
                g[4] += w * (scale * d[4] - 2.0 * ls / (delta * delta))
    if want:
        for j in range(5):
            grad[j] = g[j]
    return ll


def gjr_simulate(const double[::1] params, const double[::1] shocks, double sigma2_init,
                 double[::1] resids, double[::1] sigma2):
    cdef Py_ssize_t n = shocks.shape[0]
    cdef Py_ssize_t t
    cdef double omega = params[0], alpha = params[1], gamma = params[2], beta = params[3]
    cdef double s2 = sigma2_init, e2
    with nogil:
        for t in range(n):
            if t > 0:
                e2 = resids[t - 1] * resids[t - 1]
                s2 = omega + alpha * e2 + beta * s2
                if resids[t - 1] < 0.0:
                    s2 += gamma * e2
            sigma2[t] = s2
            resids[t] = sqrt(s2) * shocks[t]


def egarch_simulate(const double[::1] params, const double[::1] shocks, double sigma2_init,
                    bint literal, double[::1] resids, double[::1] sigma2):
    cdef Py_ssize_t n = shocks.shape[0]
    cdef Py_ssize_t t
    cdef double omega = params[0], alpha = params[1], gamma = params[2], beta = params[3]
    cdef double h = log(sigma2_init), z, lead
    with nogil:
        for t in range(n):
            if t > 0:
                z = shocks[t - 1]
                lead = z * z if literal else z
                h = omega + alpha * lead + gamma * (fabs(z) - ABS_Z_MEAN) + beta * h
            sigma2[t] = exp(h)
            resids[t] = exp(0.5 * h) * shocks[t]


def parch_simulate(const double[::1] params, const double[::1] shocks, double sigma2_init,
                   double[::1] resids, double[::1] sigma2):
    cdef Py_ssize_t n = shocks.shape[0]
    cdef Py_ssize_t t
    cdef double omega = params[0], alpha = params[1], gamma = params[2]
    cdef double beta = params[3], delta = params[4]
    cdef double s = pow(sigma2_init, 0.5 * delta), e, a
    with nogil:
        for t in range(n):
            if t > 0:
                e = resids[t - 1]
                a = fabs(e) - gamma * e
                s = omega + alpha * (pow(a, delta) if a > 0.0 else 0.0) + beta * s
            sigma2[t] = pow(s, 2.0 / delta)
            resids[t] = pow(s, 1.0 / delta) * shocks[t]
