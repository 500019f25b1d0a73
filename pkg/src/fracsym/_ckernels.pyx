# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot loops. Semantics must match ``fracsym._pykernels`` exactly."""

import numpy as np
cimport numpy as cnp
from libc.math cimport exp, fabs, floor, lgamma, log, pow, tgamma, INFINITY

cnp.import_array()


def gl_convolve(const double[::1] w, const double[:, ::1] u):
    """out[j, c] = sum_{k<=j} w[k] * u[j - k, c]."""
    cdef Py_ssize_t n = u.shape[0], m = u.shape[1]
    cdef Py_ssize_t j, k, c
    cdef double wk
    if w.shape[0] < n:
        raise ValueError("not enough weights")
    out = np.zeros((n, m), dtype=np.float64)
    cdef double[:, ::1] o = out
    with nogil:
        for j in range(n):
            for k in range(j + 1):
                wk = w[k]
                if wk == 0.0:
                    continue
                for c in range(m):
                    o[j, c] += wk * u[j - k, c]
    return out


cdef inline double _rgamma_pole_safe(double x, bint *is_pole) nogil:
    # 1/Gamma(x) for moderate x; flags poles (returns 0 there)
    is_pole[0] = False
    if x <= 0.0 and x == floor(x):
        is_pole[0] = True
        return 0.0
    return 1.0 / tgamma(x)


cdef inline double _ml_term(double alpha, double beta, double z, Py_ssize_t k) nogil:
    cdef double x = alpha * k + beta
    cdef double az = fabs(z)
    cdef double sgn, lg, p
    cdef bint pole
    if k == 0:
        return _rgamma_pole_safe(x, &pole)
    if z == 0.0:
        return 0.0
    if x <= 0.0 and x == floor(x):
        return 0.0
    sgn = -1.0 if (z < 0.0 and (k % 2) == 1) else 1.0
    if x < 170.0 and k * log(az) < 690.0:
        p = pow(az, <double>k)
        return sgn * p / tgamma(x)
    lg = lgamma(x)
    if x < 0.0 and (<long>floor(-x)) % 2 == 0:
        sgn = -sgn
    return sgn * exp(k * log(az) - lg)


def ml_series(double alpha, double beta, const double[::1] z, double rtol, Py_ssize_t max_terms):
    """Taylor series of E_{alpha,beta} at each z with Neumaier summation.

    Returns (value, abs_sum, tail_bound, nterms) arrays.
    """
    cdef Py_ssize_t n = z.shape[0], i, k
    val = np.empty(n, dtype=np.float64)
    asum = np.empty(n, dtype=np.float64)
    tail = np.empty(n, dtype=np.float64)
    nterm = np.empty(n, dtype=np.int64)
    cdef double[::1] v = val, a = asum, tb = tail
    cdef long long[::1] nt = nterm
    cdef double s, comp, t, tt, prev, r, bound, absum
    with nogil:
        for i in range(n):
            s = 0.0
            comp = 0.0
            absum = 0.0
            prev = -1.0
            bound = INFINITY
            k = 0
            while k < max_terms:
                t = _ml_term(alpha, beta, z[i], k)
                tt = s + t
                if fabs(s) >= fabs(t):
                    comp += (s - tt) + t
                else:
                    comp += (t - tt) + s
                s = tt
                absum += fabs(t)
                k += 1
                if alpha * (k - 2) + beta > 0.0 and prev > 0.0:
                    r = fabs(t) / prev
                    if r < 1.0:
                        bound = fabs(t) * r / (1.0 - r)
                        if bound <= rtol * fabs(s + comp):
                            break
                if t == 0.0 and k > 1 and alpha * (k - 1) + beta > 0.0:
                    bound = 0.0
                    break
                prev = fabs(t)
            v[i] = s + comp
            a[i] = absum
            tb[i] = bound
            nt[i] = k
    return val, asum, tail, nterm


def neumaier_sum(const double[::1] x):
    cdef Py_ssize_t i
    cdef double s = 0.0, c = 0.0, t
    for i in range(x.shape[0]):
        t = s + x[i]
        if fabs(s) >= fabs(x[i]):
            c += (s - t) + x[i]
        else:
            c += (x[i] - t) + s
        s = t
    return s + c
