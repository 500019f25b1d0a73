"""Pure-Python fallbacks for the compiled kernels in ``_ckernels.pyx``."""

from __future__ import annotations

import math

import numpy as np


def gl_convolve(w: np.ndarray, u: np.ndarray) -> np.ndarray:
    n = u.shape[0]
    if w.shape[0] < n:
        raise ValueError("not enough weights")
    out = np.empty_like(u, dtype=np.float64)
    for j in range(n):
        out[j] = w[j::-1] @ u[: j + 1]
    return out


def _ml_term(alpha: float, beta: float, z: float, k: int) -> float:
    x = alpha * k + beta
    if x <= 0.0 and x == math.floor(x):
        return 0.0
    if k == 0:
        return 1.0 / math.gamma(x)
    if z == 0.0:
        return 0.0
    az = abs(z)
    sgn = -1.0 if (z < 0.0 and k % 2 == 1) else 1.0
    if x < 170.0 and k * math.log(az) < 690.0:
        return sgn * az**k / math.gamma(x)
    if x < 0.0 and int(math.floor(-x)) % 2 == 0:
        sgn = -sgn
    return sgn * math.exp(k * math.log(az) - math.lgamma(x))


def ml_series(alpha: float, beta: float, z: np.ndarray, rtol: float, max_terms: int):
    n = z.shape[0]
    val = np.empty(n)
    asum = np.empty(n)
    tail = np.empty(n)
    nterm = np.empty(n, dtype=np.int64)
    for i in range(n):
        zi = float(z[i])
        s = comp = absum = 0.0
        prev = -1.0
        bound = math.inf
        k = 0
        while k < max_terms:
            t = _ml_term(alpha, beta, zi, k)
            tt = s + t
            if abs(s) >= abs(t):
                comp += (s - tt) + t
            else:
                comp += (t - tt) + s
            s = tt
            absum += abs(t)
            k += 1
            if alpha * (k - 2) + beta > 0.0 and prev > 0.0:
                r = abs(t) / prev
                if r < 1.0:
                    bound = abs(t) * r / (1.0 - r)
                    if bound <= rtol * abs(s + comp):
                        break
            if t == 0.0 and k > 1 and alpha * (k - 1) + beta > 0.0:
                bound = 0.0
                break
            prev = abs(t)
        val[i] = s + comp
        asum[i] = absum
        tail[i] = bound
        nterm[i] = k
    return val, asum, tail, nterm


def neumaier_sum(x: np.ndarray) -> float:
    s = c = 0.0
    for xi in x:
        xi = float(xi)
        t = s + xi
        if abs(s) >= abs(xi):
            c += (s - t) + xi
        else:
            c += (xi - t) + s
        s = t
    return s + c
