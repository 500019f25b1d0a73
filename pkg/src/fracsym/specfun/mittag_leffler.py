r"""Two-parameter Mittag-Leffler function.

.. math::

    E_{\alpha,\beta}(z) = \sum_{k=0}^\infty \frac{z^k}{\Gamma(\alpha k + \beta)}

Evaluated by its Taylor series for :math:`|z| \le 10`. Terms are summed with
Neumaier compensation in double precision; when the alternating series loses
more digits than the target allows, the sum is recomputed in extended
precision (``mpmath``) with enough guard digits to absorb the cancellation.
Arguments beyond ``|z| = 10`` are rejected.
"""

from __future__ import annotations

import math

import mpmath
import numpy as np

from fracsym import _kernels
from fracsym.errors import ConvergenceDomainError, DomainError
from fracsym.specfun._common import (
    TERM_EPS,
    SeriesResult,
    check_finite,
    escalate,
    log_abs_gamma,
    lost_digits,
    peak_log10,
)

#: largest accepted |z|
MAX_ABS_ARG = 10.0
#: relative accuracy the evaluator guarantees (truncation plus cancellation)
TARGET_RTOL = 1.0e-13
#: relative tail bound at which the series is truncated
TAIL_RTOL = 1.0e-16
MAX_TERMS = 20_000


def _check(alpha: float, beta: float) -> tuple[float, float]:
    alpha, beta = float(alpha), float(beta)
    if not (math.isfinite(alpha) and alpha > 0):
        raise DomainError(f"alpha must be positive, got {alpha!r}")
    if not math.isfinite(beta):
        raise DomainError(f"beta must be finite, got {beta!r}")
    return alpha, beta


def _mp_pass(alpha: float, beta: float, z: float, nterms: int | None, digits: int):
    with mpmath.workdps(digits):
        a, b, x = mpmath.mpf(alpha), mpmath.mpf(beta), mpmath.mpf(z)
        s = mpmath.mpf(0)
        absum = mpmath.mpf(0)
        prev = None
        bound = mpmath.inf
        k = 0
        limit = nterms if nterms is not None else MAX_TERMS
        while k < limit:
            t = x**k * mpmath.rgamma(a * k + b)
            s += t
            absum += abs(t)
            k += 1
            if prev is not None and prev > 0 and alpha * (k - 2) + beta > 0:
                r = abs(t) / prev
                if r < 1:
                    bound = abs(t) * r / (1 - r)
                    if nterms is None and bound <= TAIL_RTOL * abs(s):
                        break
            elif nterms is None and t == 0 and k > 1 and alpha * (k - 1) + beta > 0:
                bound = mpmath.mpf(0)
                break
            prev = abs(t)
        res = SeriesResult(float(s), float(bound), k, float(absum), extended=True)
        return res, lost_digits(s, absum)


def _mp_series(alpha: float, beta: float, z: float, nterms: int | None) -> SeriesResult:
    """Series in extended precision, with digits raised until cancellation is absorbed."""
    n = nterms if nterms is not None else MAX_TERMS
    peak = 0.0
    if z != 0:
        k = np.arange(n, dtype=float)
        peak = peak_log10(k * math.log(abs(z)) - log_abs_gamma(alpha * k + beta)[0])
    return escalate(lambda digits: _mp_pass(alpha, beta, z, nterms, digits), peak)


def _needs_mp(val, asum, tail):
    """True where the double-precision sum cannot be trusted to ``TARGET_RTOL``."""
    with np.errstate(invalid="ignore", over="ignore"):
        ok = np.isfinite(val) & np.isfinite(asum) & np.isfinite(tail)
        return ~ok | (TERM_EPS * asum > TARGET_RTOL * np.abs(val))


def mittag_leffler_series(
    alpha: float, beta: float, z: float, *, nterms: int | None = None
) -> SeriesResult:
    """Evaluate :math:`E_{\\alpha,\\beta}(z)` with error bookkeeping.

    With ``nterms`` given, exactly that many terms are summed and the returned
    ``tail_bound`` bounds the neglected remainder (``inf`` if the terms are
    not yet decreasing). Otherwise the series is truncated adaptively.
    """
    alpha, beta = _check(alpha, beta)
    z = check_finite(z)
    if abs(z) > MAX_ABS_ARG:
        raise ConvergenceDomainError(
            f"|z| = {abs(z):g} exceeds the supported range |z| <= {MAX_ABS_ARG:g}"
        )
    if nterms is not None:
        return _mp_series(alpha, beta, z, int(nterms)) if nterms > 0 else SeriesResult(
            0.0, math.inf, 0, 0.0
        )

    val, asum, tail, nt = _kernels.ml_series(
        alpha, beta, np.array([z], dtype=float), TAIL_RTOL, MAX_TERMS
    )
    res = SeriesResult(float(val[0]), float(tail[0]), int(nt[0]), float(asum[0]))
    if _needs_mp(res.value, res.abs_sum, res.tail_bound):
        res = _mp_series(alpha, beta, z, None)
    return res


def mittag_leffler(alpha: float, beta: float, z: float) -> float:
    """Mittag-Leffler function :math:`E_{\\alpha,\\beta}(z)` for real ``z``."""
    return mittag_leffler_series(alpha, beta, z).value


def mittag_leffler_array(alpha: float, beta: float, z: np.ndarray) -> np.ndarray:
    """Vectorized :func:`mittag_leffler` over a real array."""
    alpha, beta = _check(alpha, beta)
    z = np.ascontiguousarray(z, dtype=float)
    shape = z.shape
    flat = z.ravel()
    if not np.all(np.isfinite(flat)):
        raise DomainError("z must be finite")
    if flat.size and np.max(np.abs(flat)) > MAX_ABS_ARG:
        raise ConvergenceDomainError(
            f"|z| = {np.max(np.abs(flat)):g} exceeds the supported range |z| <= {MAX_ABS_ARG:g}"
        )
    val, asum, tail, _ = _kernels.ml_series(alpha, beta, flat, TAIL_RTOL, MAX_TERMS)
    for i in np.flatnonzero(_needs_mp(val, asum, tail)):
        val[i] = _mp_series(alpha, beta, float(flat[i]), None).value
    return val.reshape(shape)
