r"""Gauss hypergeometric function on the unit disk.

.. math::

    {}_2F_1(A, B; C; z) = \sum_{k=0}^\infty \frac{(A)_k (B)_k}{(C)_k} \frac{z^k}{k!},
    \qquad |z| < 1.

Negative arguments are mapped into ``[0, 1/2)`` by the Pfaff transformation
before summing, so the summed series never alternates. The upper parameters
are put in a canonical order first, which makes the result exactly symmetric
in ``A`` and ``B``.
"""

from __future__ import annotations

import math

import mpmath

from fracsym.errors import ConvergenceDomainError, PoleError
from fracsym.specfun._common import TERM_EPS, SeriesResult, check_finite, is_nonpositive_integer

TARGET_RTOL = 1.0e-13
TAIL_RTOL = 1.0e-17
MAX_TERMS = 2_000_000


def _series(A: float, B: float, C: float, x: float) -> SeriesResult:
    s = comp = 0.0
    t = 1.0
    absum = 0.0
    bound = math.inf
    k = 0
    while k < MAX_TERMS:
        tt = s + t
        comp += (s - tt) + t if abs(s) >= abs(t) else (t - tt) + s
        s = tt
        absum += abs(t)
        if t == 0.0:
            # a nonpositive integer upper parameter terminates the series
            bound = 0.0
            k += 1
            break
        ratio = (A + k) * (B + k) / ((C + k) * (k + 1)) * x
        t *= ratio
        k += 1
        if k > max(abs(A), abs(B), abs(C)) + 1:
            # the ratio is monotone from here on and tends to |x|
            r = max(abs(ratio), abs(x))
            if r < 1.0:
                bound = abs(t) / (1.0 - r)
                if bound <= TAIL_RTOL * abs(s + comp):
                    break
    return SeriesResult(s + comp, bound, k, absum)


def gauss_2f1(A: float, B: float, C: float, z: float) -> float:
    """Gauss hypergeometric function :math:`{}_2F_1(A,B;C;z)` for real ``|z| < 1``."""
    A, B, C = float(A), float(B), float(C)
    z = check_finite(z)
    if is_nonpositive_integer(C, 0.0):
        raise PoleError(f"C = {C:g} is a nonpositive integer")
    if abs(z) >= 1.0:
        raise ConvergenceDomainError(f"|z| = {abs(z):g} >= 1 is outside the series domain")
    if z == 0.0:
        return 1.0
    A, B = min(A, B), max(A, B)
    pre = 1.0
    x = z
    if z < 0.0:
        # Pfaff: 2F1(A,B;C;z) = (1-z)^(-A) 2F1(A, C-B; C; z/(z-1))
        pre = (1.0 - z) ** (-A)
        B = C - B
        x = z / (z - 1.0)
    res = _series(A, B, C, x)
    if not math.isfinite(res.tail_bound) or TERM_EPS * res.abs_sum > TARGET_RTOL * abs(res.value):
        digits = 20 + max(0, int(math.ceil(math.log10(max(res.condition, 1.0)))))
        with mpmath.workdps(digits):
            return float(pre * mpmath.hyp2f1(A, B, C, x))
    return pre * res.value
