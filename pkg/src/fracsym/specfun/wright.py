r"""Generalized Wright function

.. math::

    {}_p\Psi_q\left[z \,\middle|\, {(a_i,\alpha_i) \atop (b_j,\beta_j)}\right]
        = \sum_{k=0}^\infty
          \frac{\prod_i \Gamma(a_i + \alpha_i k)}{\prod_j \Gamma(b_j + \beta_j k)}
          \frac{z^k}{k!}.

The coefficient of ``z**k`` does not depend on ``z``, so the coefficients are
tabulated once (in log space, with signs) and reused for every argument of an
array call. Truncation is adaptive; the reported tail bound extrapolates the
last term ratio towards its limit (``0`` inside the entire-function regime,
``|z|/R`` on the boundary regime of radius ``R``).
"""

from __future__ import annotations

import math
from collections.abc import Sequence

import mpmath
import numpy as np

from fracsym.errors import ConvergenceDomainError, DomainError, PoleError
from fracsym.specfun._common import (
    TERM_EPS,
    ConvergenceClass,
    ParamPairList,
    SeriesResult,
    as_pairs,
    check_finite,
    escalate,
    log_abs_gamma,
    lost_digits,
    peak_log10,
)

TARGET_RTOL = 1.0e-12
TAIL_RTOL = 1.0e-16
MAX_TERMS = 400_000
_BLOCK = 256


def _validate(upper, lower) -> tuple[ParamPairList, ParamPairList]:
    up = as_pairs(upper, what="upper")
    lo = as_pairs(lower, what="lower")
    for a, w in up + lo:
        if w == 0:
            raise DomainError("Wright weights must be nonzero")
    return up, lo


def wright_convergence(upper, lower) -> ConvergenceClass:
    """Classify the convergence of the Wright series for the given parameters."""
    up, lo = _validate(upper, lower)
    delta = sum(w for _, w in lo) - sum(w for _, w in up)
    if math.isclose(delta, -1.0, rel_tol=0.0, abs_tol=1e-12):
        radius = math.prod(abs(w) ** (-w) for _, w in up) * math.prod(abs(w) ** w for _, w in lo)
        return ConvergenceClass("disk", radius=radius, delta=-1.0)
    if delta > -1.0:
        return ConvergenceClass("everywhere", delta=delta)
    return ConvergenceClass("divergent", delta=delta)


class _Coefficients:
    """Lazily extended table of log|c_k| and sign(c_k)."""

    def __init__(self, up: ParamPairList, lo: ParamPairList):
        self.up = up
        self.lo = lo
        self.logc = np.empty(0)
        self.sign = np.empty(0)

    def extend(self, n: int) -> None:
        k0 = self.logc.size
        if n <= k0:
            return
        k = np.arange(k0, n, dtype=float)
        logc = -log_abs_gamma(k + 1.0)[0]
        sign = np.ones_like(k)
        for a, w in self.up:
            x = a + w * k
            pole = (x <= 1e-12) & (np.abs(x - np.round(x)) <= 1e-12)
            if np.any(pole):
                kk = int(k[np.argmax(pole)])
                raise PoleError(
                    f"Gamma pole in numerator: a + alpha*k = {a} + {w}*{kk} is a nonpositive integer"
                )
            lg, sg = log_abs_gamma(x)
            logc = logc + lg
            sign = sign * sg
        for b, w in self.lo:
            lg, sg = log_abs_gamma(b + w * k)
            # 1/Gamma at a pole is zero: lg=+inf gives exp(-inf)=0
            logc = logc - lg
            sign = sign * np.where(sg == 0, 1.0, sg)
        self.logc = np.concatenate([self.logc, logc])
        self.sign = np.concatenate([self.sign, sign])


def _terms(coef: _Coefficients, z: np.ndarray, k0: int, k1: int) -> np.ndarray:
    """Terms c_k z^k for k in [k0, k1) as a (len(z), k1-k0) array."""
    k = np.arange(k0, k1, dtype=float)
    logc = coef.logc[k0:k1]
    sign = coef.sign[k0:k1]
    az = np.abs(z)[:, None]
    with np.errstate(divide="ignore", invalid="ignore"):
        logz = np.where(az > 0, np.log(np.where(az > 0, az, 1.0)), -np.inf)
        expo = logc[None, :] + k[None, :] * logz
        # 0**0 == 1
        expo = np.where((k[None, :] == 0) & (az == 0), logc[None, :], expo)
    with np.errstate(over="ignore"):
        mag = np.exp(expo)
    zsign = np.where((z[:, None] < 0) & (k[None, :] % 2 == 1), -1.0, 1.0)
    return sign[None, :] * zsign * mag


def _limit_ratio(conv: ConvergenceClass, z: np.ndarray) -> np.ndarray:
    if conv.kind == "disk":
        assert conv.radius is not None
        return np.abs(z) / conv.radius
    return np.zeros_like(z)


def _tail_estimate(window: np.ndarray, lim_r: np.ndarray) -> np.ndarray:
    # window holds the last four |terms|; pairs guard against isolated zeros
    prev = np.maximum(window[:, 0], window[:, 1])
    cur = np.maximum(window[:, 2], window[:, 3])
    with np.errstate(divide="ignore", invalid="ignore"):
        r = np.where(prev > 0, np.sqrt(cur / prev), np.where(cur == 0, 0.0, np.inf))
    r = np.maximum(r, lim_r)
    with np.errstate(divide="ignore", invalid="ignore"):
        bound = np.where(r < 1, 2.0 * cur * r / (1 - r), np.inf)
    return np.where(cur == 0, 0.0, bound)


def _series_double(up, lo, conv, z: np.ndarray, nterms: int | None):
    coef = _Coefficients(up, lo)
    n = z.size
    s = np.zeros(n)
    comp = np.zeros(n)
    absum = np.zeros(n)
    last = np.zeros((n, 4))
    done = np.zeros(n, dtype=bool)
    used = np.zeros(n, dtype=np.int64)
    tail = np.full(n, np.inf)
    limit = nterms if nterms is not None else MAX_TERMS
    block = _BLOCK
    k0 = 0
    lim_r = _limit_ratio(conv, z)
    while k0 < limit and not np.all(done):
        k1 = min(k0 + block, limit)
        coef.extend(k1)
        act = ~done
        t = _terms(coef, z[act], k0, k1)
        # Neumaier over the block, column by column keeps the order deterministic
        sa, ca = s[act], comp[act]
        # overflowed terms leave inf/nan behind; the caller retries those in mp
        with np.errstate(over="ignore", invalid="ignore"):
            for j in range(t.shape[1]):
                tj = t[:, j]
                tt = sa + tj
                ca = ca + np.where(np.abs(sa) >= np.abs(tj), (sa - tt) + tj, (tj - tt) + sa)
                sa = tt
            absum[act] += np.sum(np.abs(t), axis=1)
        s[act], comp[act] = sa, ca
        used[act] = k1
        window = np.concatenate([last[act], np.abs(t)], axis=1)[:, -4:]
        last[act] = window
        bound = _tail_estimate(window, lim_r[act])
        tail[act] = bound
        total = np.abs(s[act] + comp[act])
        finished = bound <= TAIL_RTOL * total
        if nterms is None:
            idx = np.flatnonzero(act)
            done[idx[finished]] = True
        k0 = k1
        block = min(block * 2, 16_384)
    return s + comp, tail, used, absum


def _mp_tail(window: list, lim_r: float):
    # same extrapolation as _tail_estimate, kept in mp so huge terms cannot overflow
    prev = max(window[0], window[1])
    cur = max(window[2], window[3])
    if cur == 0:
        return mpmath.mpf(0)
    if prev == 0:
        return mpmath.inf
    r = max(mpmath.sqrt(cur / prev), mpmath.mpf(lim_r))
    return 2 * cur * r / (1 - r) if r < 1 else mpmath.inf


def _mp_pass(up, lo, z: float, lim_r: float, nterms: int | None, digits: int):
    with mpmath.workdps(digits):
        x = mpmath.mpf(z)
        s = mpmath.mpf(0)
        absum = mpmath.mpf(0)
        window: list = []
        bound = mpmath.inf
        k = 0
        limit = nterms if nterms is not None else MAX_TERMS
        while k < limit:
            num = mpmath.mpf(1)
            for a, w in up:
                num *= mpmath.gamma(mpmath.mpf(a) + mpmath.mpf(w) * k)
            for b, w in lo:
                num *= mpmath.rgamma(mpmath.mpf(b) + mpmath.mpf(w) * k)
            t = num * x**k / mpmath.factorial(k)
            s += t
            absum += abs(t)
            k += 1
            window = (window + [abs(t)])[-4:]
            if len(window) == 4:
                bound = _mp_tail(window, lim_r)
                if nterms is None and bound <= TAIL_RTOL * abs(s):
                    break
        res = SeriesResult(float(s), float(bound), k, float(absum), extended=True)
        return res, lost_digits(s, absum)


def _series_mp(up, lo, conv, z: float, nterms: int | None) -> SeriesResult:
    """Series in extended precision, with digits raised until cancellation is absorbed."""
    lim_r = float(_limit_ratio(conv, np.array([z]))[0])
    peak = 0.0
    if z != 0:
        coef = _Coefficients(up, lo)
        n = min(nterms if nterms is not None else MAX_TERMS, 20_000)
        coef.extend(n)
        peak = peak_log10(coef.logc + np.arange(n) * math.log(abs(z)))
    return escalate(lambda digits: _mp_pass(up, lo, z, lim_r, nterms, digits), peak)


def _prepare(upper, lower, z):
    up, lo = _validate(upper, lower)
    conv = wright_convergence(up, lo)
    z = np.asarray(z, dtype=float)
    if not np.all(np.isfinite(z)):
        raise DomainError("z must be finite")
    if conv.kind == "divergent":
        raise ConvergenceDomainError(
            f"Wright series diverges for z != 0 (Delta = {conv.delta:g} < -1)"
        )
    if conv.kind == "disk" and z.size and np.max(np.abs(z)) >= conv.radius:
        raise ConvergenceDomainError(
            f"|z| = {np.max(np.abs(z)):g} outside the disk of convergence, radius {conv.radius:g}"
        )
    return up, lo, conv, z


def _needs_mp(val, absum, tail):
    """True where the double-precision sum cannot be trusted to ``TARGET_RTOL``."""
    with np.errstate(invalid="ignore", over="ignore"):
        ok = np.isfinite(val) & np.isfinite(absum) & np.isfinite(tail)
        return ~ok | (TERM_EPS * absum > TARGET_RTOL * np.abs(val))


def wright_psi_series(
    upper: Sequence[Sequence[float]],
    lower: Sequence[Sequence[float]],
    z: float,
    *,
    nterms: int | None = None,
) -> SeriesResult:
    """Evaluate the generalized Wright function with error bookkeeping.

    With ``nterms`` given, exactly that many terms are summed (in extended
    precision, so that the difference between truncation orders reflects
    truncation only).
    """
    z = check_finite(z)
    up, lo, conv, za = _prepare(upper, lower, np.array([z]))
    if nterms is not None:
        return _series_mp(up, lo, conv, z, int(nterms))
    val, tail, used, absum = _series_double(up, lo, conv, za, None)
    res = SeriesResult(float(val[0]), float(tail[0]), int(used[0]), float(absum[0]))
    if _needs_mp(res.value, res.abs_sum, res.tail_bound):
        res = _series_mp(up, lo, conv, z, None)
    return res


def wright_psi(upper, lower, z):
    """Generalized Wright function :math:`{}_p\\Psi_q` at real ``z``.

    ``z`` may be a scalar or an array; arrays share one coefficient table.
    """
    if np.ndim(z) == 0:
        return wright_psi_series(upper, lower, float(z)).value
    up, lo, conv, za = _prepare(upper, lower, z)
    flat = za.ravel()
    val, tail, used, absum = _series_double(up, lo, conv, flat, None)
    for i in np.flatnonzero(_needs_mp(val, absum, tail)):
        val[i] = _series_mp(up, lo, conv, float(flat[i]), None).value
    return val.reshape(za.shape)
