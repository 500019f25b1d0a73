r"""Fox H-function of positive real argument by Mellin-Barnes quadrature.

.. math::

    H^{m,l}_{p,q}(z) = \frac{1}{2\pi i} \int_{\gamma - i\infty}^{\gamma + i\infty}
        \frac{\prod_{j\le m} \Gamma(b_j - \beta_j s) \prod_{i \le l} \Gamma(1 - a_i + \alpha_i s)}
             {\prod_{i > l} \Gamma(a_i - \alpha_i s) \prod_{j > m} \Gamma(1 - b_j + \beta_j s)}
        z^s \, ds.

For real parameters the kernel :math:`G(s)` satisfies
:math:`G(\bar s) = \overline{G(s)}`, so with :math:`s = \gamma + iy`

.. math::

    H(z) = \frac{z^\gamma}{\pi} \int_0^\infty
        \operatorname{Re}\left[G(\gamma + iy) e^{iy \ln z}\right] \, dy.

The half line is truncated where :math:`|G|` has dropped far below its peak
and integrated with composite Gauss-Legendre panels whose width is halved
until two successive levels agree. The kernel values do not depend on ``z``,
so an array of arguments sharing a contour reuses one table of kernel values.

For large ``z`` the contour is moved to the left (never across a pole) to
the approximate saddle of :math:`|G(\gamma)| z^\gamma`, which keeps the
integrand free of cancellation when ``H`` is exponentially small.
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass

import mpmath
import numpy as np
from scipy import special as sc

from fracsym.errors import ConvergenceDomainError, DomainError, QuadratureError
from fracsym.specfun._common import ConvergenceClass, ParamPairList, as_pairs

_GL_X, _GL_W = np.polynomial.legendre.leggauss(16)
#: kernel magnitude (relative to its peak) at which the line is truncated
_TRUNC_LOG = math.log(1e-18)
#: log of the smallest normal double, below which H is reported as zero
_UNDERFLOW_LOG = -745.0
_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class FoxHOrders:
    """Orders ``m, l, p, q`` of :math:`H^{m,l}_{p,q}`."""

    m: int
    l: int  # noqa: E741
    p: int
    q: int

    def __post_init__(self) -> None:
        for name in ("m", "l", "p", "q"):
            v = getattr(self, name)
            if not isinstance(v, (int, np.integer)) or v < 0:
                raise DomainError(f"{name} must be a nonnegative integer, got {v!r}")
        if self.m > self.q or self.l > self.p:
            raise DomainError(f"need m <= q and l <= p, got {self}")
        if self.m == 0 and self.l == 0:
            raise DomainError("(m, l) = (0, 0) is not allowed")


def _validate(orders: FoxHOrders, upper, lower) -> tuple[ParamPairList, ParamPairList]:
    up = as_pairs(upper, what="upper")
    lo = as_pairs(lower, what="lower")
    if len(up) != orders.p or len(lo) != orders.q:
        raise DomainError(
            f"expected {orders.p} upper and {orders.q} lower pairs, got {len(up)} and {len(lo)}"
        )
    for _, w in up + lo:
        if not w > 0:
            raise DomainError("Fox H weights must be positive")
    return up, lo


def fox_h_convergence(orders: FoxHOrders, upper, lower) -> ConvergenceClass:
    """Contour convergence of the Mellin-Barnes integral.

    ``rho > 0`` is required; the admissible sector ``|arg z| < pi*rho/2`` is
    recorded in ``sector``. Positive real ``z`` lies in it whenever
    ``rho > 0``.
    """
    up, lo = _validate(orders, upper, lower)
    m, l = orders.m, orders.l  # noqa: E741
    rho = (
        sum(w for _, w in up[:l])
        - sum(w for _, w in up[l:])
        + sum(w for _, w in lo[:m])
        - sum(w for _, w in lo[m:])
    )
    if rho > 0:
        return ConvergenceClass("everywhere", rho=rho, sector=math.pi * rho / 2)
    return ConvergenceClass("divergent", rho=rho, sector=0.0)


def fox_h_decay_params(orders: FoxHOrders, upper, lower) -> tuple[float, float, float]:
    """Large-argument decay parameters ``(mu, delta, nu)`` of :math:`H^{m,0}_{p,q}`.

    ``H(z) = O(exp(-nu (mu z)^(1/nu)) z^((2 delta + 1)/(2 nu)))``.
    """
    up, lo = _validate(orders, upper, lower)
    if orders.l != 0:
        raise DomainError("decay parameters are defined for l = 0 only")
    nu = sum(w for _, w in lo) - sum(w for _, w in up)
    if not nu > 0:
        raise DomainError(f"nu = {nu:g} must be positive")
    mu = math.prod(w**w for _, w in up) * math.prod(w ** (-w) for _, w in lo)
    delta = sum(b for b, _ in lo) - sum(a for a, _ in up) + (orders.p - orders.q) / 2
    return mu, delta, nu


def fox_h_decay_threshold(orders: FoxHOrders, upper, lower) -> float:
    """Argument beyond which :math:`H^{m,0}_{p,q}` is taken to decrease monotonically.

    The leading asymptotic term decreases for ``z > ((2 delta + 1)/(2 nu))^nu / mu``;
    the threshold doubles that value (and is at least 2) as a safety margin.
    """
    mu, delta, nu = fox_h_decay_params(orders, upper, lower)
    turn = ((2 * delta + 1) / (2 * nu)) ** nu / mu if 2 * delta + 1 > 0 else 0.0
    return 2.0 * max(1.0, turn)


@dataclass(frozen=True)
class FoxHResult:
    """Quadrature values with their error estimates (arrays of the input shape)."""

    value: np.ndarray
    error: np.ndarray
    gamma: np.ndarray
    #: integral of the absolute integrand, the scale of roundoff
    abs_integral: np.ndarray


class FoxH:
    """Fox H-function with fixed parameters, callable on positive real arrays.

    Parameters
    ----------
    rtol, atol
        A value is accepted when successive panel refinements differ by at
        most ``rtol*|H| + atol`` plus a roundoff allowance proportional to the
        integral of the absolute integrand.
    gamma
        Fixed abscissa of the contour. By default the contour starts half a
        unit left of the leftmost right-hand pole and is moved further left
        for large arguments.
    """

    def __init__(
        self,
        orders: FoxHOrders,
        upper: Sequence[Sequence[float]],
        lower: Sequence[Sequence[float]],
        *,
        rtol: float = 1e-10,
        atol: float = 0.0,
        gamma: float | None = None,
        max_levels: int = 9,
    ):
        self.orders = orders
        self.upper, self.lower = _validate(orders, upper, lower)
        conv = fox_h_convergence(orders, self.upper, self.lower)
        if not conv.convergent:
            raise ConvergenceDomainError(
                f"Mellin-Barnes integral diverges: rho = {conv.rho:g} <= 0"
            )
        self.rho = conv.rho
        self.rtol = float(rtol)
        self.atol = float(atol)
        self.max_levels = int(max_levels)
        m, l = orders.m, orders.l  # noqa: E741
        right = [b / w for b, w in self.lower[:m]]
        left = [(a - 1) / w for a, w in self.upper[:l]]
        self._right = min(right) if right else math.inf
        self._left = max(left) if left else -math.inf
        if not self._left < self._right:
            raise DomainError("left and right pole sequences overlap; no separating contour")
        if gamma is not None:
            if not self._left < gamma < self._right:
                raise DomainError(f"gamma = {gamma:g} does not separate the poles")
            self._gamma0 = float(gamma)
            self._fixed = True
        else:
            if math.isfinite(self._right):
                g0 = self._right - 0.5
                if g0 <= self._left:
                    g0 = 0.5 * (self._left + self._right)
            else:
                g0 = self._left + 0.5
            self._gamma0 = g0
            self._fixed = False

    # kernel -----------------------------------------------------------------

    def log_kernel(self, s: np.ndarray) -> np.ndarray:
        """Complex ``log G(s)``; values at poles of the denominator give ``-inf``."""
        s = np.asarray(s, dtype=complex)
        m, l = self.orders.m, self.orders.l  # noqa: E741
        out = np.zeros_like(s)
        for b, w in self.lower[:m]:
            out += sc.loggamma(b - w * s)
        for a, w in self.upper[:l]:
            out += sc.loggamma(1 - a + w * s)
        for a, w in self.upper[l:]:
            out -= sc.loggamma(a - w * s)
        for b, w in self.lower[m:]:
            out -= sc.loggamma(1 - b + w * s)
        return out

    def _ladder(self) -> np.ndarray:
        """Candidate contour abscissae: fine steps near the start, geometric further left."""
        g0 = self._gamma0
        offs = np.concatenate([np.arange(0, 8, 0.125), np.geomspace(8, 1e6, 240)])
        g = g0 - offs
        if math.isfinite(self._left):
            g = g[g > self._left + 0.125]
        return g

    def contours(self, z) -> tuple[np.ndarray, np.ndarray]:
        """Contour abscissa for each argument and the log of its saddle bound.

        The abscissa minimizes ``log|G(g + i/4)| + g ln z`` over a fixed
        ladder of candidates left of the default contour (evaluated slightly
        off the real axis, away from zeros of the denominator), so nearby
        arguments share a contour and its kernel table.
        """
        logz = np.log(np.asarray(z, dtype=float))
        if self._fixed:
            g = np.full(logz.shape, self._gamma0)
            lg = float(self.log_kernel(np.array([self._gamma0 + 0.25j]))[0].real)
            return g, lg + g * logz
        ladder = self._ladder()
        lg = self.log_kernel(ladder + 0.25j).real
        lg = np.where(np.isfinite(lg), lg, np.inf)
        best = np.empty(logz.shape, dtype=np.intp)
        phi = np.empty(logz.shape)
        flat_best, flat_phi, flat_lz = best.ravel(), phi.ravel(), logz.ravel()
        for c0 in range(0, flat_lz.size, 4096):
            sl = slice(c0, c0 + 4096)
            tab = lg[:, None] + ladder[:, None] * flat_lz[None, sl]
            k = np.argmin(tab, axis=0)
            flat_best[sl] = k
            flat_phi[sl] = tab[k, np.arange(k.size)]
        return ladder[best], phi

    def contour(self, z: float) -> float:
        """Abscissa of the contour used for argument ``z``."""
        return float(self.contours(np.array([z]))[0][0])

    def _truncation(self, g: float) -> tuple[float, float]:
        """Return ``(T, log peak |G|)`` on the line Re s = g."""
        y = np.linspace(0.0, 8.0, 33)
        peak = -np.inf
        while True:
            lg = self.log_kernel(g + 1j * y).real
            peak = max(peak, float(np.max(lg)))
            tail = lg[-8:]
            if np.all(tail < peak + _TRUNC_LOG) and tail[-1] <= tail[0]:
                below = np.flatnonzero(lg >= peak + _TRUNC_LOG)
                return float(y[below[-1] + 1]) if below.size else float(y[1]), peak
            if y[-1] > 1e7:
                raise QuadratureError("kernel does not decay along the contour")
            y = np.linspace(0.0, 2 * y[-1], 2 * (y.size - 1) + 1)

    @staticmethod
    def _nodes(T: float, width: float) -> tuple[np.ndarray, np.ndarray]:
        npan = max(1, int(math.ceil(T / width)))
        h = T / npan
        left = np.arange(npan) * h
        y = (left[:, None] + 0.5 * h * (_GL_X[None, :] + 1.0)).ravel()
        w = np.tile(0.5 * h * _GL_W, npan)
        return y, w

    def _integrate_group(self, g: float, logz: np.ndarray):
        T, logpeak = self._truncation(g)
        n = logz.size
        value = np.zeros(n)
        error = np.full(n, np.inf)
        absint = np.zeros(n)
        # scale out the peak so that kernel values are O(1)
        scale = logpeak + g * logz
        under = scale < _UNDERFLOW_LOG
        value[under] = 0.0
        error[under] = 0.0
        todo = np.flatnonzero(~under)
        if todo.size == 0:
            return value, error, absint
        lmax = float(np.max(np.abs(logz[todo])))
        width = min(2.0, 4.0 * math.pi / lmax) if lmax > 0 else 2.0
        prev = None
        for _level in range(self.max_levels):
            y, w = self._nodes(T, width)
            kern = np.exp(self.log_kernel(g + 1j * y) - logpeak)
            kr, ki = kern.real, kern.imag
            cur = np.empty(todo.size)
            cabs = np.empty(todo.size)
            for c0 in range(0, todo.size, 1024):
                sel = todo[c0 : c0 + 1024]
                ph = np.outer(logz[sel], y)
                f = kr[None, :] * np.cos(ph) - ki[None, :] * np.sin(ph)
                cur[c0 : c0 + sel.size] = f @ w
                cabs[c0 : c0 + sel.size] = np.abs(f) @ w
            if prev is not None:
                fac = np.exp(scale[todo]) / math.pi
                diff = np.abs(cur - prev) * fac
                val = cur * fac
                aint = cabs * fac
                ok = diff <= self.rtol * np.abs(val) + self.atol + 64 * _EPS * aint
                value[todo] = val
                error[todo] = diff
                absint[todo] = aint
                keep = ~ok
                todo, cur = todo[keep], cur[keep]
                if todo.size == 0:
                    break
            prev = cur
            width *= 0.5
        return value, error, absint

    def evaluate(self, z) -> FoxHResult:
        """Evaluate with error estimates; raises :class:`QuadratureError` on failure."""
        z = np.asarray(z, dtype=float)
        flat = z.ravel()
        if not np.all(np.isfinite(flat)) or np.any(flat <= 0):
            raise DomainError("Fox H arguments must be positive and finite")
        uniq, inv = np.unique(flat, return_inverse=True)
        logz = np.log(uniq)
        gam, phi = self.contours(uniq)
        value = np.zeros(uniq.size)
        error = np.zeros(uniq.size)
        absint = np.zeros(uniq.size)
        # |H| <= z^gamma * int |G| dy; a saddle value far below the underflow
        # threshold means the result is zero in double precision
        low = phi < _UNDERFLOW_LOG - 50
        for g in np.unique(gam[~low]):
            idx = np.flatnonzero((gam == g) & ~low)
            v, e, a = self._integrate_group(float(g), logz[idx])
            value[idx], error[idx], absint[idx] = v, e, a
        bad = ~(error <= self.rtol * np.abs(value) + self.atol + 64 * _EPS * absint)
        if np.any(bad):
            i = int(np.flatnonzero(bad)[0])
            raise QuadratureError(
                f"Fox H quadrature did not converge at z = {uniq[i]:g} "
                f"(estimate {value[i]:.6g}, error {error[i]:.3g})"
            )
        shape = z.shape
        return FoxHResult(
            value[inv].reshape(shape),
            error[inv].reshape(shape),
            gam[inv].reshape(shape),
            absint[inv].reshape(shape),
        )

    def __call__(self, z):
        res = self.evaluate(z)
        return float(res.value) if np.ndim(z) == 0 else res.value


def fox_h(
    orders: FoxHOrders,
    upper: Sequence[Sequence[float]],
    lower: Sequence[Sequence[float]],
    z,
    **options,
):
    """Fox H-function :math:`H^{m,l}_{p,q}` at positive real ``z`` (scalar or array).

    Keyword options are passed to :class:`FoxH`.
    """
    return FoxH(orders, upper, lower, **options)(z)


def fox_h_residues(
    orders: FoxHOrders,
    upper: Sequence[Sequence[float]],
    lower: Sequence[Sequence[float]],
    z: float,
    *,
    max_terms: int = 20_000,
) -> float:
    """Residue series of :math:`H^{m,0}_{p,q}` in extended precision.

    Sums the residues at the right-hand poles ``s = (b_j + k)/beta_j`` until
    the terms are negligible, raising the working precision until the
    cancellation between terms is absorbed. A lower pair among the first
    ``m`` that coincides with an upper pair cancels against it first.
    Coinciding poles that remain (higher-order poles) are not supported.
    """
    up, lo = _validate(orders, upper, lower)
    if orders.l != 0:
        raise DomainError("the residue series is implemented for l = 0 only")
    if not z > 0:
        raise DomainError("z must be positive")
    m = orders.m
    right = list(lo[:m])
    rest_lo = list(lo[m:])
    rest_up = list(up)
    for pair in list(right):
        if pair in rest_up:
            right.remove(pair)
            rest_up.remove(pair)
    if not right:
        raise DomainError("no right-hand poles remain after cancellation")
    for i, (b1, w1) in enumerate(right):
        for b2, w2 in right[i + 1 :]:
            # poles (b1+k)/w1 and (b2+j)/w2 coincide when w2*b1 - w1*b2 + w2*k - w1*j = 0
            if w1 == w2 and abs((b1 - b2) - round(b1 - b2)) <= 1e-12:
                raise DomainError("coinciding poles: the residue series needs log terms")

    def pole_sum(dps: int):
        with mpmath.workdps(dps):
            x = mpmath.mpf(z)
            total = mpmath.mpf(0)
            biggest = mpmath.mpf(0)
            for j, (b, w) in enumerate(right):
                small = 0
                for k in range(max_terms):
                    sp = (mpmath.mpf(b) + k) / w
                    term = (-1) ** k / (mpmath.factorial(k) * w)
                    for i, (bi, wi) in enumerate(right):
                        if i != j:
                            term *= mpmath.gamma(bi - wi * sp)
                    for a, wa in rest_up:
                        term *= mpmath.rgamma(a - wa * sp)
                    for bi, wi in rest_lo:
                        term *= mpmath.rgamma(1 - bi + wi * sp)
                    term *= mpmath.power(x, sp)
                    total += term
                    biggest = max(biggest, abs(term))
                    # stop after a run of terms far below the largest one
                    small = small + 1 if abs(term) <= mpmath.mpf(10) ** (-dps) * biggest else 0
                    if small >= 8:
                        break
                else:
                    raise QuadratureError("residue series did not converge")
            return total, biggest

    dps = 30
    while True:
        total, biggest = pole_sum(dps)
        lost = 0 if total == 0 else int(mpmath.ceil(mpmath.log10(biggest / abs(total))))
        if total != 0 and lost + 20 <= dps:
            return float(total)
        if dps > 2000:
            raise QuadratureError("residue series suffers from total cancellation")
        dps = max(lost, dps) + 30
