r"""Riemann-Liouville derivatives with lower limit 0.

Two routes are provided: the exact power rule

.. math::

    D^\alpha t^p = \frac{\Gamma(p+1)}{\Gamma(p+1-\alpha)} t^{p-\alpha},

used as an oracle, and the Grünwald-Letnikov sum on a uniform grid

.. math::

    D^\alpha u(t_j) \approx h^{-\alpha} \sum_{k=0}^{j} w_k u(t_{j-k}),
    \qquad w_k = (-1)^k \binom{\alpha}{k}.

The plain sum is first-order accurate for smooth ``u`` vanishing at 0 but
loses accuracy for ``u`` with terms :math:`t^\sigma`, :math:`\sigma < 1`. When
those exponents are known, starting weights make the scheme exact for every
listed power, which restores first order for the remaining smooth part.
"""

from __future__ import annotations

import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass

import numpy as np
from scipy import special as sc

from fracsym import _kernels
from fracsym.errors import DomainError
from fracsym.specfun._common import is_nonpositive_integer


@dataclass(frozen=True)
class FracOrder:
    """Derivative order ``alpha > 0`` with its bracket ``n - 1 < alpha <= n``."""

    alpha: float
    n: int = 0

    def __post_init__(self) -> None:
        a = float(self.alpha)
        if not (math.isfinite(a) and a > 0):
            raise DomainError(f"alpha must be positive and finite, got {self.alpha!r}")
        expected = math.ceil(a)
        if self.n == 0:
            object.__setattr__(self, "n", expected)
        elif self.n != expected:
            raise DomainError(
                f"n must satisfy n-1 < alpha <= n: alpha = {a:g} gives n = {expected}, not {self.n}"
            )
        object.__setattr__(self, "alpha", a)

    @property
    def is_integer(self) -> bool:
        return self.alpha == self.n


@dataclass(frozen=True)
class TimeGrid:
    """Uniform grid ``t_j = j*dt``, ``j = 0..count-1``, anchored at the lower limit 0."""

    dt: float
    count: int

    def __post_init__(self) -> None:
        if not (math.isfinite(self.dt) and self.dt > 0):
            raise DomainError(f"dt must be positive, got {self.dt!r}")
        if int(self.count) != self.count or self.count < 1:
            raise DomainError(f"count must be a positive integer, got {self.count!r}")

    @property
    def t0(self) -> float:
        return 0.0

    @property
    def nodes(self) -> np.ndarray:
        return np.arange(self.count) * self.dt

    @property
    def t_max(self) -> float:
        return (self.count - 1) * self.dt

    def refined(self) -> TimeGrid:
        """Same interval with ``dt`` halved."""
        return TimeGrid(self.dt / 2, 2 * (self.count - 1) + 1)

    @classmethod
    def from_nodes(cls, t: Sequence[float], rtol: float = 1e-9) -> TimeGrid:
        t = np.asarray(t, dtype=float)
        if t.size == 0:
            raise DomainError("empty time grid")
        if t[0] != 0.0:
            raise DomainError("time grid must start at the lower limit t = 0")
        if t.size == 1:
            raise DomainError("cannot infer a spacing from a single node")
        d = np.diff(t)
        h = (t[-1] - t[0]) / (t.size - 1)
        if np.max(np.abs(d - h)) > rtol * h:
            raise DomainError("time grid is not uniform")
        return cls(float(h), int(t.size))


def frac_binomial(alpha: float, k: int) -> float:
    """Generalized binomial coefficient :math:`\\binom{\\alpha}{k}`."""
    if k < 0 or int(k) != k:
        raise DomainError(f"k must be a nonnegative integer, got {k!r}")
    k = int(k)
    if k == 0:
        return 1.0
    if float(alpha).is_integer() or k < 32:
        # product form; exact zero for integer alpha < k
        out = 1.0
        for i in range(k):
            out *= (alpha - i) / (i + 1)
        return out
    # (-1)^(k-1) alpha Gamma(k - alpha) / (Gamma(1 - alpha) Gamma(k + 1)), in log space
    lg = sc.gammaln(k - alpha) - sc.gammaln(1 - alpha) - sc.gammaln(k + 1.0)
    sign = sc.gammasgn(k - alpha) * sc.gammasgn(1 - alpha) * (-1.0) ** (k - 1)
    return float(sign * alpha * math.exp(lg))


def rl_derivative_power(p: float, order: FracOrder, t: float) -> float:
    """Exact RL derivative of ``t**p`` at ``t > 0``."""
    if not p > -1:
        raise DomainError(f"p must exceed -1 for integrability at 0, got {p!r}")
    if not t > 0:
        raise DomainError(f"t must be positive, got {t!r}")
    a = order.alpha
    # p = alpha - k written in floating point leaves roundoff in p + 1 - alpha
    if is_nonpositive_integer(p + 1 - a, 8 * np.finfo(float).eps * max(1.0, abs(p), a)):
        return 0.0
    return float(sc.gamma(p + 1) * sc.rgamma(p + 1 - a) * t ** (p - a))


def gl_weights(order: FracOrder, count: int) -> np.ndarray:
    """Grünwald-Letnikov weights ``w_0..w_{count-1}``."""
    if count < 1:
        raise DomainError("count must be at least 1")
    a = order.alpha
    k = np.arange(1, count, dtype=float)
    w = np.empty(count)
    w[0] = 1.0
    if count > 1:
        w[1:] = np.cumprod((k - 1 - a) / k)
    return w


def _grid_spacing(grid) -> float:
    if isinstance(grid, TimeGrid):
        return grid.dt
    if np.ndim(grid) == 0:
        h = float(grid)
        if not h > 0:
            raise DomainError("dt must be positive")
        return h
    return TimeGrid.from_nodes(grid).dt


def _distinct(exponents: Iterable[float], tol: float = 1e-8) -> list[float]:
    out: list[float] = []
    for e in sorted(float(x) for x in exponents):
        if not e > -1:
            raise DomainError(f"correction exponent {e:g} is not integrable at 0")
        if not out or e - out[-1] > tol:
            out.append(e)
    return out


def starting_weights(order: FracOrder, count: int, exponents: Sequence[float]) -> np.ndarray:
    """Starting weights ``S[n, j]`` (``j = 1..M``) for the corrected scheme.

    With ``u(0)`` left out of the convolution, the corrected sum
    ``sum_{k<n} w_k u_{n-k} + sum_j S[n, j] u_j`` reproduces ``h^alpha D^alpha t^sigma``
    exactly at every node for each listed exponent ``sigma``. The weights
    do not depend on the step size.
    """
    sig = _distinct(exponents)
    m = len(sig)
    if m == 0:
        return np.zeros((count, 0))
    a = order.alpha
    j = np.arange(1, m + 1, dtype=float)
    V = j[None, :] ** np.array(sig)[:, None]
    w = gl_weights(order, count)
    idx = np.arange(count, dtype=float)
    with np.errstate(divide="ignore"):
        powers = np.column_stack([np.where(idx > 0, idx, np.nan) ** s for s in sig])
    powers[0] = 0.0
    conv = _kernels.gl_convolve(w, np.ascontiguousarray(powers))
    exact = np.zeros((count, m))
    for q, s in enumerate(sig):
        if not is_nonpositive_integer(s + 1 - a, 0.0):
            c = sc.gamma(s + 1) * sc.rgamma(s + 1 - a)
            exact[1:, q] = c * idx[1:] ** (s - a)
    rhs = exact - conv
    S = np.linalg.solve(V, rhs.T).T
    S[0] = 0.0
    return S


def rl_derivative_grid(
    samples,
    order: FracOrder,
    grid,
    *,
    correction_exponents: Sequence[float] | None = None,
) -> np.ndarray:
    """Grünwald-Letnikov approximation of the RL derivative at every grid node.

    ``samples`` holds ``u(t_j)`` along axis 0 (extra axes are independent
    series). ``grid`` is a :class:`TimeGrid`, the step ``dt``, or the node
    array (which must be uniform and start at 0).

    With ``correction_exponents`` the sample at ``t = 0`` is ignored (it may
    be singular) and starting weights make the result exact for each power
    ``t**sigma`` listed; the value at ``t = 0`` is then ``nan``.
    """
    u = np.asarray(samples, dtype=float)
    if u.ndim == 0 or u.shape[0] == 0:
        raise DomainError("samples must be a nonempty array")
    h = _grid_spacing(grid)
    if not isinstance(grid, TimeGrid) and np.ndim(grid) == 1 and len(grid) != u.shape[0]:
        raise DomainError("samples and time nodes differ in length")
    n = u.shape[0]
    flat = np.ascontiguousarray(u.reshape(n, -1))
    if correction_exponents is not None and len(correction_exponents):
        flat = flat.copy()
        flat[0] = 0.0
    elif not np.all(np.isfinite(flat)):
        raise DomainError("samples must be finite")
    if not np.all(np.isfinite(flat)):
        raise DomainError("samples must be finite away from t = 0")
    w = gl_weights(order, n)
    out = _kernels.gl_convolve(w, flat)
    if correction_exponents is not None and len(correction_exponents):
        S = starting_weights(order, n, correction_exponents)
        m = S.shape[1]
        if m >= n:
            raise DomainError(f"{m} correction exponents need more than {n} nodes")
        out += S @ flat[1 : m + 1]
        out[0] = np.nan
    out *= h ** (-order.alpha)
    return out.reshape(u.shape)
