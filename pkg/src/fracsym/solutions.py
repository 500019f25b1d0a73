r"""Invariant solutions of :math:`D^\alpha_t u = u_{\omega\omega} + \bar c(\omega) u_\omega`.

Each solution generator ``V1``..``V7`` has a family of invariant solutions:

* ``V1`` (case 2) and ``V2`` (case 3): a Fox H form for ``0 < alpha < 2`` and a
  finite sum of :math:`{}_3\Psi_1` functions for ``alpha >= 2``;
* ``V3``..``V6`` (cases 5, 6, 7, 8): separable products of a spatial factor
  and a sum of Mittag-Leffler terms :math:`t^{\alpha-k} E_{\alpha,1+\alpha-k}(\mu t^\alpha)`;
* ``V7`` (case 8): :math:`\omega^{-1} \sum_k c_k t^{\alpha-k}`.

:func:`classical_limit` evaluates the closed forms at ``alpha = 1`` and
``alpha = 2`` directly from elementary functions and :math:`{}_2F_1`, which
makes it an independent check on :func:`eval_solution`.
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass, replace

import numpy as np
from scipy import special as sc

from fracsym.errors import DomainError, PoleError
from fracsym.fracderiv import FracOrder
from fracsym.specfun import FoxH, FoxHOrders, gauss_2f1, mittag_leffler_array, wright_psi
from fracsym.specfun._common import is_nonpositive_integer
from fracsym.symmetry.cases import CaseSpec
from fracsym.symmetry.generators import SOLUTION_CASE

#: similarity exponents for which the Fox H forms have been validated
S_RANGE = (-3.0, 1.0)
#: relative margin kept from the boundary of the 3Psi1 disk at alpha = 2
DISK_MARGIN = 1e-3
_H_ORDERS = FoxHOrders(2, 0, 1, 2)


@dataclass(frozen=True)
class SolutionSpec:
    """An invariant solution: generator tag, order, exponent, coefficients and family.

    ``epsilon`` is the sign in the ``V5``/``V6`` generators; the sign inside
    the ``V3`` coefficient is ``case_params.epsilon``. ``coeffs`` holds
    ``c_1..c_n``, and the Fox H forms take only ``c_1``.
    """

    generator: str
    order: FracOrder
    s: float
    epsilon: int
    coeffs: tuple[float, ...]
    case_params: CaseSpec

    def __post_init__(self) -> None:
        if self.generator not in SOLUTION_CASE:
            raise DomainError(f"unknown generator {self.generator!r}; expected V1..V7")
        if not isinstance(self.order, FracOrder):
            object.__setattr__(self, "order", FracOrder(float(self.order)))
        if not isinstance(self.case_params, CaseSpec):
            raise DomainError("case_params must be a CaseSpec")
        want_case = SOLUTION_CASE[self.generator]
        if self.case_params.case_id != want_case:
            raise DomainError(
                f"{self.generator} belongs to case {want_case}, not case {self.case_params.case_id}"
            )
        coeffs = tuple(float(c) for c in self.coeffs)
        if not all(math.isfinite(c) for c in coeffs):
            raise DomainError("coefficients must be finite")
        object.__setattr__(self, "coeffs", coeffs)
        s = float(self.s)
        if not math.isfinite(s):
            raise DomainError("s must be finite")
        object.__setattr__(self, "s", s)
        if self.epsilon not in (1, -1):
            raise DomainError("epsilon must be +1 or -1")
        object.__setattr__(self, "epsilon", int(self.epsilon))
        want = 1 if self.h_form else self.order.n
        if len(coeffs) != want:
            form = "the Fox H form" if self.h_form else f"alpha = {self.order.alpha:g} (n = {want})"
            raise DomainError(f"{self.generator} with {form} takes {want} coefficient(s), got {len(coeffs)}")
        if self.h_form and not S_RANGE[0] <= s <= S_RANGE[1]:
            raise DomainError(
                f"s = {s:g} outside the validated range [{S_RANGE[0]:g}, {S_RANGE[1]:g}] of the Fox H form"
            )

    @property
    def h_form(self) -> bool:
        """True when the solution is the Fox H form (``V1``/``V2`` with ``alpha < 2``)."""
        return self.generator in ("V1", "V2") and self.order.alpha < 2

    @property
    def alpha(self) -> float:
        return self.order.alpha

    @property
    def lambda2(self) -> float:
        return self.case_params.lambda2

    @property
    def lambda3(self) -> float:
        return self.case_params.lambda3

    def scaled(self, factor: float) -> SolutionSpec:
        """Same solution with every coefficient multiplied by ``factor``."""
        return replace(self, coeffs=tuple(factor * c for c in self.coeffs))


@dataclass(frozen=True)
class SimilarityFrame:
    """``u = prefactor * phi(z)`` with similarity variable ``z = omega^(-2/alpha) t``."""

    prefactor: float
    z: float


def _log_denominator(lambda2: float, omega):
    w = np.asarray(omega, dtype=float)
    if np.any(w <= 0):
        raise DomainError("omega must be positive")
    L = np.log(w) + lambda2 - 2
    if np.any(np.abs(L) <= 1e-13 * (1 + np.abs(np.log(w)) + abs(lambda2))):
        raise DomainError("ln(omega) + lambda2 - 2 vanishes")
    return L


def similarity_transform(order: FracOrder, s: float, lambda2: float, omega: float, t: float) -> SimilarityFrame:
    """Prefactor ``omega^s/(ln omega + lambda2 - 2)`` and ``z = omega^(-2/alpha) t``."""
    if not t >= 0:
        raise DomainError("t must be nonnegative")
    L = float(_log_denominator(lambda2, omega))
    return SimilarityFrame(omega**s / L, omega ** (-2.0 / order.alpha) * t)


def _spatial(spec: SolutionSpec, w: np.ndarray) -> np.ndarray:
    """Factor multiplying the time series (or the profile) at each omega."""
    g, s, l2, l3, eps = spec.generator, spec.s, spec.lambda2, spec.lambda3, spec.epsilon
    if g == "V3":
        eps = spec.case_params.epsilon
    if g == "V1":
        L = _log_denominator(l2, w)
        return w**s / L
    if g == "V2":
        if np.any(w <= 0):
            raise DomainError("omega must be positive")
        D = l3 * w**l2 + l2 + 1
        if np.any(np.abs(D) <= 1e-13 * (np.abs(l3 * w**l2) + abs(l2 + 1))):
            raise DomainError("lambda3*omega^lambda2 + lambda2 + 1 vanishes")
        return w**s / D
    if g == "V3":
        D = eps * np.exp(l2 * w) + 1
        if np.any(np.abs(D) <= 1e-13):
            raise DomainError("epsilon*exp(lambda2*omega) + 1 vanishes")
        return np.exp(s * w) / D
    if g == "V4":
        c = np.cos(0.5 * l2 * w)
        if np.any(np.abs(c) <= 1e-13):
            raise DomainError("cos(lambda2*omega/2) vanishes")
        return np.exp(s * w) / c
    if g == "V5":
        return np.exp(eps * w)
    if np.any(w <= 0):
        raise DomainError("omega must be positive")
    if g == "V6":
        return np.exp(eps * w) / w
    return 1.0 / w


def ml_rate(spec: SolutionSpec) -> float:
    """Rate ``mu`` in :math:`E_{\\alpha,\\cdot}(\\mu t^\\alpha)` for ``V3``..``V6``."""
    g, s, l2 = spec.generator, spec.s, spec.lambda2
    if g == "V3":
        return s * (s - l2)
    if g == "V4":
        return 0.25 * l2**2 + s**2
    if g in ("V5", "V6"):
        return 1.0
    raise DomainError(f"{g} has no Mittag-Leffler time factor")


def _time_series(spec: SolutionSpec, t: np.ndarray) -> np.ndarray:
    """``sum_k c_k t^(alpha-k) E_{alpha,1+alpha-k}(mu t^alpha)`` (``V7``: without E)."""
    a = spec.alpha
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise DomainError("t must be nonnegative")
    out = np.zeros_like(t)
    mu = 0.0 if spec.generator == "V7" else ml_rate(spec)
    for k, ck in enumerate(spec.coeffs, start=1):
        if ck == 0:
            continue
        p = a - k
        if np.any(t == 0) and p < 0:
            raise DomainError(f"term t^{p:g} is singular at t = 0")
        with np.errstate(divide="ignore"):
            tp = np.where(t > 0, t, 1.0) ** p
        tp = np.where(t > 0, tp, 1.0 if p == 0 else 0.0)
        if spec.generator == "V7":
            out += ck * tp
        else:
            out += ck * tp * mittag_leffler_array(a, 1 + a - k, mu * t**a)
    return out


def _h_lower(spec: SolutionSpec) -> tuple[tuple[float, float], tuple[float, float]]:
    b = -spec.s / 2
    if spec.generator == "V1":
        return (b, 1.0), (b, 1.0)
    return (b, 1.0), (b + spec.lambda2 / 2, 1.0)


def h_function(spec: SolutionSpec, **options) -> FoxH:
    """The Fox H function of the ``V1``/``V2`` solution with ``alpha < 2``."""
    if not spec.h_form:
        raise DomainError(f"{spec.generator} with alpha = {spec.alpha:g} has no Fox H form")
    return FoxH(_H_ORDERS, [(1.0, spec.alpha)], list(_h_lower(spec)), **options)


def _psi_params(spec: SolutionSpec, k: int):
    a, s = spec.alpha, spec.s
    b = 1 - k / a - s / 2
    shift = spec.lambda2 / 2 if spec.generator == "V2" else 0.0
    return [(b, 1.0), (b + shift, 1.0), (1.0, 1.0)], [(1 + a - k, a)]


def similarity_profile(spec: SolutionSpec, z) -> np.ndarray:
    """Profile ``phi(z)`` of a ``V1``/``V2`` solution, ``u = prefactor * phi``.

    For the Fox H form the argument is ``1/(4 z^alpha)``; for ``alpha >= 2`` the
    profile is ``sum_k c_k z^(alpha-k) 3Psi1[4 z^alpha]``.
    """
    if spec.generator not in ("V1", "V2"):
        raise DomainError("similarity profiles are defined for V1 and V2")
    z = np.asarray(z, dtype=float)
    a = spec.alpha
    if spec.h_form:
        if np.any(z <= 0):
            raise DomainError("the Fox H form needs t > 0")
        return spec.coeffs[0] * h_function(spec)(1.0 / (4.0 * z**a))
    if np.any(z < 0):
        raise DomainError("t must be nonnegative")
    x = 4.0 * z**a
    if a == 2 and np.any(x >= 4 * (1 - DISK_MARGIN)):
        raise DomainError(
            f"4 t^alpha / omega^2 must stay below {4 * (1 - DISK_MARGIN):g} at alpha = 2 (disk of radius 4)"
        )
    out = np.zeros_like(z)
    for k, ck in enumerate(spec.coeffs, start=1):
        if ck == 0:
            continue
        up, lo = _psi_params(spec, k)
        p = a - k
        if np.any(z == 0) and p < 0:
            raise DomainError(f"term t^{p:g} is singular at t = 0")
        with np.errstate(divide="ignore"):
            zp = np.where(z > 0, z, 1.0) ** p
        zp = np.where(z > 0, zp, 1.0 if p == 0 else 0.0)
        out += ck * zp * wright_psi(up, lo, x)
    return out


def eval_grid(spec: SolutionSpec, omega, t) -> np.ndarray:
    """Solution on the tensor grid; result shape ``(len(t), len(omega))``."""
    w = np.atleast_1d(np.asarray(omega, dtype=float))
    t = np.atleast_1d(np.asarray(t, dtype=float))
    if not (np.all(np.isfinite(w)) and np.all(np.isfinite(t))):
        raise DomainError("omega and t must be finite")
    if spec.generator in ("V1", "V2"):
        if spec.h_form and np.any(t <= 0):
            raise DomainError("the Fox H form needs t > 0")
        pre = _spatial(spec, w)
        z = w[None, :] ** (-2.0 / spec.alpha) * t[:, None]
        return pre[None, :] * similarity_profile(spec, z)
    return _time_series(spec, t)[:, None] * _spatial(spec, w)[None, :]


def eval_solution(spec: SolutionSpec, omega, t):
    """Value of the invariant solution at ``(omega, t)``.

    ``omega`` and ``t`` may be scalars or broadcastable arrays of point pairs;
    use :func:`eval_grid` for a tensor grid.
    """
    w, tt = np.broadcast_arrays(np.asarray(omega, dtype=float), np.asarray(t, dtype=float))
    flat_w, flat_t = w.ravel(), tt.ravel()
    if not (np.all(np.isfinite(flat_w)) and np.all(np.isfinite(flat_t))):
        raise DomainError("omega and t must be finite")
    if spec.generator in ("V1", "V2"):
        if spec.h_form and np.any(flat_t <= 0):
            raise DomainError("the Fox H form needs t > 0")
        pre = _spatial(spec, flat_w)
        z = flat_w ** (-2.0 / spec.alpha) * flat_t
        out = pre * similarity_profile(spec, z)
    else:
        out = _time_series(spec, flat_t) * _spatial(spec, flat_w)
    return float(out[0]) if w.ndim == 0 else out.reshape(w.shape)


def singular_exponents(spec: SolutionSpec, limit: int = 6) -> list[float]:
    """Powers ``t^sigma`` with ``sigma < 1`` in the small-t expansion of the solution.

    These are the terms that spoil the plain Grünwald-Letnikov scheme. Integer
    orders (where the scheme is a finite difference) and the Fox H forms (flat
    at ``t = 0``) return an empty list.
    """
    a = spec.alpha
    if spec.order.is_integer or spec.h_form:
        return []
    if spec.generator == "V7":
        mu = 0.0
    elif spec.generator in ("V1", "V2"):
        mu = 1.0
    else:
        mu = ml_rate(spec)
    out = set()
    for k, ck in enumerate(spec.coeffs, start=1):
        if ck == 0:
            continue
        j = 0
        while True:
            sig = a - k + a * j
            if sig >= 1 or (j > 0 and mu == 0):
                break
            # 1/Gamma(1 + sig) kills the term when 1 + sig is a nonpositive integer
            if not is_nonpositive_integer(1 + sig):
                out.add(round(sig, 12))
            j += 1
    return sorted(out)[:limit]


def _require(cond: bool, spec: SolutionSpec, what: str) -> None:
    if not cond:
        raise DomainError(f"no classical closed form for {spec.generator} {what}")


def _gamma_checked(x: float, name: str) -> float:
    if is_nonpositive_integer(x):
        raise PoleError(f"Gamma({name}) has a pole: {name} = {x:g}")
    return float(sc.gamma(x))


def _wave_pair(mu: float, t: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """``(sinh(sqrt(mu) t)/sqrt(mu), cosh(sqrt(mu) t))`` continued to ``mu <= 0``."""
    if mu > 0:
        r = math.sqrt(mu)
        return np.sinh(r * t) / r, np.cosh(r * t)
    if mu < 0:
        r = math.sqrt(-mu)
        return np.sin(r * t) / r, np.cos(r * t)
    return t.copy(), np.ones_like(t)


def classical_limit(spec: SolutionSpec, omega, t):
    """Closed form of the solution at ``alpha = 1`` or ``alpha = 2``.

    Uses exponentials, hyperbolic functions and :math:`{}_2F_1` only. ``V1``
    at ``alpha = 1`` needs ``s = -2``; ``V2`` at ``alpha = 1`` needs
    ``s = lambda2 - 2`` or ``s = -2``.
    """
    a = spec.alpha
    _require(a in (1.0, 2.0), spec, f"at alpha = {a:g}")
    w, tt = np.broadcast_arrays(np.asarray(omega, dtype=float), np.asarray(t, dtype=float))
    scalar = w.ndim == 0
    w, tt = np.atleast_1d(w).astype(float), np.atleast_1d(tt).astype(float)
    g, s, l2 = spec.generator, spec.s, spec.lambda2
    c = spec.coeffs
    if g in ("V1", "V2"):
        pre = _spatial(spec, w) * w ** (-s)  # 1/L or 1/D
        if a == 1.0:
            if np.any(tt <= 0):
                raise DomainError("the alpha = 1 form needs t > 0")
            gauss = np.exp(-(w**2) / (4 * tt))
            if g == "V1":
                _require(abs(s + 2) <= 1e-12, spec, f"at alpha = 1 with s = {s:g} (needs s = -2)")
                out = c[0] * pre / (4 * tt) * gauss
            elif abs(s - (l2 - 2)) <= 1e-12:
                out = c[0] * 4 ** (l2 / 2 - 1) * tt ** (l2 / 2 - 1) * pre * gauss
            else:
                _require(abs(s + 2) <= 1e-12, spec, f"at alpha = 1 with s = {s:g} (needs s = lambda2 - 2 or -2)")
                out = c[0] * 4 ** (-l2 / 2 - 1) * w**l2 * tt ** (-l2 / 2 - 1) * pre * gauss
        else:
            x = tt**2 / w**2
            if np.any(x >= 1):
                raise DomainError("the alpha = 2 closed form needs t^2/omega^2 < 1")
            shift = l2 / 2 if g == "V2" else 0.0
            out = np.zeros_like(w)
            if c[0] != 0:
                A1, A2 = 0.5 - s / 2, 0.5 - s / 2 + shift
                G = _gamma_checked(A1, "1/2 - s/2") * _gamma_checked(A2, "1/2 - s/2 + lambda2/2" if shift else "1/2 - s/2")
                F = np.array([gauss_2f1(A1, A2, 1.5, xi) for xi in x.ravel()]).reshape(x.shape)
                out += c[0] * G * w ** (s - 1) * tt * pre * F
            if c[1] != 0:
                A1, A2 = -s / 2, -s / 2 + shift
                G = _gamma_checked(A1, "-s/2") * _gamma_checked(A2, "-s/2 + lambda2/2" if shift else "-s/2")
                F = np.array([gauss_2f1(A1, A2, 0.5, xi) for xi in x.ravel()]).reshape(x.shape)
                out += c[1] * G * w**s * pre * F
    elif g == "V7":
        out = sum(ck * tt ** (a - k) for k, ck in enumerate(c, start=1)) / w
    else:
        space = _spatial(spec, w)
        mu = ml_rate(spec)
        if a == 1.0:
            out = c[0] * space * np.exp(mu * tt)
        else:
            sh, ch = _wave_pair(mu, tt)
            out = space * (c[0] * sh + c[1] * ch)
    return float(out[0]) if scalar else out.reshape(np.broadcast(np.asarray(omega), np.asarray(t)).shape)


def reduced_ode_rhs(order: FracOrder, s: float, z, phi, dphi, d2phi):
    """Right side ``s^2 phi + (4/alpha)(1/alpha - s) z phi' + (4/alpha^2) z^2 phi''``."""
    a = order.alpha
    z = np.asarray(z, dtype=float)
    if np.any(z <= 0):
        raise DomainError("z must be positive")
    out = s**2 * np.asarray(phi) + (4 / a) * (1 / a - s) * z * np.asarray(dphi) + (4 / a**2) * z**2 * np.asarray(d2phi)
    return float(out) if np.ndim(out) == 0 else out


def make_spec(
    generator: str,
    alpha: float,
    coeffs: Sequence[float],
    *,
    s: float = 0.0,
    epsilon: int = 1,
    lambda2: float = 0.0,
    lambda3: float = 0.0,
    n: int = 0,
) -> SolutionSpec:
    """Build a spec from plain numbers; the family is implied by ``generator``.

    ``epsilon`` sets both the generator sign and, for ``V3``, the family sign.
    """
    if generator not in SOLUTION_CASE:
        raise DomainError(f"unknown generator {generator!r}; expected V1..V7")
    case = CaseSpec(SOLUTION_CASE[generator], lambda2=lambda2, lambda3=lambda3, epsilon=epsilon)
    return SolutionSpec(generator, FracOrder(alpha, n), s, epsilon, tuple(coeffs), case)


__all__ = [
    "DISK_MARGIN",
    "S_RANGE",
    "SimilarityFrame",
    "SolutionSpec",
    "classical_limit",
    "eval_grid",
    "eval_solution",
    "h_function",
    "make_spec",
    "ml_rate",
    "reduced_ode_rhs",
    "similarity_profile",
    "similarity_transform",
    "singular_exponents",
]
