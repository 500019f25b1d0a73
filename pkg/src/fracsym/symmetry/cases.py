r"""The eight coefficient families of the reduced equation

.. math::

    D^\alpha_t u = u_{\omega\omega} + \bar c(\omega) u_\omega

and their admissible domains. Family 1 is the generic one (any :math:`\bar c`);
families 2 to 8 are the special forms with extended symmetry.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from fracsym.errors import DomainError

#: relative size below which a denominator counts as zero
_ZERO_TOL = 1e-13


@dataclass(frozen=True)
class CaseSpec:
    """One coefficient family with its parameters.

    Parameters unused by the family are ignored. ``lambda1`` is the additive
    constant of the omega map and never enters :math:`\\bar c`.
    """

    case_id: int
    lambda1: float = 0.0
    lambda2: float = 0.0
    lambda3: float = 0.0
    epsilon: int = 1

    def __post_init__(self) -> None:
        if self.case_id not in range(1, 9):
            raise DomainError(f"case_id must be in 1..8, got {self.case_id!r}")
        for name in ("lambda1", "lambda2", "lambda3"):
            v = float(getattr(self, name))
            if not math.isfinite(v):
                raise DomainError(f"{name} must be finite")
            object.__setattr__(self, name, v)
        if self.epsilon not in (1, -1):
            raise DomainError(f"epsilon must be +1 or -1, got {self.epsilon!r}")
        object.__setattr__(self, "epsilon", int(self.epsilon))
        cid, l2 = self.case_id, self.lambda2
        if cid == 3 and l2 == -1:
            raise DomainError("case 3 requires lambda2 != -1")
        if cid in (4, 5, 6) and l2 == 0:
            raise DomainError(f"case {cid} requires lambda2 != 0")

    @property
    def parameters(self) -> dict[str, float]:
        """The parameters that enter this family's coefficient."""
        names = {
            1: (),
            2: ("lambda2",),
            3: ("lambda2", "lambda3"),
            4: ("lambda2", "lambda3"),
            5: ("lambda2", "epsilon"),
            6: ("lambda2",),
            7: (),
            8: (),
        }[self.case_id]
        return {k: getattr(self, k) for k in names}


def _positive(omega: np.ndarray, cid: int) -> None:
    if np.any(omega <= 0):
        raise DomainError(f"case {cid}: omega must be positive")


def _nonzero(den: np.ndarray, scale: np.ndarray, what: str) -> None:
    if np.any(np.abs(den) <= _ZERO_TOL * np.maximum(scale, 1.0)):
        raise DomainError(f"{what} vanishes on the requested omega values")


def cbar_parts(case: CaseSpec, omega) -> tuple[np.ndarray, np.ndarray]:
    """Numerator and denominator of :math:`\\bar c`, after domain checks."""
    w = np.asarray(omega, dtype=float)
    if not np.all(np.isfinite(w)):
        raise DomainError("omega must be finite")
    cid, l2, l3, eps = case.case_id, case.lambda2, case.lambda3, case.epsilon
    if cid == 1:
        raise DomainError("case 1 admits any coefficient; there is no closed form")
    if cid == 2:
        _positive(w, cid)
        L = np.log(w) + l2
        _nonzero(L - 2, np.abs(L), "ln(omega) + lambda2 - 2")
        return L, w * (L - 2)
    if cid == 3:
        _positive(w, cid)
        P = l3 * w**l2
        den = P + l2 + 1
        _nonzero(den, np.abs(P) + abs(l2 + 1), "lambda3*omega^lambda2 + lambda2 + 1")
        return (l2 + 1) * (P - l2 + 1), w * den
    if cid == 4:
        _positive(w, cid)
        th = 0.5 * l2 * np.log(w) + l3
        c = np.cos(th)
        _nonzero(c, np.ones_like(c), "cos(lambda2/2 ln(omega) + lambda3) (tan pole)")
        den = l2 * np.sin(th) + c
        _nonzero(den, abs(l2) + np.abs(c), "lambda2*tan(lambda2/2 ln(omega) + lambda3) + 1")
        return (l2**2 + 1) * c, w * den
    if cid == 5:
        # scale by exp(-|lambda2 omega|) so that neither part overflows
        x = l2 * w
        big = x > 0
        e = np.exp(-np.abs(x))
        num = np.where(big, l2 * (eps - e), l2 * (eps * e - 1))
        den = np.where(big, eps + e, eps * e + 1)
        _nonzero(den, np.ones_like(den), "epsilon*exp(lambda2*omega) + 1")
        return num, den
    if cid == 6:
        th = 0.5 * l2 * w
        c = np.cos(th)
        _nonzero(c, np.ones_like(c), "cos(lambda2*omega/2)")
        return -l2 * np.sin(th), c
    if cid == 7:
        return np.zeros_like(w), np.ones_like(w)
    _positive(w, cid)
    return np.full_like(w, 2.0), w


def cbar(case: CaseSpec, omega):
    """Coefficient :math:`\\bar c(\\omega)` of the family; scalar or array."""
    num, den = cbar_parts(case, omega)
    out = num / den
    return float(out) if np.ndim(omega) == 0 else out


def domain_description(case: CaseSpec) -> str:
    """Human-readable admissible set of omega for the family."""
    return {
        1: "any omega where the given coefficient is smooth",
        2: "omega > 0, ln(omega) + lambda2 != 2",
        3: "omega > 0, lambda3*omega^lambda2 + lambda2 + 1 != 0",
        4: "omega > 0, away from tan poles and zeros of lambda2*tan(lambda2/2 ln(omega) + lambda3) + 1",
        5: "all omega with epsilon*exp(lambda2*omega) + 1 != 0",
        6: "all omega with cos(lambda2*omega/2) != 0",
        7: "all omega",
        8: "omega > 0",
    }[case.case_id]


def singular_points(case: CaseSpec, lo: float, hi: float) -> list[float]:
    """Excluded omega values of the family inside ``[lo, hi]`` (sorted).

    A grid that straddles one of these points is invalid even when no node
    falls on it.
    """
    cid, l2, l3, eps = case.case_id, case.lambda2, case.lambda3, case.epsilon
    pts: list[float] = []

    if cid in (2, 3, 4, 8) and lo <= 0:
        pts.append(0.0)
    if cid == 2:
        w = math.exp(2 - l2)
        if lo <= w <= hi:
            pts.append(w)
    elif cid == 3 and l3 != 0 and l2 != 0:
        r = -(l2 + 1) / l3
        if r > 0:
            w = r ** (1 / l2)
            if lo <= w <= hi:
                pts.append(w)
    elif cid == 4:
        lo_p = max(lo, 1e-300)
        if hi > 0:
            th_a = 0.5 * l2 * math.log(lo_p) + l3
            th_b = 0.5 * l2 * math.log(hi) + l3
            th_lo, th_hi = min(th_a, th_b), max(th_a, th_b)
            for base in (math.pi / 2, math.atan(-1 / l2)):
                k0 = math.ceil((th_lo - base) / math.pi)
                k1 = math.floor((th_hi - base) / math.pi)
                for k in range(k0, k1 + 1):
                    th = base + k * math.pi
                    pts.append(math.exp(2 * (th - l3) / l2))
    elif cid == 5:
        if eps == -1 and lo <= 0 <= hi:
            pts.append(0.0)
    elif cid == 6:
        # cos(l2 w / 2) = 0 at w = (pi + 2k pi)/l2
        step = 2 * math.pi / abs(l2)
        base = math.pi / abs(l2)
        k0 = math.ceil((lo - base) / step)
        k1 = math.floor((hi - base) / step)
        pts.extend(base + k * step for k in range(k0, k1 + 1))
    return sorted(set(pts))
