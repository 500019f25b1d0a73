"""Infinitesimal generators of each family and the solution generators built from them.

A generator acts as ``xi(omega) d/domega + tau(t) d/dt + eta_coef(omega) u d/du``.
``Xd`` (adding an arbitrary solution) has no such form and carries only its tag.
"""

from __future__ import annotations

from collections.abc import Callable, Sequence
from dataclasses import dataclass, field

import numpy as np

from fracsym.errors import DomainError
from fracsym.symmetry.cases import CaseSpec, cbar

Fn = Callable[[np.ndarray], np.ndarray]


def _const(v: float) -> Fn:
    return lambda x: np.full_like(np.asarray(x, dtype=float), v)


def _identity(x):
    return np.asarray(x, dtype=float)


@dataclass(frozen=True)
class GeneratorDescriptor:
    """One generator with vectorized coefficient functions."""

    tag: str
    xi: Fn
    tau: Fn
    eta_coef: Fn | None
    #: linear combination this generator was built from, as (coefficient, tag) pairs
    combination: tuple[tuple[float, str], ...] = field(default=())

    @property
    def arbitrary(self) -> bool:
        """True for the tag-only generator ``Xd``."""
        return self.eta_coef is None

    def surface_residual(self, omega, t, u, u_omega, u_t):
        """``xi*u_omega + tau*u_t - eta_coef*u``."""
        if self.arbitrary:
            raise DomainError("Xd has no invariant surface condition")
        return self.xi(omega) * u_omega + self.tau(t) * u_t - self.eta_coef(omega) * u


def _scaling(tag: str, alpha: float, eta: Fn) -> GeneratorDescriptor:
    return GeneratorDescriptor(tag, _identity, lambda t: (2.0 / alpha) * np.asarray(t, float), eta)


def _translation(tag: str, eta: Fn) -> GeneratorDescriptor:
    return GeneratorDescriptor(tag, _const(1.0), _const(0.0), eta)


def generators(case: CaseSpec, alpha: float) -> list[GeneratorDescriptor]:
    """All generators of the family, ``Xd`` and ``X1`` first.

    ``tau`` depends on the derivative order, hence ``alpha``.
    """
    if not alpha > 0:
        raise DomainError("alpha must be positive")
    cid = case.case_id
    out = [
        GeneratorDescriptor("Xd", _const(0.0), _const(0.0), None),
        GeneratorDescriptor("X1", _const(0.0), _const(0.0), _const(1.0)),
    ]
    if cid in (2, 3, 4):
        out.append(
            _scaling(f"X{cid}", alpha, lambda w: -0.5 * np.asarray(w, float) * cbar(case, np.asarray(w, float)))
        )
    elif cid in (5, 6):
        out.append(_translation(f"X{cid}", lambda w: -0.5 * cbar(case, np.asarray(w, float))))
    elif cid == 7:
        out.append(_scaling("X7", alpha, _const(0.0)))
        out.append(_translation("X8", _const(0.0)))
    elif cid == 8:
        out.append(_scaling("X7", alpha, _const(0.0)))
        out.append(_translation("X9", lambda w: -1.0 / np.asarray(w, float)))
    return out


def combine(terms: Sequence[tuple[float, GeneratorDescriptor]], tag: str) -> GeneratorDescriptor:
    """Linear combination ``sum c_i X_i`` of generators (``Xd`` excluded)."""
    for _, g in terms:
        if g.arbitrary:
            raise DomainError("Xd cannot enter a combination")
    terms = tuple((float(c), g) for c, g in terms)

    def xi(w):
        return sum(c * g.xi(w) for c, g in terms)

    def tau(t):
        return sum(c * g.tau(t) for c, g in terms)

    def eta(w):
        return sum(c * g.eta_coef(w) for c, g in terms)

    return GeneratorDescriptor(tag, xi, tau, eta, tuple((c, g.tag) for c, g in terms))


#: family that each solution generator belongs to
SOLUTION_CASE = {"V1": 2, "V2": 3, "V3": 5, "V4": 6, "V5": 7, "V6": 8, "V7": 8}


def solution_generator(
    tag: str, case: CaseSpec, alpha: float, *, s: float = 0.0, epsilon: int = 1
) -> GeneratorDescriptor:
    """The generator ``V1``..``V7`` whose invariant solutions are known in closed form."""
    if tag not in SOLUTION_CASE:
        raise DomainError(f"unknown solution generator {tag!r}")
    if case.case_id != SOLUTION_CASE[tag]:
        raise DomainError(f"{tag} belongs to case {SOLUTION_CASE[tag]}, not case {case.case_id}")
    if epsilon not in (1, -1):
        raise DomainError("epsilon must be +1 or -1")
    g = {x.tag: x for x in generators(case, alpha)}
    l2 = case.lambda2
    if tag == "V1":
        terms = [(s + 0.5, g["X1"]), (1.0, g["X2"])]
    elif tag == "V2":
        terms = [(s + 0.5 * (1 - l2), g["X1"]), (1.0, g["X3"])]
    elif tag == "V3":
        terms = [(s - 0.5 * l2, g["X1"]), (1.0, g["X5"])]
    elif tag == "V4":
        terms = [(s, g["X1"]), (1.0, g["X6"])]
    elif tag == "V5":
        terms = [(1.0, g["X1"]), (float(epsilon), g["X8"])]
    elif tag == "V6":
        terms = [(1.0, g["X1"]), (float(epsilon), g["X9"])]
    else:
        terms = [(1.0, g["X9"])]
    return combine(terms, tag)
