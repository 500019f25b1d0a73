from __future__ import annotations

import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass

import mpmath
import numpy as np
from scipy import special as sc

from fracsym.errors import DomainError, NumericalError

ParamPair = tuple[float, float]
ParamPairList = tuple[ParamPair, ...]

#: double-path error per unit of absolute series mass (terms carry ~ulp errors)
TERM_EPS = 4.0 * np.finfo(float).eps


@dataclass(frozen=True)
class SeriesResult:
    """Value of a truncated series with its error bookkeeping."""

    value: float
    #: upper estimate of the absolute truncation error
    tail_bound: float
    nterms: int
    #: sum of absolute values of the terms used
    abs_sum: float
    #: True when the terms were accumulated in extended precision
    extended: bool = False

    @property
    def condition(self) -> float:
        return self.abs_sum / abs(self.value) if self.value != 0 else math.inf


@dataclass(frozen=True)
class ConvergenceClass:
    """Where a Wright series or Fox H contour integral converges.

    ``kind`` is ``"everywhere"``, ``"disk"`` or ``"divergent"``. For Wright
    functions ``delta`` holds the weight balance; for Fox H functions ``rho``
    holds the contour decay exponent and ``sector`` the half-opening angle of
    the admissible ``arg z`` sector.
    """

    kind: str
    radius: float | None = None
    delta: float | None = None
    rho: float | None = None
    sector: float | None = None

    def __post_init__(self) -> None:
        if self.kind not in ("everywhere", "disk", "divergent"):
            raise DomainError(f"unknown convergence kind {self.kind!r}")
        if self.kind == "disk" and not (self.radius is not None and self.radius > 0):
            raise DomainError("disk convergence requires a positive radius")

    @property
    def convergent(self) -> bool:
        return self.kind != "divergent"

    def admits(self, z: float) -> bool:
        if self.kind == "everywhere":
            return True
        if self.kind == "disk":
            assert self.radius is not None
            return abs(z) < self.radius
        return False


def as_pairs(pairs: Iterable[Sequence[float]], *, what: str) -> ParamPairList:
    out = []
    for item in pairs:
        if len(item) != 2:
            raise DomainError(f"{what}: expected (coefficient, weight) pairs, got {item!r}")
        a, w = float(item[0]), float(item[1])
        if not (math.isfinite(a) and math.isfinite(w)):
            raise DomainError(f"{what}: non-finite parameter in {item!r}")
        out.append((a, w))
    return tuple(out)


def is_nonpositive_integer(x: float, tol: float = 1e-12) -> bool:
    return x <= tol and abs(x - round(x)) <= tol


def log_abs_gamma(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Return ``(log|Gamma(x)|, sign Gamma(x))`` for real arrays.

    At poles the log is ``+inf`` and the sign is 0.
    """
    x = np.asarray(x, dtype=float)
    lg = sc.gammaln(x)
    sg = sc.gammasgn(x)
    pole = (x <= 0) & (x == np.floor(x))
    lg = np.where(pole, np.inf, lg)
    sg = np.where(pole, 0.0, sg)
    return lg, sg


#: decimal digits kept beyond those lost to cancellation in extended precision
GUARD_DIGITS = 20


def peak_log10(log_terms: np.ndarray) -> float:
    """``log10`` of the largest term, from natural-log magnitudes (``-inf`` allowed)."""
    finite = log_terms[np.isfinite(log_terms)]
    return float(finite.max()) / math.log(10) if finite.size else 0.0


def escalate(run, peak: float, max_passes: int = 5):
    """Call ``run(digits) -> (result, lost_digits)`` with increasing precision.

    Starts from enough digits to hold the largest term (``peak`` is its
    ``log10``) and repeats until the digits lost to cancellation leave
    :data:`GUARD_DIGITS` to spare.
    """
    digits = GUARD_DIGITS + 5 + max(0, int(math.ceil(peak)))
    for _ in range(max_passes):
        res, lost = run(digits)
        if lost + GUARD_DIGITS <= digits:
            return res
        digits = int(math.ceil(lost)) + GUARD_DIGITS + 5
    raise NumericalError(f"extended-precision series still loses {lost:.0f} of {digits} digits")


def lost_digits(value, abs_sum) -> float:
    """Digits cancelled when a sum of terms with total magnitude ``abs_sum`` gives ``value``."""
    if value == 0 or abs_sum == 0:
        return 0.0
    return max(0.0, float(mpmath.log10(abs(abs_sum) / abs(value))))


def check_finite(z: float, name: str = "z") -> float:
    z = float(z)
    if not math.isfinite(z):
        raise DomainError(f"{name} must be finite, got {z!r}")
    return z
