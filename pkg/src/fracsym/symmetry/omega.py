"""Change of spatial variable that normalizes the diffusion coefficient."""

from __future__ import annotations

import math
import warnings
from collections.abc import Callable

import numpy as np
from scipy import integrate

from fracsym.errors import DomainError, NumericalError
from fracsym.symmetry.cases import CaseSpec, cbar

RTOL = 1e-10


def _check_path(a: Callable[[float], float], lo: float, hi: float) -> None:
    r = np.linspace(lo, hi, 257)
    vals = np.array([float(a(x)) for x in r])
    if not np.all(np.isfinite(vals)):
        raise DomainError("a(r) is not finite on the integration path")
    if np.any(vals == 0) or np.any(np.sign(vals) != np.sign(vals[0])):
        raise DomainError("a(r) vanishes on the integration path")


def omega_map(a: Callable[[float], float], beta: float, lambda1: float, x: float) -> float:
    """``omega(x) = int_beta^x dr / a(r) + lambda1`` by adaptive quadrature."""
    beta, x = float(beta), float(x)
    if not (math.isfinite(beta) and math.isfinite(x)):
        raise DomainError("beta and x must be finite")
    if x == beta:
        return float(lambda1)
    lo, hi = min(beta, x), max(beta, x)
    _check_path(a, lo, hi)
    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        try:
            val, err = integrate.quad(
                lambda r: 1.0 / float(a(r)), beta, x, epsabs=0.0, epsrel=RTOL * 1e-2, limit=200
            )
        except (integrate.IntegrationWarning, ZeroDivisionError) as exc:
            raise NumericalError(f"omega map quadrature failed: {exc}") from exc
    if not err <= RTOL * max(abs(val), 1e-300):
        raise NumericalError(f"omega map quadrature error {err:.3g} exceeds tolerance")
    return val + float(lambda1)


def coefficient_b(
    a: Callable[[float], float],
    a_prime: Callable[[float], float],
    case: CaseSpec,
    beta: float,
    x: float,
) -> float:
    """Convection coefficient ``b(x) = a(x) c(x) + a(x) a'(x)`` with ``c(x) = cbar(omega(x))``."""
    ax = float(a(x))
    if ax == 0:
        raise DomainError("a(x) must be nonzero")
    if case.case_id == 7:
        c = 0.0
    else:
        c = cbar(case, omega_map(a, beta, case.lambda1, x))
    return ax * c + ax * float(a_prime(x))
