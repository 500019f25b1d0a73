"""Exception hierarchy.

The CLI maps these onto exit codes, so every failure a caller can hit is one
of the classes below.
"""

from __future__ import annotations


class FracsymError(Exception):
    """Base class for all library errors."""


class DomainError(FracsymError, ValueError):
    """An argument lies outside the admissible domain of an operation."""


class PoleError(DomainError):
    """A Gamma factor was evaluated at one of its poles."""


class ConvergenceDomainError(DomainError):
    """A series or contour integral is evaluated outside its convergence region."""


class NumericalError(FracsymError, ArithmeticError):
    """A numerical procedure failed to reach its stated tolerance."""


class QuadratureError(NumericalError):
    """Contour quadrature did not converge."""


class ConfigError(FracsymError):
    """Invalid run configuration."""

    def __init__(self, message: str, *, line: int | None = None, key: str | None = None):
        self.line = line
        self.key = key
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
