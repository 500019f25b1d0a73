"""Coefficient families, their generators, the omega map and classification."""

from __future__ import annotations

from fracsym.symmetry.cases import CaseSpec, cbar, domain_description, singular_points
from fracsym.symmetry.classify import CaseMatch, classify, sample_cbar
from fracsym.symmetry.generators import (
    SOLUTION_CASE,
    GeneratorDescriptor,
    combine,
    generators,
    solution_generator,
)
from fracsym.symmetry.omega import coefficient_b, omega_map

__all__ = [
    "SOLUTION_CASE",
    "CaseMatch",
    "CaseSpec",
    "GeneratorDescriptor",
    "cbar",
    "classify",
    "coefficient_b",
    "combine",
    "domain_description",
    "generators",
    "omega_map",
    "sample_cbar",
    "singular_points",
    "solution_generator",
]
