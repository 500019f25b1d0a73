"""Special functions: Mittag-Leffler, generalized Wright, Gauss 2F1 and Fox H."""

from __future__ import annotations

from fracsym.specfun._common import ConvergenceClass, ParamPairList, SeriesResult
from fracsym.specfun.foxh import (
    FoxH,
    FoxHOrders,
    FoxHResult,
    fox_h,
    fox_h_convergence,
    fox_h_decay_params,
    fox_h_decay_threshold,
    fox_h_residues,
)
from fracsym.specfun.hypergeometric import gauss_2f1
from fracsym.specfun.mittag_leffler import (
    mittag_leffler,
    mittag_leffler_array,
    mittag_leffler_series,
)
from fracsym.specfun.wright import wright_convergence, wright_psi, wright_psi_series

__all__ = [
    "ConvergenceClass",
    "FoxH",
    "FoxHOrders",
    "FoxHResult",
    "ParamPairList",
    "SeriesResult",
    "fox_h",
    "fox_h_convergence",
    "fox_h_decay_params",
    "fox_h_decay_threshold",
    "fox_h_residues",
    "gauss_2f1",
    "mittag_leffler",
    "mittag_leffler_array",
    "mittag_leffler_series",
    "wright_convergence",
    "wright_psi",
    "wright_psi_series",
]
