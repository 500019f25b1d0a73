"""Numerical classification of sampled coefficients into the families.

Families 7 and 8 have no free parameters and are tested directly. The other
families are fitted by damped least squares started from closed-form
estimates and from coarse parameter scans. Fitted parameters are returned in
a canonical form, since several families are invariant under parameter maps:

* case 3: ``(l2, l3)`` and ``(-l2, (1 - l2**2)/l3)`` give the same coefficient;
  the representative with ``l2 > 0`` is returned when ``l3 != 0``.
  With ``l2 = 0`` the coefficient is ``1/omega`` for every ``l3``.
* case 4: ``(l2, l3)``, ``(-l2, -l3)`` and ``l3 + k*pi`` agree; ``l2 > 0`` and
  ``l3`` in ``[-pi/2, pi/2)`` are returned.
* cases 5 and 6: the coefficient is even in ``l2``; ``l2 > 0`` is returned.
"""

from __future__ import annotations

import math
import warnings
from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from fracsym.errors import DomainError
from fracsym.symmetry.cases import CaseSpec, cbar

DEFAULT_THRESHOLD = 1e-6
MIN_SAMPLES = 8


@dataclass(frozen=True)
class CaseMatch:
    """Result of :func:`classify`.

    ``case`` carries the fitted parameters. ``candidates`` lists every family
    fit (best first), including the ones above the threshold.
    """

    case_id: int
    case: CaseSpec
    fit_residual: float
    candidates: tuple[CaseMatch, ...] = field(default=(), compare=False)

    def __post_init__(self) -> None:
        if not self.fit_residual >= 0:
            raise ValueError("fit_residual must be nonnegative")


def _residual(case: CaseSpec, w: np.ndarray, c: np.ndarray) -> float:
    try:
        with np.errstate(all="ignore"):
            d = cbar(case, w) - c
    except DomainError:
        return math.inf
    r = float(np.max(np.abs(d)))
    return r if math.isfinite(r) else math.inf


def _model(cid: int, extra: dict):
    def make(x) -> CaseSpec | None:
        try:
            if cid == 3:
                return CaseSpec(3, lambda2=x[0], lambda3=x[1])
            if cid == 4:
                return CaseSpec(4, lambda2=x[0], lambda3=x[1])
            if cid == 5:
                return CaseSpec(5, lambda2=x[0], epsilon=extra["epsilon"])
            return CaseSpec(cid, lambda2=x[0])
        except DomainError:
            return None

    return make


def _refine(cid: int, x0, w, c, extra=None) -> tuple[CaseSpec | None, float]:
    make = _model(cid, extra or {})

    def fun(x):
        case = make(x)
        if case is None:
            return np.full(c.size, 1e6)
        try:
            with np.errstate(all="ignore"):
                d = cbar(case, w) - c
        except DomainError:
            return np.full(c.size, 1e6)
        return np.where(np.isfinite(d), d, 1e6)

    x0 = np.atleast_1d(np.asarray(x0, dtype=float))
    if not np.all(np.isfinite(x0)):
        return None, math.inf
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        try:
            sol = optimize.least_squares(
                fun, x0, method="lm", xtol=1e-15, ftol=1e-15, gtol=1e-15, max_nfev=400 * (x0.size + 1)
            )
            x = sol.x
        except (ValueError, np.linalg.LinAlgError):
            x = x0
    case = make(x)
    if case is None:
        return None, math.inf
    return case, _residual(case, w, c)


def _best(cands: list[tuple[CaseSpec | None, float]]) -> tuple[CaseSpec | None, float]:
    cands = [cd for cd in cands if cd[0] is not None]
    if not cands:
        return None, math.inf
    return min(cands, key=lambda cd: cd[1])


def _starts(scan: np.ndarray, scores: np.ndarray, k: int = 4) -> np.ndarray:
    ok = np.isfinite(scores)
    if not np.any(ok):
        return scan[:0]
    order = np.argsort(np.where(ok, scores, np.inf))
    return scan[order[: min(k, int(ok.sum()))]]


def _fit_case2(w, c):
    if np.any(w <= 0):
        return None, math.inf
    y = w * c
    with np.errstate(all="ignore"):
        est = 2 * y / (y - 1) - np.log(w)
    est = est[np.isfinite(est)]
    if est.size == 0:
        return None, math.inf
    return _best([_refine(2, np.median(est), w, c)])


def _case3_lambda3(l2: float, w, y) -> float:
    with np.errstate(all="ignore"):
        P = (l2 + 1) * (1 - l2 - y) / (y - l2 - 1)
        l3 = P / w**l2
    l3 = l3[np.isfinite(l3)]
    return float(np.median(l3)) if l3.size else math.nan


def _fit_case3(w, c):
    if np.any(w <= 0):
        return None, math.inf
    y = w * c
    scan = np.concatenate([np.linspace(-8, 8, 321), [0.5, 1.5, 2.5]])
    scan = scan[np.abs(scan + 1) > 1e-9]
    starts, scores = [], []
    for l2 in scan:
        l3 = _case3_lambda3(l2, w, y)
        if not math.isfinite(l3):
            continue
        try:
            case = CaseSpec(3, lambda2=l2, lambda3=l3)
        except DomainError:
            continue
        starts.append((l2, l3))
        scores.append(_residual(case, w, c))
    if not starts:
        return None, math.inf
    starts = _starts(np.array(starts), np.array(scores), 6)
    case, res = _best([_refine(3, x0, w, c) for x0 in starts])
    if case is not None and case.lambda3 != 0 and case.lambda2 < 0:
        alt = CaseSpec(3, lambda2=-case.lambda2, lambda3=(1 - case.lambda2**2) / case.lambda3)
        case, res = alt, _residual(alt, w, c)
    return case, res


def _canon4(case: CaseSpec) -> CaseSpec:
    l2, l3 = case.lambda2, case.lambda3
    if l2 < 0:
        l2, l3 = -l2, -l3
    l3 = (l3 + math.pi / 2) % math.pi - math.pi / 2
    return CaseSpec(4, lambda2=l2, lambda3=l3)


def _fit_case4(w, c):
    if np.any(w <= 0):
        return None, math.inf
    y = w * c
    lw = np.log(w)
    scan = np.concatenate([np.geomspace(0.02, 20, 200)])
    starts, scores = [], []
    for l2 in scan:
        with np.errstate(all="ignore"):
            tan_th = ((l2**2 + 1) / y - 1) / l2
            th = np.arctan(tan_th)
        l3s = th - 0.5 * l2 * lw
        ok = np.isfinite(l3s)
        if not np.any(ok):
            continue
        # circular mean modulo pi
        ang = np.angle(np.mean(np.exp(2j * l3s[ok]))) / 2
        case = CaseSpec(4, lambda2=l2, lambda3=ang)
        starts.append((l2, ang))
        scores.append(_residual(case, w, c))
    if not starts:
        return None, math.inf
    starts = _starts(np.array(starts), np.array(scores), 6)
    case, res = _best([_refine(4, x0, w, c) for x0 in starts])
    if case is None:
        return None, math.inf
    case = _canon4(case)
    return case, _residual(case, w, c)


def _fit_scan1(cid: int, w, c, scan, extra=None):
    make = _model(cid, extra or {})
    scores = []
    for l2 in scan:
        case = make([l2])
        scores.append(_residual(case, w, c) if case is not None else math.inf)
    starts = _starts(scan, np.array(scores), 4)
    case, res = _best([_refine(cid, [x0], w, c, extra) for x0 in starts])
    if case is not None and case.lambda2 < 0:
        alt = make([-case.lambda2])
        case, res = alt, _residual(alt, w, c)
    return case, res


def _fit_case5(w, c):
    scan = np.geomspace(0.01, 30, 240)
    return _best([_fit_scan1(5, w, c, scan, {"epsilon": e}) for e in (1, -1)])


def _fit_case6(w, c):
    scan = np.geomspace(0.01, 30, 300)
    return _fit_scan1(6, w, c, scan)


def classify(samples, *, threshold: float = DEFAULT_THRESHOLD) -> CaseMatch:
    """Identify the family of a coefficient from samples ``(omega, c)``.

    Families 7 and 8 are tried first and win when they fit; they are special
    parameter values of family 3 (``c = 0`` is family 3 with ``l2 = 1``,
    ``l3 = 0``), so checking them first keeps the larger symmetry algebra.
    Otherwise the lowest family id whose maximum deviation is at most
    ``threshold`` is returned, and case 1 when none fits.
    """
    arr = np.asarray(samples, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise DomainError("samples must be a sequence of (omega, c) pairs")
    if arr.shape[0] < MIN_SAMPLES:
        raise DomainError(f"need at least {MIN_SAMPLES} samples, got {arr.shape[0]}")
    if not np.all(np.isfinite(arr)):
        raise DomainError("samples must be finite")
    w, c = arr[:, 0], arr[:, 1]
    if np.unique(w).size < MIN_SAMPLES:
        raise DomainError(f"need at least {MIN_SAMPLES} distinct omega values")

    fits: dict[int, tuple[CaseSpec | None, float]] = {}
    fits[7] = (CaseSpec(7), float(np.max(np.abs(c))))
    fits[8] = (CaseSpec(8), _residual(CaseSpec(8), w, c)) if np.all(w > 0) else (None, math.inf)
    matches = []
    for cid in (7, 8):
        case, res = fits[cid]
        if case is not None and res <= threshold:
            matches.append(cid)
    if not matches:
        fits[2] = _fit_case2(w, c)
        fits[3] = _fit_case3(w, c)
        fits[4] = _fit_case4(w, c)
        fits[5] = _fit_case5(w, c)
        fits[6] = _fit_case6(w, c)
        matches = sorted(cid for cid, (case, res) in fits.items() if case is not None and res <= threshold)
    cands = tuple(
        CaseMatch(cid, case, res)
        for cid, (case, res) in sorted(fits.items(), key=lambda kv: (kv[1][1], kv[0]))
        if case is not None and math.isfinite(res)
    )
    if not cands:
        raise DomainError("samples lie outside the domain of every family")
    if matches:
        cid = matches[0]
        case, res = fits[cid]
        return CaseMatch(cid, case, res, cands)
    return CaseMatch(1, CaseSpec(1), cands[0].fit_residual, cands)


def sample_cbar(case: CaseSpec, omega: Sequence[float]) -> np.ndarray:
    """``(omega, cbar)`` sample array for a family, as consumed by :func:`classify`."""
    w = np.asarray(omega, dtype=float)
    return np.column_stack([w, cbar(case, w)])
