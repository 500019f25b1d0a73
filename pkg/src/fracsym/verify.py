r"""Residual checks for the invariant solutions.

Three residuals are available, each computed on a uniform grid with the
small-``t`` guard band removed:

* :func:`pde_residual`: :math:`D^\alpha_t u - u_{\omega\omega} - \bar c u_\omega`
  with a Grünwald-Letnikov time derivative;
* :func:`invariant_surface_check`: :math:`\xi u_\omega + \tau u_t - \eta u`;
* :func:`reduced_ode_residual`: the ordinary equation satisfied by the
  similarity profile.

Space and time derivatives use fourth-order central stencils and drop the two
outermost nodes, so the Grünwald-Letnikov error dominates. Acceptance is
based on the behaviour under refinement (:func:`convergence_study`), since
solutions with :math:`t^{\alpha-k}` terms cannot meet a fixed bound near
``t = 0``.
"""

from __future__ import annotations

import math
import os
from collections.abc import Callable, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from fracsym.errors import DomainError
from fracsym.fracderiv import FracOrder, TimeGrid, rl_derivative_grid
from fracsym.solutions import SolutionSpec, eval_grid, reduced_ode_rhs, singular_exponents
from fracsym.symmetry.cases import CaseSpec, cbar, singular_points
from fracsym.symmetry.generators import SOLUTION_CASE, GeneratorDescriptor

#: number of nodes dropped at each end by the central stencils
STENCIL_HALF = 2


@dataclass(frozen=True)
class Grid2D:
    """Uniform space-time grid ``omega_min + i*d_omega`` by ``time.nodes``.

    Time nodes with ``t < guard_fraction * t_max`` form the guard band and
    are left out of the reported residuals.
    """

    omega_min: float = 0.5
    d_omega: float = 0.01
    count_omega: int = 51
    time: TimeGrid = field(default_factory=lambda: TimeGrid(1e-3, 1001))
    guard_fraction: float = 0.05

    def __post_init__(self) -> None:
        if not math.isfinite(self.omega_min):
            raise DomainError("omega_min must be finite")
        if not (math.isfinite(self.d_omega) and self.d_omega > 0):
            raise DomainError("d_omega must be positive")
        if int(self.count_omega) != self.count_omega or self.count_omega < 2 * STENCIL_HALF + 1:
            raise DomainError(f"count_omega must be an integer >= {2 * STENCIL_HALF + 1}")
        object.__setattr__(self, "count_omega", int(self.count_omega))
        if not isinstance(self.time, TimeGrid):
            raise DomainError("time must be a TimeGrid")
        if not 0 <= self.guard_fraction < 0.5:
            raise DomainError("guard_fraction must lie in [0, 0.5)")

    @property
    def omega(self) -> np.ndarray:
        return self.omega_min + self.d_omega * np.arange(self.count_omega)

    @property
    def omega_max(self) -> float:
        return self.omega_min + self.d_omega * (self.count_omega - 1)

    @property
    def t(self) -> np.ndarray:
        return self.time.nodes

    def refined_time(self) -> Grid2D:
        """Same extent with ``dt`` halved."""
        return replace(self, time=self.time.refined())

    def refined_space(self) -> Grid2D:
        """Same extent with ``d_omega`` halved."""
        return replace(self, d_omega=self.d_omega / 2, count_omega=2 * (self.count_omega - 1) + 1)

    def refined(self) -> Grid2D:
        """Both steps halved."""
        return self.refined_space().refined_time()

    def guard_mask(self) -> np.ndarray:
        """True for time nodes outside the guard band (``t = 0`` is always excluded)."""
        t = self.t
        return (t >= self.guard_fraction * self.time.t_max) & (t > 0)

    def check_domain(self, case: CaseSpec) -> None:
        """Reject grids that touch or straddle an excluded point of the family."""
        if case.case_id == 1:
            return
        bad = singular_points(case, self.omega_min, self.omega_max)
        if bad:
            pts = ", ".join(f"{p:.6g}" for p in bad[:4])
            if 0.0 in bad and case.case_id in (2, 3, 4, 8):
                raise DomainError(f"omega must be positive (grid spans [{self.omega_min:g}, {self.omega_max:g}])")
            raise DomainError(f"grid crosses excluded omega values of case {case.case_id}: {pts}")


@dataclass(frozen=True)
class ResidualReport:
    """Residual statistics over the guarded grid.

    ``residual`` is the full node table with ``nan`` where no residual is
    defined (stencil margins); ``mask`` marks the nodes that enter
    ``max_residual`` and ``l2_residual``. ``unguarded_max`` includes the
    guard band. ``l2_residual`` is the plain Euclidean norm over the
    reported nodes (so it is at most ``max_residual * sqrt(count)``).
    """

    max_residual: float
    l2_residual: float
    unguarded_max: float
    count: int
    omega: np.ndarray = field(repr=False)
    t: np.ndarray = field(repr=False)
    residual: np.ndarray = field(repr=False)
    mask: np.ndarray = field(repr=False)
    guard_fraction: float = 0.0
    convergence_order: float | None = None
    study: ConvergenceStudy | None = field(default=None, repr=False)
    metadata: dict = field(default_factory=dict, compare=False)
    #: field values on the grid, when the residual was formed from a field
    values: np.ndarray | None = field(default=None, repr=False, compare=False)

    def table(self) -> np.ndarray:
        """Rows ``(omega, t, residual)`` for every node with a defined residual (``omega = 0`` for profiles)."""
        ok = np.isfinite(self.residual)
        if self.residual.ndim == 1:
            return np.column_stack([np.zeros(int(ok.sum())), self.t[ok], self.residual[ok]])
        W, T = np.meshgrid(self.omega, self.t)
        return np.column_stack([W[ok], T[ok], self.residual[ok]])


@dataclass(frozen=True)
class ConvergenceStudy:
    """Residuals on successively refined grids and the fitted log-log slope.

    ``order`` is ``None`` when the residuals do not decrease monotonically or
    are all below ``floor`` (nothing left to converge).
    """

    steps: tuple[float, ...]
    residuals: tuple[float, ...]
    order: float | None
    monotone: bool

    def pairs(self) -> list[tuple[float, float]]:
        return list(zip(self.steps, self.residuals))


def thread_count() -> int:
    """Worker threads for grid evaluation, capped by ``FRACSYM_THREADS`` (0 = auto)."""
    auto = os.cpu_count() or 1
    raw = os.environ.get("FRACSYM_THREADS", "0").strip() or "0"
    try:
        cap = int(raw)
    except ValueError as exc:
        raise DomainError(f"FRACSYM_THREADS must be an integer, got {raw!r}") from exc
    if cap < 0:
        raise DomainError("FRACSYM_THREADS must be nonnegative")
    return auto if cap == 0 else min(cap, auto)


def evaluate_grid(spec: SolutionSpec, omega: np.ndarray, t: np.ndarray) -> np.ndarray:
    """Solution on the tensor grid, shape ``(len(t), len(omega))``.

    Column blocks are evaluated concurrently; each block is independent, so
    the result does not depend on the thread count. The value at ``t = 0``
    is ``0`` for the Fox H forms (their limit) and ``nan`` where a
    ``t^(alpha-k)`` term is singular.
    """
    omega = np.asarray(omega, dtype=float)
    t = np.asarray(t, dtype=float)
    zero = t == 0
    tp = t[~zero]

    def block(cols: np.ndarray) -> np.ndarray:
        out = np.empty((t.size, cols.size))
        out[~zero] = eval_grid(spec, cols, tp)
        if np.any(zero):
            if spec.h_form:
                out[zero] = 0.0
            else:
                try:
                    out[zero] = eval_grid(spec, cols, t[zero])
                except DomainError:
                    out[zero] = np.nan
        return out

    workers = min(thread_count(), max(1, omega.size // 8))
    if workers == 1:
        return block(omega)
    chunks = np.array_split(omega, workers)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(block, chunks))
    return np.concatenate(parts, axis=1)


def _d1(u: np.ndarray, h: float, axis: int) -> np.ndarray:
    """Fourth-order central first derivative; ``nan`` on the two outer nodes."""
    u = np.moveaxis(u, axis, 0)
    out = np.full_like(u, np.nan)
    out[2:-2] = (u[:-4] - 8 * u[1:-3] + 8 * u[3:-1] - u[4:]) / (12 * h)
    return np.moveaxis(out, 0, axis)


def _d2(u: np.ndarray, h: float, axis: int) -> np.ndarray:
    """Fourth-order central second derivative; ``nan`` on the two outer nodes."""
    u = np.moveaxis(u, axis, 0)
    out = np.full_like(u, np.nan)
    out[2:-2] = (-u[:-4] + 16 * u[1:-3] - 30 * u[2:-2] + 16 * u[3:-1] - u[4:]) / (12 * h * h)
    return np.moveaxis(out, 0, axis)


def _report(
    residual: np.ndarray,
    omega: np.ndarray,
    t: np.ndarray,
    rows: np.ndarray,
    guard_fraction: float,
    metadata: dict,
) -> ResidualReport:
    """Summarize a residual table; ``rows`` selects the guarded time rows."""
    defined = np.isfinite(residual)
    rows = rows[:, None] if residual.ndim == 2 else rows
    mask = defined & rows
    if not np.any(mask):
        raise DomainError("no grid node left after the guard band and stencil margins")
    # a nan inside the reported region means the residual could not be formed there
    inner = np.zeros_like(mask)
    inner[STENCIL_HALF:-STENCIL_HALF] = True
    if residual.ndim == 2:
        inner[:, :STENCIL_HALF] = False
        inner[:, -STENCIL_HALF:] = False
    inner &= rows
    if np.any(inner & ~defined):
        raise DomainError("residual is undefined at nodes outside the guard band (singular values near t = 0?); widen guard_fraction")
    vals = np.abs(residual[mask])
    uvals = np.abs(residual[defined])
    return ResidualReport(
        max_residual=float(vals.max()),
        l2_residual=math.sqrt(math.fsum((vals * vals).tolist())),
        unguarded_max=float(uvals.max()),
        count=int(vals.size),
        omega=omega,
        t=t,
        residual=residual,
        mask=mask,
        guard_fraction=guard_fraction,
        metadata=metadata,
    )


@dataclass(frozen=True)
class Probe:
    """A user-supplied field ``u(omega, t)`` checked like a solution.

    ``func`` receives the ``(t, omega)`` meshgrid (time on axis 0) and returns
    ``u`` with the same shape. ``exponents`` lists the non-smooth powers
    ``t^sigma`` of the field for the starting correction.
    """

    func: Callable[[np.ndarray, np.ndarray], np.ndarray]
    order: FracOrder
    exponents: tuple[float, ...] = ()
    name: str = "probe"


def _probe_values(probe: Probe, omega: np.ndarray, t: np.ndarray) -> np.ndarray:
    T, W = np.meshgrid(t, omega, indexing="ij")
    with np.errstate(divide="ignore", invalid="ignore"):
        u = np.asarray(probe.func(W, T), dtype=float)
    if u.shape != T.shape:
        raise DomainError(f"probe returned shape {u.shape}, expected {T.shape}")
    u = u.copy()
    u[~np.isfinite(u) & (T == 0)] = np.nan
    return u


def _field(target: SolutionSpec | Probe, grid: Grid2D) -> tuple[np.ndarray, FracOrder, list[float]]:
    if isinstance(target, Probe):
        return _probe_values(target, grid.omega, grid.t), target.order, list(target.exponents)
    return evaluate_grid(target, grid.omega, grid.t), target.order, singular_exponents(target)


def _pde_single(target: SolutionSpec | Probe, case: CaseSpec, grid: Grid2D) -> ResidualReport:
    grid.check_domain(case)
    u, order, expo = _field(target, grid)
    exps = expo if expo else None
    if exps is None and np.any(~np.isfinite(u[0])):
        raise DomainError("solution is singular at t = 0 but declares no singular exponents")
    dtu = rl_derivative_grid(u, order, grid.time, correction_exponents=exps)
    h = grid.d_omega
    c = cbar(case, grid.omega)[None, :] if case.case_id != 1 else 0.0
    res = dtu - _d2(u, h, 1) - c * _d1(u, h, 1)
    rows = grid.guard_mask()
    meta = {
        "kind": "pde",
        "alpha": order.alpha,
        "case": case.case_id,
        "dt": grid.time.dt,
        "d_omega": grid.d_omega,
        "correction_exponents": tuple(expo),
    }
    if isinstance(target, SolutionSpec):
        meta["generator"] = target.generator
    else:
        meta["generator"] = target.name
    return replace(_report(res, grid.omega, grid.t, rows, grid.guard_fraction, meta), values=u)


def pde_residual(
    spec: SolutionSpec | Probe,
    case: CaseSpec,
    grid: Grid2D | None = None,
    *,
    levels: int = 1,
) -> ResidualReport:
    """Residual of the fractional PDE on ``grid`` with the family's coefficient.

    With ``levels >= 2`` the residual is recomputed after each ``dt`` halving
    and the fitted order is attached to the returned (base grid) report.
    """
    grid = grid or Grid2D()
    if isinstance(spec, SolutionSpec):
        want = SOLUTION_CASE[spec.generator]
        if case.case_id != want:
            raise DomainError(f"{spec.generator} solves case {want}, not case {case.case_id}")
    elif case.case_id == 1:
        raise DomainError("case 1 has no closed-form coefficient")
    base = _pde_single(spec, case, grid)
    if levels < 2:
        return base
    grids = [grid]
    for _ in range(levels - 1):
        grids.append(grids[-1].refined_time())
    reports = [base] + [_pde_single(spec, case, g) for g in grids[1:]]
    study = convergence_study(lambda i: (grids[i].time.dt, reports[i].max_residual), levels)
    return replace(base, convergence_order=study.order, study=study)


def _surface_single(gen: GeneratorDescriptor, spec: SolutionSpec, grid: Grid2D) -> ResidualReport:
    grid.check_domain(spec.case_params)
    u = evaluate_grid(spec, grid.omega, grid.t)
    W = grid.omega[None, :]
    T = grid.t[:, None]
    res = gen.xi(W) * _d1(u, grid.d_omega, 1) + gen.tau(T) * _d1(u, grid.time.dt, 0) - gen.eta_coef(W) * u
    rows = grid.guard_mask()
    meta = {
        "kind": "invariant_surface",
        "generator": gen.tag,
        "alpha": spec.alpha,
        "dt": grid.time.dt,
        "d_omega": grid.d_omega,
    }
    return replace(_report(res, grid.omega, grid.t, rows, grid.guard_fraction, meta), values=u)


def invariant_surface_check(
    gen: GeneratorDescriptor,
    spec: SolutionSpec,
    grid: Grid2D | None = None,
    *,
    levels: int = 1,
) -> ResidualReport:
    """``max |xi u_omega + tau u_t - eta u|`` over the guarded grid.

    With ``levels >= 2`` both steps are halved together at each level and the
    fitted order (in ``d_omega``) is attached.
    """
    if gen.arbitrary:
        raise DomainError("Xd has no invariant surface condition")
    grid = grid or Grid2D()
    base = _surface_single(gen, spec, grid)
    if levels < 2:
        return base
    grids = [grid]
    for _ in range(levels - 1):
        grids.append(grids[-1].refined())
    reports = [base] + [_surface_single(gen, spec, g) for g in grids[1:]]
    study = convergence_study(lambda i: (grids[i].d_omega, reports[i].max_residual), levels)
    return replace(base, convergence_order=study.order, study=study)


def reduced_ode_residual(
    order: FracOrder,
    s: float,
    phi_samples,
    grid: TimeGrid,
    *,
    guard_fraction: float = 0.05,
    correction_exponents: Sequence[float] | None = None,
) -> ResidualReport:
    """``max |D^alpha_z phi - rhs(z, phi, phi', phi'')|`` on a uniform z-grid from 0.

    ``phi_samples`` holds the profile at ``grid.nodes``; ``phi'`` and
    ``phi''`` come from central differences.
    """
    phi = np.asarray(phi_samples, dtype=float)
    if phi.ndim != 1 or phi.size != grid.count:
        raise DomainError("phi_samples must have one value per z node")
    z = grid.nodes
    exps = list(correction_exponents) if correction_exponents else None
    if exps is None and not np.all(np.isfinite(phi)):
        raise DomainError("phi must be finite")
    d = rl_derivative_grid(phi, order, grid, correction_exponents=exps)
    h = grid.dt
    rhs = np.full_like(phi, np.nan)
    inner = slice(STENCIL_HALF, -STENCIL_HALF)
    rhs[inner] = reduced_ode_rhs(order, s, z[inner], phi[inner], _d1(phi, h, 0)[inner], _d2(phi, h, 0)[inner])
    res = d - rhs
    rows = (z >= guard_fraction * grid.t_max) & (z > 0)
    meta = {"kind": "reduced_ode", "alpha": order.alpha, "s": s, "dz": h}
    return replace(_report(res, np.zeros(1), z, rows, guard_fraction, meta), values=phi)


def convergence_study(
    residual_op: Callable[[int], tuple[float, float]],
    levels: int,
    *,
    floor: float = 1e-10,
) -> ConvergenceStudy:
    """Run ``residual_op(level) -> (step, residual)`` for each level and fit the order.

    The order is the least-squares slope of ``log(residual)`` against
    ``log(step)``. It is reported only when the residuals strictly decrease
    and at least one exceeds ``floor``.
    """
    if int(levels) != levels or levels < 2:
        raise DomainError("levels must be an integer >= 2")
    pairs = [residual_op(i) for i in range(int(levels))]
    steps = tuple(float(h) for h, _ in pairs)
    res = tuple(float(r) for _, r in pairs)
    if not all(h > 0 for h in steps):
        raise DomainError("steps must be positive")
    if not all(math.isfinite(r) and r >= 0 for r in res):
        raise DomainError("residuals must be finite and nonnegative")
    monotone = all(b < a for a, b in zip(res, res[1:]))
    if max(res) <= floor or not monotone or min(res) == 0:
        return ConvergenceStudy(steps, res, None, monotone and max(res) > floor)
    x, y = np.log(steps), np.log(res)
    slope = float(np.polyfit(x, y, 1)[0])
    return ConvergenceStudy(steps, res, slope, True)


__all__ = [
    "ConvergenceStudy",
    "Grid2D",
    "Probe",
    "ResidualReport",
    "convergence_study",
    "evaluate_grid",
    "invariant_surface_check",
    "pde_residual",
    "reduced_ode_residual",
    "thread_count",
]
