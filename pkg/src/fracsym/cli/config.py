"""Run configuration: flat ``key = value`` lines grouped into sections.

Keys are written either with a dotted prefix (``solution.alpha = 1.5``) or
below a ``[solution]`` header. ``#`` starts a comment. Unknown keys,
duplicates and malformed values are reported with their line number.

Recognized keys::

    command                                  classify | eval | verify | reduce | export
    case.id, case.lambda1, case.lambda2, case.lambda3, case.epsilon
    solution.generator, solution.alpha, solution.n, solution.s,
    solution.epsilon, solution.coeffs        (comma separated c_1, ..., c_n)
    grid.omega_min, grid.d_omega, grid.count_omega, grid.dt, grid.count_t,
    grid.guard_fraction
    verify.kind (pde | surface), verify.levels, verify.dump
    input.samples                            CSV of (omega, c) rows for classify
    output.path
    export.cbar_csv                          also write (omega, cbar) samples
    tolerance.max_residual, tolerance.min_order, tolerance.classify,
    tolerance.reduce
"""

from __future__ import annotations

import math
import re
from collections.abc import Callable
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from fracsym.errors import ConfigError, FracsymError
from fracsym.fracderiv import FracOrder, TimeGrid
from fracsym.solutions import SolutionSpec
from fracsym.symmetry.cases import CaseSpec
from fracsym.symmetry.generators import SOLUTION_CASE
from fracsym.verify import Grid2D

COMMANDS = ("classify", "eval", "verify", "reduce", "export")

DEFAULT_TOLERANCES = {
    "max_residual": 5e-3,
    "min_order": 0.5,
    "classify": 1e-6,
    "reduce": 1e-8,
}


def _float(text: str) -> float:
    v = float(text)
    if not math.isfinite(v):
        raise ValueError("value must be finite")
    return v


def _int(text: str) -> int:
    return int(text)


def _sign(text: str) -> int:
    v = int(float(text))
    if v not in (1, -1) or float(text) != v:
        raise ValueError("expected +1 or -1")
    return v


def _floats(text: str) -> tuple[float, ...]:
    parts = [p.strip() for p in text.split(",")]
    if not parts or any(not p for p in parts):
        raise ValueError("expected a comma separated list of numbers")
    return tuple(_float(p) for p in parts)


def _choice(*options: str) -> Callable[[str], str]:
    def parse(text: str) -> str:
        if text not in options:
            raise ValueError(f"expected one of {', '.join(options)}")
        return text

    return parse


def _text(text: str) -> str:
    if not text:
        raise ValueError("empty value")
    return text


SCHEMA: dict[str, Callable[[str], Any]] = {
    "command": _choice(*COMMANDS),
    "case.id": _int,
    "case.lambda1": _float,
    "case.lambda2": _float,
    "case.lambda3": _float,
    "case.epsilon": _sign,
    "solution.generator": _choice(*SOLUTION_CASE),
    "solution.alpha": _float,
    "solution.n": _int,
    "solution.s": _float,
    "solution.epsilon": _sign,
    "solution.coeffs": _floats,
    "grid.omega_min": _float,
    "grid.d_omega": _float,
    "grid.count_omega": _int,
    "grid.dt": _float,
    "grid.count_t": _int,
    "grid.guard_fraction": _float,
    "verify.kind": _choice("pde", "surface"),
    "verify.levels": _int,
    "verify.dump": _text,
    "input.samples": _text,
    "output.path": _text,
    "export.cbar_csv": _text,
    **{f"tolerance.{k}": _float for k in DEFAULT_TOLERANCES},
}

REQUIRED = {
    "classify": ("input.samples",),
    "eval": ("solution.generator", "solution.alpha", "solution.coeffs"),
    "verify": ("solution.generator", "solution.alpha", "solution.coeffs"),
    "reduce": ("solution.generator", "solution.alpha", "solution.coeffs"),
    "export": (),
}

_SECTION = re.compile(r"^\[\s*([A-Za-z_][A-Za-z0-9_]*)\s*\]$")
_KEY = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*(\.[A-Za-z_][A-Za-z0-9_]*)?$")


@dataclass(frozen=True)
class RunConfig:
    """A validated run: the objects each command needs plus the raw values."""

    command: str
    case: CaseSpec | None
    solution: SolutionSpec | None
    grid: Grid2D
    output: Path | None = None
    samples: Path | None = None
    verify_kind: str = "pde"
    levels: int = 1
    dump: Path | None = None
    cbar_csv: Path | None = None
    tolerances: dict[str, float] = field(default_factory=lambda: dict(DEFAULT_TOLERANCES))
    values: dict[str, Any] = field(default_factory=dict, compare=False)


def _lex(text: str) -> dict[str, tuple[Any, int]]:
    """Parse lines into ``{dotted key: (value, line)}``."""
    out: dict[str, tuple[Any, int]] = {}
    section = ""
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = _SECTION.match(line)
        if m:
            section = m.group(1)
            if not any(k.startswith(section + ".") for k in SCHEMA):
                raise ConfigError(f"unknown section [{section}]", line=lineno, key=section)
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got {line!r}", line=lineno)
        key, value = (p.strip() for p in line.split("=", 1))
        if not _KEY.match(key):
            raise ConfigError(f"malformed key {key!r}", line=lineno, key=key)
        if section and "." in key:
            raise ConfigError(f"dotted key {key!r} inside section [{section}]", line=lineno, key=key)
        full = f"{section}.{key}" if section else key
        if full not in SCHEMA:
            raise ConfigError(f"unknown key {full!r}", line=lineno, key=full)
        if full in out:
            raise ConfigError(f"duplicate key {full!r} (first set on line {out[full][1]})", line=lineno, key=full)
        try:
            out[full] = (SCHEMA[full](value), lineno)
        except ValueError as exc:
            raise ConfigError(f"bad value for {full!r}: {value!r} ({exc})", line=lineno, key=full) from None
    return out


def _path(value: str | None, base: Path | None) -> Path | None:
    if value is None:
        return None
    p = Path(value)
    return p if p.is_absolute() or base is None else base / p


def parse_config(text: bytes | str, *, command: str | None = None, base_dir: Path | str | None = None) -> RunConfig:
    """Parse and validate a configuration.

    ``command`` (from the command line) fills or must match the ``command``
    key. Relative paths are resolved against ``base_dir``. Every object is
    built here, so invalid parameters fail before any computation.
    """
    if isinstance(text, bytes):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ConfigError(f"config is not valid UTF-8: {exc}") from None
    raw = _lex(text)
    line = {k: ln for k, (_, ln) in raw.items()}
    v = {k: val for k, (val, _) in raw.items()}

    cmd = v.get("command")
    if command is not None:
        if command not in COMMANDS:
            raise ConfigError(f"unknown command {command!r}")
        if cmd is not None and cmd != command:
            raise ConfigError(f"config is for {cmd!r}, not {command!r}", line=line["command"], key="command")
        cmd = command
    if cmd is None:
        raise ConfigError("missing required key 'command'", key="command")
    for key in REQUIRED[cmd]:
        if key not in v:
            raise ConfigError(f"missing required key {key!r} for {cmd}", key=key)
    if cmd == "export" and "case.id" not in v and "solution.generator" not in v:
        raise ConfigError("export needs 'case.id' or 'solution.generator'", key="case.id")

    def build(keys: tuple[str, ...], make):
        try:
            return make()
        except FracsymError as exc:
            at = [line[k] for k in keys if k in line]
            raise ConfigError(str(exc), line=min(at) if at else None, key=keys[0]) from None

    gen = v.get("solution.generator")
    eps = v.get("solution.epsilon", 1)
    case = None
    if "case.id" in v or gen is not None:
        cid = v.get("case.id", SOLUTION_CASE.get(gen))
        if gen is not None and cid != SOLUTION_CASE[gen]:
            raise ConfigError(
                f"{gen} belongs to case {SOLUTION_CASE[gen]}, not case {cid}", line=line.get("case.id"), key="case.id"
            )
        case = build(
            ("case.id", "case.lambda1", "case.lambda2", "case.lambda3", "case.epsilon"),
            lambda: CaseSpec(
                cid,
                lambda1=v.get("case.lambda1", 0.0),
                lambda2=v.get("case.lambda2", 0.0),
                lambda3=v.get("case.lambda3", 0.0),
                epsilon=v.get("case.epsilon", eps),
            ),
        )

    solution = None
    if gen is not None and "solution.alpha" in v and "solution.coeffs" in v:
        order = build(("solution.alpha", "solution.n"), lambda: FracOrder(v["solution.alpha"], v.get("solution.n", 0)))
        solution = build(
            ("solution.generator", "solution.s", "solution.epsilon", "solution.coeffs"),
            lambda: SolutionSpec(gen, order, v.get("solution.s", 0.0), eps, v["solution.coeffs"], case),
        )
    elif "solution.alpha" in v or "solution.n" in v:
        build(("solution.alpha", "solution.n"), lambda: FracOrder(v["solution.alpha"], v.get("solution.n", 0)))

    d = Grid2D()
    grid = build(
        ("grid.omega_min", "grid.d_omega", "grid.count_omega", "grid.dt", "grid.count_t", "grid.guard_fraction"),
        lambda: Grid2D(
            omega_min=v.get("grid.omega_min", d.omega_min),
            d_omega=v.get("grid.d_omega", d.d_omega),
            count_omega=v.get("grid.count_omega", d.count_omega),
            time=TimeGrid(v.get("grid.dt", d.time.dt), v.get("grid.count_t", d.time.count)),
            guard_fraction=v.get("grid.guard_fraction", d.guard_fraction),
        ),
    )

    levels = v.get("verify.levels", 1)
    if levels < 1:
        raise ConfigError("verify.levels must be >= 1", line=line["verify.levels"], key="verify.levels")
    tol = dict(DEFAULT_TOLERANCES)
    for k in DEFAULT_TOLERANCES:
        key = f"tolerance.{k}"
        if key in v:
            if v[key] < 0:
                raise ConfigError(f"{key} must be nonnegative", line=line[key], key=key)
            tol[k] = v[key]

    base = Path(base_dir) if base_dir is not None else None
    return RunConfig(
        command=cmd,
        case=case,
        solution=solution,
        grid=grid,
        output=_path(v.get("output.path"), base),
        samples=_path(v.get("input.samples"), base),
        verify_kind=v.get("verify.kind", "pde"),
        levels=levels,
        dump=_path(v.get("verify.dump"), base),
        cbar_csv=_path(v.get("export.cbar_csv"), base),
        tolerances=tol,
        values=v,
    )
