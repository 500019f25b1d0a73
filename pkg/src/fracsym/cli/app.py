"""Command-line front end: ``fracsym <command> --config <path> [--out <path>]``.

Exit status: 0 success, 2 configuration error, 3 domain error, 4 tolerance
failure, 5 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import sys
from collections.abc import Sequence
from pathlib import Path
from typing import TextIO

import numpy as np

from fracsym.cli.config import COMMANDS, RunConfig, parse_config
from fracsym.errors import ConfigError, DomainError, FracsymError, NumericalError
from fracsym.solutions import classical_limit, eval_grid
from fracsym.symmetry.cases import CaseSpec, cbar, domain_description
from fracsym.symmetry.classify import classify
from fracsym.symmetry.generators import SOLUTION_CASE, generators, solution_generator
from fracsym.verify import evaluate_grid, invariant_surface_check, pde_residual

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DOMAIN = 3
EXIT_TOLERANCE = 4
EXIT_NUMERIC = 5

#: smallest magnitude used as the scale of a relative deviation
REL_FLOOR = 1e-150


def fmt(x: float) -> str:
    """17 significant digits, enough to read a double back exactly."""
    return "%.17g" % x


def short(x: float) -> str:
    """Shortest text that reads back as the same double."""
    return repr(float(x))


def write_csv(stream: TextIO, header: Sequence[str], columns: Sequence[np.ndarray]) -> None:
    stream.write(",".join(header) + "\n")
    for row in zip(*(np.asarray(c, dtype=float).ravel() for c in columns)):
        stream.write(",".join(fmt(x) for x in row) + "\n")


def read_samples(path: Path) -> np.ndarray:
    """``(omega, c)`` rows from a CSV file; a non-numeric first row is a header."""
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            rows = [r for r in csv.reader(fh) if r and any(x.strip() for x in r)]
    except OSError as exc:
        raise ConfigError(f"cannot read samples {str(path)!r}: {exc.strerror}") from None
    if rows:
        try:
            [float(x) for x in rows[0]]
        except ValueError:
            rows = rows[1:]
    out = []
    for i, r in enumerate(rows, start=1):
        if len(r) < 2:
            raise ConfigError(f"{path}: row {i} needs omega and c columns")
        try:
            out.append((float(r[0]), float(r[1])))
        except ValueError:
            raise ConfigError(f"{path}: row {i} is not numeric: {r!r}") from None
    return np.array(out, dtype=float).reshape(-1, 2)


class _Sink:
    """Text destination: a file when a path is given, otherwise ``stdout``."""

    def __init__(self, path: Path | None, stdout: TextIO):
        self.path, self.stdout = path, stdout
        self.buf = io.StringIO()

    def __enter__(self) -> TextIO:
        return self.buf

    def __exit__(self, *exc) -> None:
        if exc[0] is not None:
            return
        text = self.buf.getvalue()
        if self.path is None:
            self.stdout.write(text)
        else:
            self.path.write_text(text, encoding="utf-8")


def _params_text(case: CaseSpec) -> str:
    p = case.parameters
    return ", ".join(f"{k} = {short(v)}" for k, v in p.items()) if p else "none"


_CBAR_TEXT = {
    1: "arbitrary",
    2: "(ln(omega) + lambda2)/(omega*(ln(omega) + lambda2 - 2))",
    3: "(lambda2 + 1)*(lambda3*omega^lambda2 - lambda2 + 1)/(omega*(lambda3*omega^lambda2 + lambda2 + 1))",
    4: "(lambda2^2 + 1)/(omega*(lambda2*tan(lambda2/2*ln(omega) + lambda3) + 1))",
    5: "lambda2*(epsilon*exp(lambda2*omega) - 1)/(epsilon*exp(lambda2*omega) + 1)",
    6: "lambda2*tan(-lambda2*omega/2)",
    7: "0",
    8: "2/omega",
}

_GEN_TEXT = {
    "Xd": ("u -> u + phi(omega, t) for any solution phi", None, None),
    "X1": ("0", "0", "u"),
    "X2": ("omega", "(2/alpha)*t", "-(omega*cbar(omega)/2)*u"),
    "X3": ("omega", "(2/alpha)*t", "-(omega*cbar(omega)/2)*u"),
    "X4": ("omega", "(2/alpha)*t", "-(omega*cbar(omega)/2)*u"),
    "X5": ("1", "0", "-(cbar(omega)/2)*u"),
    "X6": ("1", "0", "-(cbar(omega)/2)*u"),
    "X7": ("omega", "(2/alpha)*t", "0"),
    "X8": ("1", "0", "0"),
    "X9": ("1", "0", "-u/omega"),
}

_COMBINATION_TEXT = {
    "V1": "(s + 1/2)*X1 + X2",
    "V2": "(s + (1 - lambda2)/2)*X1 + X3",
    "V3": "(s - lambda2/2)*X1 + X5",
    "V4": "s*X1 + X6",
    "V5": "X1 + epsilon*X8",
    "V6": "X1 + epsilon*X9",
    "V7": "X9",
}


def _cmd_classify(cfg: RunConfig, out: Path | None, stdout: TextIO) -> int:
    samples = read_samples(cfg.samples)
    match = classify(samples, threshold=cfg.tolerances["classify"])
    with _Sink(out, stdout) as fh:
        fh.write(f"case {match.case_id}\n")
        fh.write(f"parameters = {_params_text(match.case)}\n")
        fh.write(f"fit_residual = {short(match.fit_residual)}\n")
        fh.write(f"tolerance.classify = {short(cfg.tolerances['classify'])}\n")
        for cand in match.candidates:
            fh.write(f"candidate case {cand.case_id}: residual = {short(cand.fit_residual)}; {_params_text(cand.case)}\n")
    return EXIT_OK


def _cmd_eval(cfg: RunConfig, out: Path | None, stdout: TextIO) -> int:
    spec, grid = cfg.solution, cfg.grid
    grid.check_domain(spec.case_params)
    u = evaluate_grid(spec, grid.omega, grid.t)
    W, T = np.meshgrid(grid.omega, grid.t, indexing="ij")
    with _Sink(out, stdout) as fh:
        write_csv(fh, ("omega", "t", "u"), (W, T, u.T))
    return EXIT_OK


def _cmd_verify(cfg: RunConfig, out: Path | None, stdout: TextIO) -> int:
    spec, grid, tol = cfg.solution, cfg.grid, cfg.tolerances
    if cfg.verify_kind == "pde":
        rep = pde_residual(spec, spec.case_params, grid, levels=cfg.levels)
    else:
        gen = solution_generator(spec.generator, spec.case_params, spec.alpha, s=spec.s, epsilon=spec.epsilon)
        rep = invariant_surface_check(gen, spec, grid, levels=cfg.levels)
    if cfg.levels >= 2:
        ok = rep.convergence_order is not None and rep.convergence_order >= tol["min_order"]
    else:
        ok = rep.max_residual <= tol["max_residual"]
    with _Sink(out, stdout) as fh:
        fh.write(f"kind = {cfg.verify_kind}\n")
        fh.write(f"generator = {spec.generator}\n")
        fh.write(f"alpha = {short(spec.alpha)}\n")
        fh.write(f"case = {spec.case_params.case_id}; {_params_text(spec.case_params)}\n")
        fh.write(f"grid = omega [{short(grid.omega_min)}, {short(grid.omega_max)}] step {short(grid.d_omega)}; ")
        fh.write(f"t [0, {short(grid.time.t_max)}] step {short(grid.time.dt)}; guard {short(grid.guard_fraction)}\n")
        fh.write(f"max_residual = {short(rep.max_residual)}\n")
        fh.write(f"l2_residual = {short(rep.l2_residual)}\n")
        fh.write(f"unguarded_max = {short(rep.unguarded_max)}\n")
        fh.write(f"nodes = {rep.count}\n")
        if rep.study is not None:
            for h, r in rep.study.pairs():
                fh.write(f"level step = {short(h)}: max_residual = {short(r)}\n")
        order = "none" if rep.convergence_order is None else short(rep.convergence_order)
        fh.write(f"convergence_order = {order}\n")
        for k in ("max_residual", "min_order"):
            fh.write(f"tolerance.{k} = {short(tol[k])}\n")
        fh.write(f"status = {'pass' if ok else 'fail'}\n")
    if cfg.dump is not None:
        W, T = np.meshgrid(rep.omega, rep.t, indexing="ij")
        with open(cfg.dump, "w", encoding="utf-8", newline="") as fh:
            write_csv(fh, ("omega", "t", "u", "residual"), (W, T, rep.values.T, rep.residual.T))
    return EXIT_OK if ok else EXIT_TOLERANCE


def _cmd_reduce(cfg: RunConfig, out: Path | None, stdout: TextIO) -> int:
    spec, grid = cfg.solution, cfg.grid
    grid.check_domain(spec.case_params)
    t = grid.t[grid.t > 0]
    W, T = np.meshgrid(grid.omega, t, indexing="ij")
    classical = classical_limit(spec, W, T)
    general = eval_grid(spec, grid.omega, t).T
    dev = np.abs(general - classical) / np.maximum(np.abs(classical), REL_FLOOR)
    worst = float(np.max(dev))
    ok = worst <= cfg.tolerances["reduce"]
    with _Sink(out, stdout) as fh:
        write_csv(fh, ("omega", "t", "general", "classical"), (W, T, general, classical))
    stdout.write(f"max_relative_deviation = {short(worst)}\n")
    stdout.write(f"tolerance.reduce = {short(cfg.tolerances['reduce'])}\n")
    stdout.write(f"status = {'pass' if ok else 'fail'}\n")
    return EXIT_OK if ok else EXIT_TOLERANCE


def _cmd_export(cfg: RunConfig, out: Path | None, stdout: TextIO) -> int:
    case = cfg.case
    alpha = cfg.solution.alpha if cfg.solution is not None else cfg.values.get("solution.alpha")
    with _Sink(out, stdout) as fh:
        fh.write(f"case = {case.case_id}\n")
        fh.write(f"parameters = {_params_text(case)}\n")
        fh.write(f"cbar = {_CBAR_TEXT[case.case_id]}\n")
        fh.write(f"domain = {domain_description(case)}\n")
        if alpha is not None:
            fh.write(f"alpha = {short(alpha)}\n")
        for gen in generators(case, alpha if alpha is not None else 1.0):
            xi, tau, eta = _GEN_TEXT[gen.tag]
            fh.write(f"[{gen.tag}]\n")
            if tau is None:
                fh.write(f"action = {xi}\n")
            else:
                fh.write(f"xi = {xi}\ntau = {tau}\neta = {eta}\n")
        for tag, cid in SOLUTION_CASE.items():
            if cid == case.case_id:
                fh.write(f"[{tag}]\ncombination = {_COMBINATION_TEXT[tag]}\n")
    if cfg.cbar_csv is not None:
        if case.case_id == 1:
            raise DomainError("case 1 has no closed-form coefficient to sample")
        cfg.grid.check_domain(case)
        w = cfg.grid.omega
        with open(cfg.cbar_csv, "w", encoding="utf-8", newline="") as fh:
            write_csv(fh, ("omega", "c"), (w, cbar(case, w)))
    return EXIT_OK


_DISPATCH = {
    "classify": _cmd_classify,
    "eval": _cmd_eval,
    "verify": _cmd_verify,
    "reduce": _cmd_reduce,
    "export": _cmd_export,
}


def run(cfg: RunConfig, out: Path | str | None = None, *, stdout: TextIO | None = None) -> int:
    """Execute a parsed configuration and return the exit status.

    ``out`` overrides ``output.path``. Library errors are mapped to exit
    codes; the message goes to ``stderr``.
    """
    stdout = stdout if stdout is not None else sys.stdout
    target = Path(out) if out is not None else cfg.output
    try:
        return _DISPATCH[cfg.command](cfg, target, stdout)
    except ConfigError as exc:
        print(f"fracsym: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DomainError as exc:
        print(f"fracsym: domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except (NumericalError, FloatingPointError, FracsymError) as exc:
        print(f"fracsym: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"fracsym: cannot write output: {exc}", file=sys.stderr)
        return EXIT_CONFIG


def main(argv: Sequence[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="fracsym", description="Invariant solutions of fractional diffusion-wave equations.")
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", required=True, type=Path, help="key = value configuration file")
    parser.add_argument("--out", type=Path, default=None, help="output file (default: output.path or stdout)")
    args = parser.parse_args(argv)
    try:
        text = args.config.read_bytes()
    except OSError as exc:
        print(f"fracsym: config error: cannot read {str(args.config)!r}: {exc.strerror}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        cfg = parse_config(text, command=args.command, base_dir=args.config.parent)
    except ConfigError as exc:
        print(f"fracsym: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return run(cfg, args.out)


if __name__ == "__main__":
    sys.exit(main())
