"""Timing of the compiled kernels against the pure-Python fallback.

Run with ``python3 benchmarks/bench_kernels.py``. Both backends are loaded
side by side, checked for agreement and timed on the same inputs.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from fracsym import _pykernels
from fracsym.fracderiv import FracOrder, gl_weights

try:
    from fracsym import _ckernels
except ImportError:
    _ckernels = None


def best_of(fn, repeat: int) -> float:
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--nodes", type=int, default=4001, help="time nodes for gl_convolve")
    parser.add_argument("--columns", type=int, default=51, help="independent series for gl_convolve")
    parser.add_argument("--points", type=int, default=20000, help="arguments for ml_series")
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()

    rng = np.random.default_rng(0)
    w = gl_weights(FracOrder(0.5), args.nodes)
    u = np.ascontiguousarray(rng.standard_normal((args.nodes, args.columns)))
    z = rng.uniform(-8.0, 8.0, args.points)

    cases = {
        "gl_convolve": lambda k: k.gl_convolve(w, u),
        "ml_series": lambda k: k.ml_series(0.7, 1.3, z, 1e-15, 2000),
    }
    print(f"{'kernel':<12} {'python [s]':>11} {'cython [s]':>11} {'speedup':>8} {'max diff':>13}")
    for name, call in cases.items():
        tp = best_of(lambda: call(_pykernels), args.repeat)
        ref = call(_pykernels)
        if _ckernels is None:
            print(f"{name:<12} {tp:>11.4f} {'n/a':>11} {'n/a':>8} {'n/a':>13}")
            continue
        tc = best_of(lambda: call(_ckernels), args.repeat)
        got = call(_ckernels)
        if isinstance(ref, tuple):
            # series: compare on the scale of the absolute term sum (cancellation near zeros)
            a, b, scale = ref[0], got[0], ref[1]
        else:
            a, b, scale = ref, got, np.abs(ref)
        diff = float(np.max(np.abs(a - b) / np.maximum(scale, 1e-300)))
        print(f"{name:<12} {tp:>11.4f} {tc:>11.4f} {tp / tc:>8.1f} {diff:>13.2e}")


if __name__ == "__main__":
    main()
