"""Compare the compiled kernels with the numpy fallback.

    python benchmarks/bench_kernels.py [--repeat 5]

Times the residual/Jacobian evaluation, the canonical-key orbit
minimization and a full Newton solve on each backend, then a short census
in a subprocess per backend (the backend is fixed at import time).
"""

from __future__ import annotations

import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from auerbach import _kernels_py
from auerbach.canonical import quantize

try:
    from auerbach import _kernels as _compiled
except ImportError:
    _compiled = None

CENSUS = "from auerbach import run_census; run_census({n}, 3.0, {seeds})"


def best_of(fn, repeat: int, number: int) -> float:
    return min(timeit.repeat(fn, repeat=repeat, number=number)) / number


def kernel_cases(rng):
    X3, X4 = rng.standard_normal((3, 3)), rng.standard_normal((4, 4))
    Q4 = quantize(rng.standard_normal((4, 4)), 1e-8)
    Q5 = quantize(rng.standard_normal((5, 5)), 1e-8)
    seed = rng.standard_normal((4, 4)) * 4 ** (-1 / 3)
    return [
        ("residual_jacobian n=3", lambda k: k.residual_jacobian(X3, 3.0), 2000),
        ("residual_jacobian n=4", lambda k: k.residual_jacobian(X4, 3.0), 2000),
        ("canonical_key n=4", lambda k: k.canonical_key(Q4), 50),
        ("canonical_key n=5", lambda k: k.canonical_key(Q5), 5),
        ("newton_core n=4", lambda k: k.newton_core(seed, 3.0, 1e-12, 60, 3, 1e-4, 0.5), 50),
    ]


def census_time(n: int, seeds: int, pure: bool) -> float:
    env = dict(os.environ, AUERBACH_PURE_PYTHON="1" if pure else "0")
    stmt = CENSUS.format(n=n, seeds=seeds)
    code = f"import timeit; print(min(timeit.repeat({stmt!r}, repeat=2, number=1)))"
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    return float(out.stdout)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--census-seeds", type=int, default=1000)
    args = parser.parse_args(argv)
    if _compiled is None:
        print("compiled extension not built; run `pip install -e . --no-build-isolation`", file=sys.stderr)
        return 1
    rng = np.random.default_rng(0)
    print(f"{'kernel':<26}{'python':>12}{'cython':>12}{'speedup':>10}")
    for name, call, number in kernel_cases(rng):
        t_py = best_of(lambda: call(_kernels_py), args.repeat, number)
        t_cy = best_of(lambda: call(_compiled), args.repeat, number)
        print(f"{name:<26}{t_py * 1e6:>10.1f}us{t_cy * 1e6:>10.1f}us{t_py / t_cy:>9.1f}x")
    for n in (3, 4):
        t_py = census_time(n, args.census_seeds, pure=True)
        t_cy = census_time(n, args.census_seeds, pure=False)
        label = f"census n={n} ({args.census_seeds} seeds)"
        print(f"{label:<26}{t_py:>11.2f}s{t_cy:>11.2f}s{t_py / t_cy:>9.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
