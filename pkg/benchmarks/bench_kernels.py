"""Time the compiled kernels against their plain-Python bodies.

Each kernel is called once to trigger compilation, then both the jitted
function and its ``.py_func`` are timed with :mod:`timeit`.

    python benchmarks/bench_kernels.py --repeat 5 --number 200
"""
from __future__ import annotations

import argparse
import timeit

import numpy as np

from varfam import HAVE_NUMBA, kernels
from varfam._accel import python_impl

CASES = {
    "qpoch": (0.3, 0.5, 200),
    "log_abs_qpoch_inf": (-2.5, 0.9),
    "ive": (3.0, 25.0),
    "asc_weight": (0.5, 0.2, 0.1, 0.3, 1.0),
    "hyp2f1_term_sum": (40, 0.5, 2.5, -1.0),
    "eps_poisson_coeffs": (1.0, 0.2, 60),
    "lattice_double_sum": (1.0, 1.3, 1.0, 80),
    "lattice_bessel": (1.0, 1.3, 1.0, 60),
}


def bench(name: str, args: tuple, repeat: int, number: int) -> tuple[float, float]:
    """Best per-call seconds for the jitted kernel and its Python body."""
    fast = getattr(kernels, name)
    slow = python_impl(fast)
    np.testing.assert_allclose(np.asarray(fast(*args), float), np.asarray(slow(*args), float), rtol=1e-12)
    t_fast = min(timeit.repeat(lambda: fast(*args), repeat=repeat, number=number)) / number
    t_slow = min(timeit.repeat(lambda: slow(*args), repeat=repeat, number=number)) / number
    return t_fast, t_slow


def main(argv: list[str] | None = None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--number", type=int, default=200)
    ap.add_argument("kernels", nargs="*", default=sorted(CASES), help="subset of kernels to time")
    ns = ap.parse_args(argv)
    if not HAVE_NUMBA:
        print("numba disabled: both columns time the same Python function")
    print(f"{'kernel':22s} {'jit [us]':>10s} {'python [us]':>12s} {'speedup':>8s}")
    for name in ns.kernels:
        t_fast, t_slow = bench(name, CASES[name], ns.repeat, ns.number)
        print(f"{name:22s} {t_fast * 1e6:10.2f} {t_slow * 1e6:12.2f} {t_slow / t_fast:8.1f}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
