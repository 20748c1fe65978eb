#!/usr/bin/env python3
"""Benchmark the compiled discrete-action kernels against the NumPy fallback.

Times the two hot kernels (action+gradient evaluation, preconditioner solve)
and the full direct-method minimization with either backend swapped into
uavtraj.kernels. Run: python benchmarks/bench_kernels.py [--repeats N]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

import uavtraj.kernels as kernels
from uavtraj import _kernels_py
from uavtraj.core import BoundaryConditions, TimeWindow, Vec2
from uavtraj.oracle import direct_optimize
from uavtraj.potential import QuadraticPhase

try:
    from uavtraj import _kernels_cy
except ImportError:
    _kernels_cy = None

KERNEL_ATTRS = ("quad_action", "quad_action_grad", "precond_factor", "precond_solve")

PHASE = QuadraticPhase(u0=-1.0, u1=0.0, center=Vec2(0.3, -0.2), k=1.0)
BC = BoundaryConditions(TimeWindow(0.0, 1.0), Vec2(0, 0), Vec2(1, 0.5))


def timeit(fn, repeats):
    fn()  # warm up
    start = time.perf_counter()
    for _ in range(repeats):
        fn()
    return (time.perf_counter() - start) / repeats


def bench_backend(impl, n, repeats):
    rng = np.random.default_rng(42)
    pos = np.ascontiguousarray(rng.normal(size=(n + 1, 2)))
    rhs = np.ascontiguousarray(rng.normal(size=(n - 1, 2)))
    factor = impl.precond_factor(n - 1, 1.0, 1.0 / n)
    t_grad = timeit(
        lambda: impl.quad_action_grad(pos, 1.0 / n, 1.0, -1.0, 0.0, 0.3, -0.2), repeats
    )
    t_solve = timeit(lambda: impl.precond_solve(factor, rhs), repeats)

    saved = {attr: getattr(kernels, attr) for attr in KERNEL_ATTRS}
    try:
        for attr in KERNEL_ATTRS:
            setattr(kernels, attr, getattr(impl, attr))
        t_opt = timeit(lambda: direct_optimize(PHASE, 1.0, BC, n=n), max(1, repeats // 10))
    finally:
        for attr, fn in saved.items():
            setattr(kernels, attr, fn)
    return t_grad, t_solve, t_opt


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=200)
    args = parser.parse_args()

    backends = [("python", _kernels_py)]
    if _kernels_cy is not None:
        backends.append(("cython", _kernels_cy))
    else:
        print("compiled kernels not built; timing the fallback only\n")

    header = f"{'N':>7} {'backend':>8} {'action+grad':>13} {'solve':>11} {'direct_optimize':>16}"
    print(header)
    print("-" * len(header))
    results = {}
    for n in (500, 2000, 10_000):
        for name, impl in backends:
            t_grad, t_solve, t_opt = bench_backend(impl, n, args.repeats)
            results[(n, name)] = (t_grad, t_solve, t_opt)
            print(
                f"{n:>7} {name:>8} {t_grad * 1e6:>10.1f} us {t_solve * 1e6:>8.1f} us"
                f" {t_opt * 1e3:>13.2f} ms"
            )
        if len(backends) == 2:
            py = results[(n, "python")]
            cy = results[(n, "cython")]
            print(
                f"{'':>7} {'speedup':>8} {py[0] / cy[0]:>10.1f} x  {py[1] / cy[1]:>8.1f} x "
                f"{py[2] / cy[2]:>13.1f} x"
            )
    print(f"\nactive backend at import time: {kernels.BACKEND}")


if __name__ == "__main__":
    main()
