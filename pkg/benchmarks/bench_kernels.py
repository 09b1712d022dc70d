"""Timing comparison of the compiled and numpy kernel backends.

Run:  python3 benchmarks/bench_kernels.py [--repeats 5]

Exercises the three kernels at sizes matching real workloads (ordered
holonomy products around N=4e4, adiabatic chains up to N=1.6e5) and prints
a small table of best-of-N wall times plus the cross-backend agreement.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from holo._kernel import _py

try:
    from holo._kernel import _cy
except ImportError:
    _cy = None


def best_of(fn, args, repeats):
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        out = fn(*args)
        times.append(time.perf_counter() - t0)
    return min(times), out


def run(repeats: int) -> None:
    rng = np.random.default_rng(2024)
    coords = rng.uniform(0.1, 1.4, size=(40000, 8))
    g = rng.normal(size=(40000, 2, 2)) + 1j * rng.normal(size=(40000, 2, 2))
    exps = 1e-3 * 0.5 * (g - g.conj().transpose(0, 2, 1))
    frames = _py.batch_unitary(rng.uniform(0.1, 1.4, size=(160000, 8)), False, False, False)

    cases = [
        ("batch_unitary (40k pts)", "batch_unitary", (coords, False, False, False)),
        ("chain_expm_2x2 (40k factors)", "chain_expm_2x2", (exps,)),
        ("chain_propagator (160k steps)", "chain_propagator", (frames, 1e-3, 1.0, 2)),
    ]
    backends = [("python", _py)] + ([("cython", _cy)] if _cy is not None else [])
    if _cy is None:
        print("compiled backend not importable; timing numpy only")

    print(f"{'kernel':34s}" + "".join(f"{name:>12s}" for name, _ in backends) + f"{'ratio':>9s}{'agree':>12s}")
    for label, attr, args in cases:
        times, outs = [], []
        for _, mod in backends:
            t, out = best_of(getattr(mod, attr), args, repeats)
            times.append(t)
            outs.append(out)
        ratio = f"{times[0] / times[-1]:8.2f}x" if len(times) > 1 else f"{'':>9s}"
        agree = f"{np.abs(outs[0] - outs[-1]).max():12.2e}" if len(outs) > 1 else ""
        print(f"{label:34s}" + "".join(f"{t * 1e3:10.2f}ms" for t in times) + ratio + agree)


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeats", type=int, default=5)
    run(ap.parse_args().repeats)
