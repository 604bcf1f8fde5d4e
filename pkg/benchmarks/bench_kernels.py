#!/usr/bin/env python3
"""Benchmark the numba kernels against the pure-numpy fallbacks.

Times the two hot paths on representative workloads:

* circuit build: applying brickwall steps to a batch of matrices
  (dominates entropy sweeps and moment estimation),
* zeroing sweep: the banded Givens compression of one unitary.

Run:  python3 benchmarks/bench_kernels.py [--quick]
"""

import argparse
import time

import numpy as np

from linopt import _kernels_numpy
from linopt.geometry import brickwall_geometry
from linopt.sampler import RngStream, haar_unitary, sample_circuit

try:
    from linopt import _kernels_numba
except ImportError:
    _kernels_numba = None


def _circuit_workload(n, steps, batch, seed=0):
    geom = brickwall_geometry(n)
    gen = np.random.default_rng(seed)
    u = np.tile(np.eye(n, dtype=np.complex128), (batch, 1, 1))
    raw = gen.standard_normal((batch, steps, geom.pairs_per_step, 2, 2, 2))
    blocks = raw[..., 0] + 1j * raw[..., 1]
    phases = np.exp(2j * np.pi * gen.random((batch, steps, geom.singles_per_step)))
    return u, blocks, phases, geom.plan


def bench_apply_steps(kernels, n, steps, batch, repeats):
    u, blocks, phases, plan = _circuit_workload(n, steps, batch)
    kernels.apply_steps(u.copy(), blocks[:, :1], phases[:, :1], *plan)  # warm up / jit
    best = float("inf")
    for _ in range(repeats):
        work = u.copy()
        t0 = time.perf_counter()
        kernels.apply_steps(work, blocks, phases, *plan)
        best = min(best, time.perf_counter() - t0)
    return best


def bench_zeroing_sweep(kernels, n, w, repeats):
    u = haar_unitary(n, RngStream(1))
    cap = n * w
    gate_m = np.empty(cap, dtype=np.int64)
    gate_block = np.empty((cap, 2, 2), dtype=np.complex128)
    kernels.zeroing_sweep(u.copy(), w, 1e-15, gate_m, gate_block)  # warm up / jit
    best = float("inf")
    for _ in range(repeats):
        work = u.copy()
        t0 = time.perf_counter()
        kernels.zeroing_sweep(work, w, 1e-15, gate_m, gate_block)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--quick", action="store_true", help="smaller workloads")
    args = parser.parse_args()

    if args.quick:
        circuit_cases = [(16, 64, 32)]
        sweep_cases = [(64, 20)]
        repeats = 3
    else:
        circuit_cases = [(16, 256, 64), (64, 256, 32), (100, 64, 200)]
        sweep_cases = [(64, 33), (128, 40), (256, 60)]
        repeats = 5

    backends = [("numpy", _kernels_numpy)]
    if _kernels_numba is not None:
        backends.append(("numba", _kernels_numba))
    else:
        print("numba not importable; benchmarking the numpy path only")

    print(f"{'workload':<36}" + "".join(f"{name:>12}" for name, _ in backends) + f"{'speedup':>10}")
    for n, steps, batch in circuit_cases:
        times = [bench_apply_steps(k, n, steps, batch, repeats) for _, k in backends]
        label = f"apply_steps n={n} d={steps} B={batch}"
        cells = "".join(f"{t * 1e3:>10.1f}ms" for t in times)
        speed = f"{times[0] / times[-1]:>9.1f}x" if len(times) > 1 else ""
        print(f"{label:<36}{cells}{speed}")
    for n, w in sweep_cases:
        times = [bench_zeroing_sweep(k, n, w, repeats) for _, k in backends]
        label = f"zeroing_sweep n={n} w={w}"
        cells = "".join(f"{t * 1e3:>10.1f}ms" for t in times)
        speed = f"{times[0] / times[-1]:>9.1f}x" if len(times) > 1 else ""
        print(f"{label:<36}{cells}{speed}")

    # end-to-end: one deep circuit sample under the active backend
    t0 = time.perf_counter()
    sample_circuit(brickwall_geometry(64), 512, RngStream(7))
    print(f"\nsample_circuit n=64 d=512 (active backend): "
          f"{(time.perf_counter() - t0) * 1e3:.0f} ms")


if __name__ == "__main__":
    main()
