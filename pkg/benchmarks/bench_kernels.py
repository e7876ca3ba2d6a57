#!/usr/bin/env python3
"""Benchmark the numba kernels against their pure-numpy fallbacks.

The three hot kernels are dense term scatter-assembly (runs once per twist
angle in every sweep), per-mode occupation accumulation, and symmetry-sector
state scans.  Forcing one backend package-wide is done via the environment
flag POINTGAP_KERNELS=numpy|numba; this script times both implementations
directly and checks they agree.

Usage:
    python benchmarks/bench_kernels.py [--length L] [--repeats N]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from pointgap import _kernels as K
from pointgap.fock import edge_b_constraints
from pointgap.models import ChainParams, chain_sector_basis, chain_terms, phase_table, terms_to_coo


def timeit(fn, repeats):
    best = np.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--length", type=int, default=7, help="chain length (default 7)")
    ap.add_argument("--sector", type=int, nargs=2, default=(9, -1),
                    metavar=("N", "P"), help="sector quantum numbers")
    ap.add_argument("--repeats", type=int, default=5)
    args = ap.parse_args()

    if not hasattr(K, "assemble_dense_numba"):
        print("numba unavailable: only the numpy backend can be timed")
        return

    p = ChainParams(length=args.length, t=1.0, j=1.0, v=1.0)
    basis = chain_sector_basis(p, *args.sector)
    lay, terms = chain_terms(p)
    rows, cols, amps, slots = terms_to_coo(terms, basis)
    phases = phase_table(0.73, p.length)
    out = np.zeros((basis.dim, basis.dim), dtype=complex)
    print(f"chain L={args.length}, sector {tuple(args.sector)}: dim={basis.dim}, "
          f"terms={len(rows)}")

    # warm the JIT before timing
    K.assemble_dense_numba(rows, cols, amps, slots, phases, out)

    results = []
    t_np = timeit(lambda: K.assemble_dense_numpy(rows, cols, amps, slots, phases, out),
                  args.repeats)
    t_nb = timeit(lambda: K.assemble_dense_numba(rows, cols, amps, slots, phases, out),
                  args.repeats)
    a = K.assemble_dense_numpy(rows, cols, amps, slots, phases, np.zeros_like(out))
    b = K.assemble_dense_numba(rows, cols, amps, slots, phases, np.zeros_like(out))
    results.append(("assemble_dense", t_np, t_nb, np.abs(a - b).max()))

    rng = np.random.default_rng(5)
    nvec = min(basis.dim, 256)
    vecs = rng.standard_normal((basis.dim, nvec)) + 1j * rng.standard_normal((basis.dim, nvec))
    probs = np.abs(vecs) ** 2
    K.mode_weights_numba(basis.states, probs, lay.n_modes)
    t_np = timeit(lambda: K.mode_weights_numpy(basis.states, probs, lay.n_modes),
                  args.repeats)
    t_nb = timeit(lambda: K.mode_weights_numba(basis.states, probs, lay.n_modes),
                  args.repeats)
    a = K.mode_weights_numpy(basis.states, probs, lay.n_modes)
    b = K.mode_weights_numba(basis.states, probs, lay.n_modes)
    results.append(("mode_weights", t_np, t_nb, np.abs(a - b).max()))

    cons = edge_b_constraints(lay, p.length)
    cmasks = np.array([c.mask for c in cons], dtype=np.uint64)
    ccounts = np.array([c.count for c in cons], dtype=np.int64)
    scan_args = (lay.n_modes, args.sector[0], args.sector[1], lay.up_mask,
                 cmasks, ccounts)
    K.scan_states_numba(*scan_args)
    t_np = timeit(lambda: K.scan_states_numpy(*scan_args), args.repeats)
    t_nb = timeit(lambda: K.scan_states_numba(*scan_args), args.repeats)
    a = K.scan_states_numpy(*scan_args)
    b = K.scan_states_numba(*scan_args)
    results.append(("scan_states", t_np, t_nb,
                    float(np.abs(a.astype(np.int64) - b.astype(np.int64)).max())))

    print(f"\n{'kernel':<16s} {'numpy (ms)':>12s} {'numba (ms)':>12s} "
          f"{'speedup':>8s} {'max |diff|':>11s}")
    for name, t_np, t_nb, diff in results:
        print(f"{name:<16s} {t_np*1e3:>12.3f} {t_nb*1e3:>12.3f} "
              f"{t_np/t_nb:>7.2f}x {diff:>11.2e}")


if __name__ == "__main__":
    main()
