"""Compare the compiled and pure-numpy column-permutation scans.

The scan is the hot loop of the wildcard intertwiner search: for every
candidate gate permutation it matches the modulus pattern of the conjugated
word matrix against the original.  Run this after changing the kernel:

    python3 benchmarks/bench_solver.py
    ANYONGATES_NO_NUMBA=1 python3 benchmarks/bench_solver.py   # fallback only

The default workload is the full 8! permutation sweep for an 8-dimensional
Ising braid word, which is the largest wildcard case the solver accepts.
"""

import argparse
import time

import numpy as np

from anyongates import evaluate_word, load_builtin, solve_intertwiner, sphere_surface
from anyongates._kernels import (
    NUMBA_DISABLED,
    _scan_column_perms_numba,
    _scan_column_perms_numpy,
    all_permutations,
)


def workload():
    model = load_builtin("ising")
    surf = sphere_surface(model, "sigma", 8)
    v = evaluate_word(model, surf, "s2").matrix
    absv = np.abs(v)
    perms = all_permutations(v.shape[0])
    return v, absv, perms


def time_fn(fn, *args, repeats):
    best = np.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeats", type=int, default=5)
    args = ap.parse_args()

    v, absv, perms = workload()
    print(f"workload: {perms.shape[0]} permutations, dimension {v.shape[0]}")

    t_np, out_np = time_fn(
        _scan_column_perms_numpy, absv, absv, perms, 1e-9, repeats=args.repeats
    )
    print(f"numpy scan:  {t_np * 1e3:8.1f} ms")

    if NUMBA_DISABLED:
        print("numba scan:  skipped (ANYONGATES_NO_NUMBA is set)")
    else:
        _scan_column_perms_numba(absv, absv, perms, 1e-9)  # compile first
        t_nb, out_nb = time_fn(
            _scan_column_perms_numba, absv, absv, perms, 1e-9,
            repeats=args.repeats,
        )
        same = np.array_equal(out_np[0], out_nb[0]) and np.array_equal(
            out_np[1], out_nb[1]
        )
        print(f"numba scan:  {t_nb * 1e3:8.1f} ms   (outputs equal: {same})")
        print(f"speedup:     {t_np / t_nb:8.1f}x")

    t0 = time.perf_counter()
    sols = solve_intertwiner(v)
    print(
        f"full solve:  {(time.perf_counter() - t0) * 1e3:8.1f} ms "
        f"({len(sols)} families)"
    )


if __name__ == "__main__":
    main()
