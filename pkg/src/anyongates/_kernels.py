"""Hot numerical kernels with a numba fast path and a numpy fallback.

The wildcard intertwiner search scans every column permutation of an n x n
unitary (n! candidates for n <= 8) and, for each, matches row modulus
patterns.  That scan dominates the solver's runtime, so it is compiled with
numba when available.  Setting the environment variable ANYONGATES_NO_NUMBA
to a non-empty value other than "0" forces the pure-numpy path; the two are
compared by benchmarks/bench_solver.py and by the test suite.
"""

from __future__ import annotations

import itertools
import os

import numpy as np

NUMBA_DISABLED = os.environ.get("ANYONGATES_NO_NUMBA", "") not in ("", "0")

try:
    if NUMBA_DISABLED:
        raise ImportError("numba disabled via ANYONGATES_NO_NUMBA")
    from numba import njit

    HAVE_NUMBA = True
except ImportError:
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        # Identity decorator so @njit code runs as plain Python/numpy.
        if len(args) == 1 and callable(args[0]) and not kwargs:
            return args[0]

        def wrap(func):
            return func

        return wrap


def all_permutations(n: int) -> np.ndarray:
    """All permutations of range(n) as an (n!, n) int64 array."""
    return np.array(list(itertools.permutations(range(n))), dtype=np.int64)


# Status codes returned by the column-perm scan for each candidate column
# permutation: NO_MATCH = no row assignment reproduces the modulus pattern,
# UNIQUE = exactly one assignment (stored), AMBIGUOUS = some row has several
# candidate images, caller must enumerate matchings itself.
SCAN_NO_MATCH = 0
SCAN_UNIQUE = 1
SCAN_AMBIGUOUS = 2


@njit(cache=True)
def _scan_column_perms_numba(absv_in, absv_out, perms, tol):  # pragma: no cover
    n_perm, n = perms.shape
    status = np.zeros(n_perm, dtype=np.int8)
    match = np.full((n_perm, n), -1, dtype=np.int64)
    for p in range(n_perm):
        feasible = True
        ambiguous = False
        for m in range(n):
            count = 0
            last = -1
            for r in range(n):
                good = True
                for col in range(n):
                    diff = absv_out[r, perms[p, col]] - absv_in[m, col]
                    if diff > tol or diff < -tol:
                        good = False
                        break
                if good:
                    count += 1
                    last = r
            if count == 0:
                feasible = False
                break
            if count == 1:
                match[p, m] = last
            else:
                ambiguous = True
        if not feasible:
            status[p] = SCAN_NO_MATCH
        elif ambiguous:
            status[p] = SCAN_AMBIGUOUS
        else:
            seen = np.zeros(n, dtype=np.uint8)
            injective = True
            for m in range(n):
                r = match[p, m]
                if seen[r]:
                    injective = False
                    break
                seen[r] = 1
            status[p] = SCAN_UNIQUE if injective else SCAN_NO_MATCH
    return status, match


def _scan_column_perms_numpy(absv_in, absv_out, perms, tol):
    n_perm, n = perms.shape
    status = np.zeros(n_perm, dtype=np.int8)
    match = np.full((n_perm, n), -1, dtype=np.int64)
    chunk = max(1, int(2_000_000 // max(1, n * n * n)))
    for start in range(0, n_perm, chunk):
        block = perms[start : start + chunk]  # (b, n)
        # targets[b, r, col] = absv_out[r, block[b, col]]
        targets = absv_out[:, block].transpose(1, 0, 2)
        # compat[b, m, r] = rows m of |V| matching target row r under perm b
        diff = np.abs(targets[:, None, :, :] - absv_in[None, :, None, :])
        compat = (diff <= tol).all(axis=3)
        counts = compat.sum(axis=2)
        for bi in range(block.shape[0]):
            p = start + bi
            if (counts[bi] == 0).any():
                status[p] = SCAN_NO_MATCH
                continue
            if (counts[bi] > 1).any():
                status[p] = SCAN_AMBIGUOUS
                continue
            m_rows = compat[bi].argmax(axis=1)
            if len(set(m_rows.tolist())) != n:
                status[p] = SCAN_NO_MATCH
                continue
            status[p] = SCAN_UNIQUE
            match[p] = m_rows
    return status, match


def scan_column_perms(absv_in, absv_out, perms, tol):
    """Match row modulus patterns of |V| against column-permuted |V_out|.

    For each candidate column permutation ``perms[p]`` the intertwiner
    equation forces row ``m`` of ``absv_in`` to coincide with some row ``r``
    of ``absv_out[:, perms[p]]``; ``r`` is then the image of ``m`` under the
    output permutation.  Returns ``(status, match)`` where ``status[p]`` is
    one of the SCAN_* codes and ``match[p]`` holds the assignment when it is
    unique.
    """
    absv_in = np.ascontiguousarray(absv_in, dtype=np.float64)
    absv_out = np.ascontiguousarray(absv_out, dtype=np.float64)
    perms = np.ascontiguousarray(perms, dtype=np.int64)
    if HAVE_NUMBA:
        return _scan_column_perms_numba(absv_in, absv_out, perms, float(tol))
    return _scan_column_perms_numpy(absv_in, absv_out, perms, float(tol))


def enumerate_matchings(compat: np.ndarray) -> list[tuple[int, ...]]:
    """All perfect matchings row -> image in a boolean compatibility matrix.

    Backtracking over rows ordered by candidate count; used only when the
    scan reports SCAN_AMBIGUOUS, which happens for matrices with repeated
    modulus rows (e.g. flat abelian S-matrices).
    """
    n = compat.shape[0]
    order = sorted(range(n), key=lambda m: int(compat[m].sum()))
    result: list[tuple[int, ...]] = []
    assignment = [-1] * n
    used = [False] * n

    def backtrack(pos: int) -> None:
        if pos == n:
            result.append(tuple(assignment))
            return
        m = order[pos]
        for r in range(n):
            if compat[m, r] and not used[r]:
                used[r] = True
                assignment[m] = r
                backtrack(pos + 1)
                used[r] = False
                assignment[m] = -1

    backtrack(0)
    return result
