import itertools

import numpy as np
import pytest

from anyongates import (
    MonomialMatrix,
    PhaseCoset,
    delta_set,
    evaluate_word,
    intersect_delta,
    is_monomial,
    load_builtin,
    monomial_from_matrix,
    solve_intertwiner,
    torus_surface,
)
from anyongates._kernels import (
    SCAN_UNIQUE,
    _scan_column_perms_numpy,
    all_permutations,
    enumerate_matchings,
    scan_column_perms,
)
from anyongates.solver import (
    IntertwinerSolution,
    free_coset,
    intertwiner_residual,
    nearest_monomial,
)

from oracles import grid_intertwiner_solutions

FIB = load_builtin("fibonacci")
ISING = load_builtin("ising")


def random_unitary(n, seed):
    rng = np.random.default_rng(seed)
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    q, r = np.linalg.qr(a)
    return q * (np.diag(r) / np.abs(np.diag(r)))


# ---------------------------------------------------------------------------
# Monomial helpers


def test_is_monomial_accepts_permutation_phase():
    m = np.array([[0, 1j], [np.exp(0.3j), 0]])
    assert is_monomial(m)
    assert is_monomial(np.eye(4, dtype=complex))


def test_is_monomial_rejects_non_monomial():
    assert not is_monomial(np.array([[1, 1], [0, 1]], dtype=complex) / np.sqrt(2))
    assert not is_monomial(np.zeros((2, 2), dtype=complex))
    assert not is_monomial(np.array([[0.4, 0], [0, 1]], dtype=complex))


def test_monomial_from_matrix_round_trip():
    gate = MonomialMatrix(perm=(2, 0, 1), phases=(1.0, 1j, np.exp(0.25j)))
    back = monomial_from_matrix(gate.matrix())
    assert back.perm == gate.perm
    assert np.abs(np.array(back.phases) - np.array(gate.phases)).max() < 1e-12


def test_monomial_matrix_action():
    gate = MonomialMatrix(perm=(1, 0), phases=(1.0, -1.0))
    m = gate.matrix()
    # column l carries phase l at row perm[l]
    assert m[1, 0] == 1.0 and m[0, 1] == -1.0
    assert gate.is_identity_perm() is False
    assert MonomialMatrix(perm=(0, 1), phases=(1, 1)).is_identity_perm()


def test_nearest_monomial_recovers_noisy_input():
    rng = np.random.default_rng(5)
    gate = MonomialMatrix(perm=(1, 2, 0), phases=(1j, 1.0, -1j))
    noisy = gate.matrix() + 0.01 * rng.normal(size=(3, 3))
    back, resid = nearest_monomial(noisy)
    assert back.perm == gate.perm
    assert resid < 0.05


# ---------------------------------------------------------------------------
# Phase cosets


def test_free_coset_contains_anything():
    c = free_coset(3)
    assert c.n_free == 3
    assert c.contains(np.exp(1j * np.array([0.1, 2.0, -1.0])))


def test_rigid_coset_contains_up_to_global_phase():
    c = PhaseCoset(components=(0, 0), rel=(1.0, -1.0))
    assert c.n_free == 1
    assert c.contains(np.array([1j, -1j]))
    assert not c.contains(np.array([1.0, 1.0]))


def test_coset_intersect_equal_and_disjoint():
    a = PhaseCoset(components=(0, 0), rel=(1.0, 1j))
    b = PhaseCoset(components=(0, 0), rel=(1.0, 1j))
    c = PhaseCoset(components=(0, 0), rel=(1.0, -1j))
    assert a.intersect(b) is not None
    assert a.intersect(b).same_as(a)
    assert a.intersect(c) is None


def test_coset_intersect_free_with_rigid():
    rigid = PhaseCoset(components=(0, 0, 0), rel=(1.0, 1j, -1.0))
    got = free_coset(3).intersect(rigid)
    assert got is not None
    assert got.n_free == 1
    assert got.same_as(rigid)


def test_coset_partial_intersection():
    # two 2-free cosets on 3 coordinates joining different pairs
    a = PhaseCoset(components=(0, 0, 1), rel=(1.0, 1.0, 1.0))
    b = PhaseCoset(components=(0, 1, 1), rel=(1.0, 1.0, 1.0))
    got = a.intersect(b)
    assert got is not None
    assert got.n_free == 1
    assert got.contains(np.array([1j, 1j, 1j]))
    assert not got.contains(np.array([1.0, 1.0, -1.0]))


def test_coset_subset():
    rigid = PhaseCoset(components=(0, 0), rel=(1.0, 1j))
    assert rigid.is_subset_of(free_coset(2))
    assert not free_coset(2).is_subset_of(rigid)


def test_coset_instantiate():
    c = PhaseCoset(components=(0, 1, 0), rel=(1.0, 1.0, -1.0))
    vals = c.instantiate(np.array([1j, -1.0]))
    assert np.abs(vals - np.array([1j, -1.0, -1j])).max() < 1e-12


# ---------------------------------------------------------------------------
# Intertwiner solving


def test_identity_word_leaves_everything_free():
    sols = solve_intertwiner(np.eye(3, dtype=complex))
    assert len(sols) == 6
    for sol in sols:
        assert sol.perm_in == sol.perm_out
        assert sol.gate_coset().n_free == 3


def test_fibonacci_s_families():
    v = evaluate_word(FIB, torus_surface(), "s").matrix
    sols = solve_intertwiner(v)
    by_perm = {sol.perm_in: sol for sol in sols}
    assert set(by_perm) == {(0, 1), (1, 0)}
    ident = by_perm[(0, 1)]
    assert ident.gate_coset().n_free == 1
    assert ident.gate_coset().contains(np.array([1.0, 1.0]))
    swap = by_perm[(1, 0)]
    assert swap.gate_coset().contains(np.array([1.0, -1.0]))


def test_fibonacci_st_swap_ratio():
    v = evaluate_word(FIB, torus_surface(), "st").matrix
    sols = solve_intertwiner(v)
    swap = next(s for s in sols if s.perm_in == (1, 0))
    coset = swap.gate_coset()
    assert coset.n_free == 1
    ratio = coset.rel[1] / coset.rel[0]
    assert abs(ratio - np.exp(0.6j * np.pi)) < 1e-9


def test_instantiated_families_satisfy_equation():
    rng = np.random.default_rng(11)
    for word in ("s", "t", "st", "ts"):
        for model in (FIB, ISING):
            v = evaluate_word(model, torus_surface(), word).matrix
            for sol in solve_intertwiner(v):
                for _ in range(25):
                    free = np.exp(2j * np.pi * rng.random(sol.n_components))
                    res = intertwiner_residual(v, sol, free)
                    assert res < 1e-8


def test_composed_gate_is_monomial_on_word():
    v = evaluate_word(ISING, torus_surface(), "st").matrix
    for sol in solve_intertwiner(v):
        g = sol.gate().matrix()
        assert is_monomial(v @ g @ v.conj().T)


def test_solver_matches_grid_oracle_small():
    """Dual route: graph propagation vs brute-force grid scan, dim <= 3."""
    cases = [
        evaluate_word(FIB, torus_surface(), "s").matrix,
        evaluate_word(FIB, torus_surface(), "st").matrix,
        evaluate_word(ISING, torus_surface(), "st").matrix,
    ]
    for v in cases:
        impl = solve_intertwiner(v)
        oracle = grid_intertwiner_solutions(v)
        assert {pi for pi, _ in oracle} == {s.perm_in for s in impl}
        for pi, d in oracle:
            owners = [
                s for s in impl if s.perm_in == pi and s.gate_coset().contains(d)
            ]
            assert owners, (pi, d)
        # every family is hit by at least one oracle point
        for s in impl:
            assert any(
                pi == s.perm_in and s.gate_coset().contains(d) for pi, d in oracle
            )


def test_restricting_perm_in():
    v = evaluate_word(FIB, torus_surface(), "s").matrix
    sols = solve_intertwiner(v, perm_in=[(0, 1)])
    assert [s.perm_in for s in sols] == [(0, 1)]


def test_fixed_perm_out():
    v = evaluate_word(FIB, torus_surface(), "s").matrix
    sols = solve_intertwiner(v, perm_in=[(1, 0)], perm_out=[(1, 0)])
    assert len(sols) == 1
    assert sols[0].perm_out == (1, 0)


def test_restricting_perm_out_prevents_matching_blowup():
    # a word matrix with equal-modulus entries everywhere is compatible with
    # every output matching pattern, so the candidate list must bound both
    # sides of the equation
    from anyongates.abelian import affine_permutations

    model = load_builtin("zn_toric:3")
    affs = affine_permutations(model)[:40]
    with pytest.raises(ValueError, match="matchings"):
        delta_set(model, torus_surface(), "stst", restrict_perms=affs)
    ds = delta_set(model, torus_surface(), "stst",
                   restrict_perms=affs, restrict_perms_out=affs)
    assert ds.families
    aff_set = set(affs)
    for fam in ds.families:
        assert fam.perm in aff_set


def test_wildcard_guard_above_dim_8():
    v = np.eye(9, dtype=complex)
    with pytest.raises(ValueError):
        solve_intertwiner(v)
    # fixed perms stay fine at larger dimension
    sols = solve_intertwiner(v, perm_in=[tuple(range(9))])
    assert len(sols) == 1


def test_non_unitary_input_rejected():
    with pytest.raises(ValueError):
        solve_intertwiner(np.array([[1.0, 0.0], [0.0, 2.0]], dtype=complex))


def test_generic_unitary_only_global_phase():
    """A structureless unitary admits nothing beyond lambda * identity."""
    v = random_unitary(3, seed=2)
    sols = solve_intertwiner(v)
    assert len(sols) == 1
    sol = sols[0]
    assert sol.perm_in == (0, 1, 2) and sol.perm_out == (0, 1, 2)
    coset = sol.gate_coset()
    assert coset.n_free == 1
    assert coset.contains(np.array([1.0, 1.0, 1.0]))


def test_intertwiner_residual_distinct_in_out():
    # V_out may differ from V; identity gates must still intertwine exactly
    v = random_unitary(3, seed=4)
    v_out = v.copy()
    sol = IntertwinerSolution(
        perm_in=(0, 1, 2),
        perm_out=(0, 1, 2),
        phase_classes=(0,) * 6,
        relative_phases=(1.0,) * 6,
    )
    assert intertwiner_residual(v, sol, v_out=v_out) < 1e-12


# ---------------------------------------------------------------------------
# Delta sets over words


def test_delta_set_families_close_under_words():
    ds = delta_set(FIB, torus_surface(), "s")
    assert ds.dim == 2
    assert len(ds.families) == 2
    for fam in ds.families:
        assert fam.perm_out_by_word["s"] in (fam.perm, tuple(fam.perm))


def test_intersect_delta_pins_fibonacci_to_identity():
    sets = [delta_set(FIB, torus_surface(), w) for w in ("s", "st")]
    inter = intersect_delta(sets)
    assert len(inter.families) == 1
    fam = inter.families[0]
    assert fam.perm == (0, 1)
    assert fam.coset.n_free == 1
    assert fam.coset.contains(np.array([1.0, 1.0]))


def test_delta_set_contains_gate():
    ds = delta_set(FIB, torus_surface(), "s")
    assert ds.contains(MonomialMatrix(perm=(1, 0), phases=(1.0, -1.0)))
    assert not ds.contains(MonomialMatrix(perm=(1, 0), phases=(1.0, 1j)))


# ---------------------------------------------------------------------------
# Kernel dispatch


def test_scan_paths_agree():
    rng = np.random.default_rng(9)
    for n in (3, 4):
        v = random_unitary(n, seed=int(rng.integers(1 << 30)))
        vo = random_unitary(n, seed=int(rng.integers(1 << 30)))
        absv = np.abs(v)
        absvo = np.abs(vo)
        perms = all_permutations(n)
        s_fast, m_fast = scan_column_perms(absv, absvo, perms, 1e-9)
        s_ref, m_ref = _scan_column_perms_numpy(absv, absvo, perms, 1e-9)
        assert np.array_equal(s_fast, s_ref)
        assert np.array_equal(m_fast, m_ref)


def test_scan_detects_unique_match():
    v = np.abs(evaluate_word(FIB, torus_surface(), "s").matrix)
    perms = all_permutations(2)
    status, match = scan_column_perms(v, v, perms, 1e-9)
    assert SCAN_UNIQUE in status
    k = list(status).index(SCAN_UNIQUE)
    # matched rows form a permutation
    assert sorted(match[k]) == [0, 1]


def test_enumerate_matchings():
    compat = np.array([[1, 1, 0], [1, 1, 0], [0, 0, 1]], dtype=bool)
    got = set(enumerate_matchings(compat))
    assert got == {(0, 1, 2), (1, 0, 2)}
    none = enumerate_matchings(np.zeros((2, 2), dtype=bool))
    assert none == []


def test_numba_flag_subprocess():
    """The numpy fallback produces the same families as the default path."""
    import json
    import os
    import subprocess
    import sys

    code = (
        "import json, numpy as np\n"
        "from anyongates import load_builtin, evaluate_word, torus_surface, solve_intertwiner\n"
        "m = load_builtin('ising')\n"
        "v = evaluate_word(m, torus_surface(), 'st').matrix\n"
        "sols = solve_intertwiner(v)\n"
        "print(json.dumps(sorted([list(s.perm_in) + list(s.perm_out) for s in sols])))\n"
    )
    outs = []
    for flag in ("0", "1"):
        env = dict(os.environ, ANYONGATES_NO_NUMBA=flag)
        proc = subprocess.run(
            [sys.executable, "-c", code], capture_output=True, text=True, env=env
        )
        assert proc.returncode == 0, proc.stderr
        outs.append(json.loads(proc.stdout))
    assert outs[0] == outs[1]
