import json

import numpy as np
import pytest

from anyongates import (
    ClassificationError,
    InfeasibleSurfaceError,
    allowed_curve_permutations,
    classify,
    classify_punctured_sphere,
    classify_torus,
    enumerate_labelings,
    ising_qubit_isomorphism,
    iso_phase_set,
    load_builtin,
    sphere_surface,
    torus_surface,
)
from anyongates.classify import VERDICTS

FIB = load_builtin("fibonacci")
ISING = load_builtin("ising")
Z2 = load_builtin("zn_toric:2")

IDENT2 = ((0, 0), (1, 1))
SWAP2 = ((0, 1), (1, 0))


# ---------------------------------------------------------------------------
# Curve bookkeeping


def test_allowed_curve_permutations_ising():
    surf = sphere_surface(ISING, "sigma", 6)
    allowed = allowed_curve_permutations(ISING, surf)
    assert set(allowed) == {"C1", "C2", "C3"}
    # qubit curves may keep or swap 1 <-> psi; the middle curve is frozen
    for curve in ("C1", "C3"):
        assert set(allowed[curve]) == {IDENT2, SWAP2}
    assert allowed["C2"] == [((2, 2),)]


def test_allowed_curve_permutations_respect_multiplicity():
    surf = sphere_surface(FIB, "tau", 6)
    allowed = allowed_curve_permutations(FIB, surf)
    # vacuum and tau occur with different multiplicity on every curve, so
    # no swap can preserve the cut dimensions
    for perms in allowed.values():
        assert len(perms) == 1
        assert all(a == b for a, b in perms[0])


# ---------------------------------------------------------------------------
# Local basis-change phase sets


@pytest.mark.parametrize("perm", [IDENT2, SWAP2])
def test_iso_phase_set_ising_block(perm):
    """Both channel bijections admit exactly the two sign patterns."""
    iso = iso_phase_set(ISING, (2, 2, 2, 2), perm=perm)
    assert iso.curve_labels == (0, 1)
    got = {tuple(round(v, 9) for v in f) for f in iso.phase_functions}
    assert got == {(0.0, 0.0), (0.0, round(np.pi, 9))}


def test_iso_phase_set_fibonacci_block():
    iso_id = iso_phase_set(FIB, (1, 1, 1, 1), perm=IDENT2)
    assert iso_id.phase_functions == ((0.0, 0.0),)
    iso_sw = iso_phase_set(FIB, (1, 1, 1, 1), perm=SWAP2)
    assert len(iso_sw.phase_functions) == 1
    assert abs(iso_sw.phase_functions[0][1] - np.pi) < 1e-9


def test_iso_phase_set_rejects_bad_perm():
    with pytest.raises(ClassificationError):
        iso_phase_set(ISING, (2, 2, 2, 2), perm=((0, 0), (1, 2)))


# ---------------------------------------------------------------------------
# Punctured-sphere classification


@pytest.mark.parametrize("m,want", [(4, 4), (6, 16), (8, 64)])
def test_ising_sphere_class_counts(m, want):
    rep = classify_punctured_sphere(ISING, sphere_surface(ISING, "sigma", m))
    assert rep.verdict == "pauli_group"
    assert rep.n_classes == want
    assert rep.group_order == want
    assert rep.details["path"] == "factorized"


def test_ising_four_puncture_flag():
    rep = classify_punctured_sphere(ISING, sphere_surface(ISING, "sigma", 4))
    assert any("four-puncture" in f for f in rep.flags)
    rep6 = classify_punctured_sphere(ISING, sphere_surface(ISING, "sigma", 6))
    assert not any("four-puncture" in f for f in rep6.flags)


def _class_gate(cls):
    n = len(cls["basis_perm"])
    g = np.zeros((n, n), dtype=np.complex128)
    for i, (target, ang) in enumerate(zip(cls["basis_perm"], cls["phases"])):
        g[target, i] = np.exp(1j * ang)
    return g


def _qubit_factor(curve_info):
    g = np.zeros((2, 2), dtype=np.complex128)
    for col, name in enumerate(("1", "psi")):
        row = 0 if curve_info["perm"][name] == "1" else 1
        g[row, col] = np.exp(1j * curve_info["phases"][name])
    return g


@pytest.mark.parametrize("m", [6, 8])
def test_ising_classes_factorize_exactly(m):
    """Every class gate is the tensor product of its per-qubit factors."""
    surf = sphere_surface(ISING, "sigma", m)
    rep = classify_punctured_sphere(ISING, surf)
    basis = enumerate_labelings(ISING, surf)
    # map basis index to qubit-register index via the bit strings
    reg = [
        int(ising_qubit_isomorphism(ISING, basis.labeling(i)), 2)
        for i in range(basis.dim)
    ]
    qubit_curves = [f"C{j}" for j in range(1, m - 2, 2)]
    assert rep.details["free_curves"] == qubit_curves
    for cls in rep.classes:
        got = _class_gate(cls)
        kron = np.array([[1.0 + 0j]])
        for curve in qubit_curves:
            kron = np.kron(kron, _qubit_factor(cls["curves"][curve]))
        lifted = np.zeros_like(got)
        for i in range(basis.dim):
            for j in range(basis.dim):
                lifted[j, i] = kron[reg[j], reg[i]]
        assert np.abs(got - lifted).max() < 1e-9


def test_ising_classes_are_distinct_paulis():
    rep = classify_punctured_sphere(ISING, sphere_surface(ISING, "sigma", 6))
    seen = set()
    for cls in rep.classes:
        for ang in cls["phases"]:
            # every entry is a sign
            assert min(abs(ang), abs(abs(ang) - np.pi)) < 1e-9
        key = (
            tuple(cls["basis_perm"]),
            tuple(int(round(a / np.pi)) % 2 for a in cls["phases"]),
        )
        assert key not in seen
        seen.add(key)


@pytest.mark.parametrize("m", [4, 5, 6, 7, 8])
def test_fibonacci_spheres_trivial(m):
    rep = classify_punctured_sphere(FIB, sphere_surface(FIB, "tau", m))
    assert rep.verdict == "trivial"
    assert rep.n_classes == 1
    cls = rep.classes[0]
    assert cls["basis_perm"] == list(range(len(cls["basis_perm"])))
    assert np.abs(np.array(cls["phases"])).max() < 1e-9


def test_infeasible_surface_raises():
    with pytest.raises(InfeasibleSurfaceError):
        classify_punctured_sphere(ISING, sphere_surface(ISING, "sigma", 5))


def test_dimension_one_sphere_is_trivial():
    rep = classify_punctured_sphere(Z2, sphere_surface(Z2, 1, 4))
    assert rep.verdict == "trivial"
    assert rep.n_classes == 1


# ---------------------------------------------------------------------------
# Torus classification


def test_fibonacci_torus_trivial():
    rep = classify_torus(FIB)
    assert rep.verdict == "trivial"
    assert rep.n_classes == 1
    assert rep.details["words"] == ["s", "st"]


def test_ising_torus_upper_bound():
    rep = classify_torus(ISING)
    assert rep.verdict == "upper_bound_only"
    assert rep.n_classes == 4
    assert any("structure theorem" in f for f in rep.flags)


@pytest.mark.parametrize("name,count", [("zn_toric:2", 96), ("zn_toric:3", 324)])
def test_zn_torus_clifford(name, count):
    model = load_builtin(name)
    rep = classify_torus(model)
    assert rep.verdict == "clifford_star_subgroup"
    assert rep.n_classes == count
    assert rep.group_order == count
    assert rep.details["contains_logical_paulis"] is True
    assert rep.details["clifford_star_checked"] >= 1


def test_torus_word_list_affects_result():
    rep_s = classify_torus(FIB, mcg_words=["s"])
    assert rep_s.n_classes == 2  # identity family plus the label swap
    rep_both = classify_torus(FIB, mcg_words=["s", "st"])
    assert rep_both.n_classes == 1


def test_finiteness_stable_under_word_doubling():
    base = classify_torus(Z2, mcg_words=["s", "st"])
    doubled = classify_torus(Z2, mcg_words=["s", "st", "ss", "stst"])
    assert doubled.verdict == base.verdict
    assert doubled.n_classes == base.n_classes == 96


# ---------------------------------------------------------------------------
# Dispatch and report format


def test_classify_dispatches():
    rep = classify(FIB, torus_surface())
    assert rep.surface == "torus"
    rep2 = classify(ISING, sphere_surface(ISING, "sigma", 4))
    assert rep2.surface == "sphere:sigma:4"


def test_report_json_deterministic():
    a = classify_torus(Z2).to_json()
    b = classify_torus(Z2).to_json()
    assert a == b
    parsed = json.loads(a)
    assert parsed["verdict"] == "clifford_star_subgroup"
    assert parsed["n_classes"] == 96
    assert len(parsed["classes"]) == 96


def test_report_text_format():
    rep = classify_torus(FIB)
    text = rep.to_text()
    assert "model:    fibonacci" in text
    assert "verdict:  trivial" in text
    assert "class 0:" in text


def test_verdict_vocabulary():
    assert set(VERDICTS) == {
        "trivial",
        "pauli_group",
        "clifford_star_subgroup",
        "finite_group",
        "upper_bound_only",
    }
    for rep in (classify_torus(FIB), classify_torus(ISING)):
        assert rep.verdict in VERDICTS


def test_unknown_words_raise():
    with pytest.raises(ValueError):
        classify_torus(FIB, mcg_words=["sq"])
    with pytest.raises(ClassificationError):
        classify_torus(Z2, mcg_words=["t", "tt"])
