"""Monomial matrices and the intertwiner equation V~ Pi D = Pi' D' V.

A candidate logical gate acts on a DAP basis as a monomial matrix Pi D
(permutation times unit-modulus diagonal).  Compatibility with a basis
change or mapping-class word matrix V is the intertwiner equation above;
entrywise it forces, for every support entry (m, l) of V,

    d_l * conj(d'_m) = V[m, l] / V~[perm_out(m), perm_in(l)],

so the phases live on a bipartite constraint graph whose edges carry fixed
unit ratios.  Solving is: (1) modulus/zero-pattern feasibility of the
permutation pair, (2) spanning-tree phase propagation per connected
component, (3) rejection on cycle inconsistencies.  Each feasible
permutation pair therefore contributes exactly one connected family with one
free phase per graph component.

Delta sets (all monomial gates compatible with a word), their
intersections, and the label equivalence relation used to recognize
trivially-acting gates live here too.
"""

from __future__ import annotations

import itertools
import warnings
from collections import deque
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linear_sum_assignment

from . import _kernels
from .mcg import evaluate_word
from .models import AnyonModel
from .surfaces import SurfaceSpec, enumerate_labelings
from .tolerances import CYCLE_TOL, DEFAULT_TOL, ZERO_THRESHOLD

_MATCHING_CAP = 20000


@dataclass(frozen=True)
class MonomialMatrix:
    """Acts as |l> -> phases[l] * |perm[l]>."""

    perm: tuple[int, ...]
    phases: tuple[complex, ...]

    @property
    def dim(self) -> int:
        return len(self.perm)

    def matrix(self) -> np.ndarray:
        n = self.dim
        out = np.zeros((n, n), dtype=np.complex128)
        for l, p in enumerate(self.perm):
            out[p, l] = self.phases[l]
        return out

    def is_identity_perm(self) -> bool:
        return all(p == i for i, p in enumerate(self.perm))


def is_monomial(mat: np.ndarray, tol: float = DEFAULT_TOL, zero_tol: float = ZERO_THRESHOLD) -> bool:
    """One unit-modulus entry per row and column, everything else below zero_tol."""
    n = mat.shape[0]
    if mat.shape[0] != mat.shape[1]:
        return False
    absm = np.abs(mat)
    big = absm > zero_tol
    if not ((big.sum(axis=0) == 1).all() and (big.sum(axis=1) == 1).all()):
        return False
    vals = absm[big]
    return bool(np.abs(vals - 1.0).max() < max(tol * 100, 1e-6))


def monomial_from_matrix(
    mat: np.ndarray, tol: float = DEFAULT_TOL, zero_tol: float = ZERO_THRESHOLD
) -> MonomialMatrix:
    """Read a MonomialMatrix off a numerically monomial array."""
    n = mat.shape[0]
    perm = [0] * n
    phases = [0j] * n
    absm = np.abs(mat)
    for l in range(n):
        col = absm[:, l]
        p = int(col.argmax())
        if col[p] <= zero_tol or (col > zero_tol).sum() != 1:
            raise ValueError(f"column {l} is not monomial")
        if abs(col[p] - 1.0) > 1e-6:
            raise ValueError(f"column {l} entry has modulus {col[p]:.3e}, not 1")
        perm[l] = p
        phases[l] = mat[p, l] / col[p]
    if sorted(perm) != list(range(n)):
        raise ValueError("column maxima do not form a permutation")
    return MonomialMatrix(perm=tuple(perm), phases=tuple(phases))


def nearest_monomial(mat: np.ndarray) -> tuple[MonomialMatrix, float]:
    """Closest monomial matrix (max-norm residual) via optimal assignment."""
    n = mat.shape[0]
    rows, cols = linear_sum_assignment(-np.abs(mat))
    perm = [0] * n
    phases = [0j] * n
    for r, c in zip(rows, cols):
        perm[c] = int(r)
        v = mat[r, c]
        phases[c] = v / abs(v) if abs(v) > 0 else 1.0
    mono = MonomialMatrix(perm=tuple(perm), phases=tuple(phases))
    return mono, float(np.abs(mat - mono.matrix()).max())


# ---------------------------------------------------------------------------
# Phase cosets


@dataclass(frozen=True)
class PhaseCoset:
    """Set of unit phase vectors {d : d_i = rel_i * lambda_{comp_i}}.

    ``components`` assigns each index a component id (0-based, first-seen
    order); ``rel`` holds the fixed unit ratio of d_i to its component's
    free parameter.  One free phase per component.
    """

    components: tuple[int, ...]
    rel: tuple[complex, ...]

    @property
    def dim(self) -> int:
        return len(self.components)

    @property
    def n_free(self) -> int:
        return max(self.components) + 1 if self.components else 0

    def instantiate(self, free=None) -> np.ndarray:
        k = self.n_free
        if free is None:
            free = np.ones(k, dtype=np.complex128)
        free = np.asarray(free, dtype=np.complex128)
        return np.array(
            [self.rel[i] * free[self.components[i]] for i in range(self.dim)],
            dtype=np.complex128,
        )

    def contains(self, d: np.ndarray, tol: float = 1e-6) -> bool:
        d = np.asarray(d, dtype=np.complex128)
        if d.shape[0] != self.dim:
            return False
        for c in range(self.n_free):
            idx = [i for i in range(self.dim) if self.components[i] == c]
            ratios = [d[i] / self.rel[i] for i in idx]
            if max(abs(r - ratios[0]) for r in ratios) > tol:
                return False
        return True

    def intersect(self, other: "PhaseCoset", tol: float = CYCLE_TOL) -> "PhaseCoset | None":
        """Conjoin constraints; None when they contradict."""
        n = self.dim
        if other.dim != n:
            raise ValueError("coset dimension mismatch")
        if self.n_free == 1 and other.n_free == 1:
            # Rigid cosets are single U(1) orbits; they are equal or disjoint.
            if max(abs(a - b) for a, b in zip(self.rel, other.rel)) <= tol:
                return self
            return None
        parent = list(range(n))
        ratio = [1.0 + 0j] * n  # d_i = ratio[i] * d_{parent[i]}

        def find(i: int) -> tuple[int, complex]:
            r = 1.0 + 0j
            while parent[i] != i:
                r *= ratio[i]
                i = parent[i]
            return i, r

        def union(i: int, j: int, rho: complex) -> bool:
            # constraint d_i = rho * d_j
            ri, fi = find(i)
            rj, fj = find(j)
            if ri == rj:
                return abs(fi - rho * fj) <= tol
            parent[ri] = rj
            ratio[ri] = rho * fj / fi
            return True

        for coset in (self, other):
            first: dict[int, int] = {}
            for i in range(n):
                c = coset.components[i]
                if c in first:
                    j = first[c]
                    if not union(i, j, coset.rel[i] / coset.rel[j]):
                        return None
                else:
                    first[c] = i
        comp_ids: dict[int, int] = {}
        components = []
        rel = []
        root_val: dict[int, complex] = {}
        for i in range(n):
            r, f = find(i)
            if r not in comp_ids:
                comp_ids[r] = len(comp_ids)
                root_val[r] = f
            components.append(comp_ids[r])
            rel.append(f / root_val[r])
        return PhaseCoset(components=tuple(components), rel=tuple(rel))

    def is_subset_of(self, other: "PhaseCoset", tol: float = 1e-6) -> bool:
        """Every constraint of ``other`` is implied by this coset."""
        for c in range(other.n_free):
            idx = [i for i in range(other.dim) if other.components[i] == c]
            j0 = idx[0]
            for i in idx[1:]:
                if self.components[i] != self.components[j0]:
                    return False
                want = other.rel[i] / other.rel[j0]
                have = self.rel[i] / self.rel[j0]
                if abs(want - have) > tol:
                    return False
        return True

    def same_as(self, other: "PhaseCoset", tol: float = 1e-6) -> bool:
        return self.is_subset_of(other, tol) and other.is_subset_of(self, tol)


def free_coset(n: int) -> PhaseCoset:
    return PhaseCoset(components=tuple(range(n)), rel=(1.0 + 0j,) * n)


# ---------------------------------------------------------------------------
# Intertwiner solving


@dataclass
class IntertwinerSolution:
    """One connected solution family of V~ Pi D = Pi' D' V.

    The constraint graph lives on 2n phase variables: indices 0..n-1 are the
    gate phases d_l, indices n..2n-1 the output-side phases d'_m.
    ``phase_classes`` and ``relative_phases`` describe its components; a
    choice of one free phase per class instantiates (D, D').
    """

    perm_in: tuple[int, ...]
    perm_out: tuple[int, ...]
    phase_classes: tuple[int, ...]
    relative_phases: tuple[complex, ...]

    @property
    def n(self) -> int:
        return len(self.perm_in)

    @property
    def n_components(self) -> int:
        return max(self.phase_classes) + 1

    def instantiate(self, free=None) -> tuple[np.ndarray, np.ndarray]:
        k = self.n_components
        if free is None:
            free = np.ones(k, dtype=np.complex128)
        free = np.asarray(free, dtype=np.complex128)
        vals = np.array(
            [self.relative_phases[i] * free[self.phase_classes[i]] for i in range(2 * self.n)],
            dtype=np.complex128,
        )
        return vals[: self.n], vals[self.n :]

    def gate(self, free=None) -> MonomialMatrix:
        d, _ = self.instantiate(free)
        return MonomialMatrix(perm=self.perm_in, phases=tuple(d))

    def gate_coset(self) -> PhaseCoset:
        """Projection onto the gate phases d (the d' side is determined)."""
        comp_ids: dict[int, int] = {}
        components = []
        rel = []
        first_val: dict[int, complex] = {}
        for i in range(self.n):
            c = self.phase_classes[i]
            if c not in comp_ids:
                comp_ids[c] = len(comp_ids)
                first_val[c] = self.relative_phases[i]
            components.append(comp_ids[c])
            rel.append(self.relative_phases[i] / first_val[c])
        return PhaseCoset(components=tuple(components), rel=tuple(rel))


def intertwiner_residual(
    v: np.ndarray,
    sol: IntertwinerSolution,
    free=None,
    v_out: np.ndarray | None = None,
) -> float:
    """Max-norm of V_out (Pi D) - (Pi' D') V for an instantiated family."""
    if v_out is None:
        v_out = v
    d, dp = sol.instantiate(free)
    lhs = v_out @ _monomial_array(sol.perm_in, d)
    rhs = _monomial_array(sol.perm_out, dp) @ v
    return float(np.abs(lhs - rhs).max())


def _monomial_array(perm, d) -> np.ndarray:
    n = len(perm)
    out = np.zeros((n, n), dtype=np.complex128)
    for l, p in enumerate(perm):
        out[p, l] = d[l]
    return out


def _normalize_perm_arg(arg, n: int):
    """None (wildcard) | single permutation | iterable of permutations."""
    if arg is None:
        return None
    seq = list(arg)
    if seq and isinstance(seq[0], (int, np.integer)):
        seq = [tuple(int(x) for x in seq)]
    else:
        seq = [tuple(int(x) for x in p) for p in seq]
    for p in seq:
        if sorted(p) != list(range(n)):
            raise ValueError(f"not a permutation of {n} indices: {p}")
    return seq


def _propagate_phases(
    v: np.ndarray,
    v_out: np.ndarray,
    pi: tuple[int, ...],
    pip: tuple[int, ...],
    support: np.ndarray,
    tol: float,
    cycle_tol: float,
):
    """Solve the phase constraints for a fixed permutation pair.

    Returns (phase_classes, relative_phases) over the 2n joint variables, or
    None if a ratio is off-modulus or a cycle is inconsistent.
    """
    n = v.shape[0]
    adj: list[list[tuple[int, complex]]] = [[] for _ in range(2 * n)]
    for m in range(n):
        row_t = v_out[pip[m]]
        for l in np.nonzero(support[m])[0]:
            denom = row_t[pi[l]]
            if abs(denom) <= 0.0:
                return None
            rho = v[m, l] / denom
            if abs(abs(rho) - 1.0) > max(tol * 10, 1e-7):
                return None
            rho /= abs(rho)
            # d_l = rho * d'_m
            adj[l].append((n + m, rho))
            adj[n + m].append((l, rho.conjugate()))
    comp = [-1] * (2 * n)
    val = [0j] * (2 * n)
    n_comp = 0
    for start in range(2 * n):
        if comp[start] != -1:
            continue
        comp[start] = n_comp
        val[start] = 1.0 + 0j
        queue = deque([start])
        while queue:
            u = queue.popleft()
            for w, factor in adj[u]:
                # val[u] = factor * val[w] <=> val[w] = conj(factor) * val[u]
                implied = factor.conjugate() * val[u]
                if comp[w] == -1:
                    comp[w] = n_comp
                    val[w] = implied
                    queue.append(w)
                elif abs(val[w] - implied) > cycle_tol:
                    return None
        n_comp += 1
    # Normalize each component to its lowest index.
    root_val: dict[int, complex] = {}
    rel = [0j] * (2 * n)
    for i in range(2 * n):
        c = comp[i]
        if c not in root_val:
            root_val[c] = val[i]
        rel[i] = val[i] / root_val[c]
    return tuple(comp), tuple(rel)


def solve_intertwiner(
    v: np.ndarray,
    perm_in=None,
    perm_out=None,
    *,
    v_out: np.ndarray | None = None,
    tol: float = DEFAULT_TOL,
    zero_tol: float = ZERO_THRESHOLD,
    cycle_tol: float = CYCLE_TOL,
) -> list[IntertwinerSolution]:
    """All monomial-intertwiner families for the given permutation sets.

    ``perm_in``/``perm_out`` may each be a single permutation, an iterable of
    candidate permutations, or None for a full wildcard (dimension <= 8).
    Families are returned in lexicographic (perm_in, perm_out) order; each is
    the complete connected solution set for its permutation pair.
    """
    v = np.asarray(v, dtype=np.complex128)
    if v.ndim != 2 or v.shape[0] != v.shape[1]:
        raise ValueError("V must be a square matrix")
    n = v.shape[0]
    if v_out is None:
        v_out = v
    else:
        v_out = np.asarray(v_out, dtype=np.complex128)
        if v_out.shape != v.shape:
            raise ValueError("V_out must match V's shape")
    for name, mat in (("V", v), ("V_out", v_out)):
        uni = np.abs(mat @ mat.conj().T - np.eye(n)).max() if n else 0.0
        if uni > 1e-6:
            raise ValueError(f"{name} is not unitary (residual {uni:.2e})")

    absv = np.abs(v)
    absvo = np.abs(v_out)
    nz = absv[absv > zero_tol]
    if nz.size and nz.min() < 100 * zero_tol:
        warnings.warn(
            "smallest nonzero |V| entry is close to the zero threshold; "
            "support detection may be unreliable",
            stacklevel=2,
        )
    support = absv > zero_tol

    cands_in = _normalize_perm_arg(perm_in, n)
    cands_out = _normalize_perm_arg(perm_out, n)
    if cands_in is None:
        if n > 8:
            raise ValueError(
                "wildcard permutation search is factorial; dimension > 8 needs "
                "an explicit candidate set"
            )
        cands_in = [tuple(p) for p in itertools.permutations(range(n))]

    match_tol = max(tol, 1e-9)
    solutions: list[IntertwinerSolution] = []

    if cands_out is None:
        perms_arr = np.array(cands_in, dtype=np.int64)
        status, match = _kernels.scan_column_perms(absv, absvo, perms_arr, match_tol)
        for idx, pi in enumerate(cands_in):
            if status[idx] == _kernels.SCAN_NO_MATCH:
                continue
            if status[idx] == _kernels.SCAN_UNIQUE:
                pip_list = [tuple(int(x) for x in match[idx])]
            else:
                target = absvo[:, list(pi)]
                compat = (
                    np.abs(target[None, :, :] - absv[:, None, :]) <= match_tol
                ).all(axis=2)
                matchings = _kernels.enumerate_matchings(compat)
                if len(matchings) > _MATCHING_CAP:
                    raise ValueError(
                        "too many output-permutation matchings "
                        f"({len(matchings)}); restrict perm_out"
                    )
                pip_list = sorted(matchings)
            for pip in pip_list:
                res = _propagate_phases(v, v_out, pi, pip, support, tol, cycle_tol)
                if res is not None:
                    solutions.append(
                        IntertwinerSolution(pi, pip, res[0], res[1])
                    )
    else:
        for pi in cands_in:
            for pip in cands_out:
                target = absvo[:, list(pi)]
                ok = all(
                    np.abs(target[pip[m]] - absv[m]).max() <= match_tol
                    for m in range(n)
                )
                if not ok:
                    continue
                res = _propagate_phases(v, v_out, pi, pip, support, tol, cycle_tol)
                if res is not None:
                    solutions.append(IntertwinerSolution(pi, pip, res[0], res[1]))
    return solutions


# ---------------------------------------------------------------------------
# Delta sets


@dataclass
class GateFamily:
    """Connected family of monomial gates: fixed basis permutation, phase coset."""

    perm: tuple[int, ...]
    coset: PhaseCoset
    perm_out_by_word: dict[str, tuple[int, ...]] = field(default_factory=dict)

    @property
    def n_free(self) -> int:
        return self.coset.n_free

    def gate(self, free=None) -> MonomialMatrix:
        return MonomialMatrix(perm=self.perm, phases=tuple(self.coset.instantiate(free)))

    def contains(self, gate: MonomialMatrix, tol: float = 1e-6) -> bool:
        return gate.perm == self.perm and self.coset.contains(
            np.array(gate.phases), tol
        )


@dataclass
class DeltaSet:
    """Union of gate families compatible with one or more word matrices."""

    dim: int
    words: tuple[str, ...]
    families: list[GateFamily]

    def __len__(self) -> int:
        return len(self.families)

    def contains(self, gate: MonomialMatrix, tol: float = 1e-6) -> bool:
        return any(f.contains(gate, tol) for f in self.families)


def delta_set(
    model: AnyonModel,
    surface: SurfaceSpec,
    word: str,
    restrict_perms=None,
    restrict_perms_out=None,
    *,
    tol: float = DEFAULT_TOL,
    zero_tol: float = ZERO_THRESHOLD,
    cycle_tol: float = CYCLE_TOL,
) -> DeltaSet:
    """All monomial gates G with V(word) G V(word)^dagger still monomial.

    G = Pi D lies in Delta_word iff (Pi', D') with V Pi D = Pi' D' V exist,
    which is the intertwiner equation with V_out = V.  ``restrict_perms``
    restricts the searched gate permutations (required above dimension 8);
    ``restrict_perms_out`` restricts the conjugated gate's permutation,
    which word matrices with many equal-modulus entries may need to keep
    the matching enumeration finite.
    """
    rep = evaluate_word(model, surface, word)
    sols = solve_intertwiner(
        rep.matrix,
        perm_in=restrict_perms,
        perm_out=restrict_perms_out,
        tol=tol,
        zero_tol=zero_tol,
        cycle_tol=cycle_tol,
    )
    families = [
        GateFamily(
            perm=s.perm_in,
            coset=s.gate_coset(),
            perm_out_by_word={rep.word: s.perm_out},
        )
        for s in sols
    ]
    return DeltaSet(dim=rep.basis.dim, words=(rep.word,), families=families)


def intersect_delta(sets: list[DeltaSet], tol: float = CYCLE_TOL) -> DeltaSet:
    """Families of gates lying in every input set.

    Families intersect pairwise: same gate permutation, conjoined phase
    cosets.  Within one set, families with equal permutation are disjoint
    (the output monomial is a function of the gate), so no deduplication is
    needed; empty conjunctions are dropped.
    """
    if not sets:
        raise ValueError("need at least one delta set")
    dim = sets[0].dim
    for s in sets:
        if s.dim != dim:
            raise ValueError("delta sets over different bases")
    current = sets[0].families
    words = list(sets[0].words)
    for s in sets[1:]:
        by_perm: dict[tuple[int, ...], list[GateFamily]] = {}
        for fam_b in s.families:
            by_perm.setdefault(fam_b.perm, []).append(fam_b)
        nxt: list[GateFamily] = []
        for fam_a in current:
            for fam_b in by_perm.get(fam_a.perm, ()):
                coset = fam_a.coset.intersect(fam_b.coset, tol)
                if coset is None:
                    continue
                merged = dict(fam_a.perm_out_by_word)
                merged.update(fam_b.perm_out_by_word)
                nxt.append(GateFamily(perm=fam_a.perm, coset=coset, perm_out_by_word=merged))
        current = nxt
        words.extend(s.words)
    return DeltaSet(dim=dim, words=tuple(words), families=current)


# ---------------------------------------------------------------------------
# Equivalence classes of basis labels


def equivalence_classes(
    model: AnyonModel,
    surface: SurfaceSpec,
    words: list[str],
    zero_tol: float = ZERO_THRESHOLD,
) -> list[tuple[int, ...]]:
    """Partition of basis indices generated by shared word-matrix support.

    Two indices are related when some row of some word matrix is nonzero at
    both columns; the partition is the transitive closure, returned as
    sorted tuples in sorted order.
    """
    basis = enumerate_labelings(model, surface)
    n = basis.dim
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    def union(i, j):
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[ri] = rj

    for word in words:
        mat = evaluate_word(model, surface, word).matrix
        for row in np.abs(mat) > zero_tol:
            cols = np.nonzero(row)[0]
            for c in cols[1:]:
                union(int(cols[0]), int(c))
    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return sorted(tuple(sorted(g)) for g in groups.values())


def check_sim_trivial(
    gate: MonomialMatrix,
    classes: list[tuple[int, ...]],
    tol: float = DEFAULT_TOL,
) -> bool:
    """True iff the gate is diagonal with a constant phase on each class."""
    if not gate.is_identity_perm():
        return False
    for cls in classes:
        ref = gate.phases[cls[0]]
        for i in cls[1:]:
            if abs(gate.phases[i] - ref) > max(tol, 1e-9) * 100:
                return False
    return True
