"""Abelian-model structure: fusion group, affine symmetries, string operators.

When every quantum dimension is 1 the labels form a finite abelian group
under fusion and the torus representation is built from group characters.
That gives three things the generic solver cannot:

* a complete closed form for the monomial gates compatible with any torus
  word containing a single s letter (affine label permutation, character
  diagonal, twist dressing), valid at dimensions far beyond the wildcard
  search limit;
* string (Wilson loop) operators along the two torus cycles, their Pauli
  group, and a membership test for the generalized Clifford hierarchy's
  second level restricted to monomial representatives;
* an exponent-vector model of the same string operators on an L x L qudit
  lattice, for cross-checking commutation phases against the S matrix
  without building 2^(2 L^2)-dimensional state vectors.
"""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass

import numpy as np

from .mcg import evaluate_word, parse_word
from .models import AnyonModel, quantum_dimensions, total_quantum_dimension
from .solver import GateFamily, MonomialMatrix, PhaseCoset, is_monomial
from .surfaces import SurfaceSpec
from .tolerances import DEFAULT_TOL


def is_abelian(model: AnyonModel, tol: float = 1e-9) -> bool:
    return bool(np.abs(quantum_dimensions(model) - 1.0).max() < tol)


@functools.lru_cache(maxsize=None)
def fusion_table(model: AnyonModel) -> np.ndarray:
    """mul[a, b] = the unique product label; abelian models only."""
    if not is_abelian(model):
        raise ValueError("fusion is multivalued for non-abelian models")
    n = model.n_labels
    mul = np.zeros((n, n), dtype=np.int64)
    for a in range(n):
        for b in range(n):
            prods = model.fusion_product(a, b)
            if len(prods) != 1:
                raise ValueError("abelian model has a multivalued product")
            mul[a, b] = prods[0]
    return mul


@dataclass(frozen=True)
class GroupCoordinates:
    """Cyclic decomposition of the fusion group.

    ``generators[i]`` has order ``orders[i]`` and the map
    (e_1, ..., e_k) -> prod generators[i]^e_i is a bijection recorded in
    ``coords`` (label index -> exponent tuple).
    """

    generators: tuple[int, ...]
    orders: tuple[int, ...]
    coords: tuple[tuple[int, ...], ...]

    @property
    def exponent(self) -> int:
        out = 1
        for m in self.orders:
            out = out * m // _gcd(out, m)
        return out


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return a


def _pow(mul: np.ndarray, g: int, k: int) -> int:
    out = 0
    for _ in range(k):
        out = int(mul[out, g])
    return out


def _order(mul: np.ndarray, g: int) -> int:
    x = g
    k = 1
    while x != 0:
        x = int(mul[x, g])
        k += 1
    return k


@functools.lru_cache(maxsize=None)
def group_coordinates(model: AnyonModel) -> GroupCoordinates:
    """Greedy cyclic decomposition, largest order first.

    Repeatedly pick the element of maximal order modulo the subgroup
    generated so far, then shift it by a subgroup element so its order in
    the full group equals its order in the quotient.  Group sizes here are
    small (<= 36 labels), so the searches are plain loops.
    """
    mul = fusion_table(model)
    n = model.n_labels
    subgroup = {0}
    generators: list[int] = []
    orders: list[int] = []
    while len(subgroup) < n:
        best_g, best_m = -1, 0
        for g in range(n):
            if g in subgroup:
                continue
            x, m = g, 1
            while x not in subgroup:
                x = int(mul[x, g])
                m += 1
            if m > best_m:
                best_g, best_m = g, m
        g, m = best_g, best_m
        if _order(mul, g) != m:
            for h in subgroup:
                cand = int(mul[g, h])
                if _order(mul, cand) == m and _pow(mul, cand, m) == 0:
                    g = cand
                    break
            else:
                raise RuntimeError("no order-matching coset representative found")
        generators.append(g)
        orders.append(m)
        subgroup = {int(mul[a, _pow(mul, g, k)]) for a in subgroup for k in range(m)}
    coords = [None] * n
    for exps in itertools.product(*(range(m) for m in orders)):
        x = 0
        for g, e in zip(generators, exps):
            x = int(mul[x, _pow(mul, g, e)])
        coords[x] = tuple(exps)
    if any(c is None for c in coords):
        raise RuntimeError("coordinate enumeration did not cover the group")
    return GroupCoordinates(
        generators=tuple(generators), orders=tuple(orders), coords=tuple(coords)
    )


@functools.lru_cache(maxsize=None)
def automorphisms(model: AnyonModel) -> list[tuple[int, ...]]:
    """All fusion-group automorphisms as label permutations."""
    mul = fusion_table(model)
    n = model.n_labels
    gc = group_coordinates(model)
    elem_order = [_order(mul, x) for x in range(n)]
    candidates = [
        [h for h in range(n) if gc.orders[i] % elem_order[h] == 0]
        for i in range(len(gc.generators))
    ]
    out = []
    for images in itertools.product(*candidates):
        perm = []
        for x in range(n):
            y = 0
            for img, e in zip(images, gc.coords[x]):
                y = int(mul[y, _pow(mul, img, e)])
            perm.append(y)
        if len(set(perm)) == n:
            out.append(tuple(perm))
    return sorted(out)


@functools.lru_cache(maxsize=None)
def affine_permutations(model: AnyonModel) -> list[tuple[int, ...]]:
    """Label maps x -> c + alpha(x) with alpha an automorphism, c any label."""
    mul = fusion_table(model)
    n = model.n_labels
    autos = automorphisms(model)
    out = []
    for c in range(n):
        for alpha in autos:
            out.append(tuple(int(mul[c, alpha[x]]) for x in range(n)))
    return sorted(set(out))


def characters(model: AnyonModel) -> np.ndarray:
    """Character table chi_b(x), one row per label b.

    For an abelian model the rescaled S matrix rows sqrt(n) S_b are exactly
    the characters of the fusion group.
    """
    n = model.n_labels
    return np.sqrt(n) * model.smatrix


# ---------------------------------------------------------------------------
# Torus gate families in closed form


def _single_s_split(tokens: list[tuple[str, int]]):
    """(prefix, s_sign, suffix) if the word has exactly one s letter."""
    s_positions = [i for i, (g, _) in enumerate(tokens) if g == "s"]
    if len(s_positions) != 1:
        return None
    i = s_positions[0]
    return tokens[:i], tokens[i][1], tokens[i + 1 :]


def torus_word_families(
    model: AnyonModel,
    word: str,
    *,
    verify: bool = True,
    tol: float = DEFAULT_TOL,
) -> list[GateFamily]:
    """Complete gate family list for a single-s torus word, abelian models.

    Write V = A S^{+-1} B with A, B diagonal twist products.  V Pi D V^dag
    is monomial iff Pi is affine and B (Pi D) B^dag has a character diagonal:
    the vacuum row of S (Pi D~) S^dag is the Fourier transform of the
    diagonal, so a unit-modulus diagonal must be a single character, and
    nondegeneracy of the pairing then forces Pi affine.  Hence

        D(x) = chi_b(x) * suffix(x) * conj(suffix(pi(x)))

    over all affine pi and all characters chi_b, each family one free phase.
    """
    surface = SurfaceSpec(kind="torus")
    tokens = parse_word(word, surface)
    split = _single_s_split(tokens)
    if split is None:
        raise ValueError(f"word {word!r} does not contain exactly one s letter")
    _, _, suffix = split
    n = model.n_labels
    suffix_diag = np.ones(n, dtype=np.complex128)
    for gen, sign in suffix:
        suffix_diag *= model.twists if sign > 0 else np.conj(model.twists)
    chi = characters(model)
    perms = affine_permutations(model)

    families = []
    vmat = evaluate_word(model, surface, tokens).matrix if verify else None
    for pi in perms:
        pi_arr = np.array(pi)
        dress = suffix_diag * np.conj(suffix_diag[pi_arr])
        diags = chi * dress[None, :]  # row b holds the diagonal for chi_b
        if verify:
            vp = vmat[:, pi_arr]
            w = np.einsum("yz,bz,xz->byx", vp, diags, np.conj(vmat))
            absw = np.abs(w)
            big = absw > 1e-8
            unit_tol = max(100.0 * tol, 1e-6)
            ok = (
                (big.sum(axis=2) == 1).all(axis=1)
                & (big.sum(axis=1) == 1).all(axis=1)
                & (np.abs(np.where(big, absw, 1.0) - 1.0).max(axis=(1, 2)) < unit_tol)
            )
            if not ok.all():
                bad = int(np.nonzero(~ok)[0][0])
                raise RuntimeError(
                    f"derived family (pi={pi}, b={bad}) failed verification"
                )
        for b in range(n):
            d = diags[b]
            coset = PhaseCoset(components=(0,) * n, rel=tuple(d / d[0]))
            families.append(GateFamily(perm=pi, coset=coset))
    return families


def torus_word_supported(model: AnyonModel, word: str) -> bool:
    tokens = parse_word(word, SurfaceSpec(kind="torus"))
    return _single_s_split(tokens) is not None


def word_is_unconstraining(model: AnyonModel, word: str) -> bool:
    """True when V(word) is itself monomial, so conjugation keeps everything."""
    v = evaluate_word(model, SurfaceSpec(kind="torus"), word).matrix
    return is_monomial(v)


# ---------------------------------------------------------------------------
# String operators and the Pauli group


@functools.lru_cache(maxsize=None)
def string_operator_matrices(model: AnyonModel) -> tuple[np.ndarray, np.ndarray]:
    """[F_a(C1)] and [F_a(C2)] in the C1 fusion-tree basis, stacked over a.

    F_a(C1) is diagonal with entries D S_{a x}; C2 strings are the S
    conjugates of the same diagonals.
    """
    n = model.n_labels
    dtotal = total_quantum_dimension(model)
    s = model.smatrix
    f1 = np.zeros((n, n, n), dtype=np.complex128)
    for a in range(n):
        np.fill_diagonal(f1[a], dtotal * s[a])
    f2 = np.einsum("xy,ayz,wz->axw", s, f1, np.conj(s))
    return f1, f2


@dataclass(frozen=True)
class PauliElement:
    """omega^phase F_a(C1) F_b(C2) as exponent data, omega = exp(2 pi i / N)."""

    a: int
    b: int
    phase: int
    modulus: int

    def key(self):
        return (self.a, self.b, self.phase % self.modulus)


def _commutation_exponent(model: AnyonModel) -> np.ndarray:
    """c[a, b] with F_b(C2) F_a(C1) = omega^{c[a,b]} F_a(C1) F_b(C2)."""
    n = model.n_labels
    gc = group_coordinates(model)
    nexp = gc.exponent
    f1, f2 = string_operator_matrices(model)
    c = np.zeros((n, n), dtype=np.int64)
    for a in range(n):
        for b in range(n):
            lhs = f2[b] @ f1[a]
            rhs = f1[a] @ f2[b]
            idx = np.unravel_index(np.abs(rhs).argmax(), rhs.shape)
            ratio = lhs[idx] / rhs[idx]
            k = round(np.angle(ratio) * nexp / (2 * np.pi)) % nexp
            if abs(ratio - np.exp(2j * np.pi * k / nexp)) > 1e-8:
                raise RuntimeError("commutation phase is not an exponent root")
            if np.abs(lhs - np.exp(2j * np.pi * k / nexp) * rhs).max() > 1e-8:
                raise RuntimeError("string operators do not commute projectively")
            c[a, b] = k
    return c


def pauli_group_orders(model: AnyonModel) -> tuple[int, int]:
    """(single-loop, full) Pauli group orders by explicit closure.

    Elements are tracked as (a, b, phase) exponent triples with phases in
    the group generated by omega = exp(2 pi i / N), N the group exponent.
    The closure is taken over products of the generators and omega itself.
    """
    mul = fusion_table(model)
    n = model.n_labels
    gc = group_coordinates(model)
    nexp = gc.exponent
    comm = _commutation_exponent(model)

    def multiply(x: PauliElement, y: PauliElement) -> PauliElement:
        # (F_a F_b)(F_a' F_b') = omega^{comm[a', b]} F_{a a'} F_{b b'}
        return PauliElement(
            a=int(mul[x.a, y.a]),
            b=int(mul[x.b, y.b]),
            phase=(x.phase + y.phase + comm[y.a, x.b]) % nexp,
            modulus=nexp,
        )

    def closure(gens: list[PauliElement]) -> int:
        ident = PauliElement(0, 0, 0, nexp)
        seen = {ident.key()}
        frontier = [ident]
        while frontier:
            nxt = []
            for x in frontier:
                for g in gens:
                    y = multiply(x, g)
                    if y.key() not in seen:
                        seen.add(y.key())
                        nxt.append(y)
            frontier = nxt
        return len(seen)

    omega = PauliElement(0, 0, 1, nexp)
    single_gens = [omega] + [PauliElement(a, 0, 0, nexp) for a in range(n)]
    full_gens = single_gens + [PauliElement(0, b, 0, nexp) for b in range(n)]
    return closure(single_gens), closure(full_gens)


def pauli_element_orders_divide_exponent(model: AnyonModel) -> bool:
    """Every label's fusion power cycle closes within the group exponent."""
    mul = fusion_table(model)
    nexp = group_coordinates(model).exponent
    for a in range(model.n_labels):
        x = 0
        for _ in range(nexp):
            x = int(mul[x, a])
        if x != 0:
            return False
    return True


def clifford_star_membership(
    model: AnyonModel,
    gate: MonomialMatrix,
    tol: float = 1e-8,
) -> tuple[bool, bool]:
    """(maps strings to strings up to phase, phases are exponent roots).

    The string operators F_a(C1) F_b(C2) are an orthogonal basis of the
    label-space matrix algebra, so U F U^dag expands with coefficients
    tr(basis^dag X) / n.  Membership in the monomial Clifford analogue
    needs exactly one unit-modulus coefficient per conjugated generator.
    """
    n = model.n_labels
    f1, f2 = string_operator_matrices(model)
    basis = np.array([f1[a] @ f2[b] for a in range(n) for b in range(n)])
    norms = np.einsum("kij,kij->k", np.conj(basis), basis).real
    if np.abs(norms - n).max() > 1e-6:
        raise RuntimeError("string basis is not orthogonal with norm sqrt(n)")
    u = gate.matrix()
    uh = u.conj().T
    nexp = group_coordinates(model).exponent
    roots_ok = True
    for a in range(n):
        for which in (0, 1):
            gen = f1[a] if which == 0 else f2[a]
            x = u @ gen @ uh
            coeffs = np.einsum("kij,ij->k", np.conj(basis), x) / n
            big = np.abs(coeffs) > tol
            if big.sum() != 1:
                return False, False
            c = coeffs[big][0]
            if abs(abs(c) - 1.0) > tol:
                return False, False
            if abs(c**nexp - 1.0) > 1e-6:
                roots_ok = False
    return True, roots_ok


# ---------------------------------------------------------------------------
# Loop-permutation consistency between the two torus cycles


def check_lambda_monomial(
    model: AnyonModel,
    lam: np.ndarray,
    tol: float = DEFAULT_TOL,
) -> tuple[bool, tuple[int, ...] | None, np.ndarray | None]:
    """Monomial test for a loop-label action; returns (flag, perm, phases)."""
    n = lam.shape[0]
    if not is_monomial(lam, tol):
        return False, None, None
    perm = [0] * n
    phases = np.zeros(n, dtype=np.complex128)
    absl = np.abs(lam)
    for x in range(n):
        y = int(absl[:, x].argmax())
        perm[x] = y
        phases[x] = lam[y, x]
    return True, tuple(perm), phases


def eq_consistency_residual(
    smatrix: np.ndarray, lam: np.ndarray, lam_other: np.ndarray
) -> float:
    """Max |Lam_{ac} Lam'_{bd} (S_{cd} - S_{ab})| over all index tuples.

    A gate acting on the two torus cycles by Lam and Lam' must relate label
    pairs with equal S entries; the residual vanishes for consistent pairs.
    """
    amp = np.abs(lam)
    amp2 = np.abs(lam_other)
    diff = np.abs(smatrix[None, None, :, :] - smatrix[:, :, None, None])
    return float(np.einsum("ac,bd,abcd->abcd", amp, amp2, diff).max())


def induced_cycle_permutations(
    model: AnyonModel, gate: MonomialMatrix
) -> tuple[np.ndarray, np.ndarray]:
    """Loop-label actions (Lam for C1, Lam' for C2) of a torus gate.

    Solves U F_a(C) U^dag = sum_b Lam_{ba} F_b(C) in the orthogonal string
    basis for each cycle.
    """
    n = model.n_labels
    f1, f2 = string_operator_matrices(model)
    u = gate.matrix()
    uh = u.conj().T
    lams = []
    for f in (f1, f2):
        lam = np.zeros((n, n), dtype=np.complex128)
        for a in range(n):
            x = u @ f[a] @ uh
            lam[:, a] = np.einsum("bij,ij->b", np.conj(f), x) / (
                np.einsum("bij,bij->b", np.conj(f), f).real
            )
        lams.append(lam)
    return lams[0], lams[1]


# ---------------------------------------------------------------------------
# Lattice cross-check


@dataclass(frozen=True)
class LatticeOperator:
    """Tensor product of X^j Z^k qudit factors on the edges of an L x L torus.

    Edges are indexed 0..2 L^2 - 1: horizontal edge of plaquette (r, c) is
    2 (r L + c), the vertical edge 2 (r L + c) + 1.  Only the exponent
    vectors are stored; commutation phases follow from the symplectic form
    without building state vectors.
    """

    modulus: int
    x_exp: tuple[int, ...]
    z_exp: tuple[int, ...]

    def compose(self, other: "LatticeOperator") -> "LatticeOperator":
        nmod = self.modulus
        return LatticeOperator(
            modulus=nmod,
            x_exp=tuple((a + b) % nmod for a, b in zip(self.x_exp, other.x_exp)),
            z_exp=tuple((a + b) % nmod for a, b in zip(self.z_exp, other.z_exp)),
        )


def commutation_phase_exponent(op1: LatticeOperator, op2: LatticeOperator) -> int:
    """k with op1 op2 = omega^k op2 op1, from X Z = omega^{-1} Z X per site."""
    nmod = op1.modulus
    k = 0
    for x1, z1, x2, z2 in zip(op1.x_exp, op1.z_exp, op2.x_exp, op2.z_exp):
        k += x1 * z2 - z1 * x2
    return k % nmod


def _edge(l: int, row: int, col: int, vertical: bool) -> int:
    return 2 * ((row % l) * l + (col % l)) + (1 if vertical else 0)


def dyon_loop(
    nmod: int, l: int, flux: int, charge: int, horizontal: bool, offset: int = 0
) -> LatticeOperator:
    """Closed (flux, charge) string along one lattice cycle.

    The charge part is a Z string on the edges crossed by the loop, the
    flux part an X string on the parallel edges of the dual loop.
    """
    x_exp = [0] * (2 * l * l)
    z_exp = [0] * (2 * l * l)
    for i in range(l):
        if horizontal:
            z_edge = _edge(l, offset, i, vertical=False)
            x_edge = _edge(l, offset, i, vertical=True)
        else:
            z_edge = _edge(l, i, offset, vertical=True)
            x_edge = _edge(l, i, offset, vertical=False)
        z_exp[z_edge] = (z_exp[z_edge] + charge) % nmod
        x_exp[x_edge] = (x_exp[x_edge] + flux) % nmod
    return LatticeOperator(modulus=nmod, x_exp=tuple(x_exp), z_exp=tuple(z_exp))


def lattice_commutation_check(nmod: int, l: int, tol: float = 1e-9) -> dict:
    """Compare crossing-loop commutation phases against the Z_N torus S matrix.

    For dyons (a, a') on a horizontal cycle and (b, b') on a vertical one the
    lattice symplectic form gives omega^{a b' - a' b}; the model S matrix
    carries omega^{-(a b' + a' b)} / N.  The two agree after conjugating the
    charge of the crossing dyon, which is the orientation choice for how the
    second loop pierces the first.  Returns a report dict with the worst
    mismatch.
    """
    from .models import zn_toric

    model = zn_toric(nmod)
    s = model.smatrix
    worst = 0.0
    count = 0
    for a in range(nmod):
        for ap in range(nmod):
            h = dyon_loop(nmod, l, a, ap, horizontal=True)
            for b in range(nmod):
                for bp in range(nmod):
                    v = dyon_loop(nmod, l, b, bp, horizontal=False)
                    k = commutation_phase_exponent(h, v)
                    lattice_phase = np.exp(2j * np.pi * k / nmod)
                    model_phase = nmod * s[a * nmod + ap, b * nmod + ((-bp) % nmod)]
                    worst = max(worst, abs(lattice_phase - model_phase))
                    count += 1
    return {
        "modulus": nmod,
        "lattice_size": l,
        "pairs_checked": count,
        "max_mismatch": float(worst),
        "passed": bool(worst < tol),
    }
