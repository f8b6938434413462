"""Mapping class group matrices on torus and punctured-sphere bases.

Torus: V(s) = S and V(t) = diag(theta_a) on the flux basis.

Sphere S^2(z^M): the braid sigma_k exchanges punctures k and k+1.  On the
standard basis (x_1..x_N), N = M-3:

* sigma_1 is diagonal with phases R^{zz}_{x_1} (the channel of the first
  two punctures);
* sigma_{M-1} is diagonal with phases R^{zz}_{dual(x_N)} (the channel of the
  last two punctures);
* interior sigma_k (2 <= k <= M-2) mixes slot x_{k-1} inside its 4-punctured
  sphere with context (a, b) = (x_{k-2}, x_k), via B(a,b) = F~^{-1} R~ F~
  where F~_{x',x} = F^{zax}_{bzx'} and R~ = diag(R^{zz}_c) over the channels
  c of the two exchanged punctures.  The conventions x_0 = z and
  x_{N+1} = dual(z) close the chain; docs/conventions.md derives the index
  placement.

Words multiply left to right; an inverse generator contributes the conjugate
transpose.  The representation is projective, so comparisons between word
matrices should use :func:`projective_distance`.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

from .models import AnyonModel
from .surfaces import BasisIndex, SurfaceSpec, enumerate_labelings, sphere_surface, torus_surface


@dataclass
class RepMatrix:
    word: str
    matrix: np.ndarray
    basis: BasisIndex


def projective_distance(a: np.ndarray, b: np.ndarray) -> float:
    """Max-norm distance between a and b after best-fit global phase alignment.

    The phase is read off at a's largest-magnitude entry, so equal matrices
    up to a global phase give ~0 regardless of that phase.
    """
    idx = np.unravel_index(np.argmax(np.abs(a)), a.shape)
    ref = a[idx]
    if abs(ref) == 0.0:
        return float(np.abs(a - b).max())
    lam = b[idx] / ref
    mag = abs(lam)
    if mag > 0:
        lam /= mag
    return float(np.abs(a * lam - b).max())


def torus_generators(model: AnyonModel) -> tuple[RepMatrix, RepMatrix]:
    basis = enumerate_labelings(model, torus_surface())
    s = RepMatrix("s", model.smatrix.copy(), basis)
    t = RepMatrix("t", np.diag(model.twists), basis)
    return s, t


def _slot_context(model: AnyonModel, z: int, values: tuple[int, ...], pos: int) -> tuple[int, int]:
    """Neighbor labels (a, b) = (x_{s-1}, x_{s+1}) around slot array position pos."""
    a = values[pos - 1] if pos >= 1 else z
    b = values[pos + 1] if pos + 1 < len(values) else model.dual[z]
    return a, b


def braid_block(model: AnyonModel, z: int, a: int, b: int):
    """B(a,b) on the slot values between neighbors a and b.

    Returns (slot_values, B) with B[x_new, x_old] = (F~^{-1} R~ F~)_{x_new, x_old}.
    """
    rows, cols, block = model.fmove_block(z, a, b, z)
    # block[slot, channel]; the footnote matrix F~[channel, slot] is its
    # transpose, and F~ is unitary because the full F-block is.
    ftilde = block.T
    rtilde = np.diag([model.rsymbol(z, z, c) for c in cols])
    bmat = ftilde.conj().T @ rtilde @ ftilde
    return rows, bmat


def braid_generator(model: AnyonModel, M: int, z: int | str, k: int) -> RepMatrix:
    """Matrix of sigma_k on the standard basis of S^2(z^M)."""
    z = model.label_index(z)
    if M < 3:
        raise ValueError("braid generators need at least 3 punctures")
    if not 1 <= k <= M - 1:
        raise ValueError(f"generator index {k} out of range for M={M}")
    surface = sphere_surface(model, z, M)
    basis = enumerate_labelings(model, surface)
    dim = basis.dim
    n_slots = M - 3
    word = f"s{k}"

    if dim == 0:
        return RepMatrix(word, np.zeros((0, 0), dtype=np.complex128), basis)

    if M == 3:
        # Single basis state; the pair channel of either exchange is forced
        # to dual(z) because the three punctures carry total vacuum charge.
        c = model.dual[z]
        phase = model.rsymbol(z, z, c)
        return RepMatrix(word, np.array([[phase]], dtype=np.complex128), basis)

    if k == 1 or k == M - 1:
        # Diagonal action by the R-phase of the exchanged punctures' fusion
        # channel: x_1 for the first pair, dual(x_N) for the last pair (the
        # charge of punctures 1..M-2 is x_N, so the last two fuse to its
        # dual).  The braid relations pin this down; see docs/conventions.md.
        phases = np.empty(dim, dtype=np.complex128)
        for i, lab in enumerate(basis.labelings):
            c = lab[0] if k == 1 else model.dual[lab[n_slots - 1]]
            phases[i] = model.rsymbol(z, z, c)
        return RepMatrix(word, np.diag(phases), basis)

    pos = k - 2  # slot x_{k-1} at array position k-2
    mat = np.zeros((dim, dim), dtype=np.complex128)
    groups: dict[tuple, list[int]] = {}
    for i, lab in enumerate(basis.labelings):
        key = lab[:pos] + lab[pos + 1 :]
        groups.setdefault(key, []).append(i)
    block_cache: dict[tuple[int, int], tuple] = {}
    for key, members in groups.items():
        a, b = _slot_context(model, z, basis.labelings[members[0]], pos)
        if (a, b) not in block_cache:
            block_cache[(a, b)] = braid_block(model, z, a, b)
        slot_values, bmat = block_cache[(a, b)]
        present = {basis.labelings[i][pos]: i for i in members}
        if sorted(present) != sorted(slot_values):
            raise AssertionError(
                "basis slot values disagree with F-block admissibility "
                f"(context {(a, b)}: basis {sorted(present)}, block {sorted(slot_values)})"
            )
        val_pos = {v: p for p, v in enumerate(slot_values)}
        for i in members:
            x_old = basis.labelings[i][pos]
            for x_new, j in present.items():
                mat[j, i] = bmat[val_pos[x_new], val_pos[x_old]]
    return RepMatrix(word, mat, basis)


_TORUS_TOKEN = re.compile(r"\s*([st])(')?\s*,?")
_SPHERE_TOKEN = re.compile(r"\s*s(\d+)(')?\s*,?")


def parse_word(word: str, surface: SurfaceSpec) -> list[tuple[str, int]]:
    """Split a word string into (generator, +1/-1) pairs.

    Torus words are strings over {s, t} with an optional trailing apostrophe
    per letter for the inverse ("st", "s't").  Sphere words are sequences of
    s<k> tokens, comma or space separated ("s1,s2'", "s1 s2").
    """
    word = word.strip()
    out: list[tuple[str, int]] = []
    pattern = _TORUS_TOKEN if surface.kind == "torus" else _SPHERE_TOKEN
    pos = 0
    while pos < len(word):
        m = pattern.match(word, pos)
        if not m:
            raise ValueError(f"cannot parse word {word!r} at position {pos}")
        if surface.kind == "torus":
            out.append((m.group(1), -1 if m.group(2) else 1))
        else:
            out.append((f"s{m.group(1)}", -1 if m.group(2) else 1))
        pos = m.end()
    return out


def evaluate_word(
    model: AnyonModel,
    surface: SurfaceSpec,
    word: str | list[tuple[str, int]],
) -> RepMatrix:
    """Ordered product of generator matrices for ``word`` on ``surface``."""
    tokens = parse_word(word, surface) if isinstance(word, str) else list(word)
    basis = enumerate_labelings(model, surface)
    if surface.kind == "torus":
        s, t = torus_generators(model)
        gens = {"s": s.matrix, "t": t.matrix}
    else:
        if len(set(surface.boundary_labels)) > 1:
            raise ValueError("braid words need equal boundary labels")
        m = surface.punctures
        z = surface.boundary_labels[0]
        gens = {}
        for sym, _ in tokens:
            if sym not in gens:
                k = int(sym[1:])
                gens[sym] = braid_generator(model, m, z, k).matrix
    mat = np.eye(basis.dim, dtype=np.complex128)
    for sym, exp in tokens:
        if sym not in gens:
            raise ValueError(f"generator {sym!r} not valid for {surface.kind}")
        g = gens[sym]
        mat = mat @ (g if exp == 1 else g.conj().T)
    word_str = word if isinstance(word, str) else "".join(
        s + ("'" if e < 0 else "") for s, e in tokens
    )
    return RepMatrix(word_str, mat, basis)
