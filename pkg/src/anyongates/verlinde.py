"""Fusion algebra representation theory: idempotents and transported bases.

The fusion rules acting on themselves give the regular representation
(f_a)_{c,b} = N^c_{ab}, a commuting family simultaneously diagonalized by
the S-matrix.  The rank-one spectral idempotents p_a and the change of basis
between {f_a} and {p_a} are what the string-operator arguments on higher
genus surfaces consume: a label permutation pi acting on the idempotents
transports f_b to a matrix Lambda(pi) in the f-basis.
"""

from __future__ import annotations

import numpy as np

from .models import AnyonModel, quantum_dimensions


def regular_representation(model: AnyonModel) -> np.ndarray:
    """Stack of fusion matrices f_a with (f_a)_{c,b} = N^c_{ab}, shape (n,n,n)."""
    n = model.n_labels
    out = np.zeros((n, n, n), dtype=np.complex128)
    for a in range(n):
        out[a] = model.fusion[a].T
    return out


def idempotents(model: AnyonModel) -> np.ndarray:
    """Orthogonal rank-one idempotents p_a = S_{0a} sum_b conj(S_{ba}) f_b."""
    f = regular_representation(model)
    s = model.smatrix
    n = model.n_labels
    out = np.zeros((n, n, n), dtype=np.complex128)
    for a in range(n):
        out[a] = s[0, a] * np.tensordot(s[:, a].conj(), f, axes=(0, 0))
    return out


def reconstruct_regular(model: AnyonModel, p: np.ndarray) -> np.ndarray:
    """Inverse change of basis f_b = sum_a (S_{ba}/S_{0a}) p_a."""
    s = model.smatrix
    coeff = s / s[0][None, :]
    return np.tensordot(coeff, p, axes=(1, 0))


def permutation_matrix(perm, n: int | None = None) -> np.ndarray:
    """Matrix P with P_{x,y} = delta_{x, perm(y)} (maps e_y to e_{perm(y)})."""
    perm = tuple(int(x) for x in perm)
    if n is None:
        n = len(perm)
    out = np.zeros((n, n))
    for y, x in enumerate(perm):
        out[x, y] = 1.0
    return out


def transported_regular(model: AnyonModel, perm) -> np.ndarray:
    """The f-basis images under the idempotent relabeling a -> perm(a).

    Row stack of rho(f_b) = sum_a (S_{ba}/S_{0a}) p_{perm(a)}; used as the
    reference in tests of :func:`lambda_matrix`.
    """
    p = idempotents(model)
    s = model.smatrix
    coeff = s / s[0][None, :]
    perm = tuple(int(x) for x in perm)
    return np.tensordot(coeff, p[list(perm)], axes=(1, 0))


def lambda_matrix(model: AnyonModel, perm) -> np.ndarray:
    """Coefficient matrix of a label permutation acting through the idempotents.

    If a gate maps p_a to p_{perm(a)} for every a, then it maps f_b to
    sum_c Lambda_{b,c} f_c with

        Lambda = S P^{-1} D P D^{-1} P^{-1} S^{-1},

    D the diagonal of quantum dimensions and P the permutation matrix of
    ``perm``.  Inverses of the unitary factors are conjugate transposes; the
    middle product is formed entrywise so the identity permutation yields the
    identity matrix exactly.
    """
    n = model.n_labels
    perm = tuple(int(x) for x in perm)
    if sorted(perm) != list(range(n)):
        raise ValueError(f"not a permutation of {n} labels: {perm}")
    d = quantum_dimensions(model)
    # P^{-1} D P D^{-1} P^{-1} has entries (d_{perm(a)}/d_a) at (a, perm(a)).
    inner = np.zeros((n, n), dtype=np.complex128)
    for a in range(n):
        inner[a, perm[a]] = d[perm[a]] / d[a]
    if np.array_equal(inner, np.eye(n)):
        return np.eye(n, dtype=np.complex128)
    s = model.smatrix
    return s @ inner @ s.conj().T
