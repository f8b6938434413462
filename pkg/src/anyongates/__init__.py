"""Anyon models, mapping class group actions, and monomial gate classification."""

from .models import (
    AnyonModel,
    ModelError,
    dg_abelian,
    fibonacci,
    ising,
    load_builtin,
    parse_model,
    quantum_dimensions,
    serialize_model,
    total_quantum_dimension,
    validate,
    verlinde_fusion,
    zn_toric,
)
from .verlinde import idempotents, lambda_matrix, reconstruct_regular, regular_representation
from .surfaces import (
    InfeasibleSurfaceError,
    SurfaceSpec,
    cut_dimensions,
    enumerate_labelings,
    ising_qubit_isomorphism,
    sphere_surface,
    standard_dap,
    torus_surface,
)
from .mcg import braid_generator, evaluate_word, projective_distance, torus_generators
from .solver import (
    DeltaSet,
    GateFamily,
    IntertwinerSolution,
    MonomialMatrix,
    PhaseCoset,
    delta_set,
    equivalence_classes,
    intersect_delta,
    is_monomial,
    monomial_from_matrix,
    nearest_monomial,
    solve_intertwiner,
)
from .classify import (
    ClassificationError,
    ClassificationReport,
    allowed_curve_permutations,
    classify,
    classify_punctured_sphere,
    classify_torus,
    iso_phase_set,
)
from .abelian import (
    affine_permutations,
    clifford_star_membership,
    group_coordinates,
    is_abelian,
    lattice_commutation_check,
    pauli_group_orders,
    string_operator_matrices,
    torus_word_families,
)

__version__ = "0.1.0"

__all__ = [
    "AnyonModel",
    "ClassificationError",
    "ClassificationReport",
    "DeltaSet",
    "GateFamily",
    "InfeasibleSurfaceError",
    "IntertwinerSolution",
    "ModelError",
    "MonomialMatrix",
    "PhaseCoset",
    "SurfaceSpec",
    "affine_permutations",
    "allowed_curve_permutations",
    "braid_generator",
    "classify",
    "classify_punctured_sphere",
    "classify_torus",
    "clifford_star_membership",
    "cut_dimensions",
    "delta_set",
    "dg_abelian",
    "enumerate_labelings",
    "equivalence_classes",
    "evaluate_word",
    "fibonacci",
    "group_coordinates",
    "idempotents",
    "intersect_delta",
    "is_abelian",
    "is_monomial",
    "ising",
    "ising_qubit_isomorphism",
    "iso_phase_set",
    "lambda_matrix",
    "lattice_commutation_check",
    "load_builtin",
    "monomial_from_matrix",
    "nearest_monomial",
    "parse_model",
    "pauli_group_orders",
    "projective_distance",
    "quantum_dimensions",
    "reconstruct_regular",
    "regular_representation",
    "serialize_model",
    "solve_intertwiner",
    "sphere_surface",
    "standard_dap",
    "string_operator_matrices",
    "torus_generators",
    "torus_surface",
    "torus_word_families",
    "total_quantum_dimension",
    "validate",
    "verlinde_fusion",
    "zn_toric",
]
