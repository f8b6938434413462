"""Numerical tolerances shared across the package.

All comparisons against these bounds are absolute (the matrices involved are
unitary, so entries are O(1) and relative error adds nothing).
"""

# Default bound for matrix-element comparisons; CLI flag --tol overrides it.
DEFAULT_TOL = 1e-9

# Entries below this magnitude are treated as structural zeros when reading
# off the support pattern of a matrix.
ZERO_THRESHOLD = 1e-10

# Consistency bound for redundant phase constraints (cycles in the phase
# propagation graph).  Looser than DEFAULT_TOL because a cycle accumulates
# error from every edge it traverses.
CYCLE_TOL = 1e-8

# Bound for projective matrix identities (braid relations), where a best-fit
# global phase has been divided out first.
PROJECTIVE_TOL = 1e-8

# Residual bound when substituting a concrete solution back into an
# intertwiner equation.
RESIDUAL_TOL = 1e-8
