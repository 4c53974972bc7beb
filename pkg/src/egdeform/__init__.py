"""Desk-scale computer algebra and numerics for Euclidean Epstein-Glaser
renormalization: Wick contraction combinatorics, scaling degrees and
distribution extensions, counterterm coordinates on configuration-space
diagonals, and the graded renormalization-group action on them.

All operations are pure functions over immutable values; there is no global
state, so everything here is safe to call concurrently.
"""

from egdeform.combinatorics import (
    IndexSet,
    MultiIndex,
    PairingDiagram,
    SubsetMask,
    count_multi_indices,
    enumerate_multi_indices,
    enumerate_pairings,
    enumerate_subsets,
    moebius_transform,
    zeta_transform,
)
from egdeform.deformation import (
    BoundViolationError,
    CoordinateKey,
    DeformationPoint,
    FiltrationLevel,
    TheoryConfig,
    counterterm_dimension,
    embed,
    filtration_level,
    parse_point,
    realized_labels,
    serialize_point,
    shift,
    total_dimension_report,
)
from egdeform.distributions import (
    DiagonalDistribution,
    DiagonalTerm,
    ExtendedKernel,
    HomogeneousPower,
    LinearCombination,
    MollifiedDelta,
    PropagatorProduct,
    QuadratureSpec,
    ScalingDegreeValue,
    TestFunction,
    extend,
    extension_ambiguity,
    geometric_grid,
    origin_delta,
    pair,
    scaling_degree_numeric,
    scaling_degree_symbolic,
)
from egdeform.freelie import (
    LieElement,
    WordSeries,
    bch,
    exp_series,
    graded_dimensions,
    lie_bracket,
    log_series,
    lyndon_words,
)
from egdeform.group import (
    ClaimResult,
    GroupElement,
    ScalingOperator,
    apply_scaling,
    apply_scaling_operator,
    exp_truncated,
    generator_vector_field,
    grading_automorphism,
    grading_operator,
    grading_scale,
    label_class,
    log_truncated,
    semidirect_inverse,
    semidirect_mul,
    verify_claims,
)
from egdeform.wick import (
    DysonTerm,
    PointConfiguration,
    WickExpansionTerm,
    check_causal_factorization,
    check_symmetry,
    check_translation_invariance,
    contraction_kernel,
    dyson_term,
    gaussian_moment,
    rational_propagator,
    vacuum_moment,
    vacuum_moment_oracle,
    wick_expand,
)

__version__ = "0.1.0"

__all__ = [
    "BoundViolationError",
    "ClaimResult",
    "CoordinateKey",
    "DeformationPoint",
    "DiagonalDistribution",
    "DiagonalTerm",
    "DysonTerm",
    "ExtendedKernel",
    "FiltrationLevel",
    "GroupElement",
    "HomogeneousPower",
    "IndexSet",
    "LieElement",
    "LinearCombination",
    "MollifiedDelta",
    "MultiIndex",
    "PairingDiagram",
    "PointConfiguration",
    "PropagatorProduct",
    "QuadratureSpec",
    "ScalingDegreeValue",
    "ScalingOperator",
    "SubsetMask",
    "TestFunction",
    "TheoryConfig",
    "WickExpansionTerm",
    "WordSeries",
    "apply_scaling",
    "apply_scaling_operator",
    "bch",
    "check_causal_factorization",
    "check_symmetry",
    "check_translation_invariance",
    "contraction_kernel",
    "count_multi_indices",
    "counterterm_dimension",
    "dyson_term",
    "embed",
    "enumerate_multi_indices",
    "enumerate_pairings",
    "enumerate_subsets",
    "exp_series",
    "exp_truncated",
    "extend",
    "extension_ambiguity",
    "filtration_level",
    "gaussian_moment",
    "generator_vector_field",
    "geometric_grid",
    "graded_dimensions",
    "grading_automorphism",
    "grading_operator",
    "grading_scale",
    "label_class",
    "lie_bracket",
    "log_series",
    "log_truncated",
    "lyndon_words",
    "moebius_transform",
    "origin_delta",
    "pair",
    "parse_point",
    "rational_propagator",
    "realized_labels",
    "scaling_degree_numeric",
    "scaling_degree_symbolic",
    "semidirect_inverse",
    "semidirect_mul",
    "serialize_point",
    "shift",
    "total_dimension_report",
    "vacuum_moment",
    "vacuum_moment_oracle",
    "verify_claims",
    "wick_expand",
    "zeta_transform",
]
