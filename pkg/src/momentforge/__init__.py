"""Truncated complex moment problems with polynomial column relations.

The library decides whether a truncated moment sequence carrying a polynomial
column relation admits a finitely atomic representing measure: it computes
the finite zero set of the relation, the reduced basis of its vanishing
ideal, rank against variety cardinality, per-element moment conditions and
full consistency, and extracts the measure when one exists.
"""

from .scalars import GaussianRational, format_scalar
from .poly import (
    Polynomial,
    divide,
    format_poly,
    monomial_compare,
    monomials_up_to,
    parse_poly,
)
from .groebner import (
    GroebnerBasis,
    StandardMonomialSet,
    buchberger,
    normal_form,
    rationalize_basis,
    s_polynomial,
    standard_monomials,
    vanishing_ideal,
)
from .variety import (
    NonFiniteVarietyError,
    RootFindingError,
    Variety,
    VarietyPoint,
    cluster_points,
    repeated_factor,
    solve_conjugate_system,
    squarefree_part,
    sylvester_resultant,
    univariate_roots,
)
from .moment import (
    ColumnRelation,
    MomentMatrix,
    MomentSequence,
    build_moment_matrix,
    column_relations,
    moment_labels,
    numeric_rank,
    psd_check,
    riesz,
)
from .solver import (
    AtomicMeasure,
    CheckReport,
    MeasureExtractionError,
    MomentCondition,
    NotInIdealError,
    check_extremal,
    extract_measure,
    generate_moments,
    numerical_conditions,
    representation_decompose,
    strict_consistency,
)
from .cli import GridSpec, ProblemFile, grid_sample, parse_problem, serialize_problem

__version__ = "0.1.0"

__all__ = [
    "AtomicMeasure",
    "CheckReport",
    "ColumnRelation",
    "GaussianRational",
    "GridSpec",
    "GroebnerBasis",
    "MeasureExtractionError",
    "MomentCondition",
    "MomentMatrix",
    "MomentSequence",
    "NonFiniteVarietyError",
    "NotInIdealError",
    "Polynomial",
    "ProblemFile",
    "RootFindingError",
    "StandardMonomialSet",
    "Variety",
    "VarietyPoint",
    "buchberger",
    "build_moment_matrix",
    "check_extremal",
    "cluster_points",
    "column_relations",
    "divide",
    "extract_measure",
    "format_poly",
    "format_scalar",
    "generate_moments",
    "grid_sample",
    "moment_labels",
    "monomial_compare",
    "monomials_up_to",
    "normal_form",
    "numeric_rank",
    "numerical_conditions",
    "parse_poly",
    "parse_problem",
    "psd_check",
    "rationalize_basis",
    "repeated_factor",
    "representation_decompose",
    "riesz",
    "s_polynomial",
    "serialize_problem",
    "solve_conjugate_system",
    "squarefree_part",
    "standard_monomials",
    "strict_consistency",
    "sylvester_resultant",
    "univariate_roots",
]
