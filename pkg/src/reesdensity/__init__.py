"""Exact density functions, multiplicities, and integral-dependence checks
for term-generated graded submodules of graded free modules over polynomial
rings."""

from .backend import BACKEND
from .core import (
    CensusOverflowError,
    GradedFreeModule,
    InputError,
    InternalInvariantError,
    NotSubmoduleError,
    PowerCache,
    RankMismatchError,
    RingSpec,
    Term,
    TermModule,
    colon_variable_saturation,
    degree_truncation,
    ideal_module,
    intersect,
    is_submodule,
    membership,
    power,
    product,
    quotient_monomials,
    saturate,
    term_module,
    unit_module,
    zero_module,
)
from .counting import (
    LengthLadder,
    LengthTable,
    count_ideal_degree,
    cumulative_length,
    length_component,
    quotient_total_length,
)
from .density import (
    ChamberDecomposition,
    DensityGrid,
    FitNotConvergedError,
    cumulative_identity,
    default_grid,
    detect_chambers,
    fit_piecewise,
    ray_extrapolate,
    sample_adic,
    sample_epsilon,
    sample_saturated,
    trapezoid,
)
from .dependence import (
    CriterionEvidence,
    DependenceVerdict,
    check_dependence,
    direct_reduction_search,
    validate_pair,
)
from .io import (
    load_corpus_module,
    load_module_file,
    parse_module,
    serialize_module,
)
from .multiplicity import (
    BigradedFit,
    MultiplicityReport,
    density_polynomial_from_fit,
    diagonal_from_fit,
    diagonal_multiplicity,
    epsilon_multiplicity,
    fit_bigraded_polynomial,
    mixed_multiplicities,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "BigradedFit",
    "CensusOverflowError",
    "ChamberDecomposition",
    "CriterionEvidence",
    "DensityGrid",
    "DependenceVerdict",
    "FitNotConvergedError",
    "GradedFreeModule",
    "InputError",
    "InternalInvariantError",
    "LengthLadder",
    "LengthTable",
    "MultiplicityReport",
    "NotSubmoduleError",
    "PowerCache",
    "RankMismatchError",
    "RingSpec",
    "Term",
    "TermModule",
    "check_dependence",
    "colon_variable_saturation",
    "count_ideal_degree",
    "cumulative_identity",
    "cumulative_length",
    "default_grid",
    "degree_truncation",
    "detect_chambers",
    "density_polynomial_from_fit",
    "diagonal_from_fit",
    "diagonal_multiplicity",
    "direct_reduction_search",
    "epsilon_multiplicity",
    "fit_bigraded_polynomial",
    "fit_piecewise",
    "ideal_module",
    "intersect",
    "is_submodule",
    "length_component",
    "load_corpus_module",
    "load_module_file",
    "membership",
    "mixed_multiplicities",
    "parse_module",
    "power",
    "product",
    "quotient_monomials",
    "quotient_total_length",
    "ray_extrapolate",
    "sample_adic",
    "sample_epsilon",
    "sample_saturated",
    "saturate",
    "serialize_module",
    "term_module",
    "trapezoid",
    "unit_module",
    "validate_pair",
    "zero_module",
]
