"""Galois groups, degrees and quadratic-residue pattern densities for
Q(sqrt(a_1), ..., sqrt(a_n), zeta_d), checked against prime data."""

__version__ = "0.1.0"

from ._backend import BACKEND
from .errors import (
    CapacityError,
    ConsistencyError,
    DomainError,
    InsufficientPrimes,
    MultiquadError,
    SymbolNotClassConstant,
)
from .galois import GaloisElement, GaloisGroup, build_group, cancellation, degree, frobenius, multi_cyclotomic
from .oracle import chebotarev_histogram, degree_estimate, empirical_pattern_sum
from .patterns import (
    ResidueClass,
    SignPattern,
    count_pattern_group,
    enumerate_pattern_group,
    feasible_patterns,
    main_term_constant,
    symbol_on_class,
)
from .subsetlat import ProblemInstance, SubgroupClass, coset_decomposition, subgroup

__all__ = [
    "BACKEND",
    "CapacityError",
    "ConsistencyError",
    "DomainError",
    "GaloisElement",
    "GaloisGroup",
    "InsufficientPrimes",
    "MultiquadError",
    "ProblemInstance",
    "ResidueClass",
    "SignPattern",
    "SubgroupClass",
    "SymbolNotClassConstant",
    "build_group",
    "cancellation",
    "chebotarev_histogram",
    "count_pattern_group",
    "coset_decomposition",
    "degree",
    "degree_estimate",
    "empirical_pattern_sum",
    "enumerate_pattern_group",
    "feasible_patterns",
    "frobenius",
    "main_term_constant",
    "multi_cyclotomic",
    "subgroup",
    "symbol_on_class",
]
