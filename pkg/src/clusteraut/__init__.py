"""Cluster automorphism groups from exchange matrices.

Exact seed mutation over Laurent polynomials, automorphisms stored as
quadruples (path, sigma, sign) over a root seed, extraction of finite
generating sets and word-level relation tools.
"""

from .autom import (
    AutQuad,
    aut_equal,
    aut_from_json,
    aut_to_json,
    chosen_aut,
    compose,
    factor_through,
    identity_aut,
    inverse,
    is_identity,
    make_aut,
)
from .errors import (
    ClusterAutError,
    IntegerOverflow,
    InvalidAut,
    InvalidPath,
    ModeUnavailable,
    NonExactDivision,
    NotFound,
    NotSkewSymmetrizable,
    PatternMismatch,
    ReductionFailed,
    ResourceBound,
    WordSyntaxError,
)
from .exmatrix import ExchangeMatrix, class_key, load_matrix, mutate_matrix, permute_matrix, skew_symmetrizer
from .grouplab import evaluate, load_gens, order_bound, prune_generators, relation_search, verify_relations
from .laurent import LaurentPoly, exact_div
from .search import (
    compute_B_set,
    compute_G0,
    enumerate_class,
    enumerate_P1,
    extract_generators,
    reduce_to_generators,
)
from .seeds import ClusterPattern, LabeledSeed, mutate_along, mutate_seed, root_seed

__version__ = "0.1.0"

__all__ = [
    "AutQuad",
    "ClusterAutError",
    "ClusterPattern",
    "ExchangeMatrix",
    "IntegerOverflow",
    "InvalidAut",
    "InvalidPath",
    "LabeledSeed",
    "LaurentPoly",
    "ModeUnavailable",
    "NonExactDivision",
    "NotFound",
    "NotSkewSymmetrizable",
    "PatternMismatch",
    "ReductionFailed",
    "ResourceBound",
    "WordSyntaxError",
    "aut_equal",
    "aut_from_json",
    "aut_to_json",
    "chosen_aut",
    "class_key",
    "compose",
    "compute_B_set",
    "compute_G0",
    "enumerate_P1",
    "enumerate_class",
    "evaluate",
    "exact_div",
    "extract_generators",
    "factor_through",
    "identity_aut",
    "inverse",
    "is_identity",
    "load_gens",
    "load_matrix",
    "make_aut",
    "mutate_along",
    "mutate_matrix",
    "mutate_seed",
    "order_bound",
    "permute_matrix",
    "prune_generators",
    "reduce_to_generators",
    "relation_search",
    "root_seed",
    "skew_symmetrizer",
    "verify_relations",
]
