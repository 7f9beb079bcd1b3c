"""Finite-dimensional C0 contractions: Blaschke products, model spaces,
Jordan blocks and the similarity and unitary-equivalence constructions
built on them."""

from .calculus import (
    apply_function,
    find_cyclic_vector,
    jordan_model,
    kernel_of_divisor,
    minimal_function,
    range_of_quotient,
)
from .corona import (
    ClusterSplit,
    CoronaSolution,
    SplitCertificate,
    bezout_solve,
    cluster_split,
    separation_lower_bound,
    split_similarity,
)
from .equivalence import (
    IrreducibilityResult,
    MaximalityReport,
    SimilarityCertificate,
    commutant_basis,
    hankel_distance,
    irreducibility_check,
    maximality_report,
    sarason_norm,
    similarity_synthesize,
    unitary_from_maximality,
)
from .errors import *  # noqa: F401,F403
from .inner import (
    BlaschkeProduct,
    RationalFunction,
    Zero,
    big_divisors,
    blaschke_factor,
    divide,
    enumerate_divisors,
    gcd,
    lattice,
    lcm,
    mobius_solve,
    normalized_factor,
    supnorm_boundary,
)
from .modelspace import JordanModel, ModelSpace, jordan_block, jordan_operator, model_kernel, tm_basis
from .operators import ContractionOperator

__version__ = "0.1.0"
