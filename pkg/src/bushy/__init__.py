"""Exact combinatorics of bushy forests: largeness decisions with
certificates, splitting extraction, forest-system builders for finite
forcing steps, brute-force oracles and lemma fuzzers, and a batch CLI."""

from .bounds import (
    Bound,
    Const,
    DiagIterate,
    FiniteTable,
    GGReport,
    Iterate,
    Linear,
    PiecewiseIterate,
    Pow2,
    Scaled,
    Seq,
    SumBound,
    bound_sum,
    bounded_product_bound,
    density_construct,
    gg_verify,
    is_quick,
    pointwise_geq,
    scaled,
)
from .errors import (
    BushyError,
    ExistsSplitError,
    HypothesisError,
    InvariantError,
    NoSplittingError,
    NotBigError,
    OracleLimitError,
    TruncationError,
    ValidationError,
)
from .forcing import (
    Condition,
    DivergenceExtension,
    GrowthWitness,
    MockJump,
    b_dnc_set,
    build_splitting_system,
    build_totality_system,
    compose_restrictions,
    derive_gg_witness,
    extend_to_rectangle,
    extends,
    is_valid_condition,
    lift,
    nu_homogenize,
    qn_member,
    restrict_i,
    sigma1_decide,
    validate_condition,
    verify_splitting_levels,
)
from .forests import Forest, forest_of, full_subforest, full_tree, is_bushy
from .functionals import (
    FunctionalTable,
    SplitFamily,
    SplitPair,
    SplittingCertificate,
    compute_theta,
    extract_splitting,
    find_pairwise_splittings,
    is_split,
    search_splitting,
)
from .largeness import (
    NotBig,
    SplitResult,
    Witness,
    big_subset_split,
    check_witness,
    closure,
    concat_extend,
    decide_big,
    is_small,
)
from .oracle import (
    FuzzReport,
    brute_big,
    brute_big_words,
    fuzz_lemma,
    generate_extract_instance,
    product_universe,
    random_condition,
    random_jump,
    validate_certificate,
)
from .systems import (
    NotBigND,
    System,
    SystemWitness,
    balanced_levels,
    big_subset_split_nd,
    check_system_witness,
    chop_system,
    concat_systems,
    decide_big_nd,
    find_small_rectangle,
    full_system,
    is_bushy_system,
    is_valid_system,
    leaves_of,
    level_slice,
    project,
    project_rel,
    uniformly_big,
    validate_system,
    weak_concat_extend,
)
from .words import Vec, Word, chop, vec_leq, word_incomparable, word_leq

__all__ = [name for name in dir() if not name.startswith("_")]
