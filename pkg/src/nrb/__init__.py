"""Exact toolkit for nearly coherent beliefs and nearly rationalizable choice.

Everything runs in rational arithmetic end to end: distances between
credal sets, opinion-pool decompositions with their betting-style
witnesses, and approximate random-utility tests with integer tagged
trial certificates.  Results carry certificates that are re-verified
exactly before being returned.
"""

from .errors import (
    CapExceededError,
    InputError,
    InternalCheckError,
    NrbError,
)
from .rational import decimal_approx, format_rational, parse_rational
from .simplex import (
    EQUAL,
    GREATER_EQUAL,
    INFEASIBLE,
    LESS_EQUAL,
    MAXIMIZE,
    MINIMIZE,
    OPTIMAL,
    UNBOUNDED,
    LinearProgram,
    LpSolution,
    solve_lp,
    verify_infeasibility,
    verify_optimal,
)
from .measures import (
    CredalSet,
    PointSpace,
    ProbVector,
    SignedVector,
    StakesVector,
    expectation,
    hahn_split,
    kr_distance,
    l1_distance,
    mixture,
    oscillation,
)
from .duality import (
    FULL_SIMPLEX,
    ContaminationDecomposition,
    ContaminationRefusal,
    DistanceResult,
    FullSimplex,
    Proximity,
    Separation,
    SeparationCheck,
    check_bounded_separation,
    contamination_feasible,
    gordan_decide,
    member_gap,
    min_set_distance,
)
from .pooling import (
    DEFAULT_EVENT_CAP,
    ParetoWitness,
    PoolingInstance,
    PoolingReport,
    check_condition_C,
    check_condition_CM,
    check_condition_Cstar,
    check_event_minmax,
    pool_min_eps_additive,
    pool_min_eps_genest,
    pool_min_eps_normalized,
)
from .rum import (
    DEFAULT_ALTERNATIVES_CAP,
    ENV_MAX_ALTERNATIVES,
    ChoiceMatrix,
    RumInstance,
    RumReport,
    TaggedTrialSequence,
    build_matrix,
    check_eps_arsp,
    check_eps_arsp_star,
    enumerate_menus,
    enumerate_orderings,
    evaluate_arsp,
    evaluate_arsp_star,
    instance_from_mixture,
    max_alternatives,
    rum_min_eps,
    rum_residual_min_eps,
)
from .blockmarschak import bm_negative_norm, bm_polynomials, hoffman_ratio
from .oracle import (
    GridSpec,
    brute_force_lp,
    exhaustive_rum_check,
    grid_max_gap,
    vertex_distance,
)

__version__ = "0.1.0"

__all__ = [
    "NrbError",
    "InputError",
    "CapExceededError",
    "InternalCheckError",
    "parse_rational",
    "format_rational",
    "decimal_approx",
    "LinearProgram",
    "LpSolution",
    "solve_lp",
    "verify_optimal",
    "verify_infeasibility",
    "MINIMIZE",
    "MAXIMIZE",
    "LESS_EQUAL",
    "EQUAL",
    "GREATER_EQUAL",
    "OPTIMAL",
    "INFEASIBLE",
    "UNBOUNDED",
    "PointSpace",
    "ProbVector",
    "SignedVector",
    "StakesVector",
    "CredalSet",
    "l1_distance",
    "kr_distance",
    "mixture",
    "hahn_split",
    "oscillation",
    "expectation",
    "DistanceResult",
    "Separation",
    "Proximity",
    "SeparationCheck",
    "FullSimplex",
    "FULL_SIMPLEX",
    "ContaminationDecomposition",
    "ContaminationRefusal",
    "member_gap",
    "min_set_distance",
    "gordan_decide",
    "check_bounded_separation",
    "contamination_feasible",
    "PoolingInstance",
    "PoolingReport",
    "ParetoWitness",
    "DEFAULT_EVENT_CAP",
    "pool_min_eps_additive",
    "pool_min_eps_genest",
    "pool_min_eps_normalized",
    "check_condition_C",
    "check_condition_Cstar",
    "check_condition_CM",
    "check_event_minmax",
    "RumInstance",
    "RumReport",
    "ChoiceMatrix",
    "TaggedTrialSequence",
    "ENV_MAX_ALTERNATIVES",
    "DEFAULT_ALTERNATIVES_CAP",
    "max_alternatives",
    "enumerate_menus",
    "enumerate_orderings",
    "build_matrix",
    "instance_from_mixture",
    "rum_min_eps",
    "check_eps_arsp",
    "rum_residual_min_eps",
    "check_eps_arsp_star",
    "evaluate_arsp",
    "evaluate_arsp_star",
    "bm_polynomials",
    "bm_negative_norm",
    "hoffman_ratio",
    "GridSpec",
    "vertex_distance",
    "grid_max_gap",
    "exhaustive_rum_check",
    "brute_force_lp",
    "__version__",
]
