"""Adaptive Method of Equal Shares for approval-based participatory budgeting."""

from .adaptive import CompletionResult, NotStable, complete, min_topup, next_unstable_budget
from .ames import (
    GreedyCandidate,
    InternalInvariantViolation,
    UpdateStep,
    UpdateTrace,
    ames,
    ames_tie_consistent,
    apply_update,
    changed_projects,
    find_greedy_step,
)
from .core import (
    Election,
    ElectionError,
    NonPositiveCost,
    Project,
    UnapprovedProject,
    UnknownProjectInBallot,
    epsilon,
    is_exhaustive,
    is_feasible,
    validate,
)
from .ejr import EjrViolation, TooLarge, cohesive_groups, ejr_check
from .experiment import ExperimentRecord, ExperimentResult, experiment_topup
from .mes import mes, rho
from .pabulib import dump_pabulib, parse_pabulib, read_pabulib
from .solution import (
    INF,
    Comparison,
    EqualSharesSolution,
    LoadDistribution,
    MalformedSolution,
    capacities,
    lex_compare,
    price,
    price_vector,
    total_load,
)
from .stability import (
    CertificateVerdict,
    InstabilityWitness,
    StabilityCertificate,
    alpha,
    instability_witness,
    is_lex_stable,
    is_stable,
    is_weakly_stable,
    project_capacity,
    verify,
    verify_certificate,
)

__version__ = "0.1.0"
