"""Proportional social choice under general feasibility constraints.

Exact-arithmetic library and CLI: voting rules (PAV, sequential purchase
rules, greedy cohesive-group extraction), proportionality audits (EJR, PJR,
FJR, core, restrained and weighted variants), stable-priceability checks,
and a reproducible fixture catalog.
"""

from __future__ import annotations

from .constraints import (
    DEFAULT_CAP,
    BudgetSystem,
    CommitteeSystem,
    DisjointAttributesSystem,
    ExplicitSystem,
    FeasibilitySystem,
    JudgmentSystem,
    MatroidWitness,
    NegativeVotesSystem,
    PublicDecisionsSystem,
    RankingSystem,
    build_system,
    check_exchange_property,
    enumerate_feasible,
    enumerate_feasible_counts,
    enumerate_maximal,
    one_swap,
    refine_atoms,
    representative_mask,
)
from .errors import (
    EnumerationCapExceeded,
    GeneratorRefusal,
    NotAMatroidError,
    ParseError,
    PropChoiceError,
    SearchExhaustedError,
    ValidationError,
)
from .model import Candidate, Election, Voter, build_election
from .axioms import (
    AuditReport,
    CohesiveResult,
    DeservesResult,
    audit_core,
    audit_ejr,
    audit_ejr_weighted,
    audit_fjr,
    audit_pjr,
    audit_pjr_weighted,
    audit_restrained_ejr,
    check_avg_satisfaction,
    check_weighted_coverage_bound,
    cohesive,
    deserves,
    deserves_weighted,
    max_deserved,
    max_weighted_claim,
)
from .pav import PavResult, SwapSearchResult, pav_score, pav_swap_search, solve_pav_exact
from .phragmen import (
    PhragmenTrace,
    PurchaseEvent,
    TraceAuditResult,
    run_phragmen,
    run_phragmen_weighted,
    trace_audit,
)
from .priceability import (
    PriceSystem,
    SpReport,
    WeightedSpBoundReport,
    check_weighted_sp_bound,
    find_payments,
    search_stable_priceable,
    verify_sp,
)
from .greedy_cohesive import (
    CohesiveGroup,
    CohesivePartition,
    GreedyOutcome,
    construct_fjr_outcome,
    greedy_cohesive_partition,
)
from .fixtures import FIXTURE_IDS, Fixture, build_fixture, witness_presets
from .jsonio import (
    canonical_dumps,
    election_from_dict,
    election_to_dict,
    fixture_to_bundle,
    fraction_to_str,
    parse_fraction,
    price_system_from_dict,
    price_system_to_dict,
    system_to_spec,
    to_jsonable,
)

__version__ = "0.1.0"

__all__ = [
    "AuditReport",
    "BudgetSystem",
    "Candidate",
    "CohesiveGroup",
    "CohesivePartition",
    "CohesiveResult",
    "CommitteeSystem",
    "DEFAULT_CAP",
    "DeservesResult",
    "DisjointAttributesSystem",
    "Election",
    "EnumerationCapExceeded",
    "ExplicitSystem",
    "FIXTURE_IDS",
    "FeasibilitySystem",
    "Fixture",
    "GeneratorRefusal",
    "GreedyOutcome",
    "JudgmentSystem",
    "MatroidWitness",
    "NegativeVotesSystem",
    "NotAMatroidError",
    "ParseError",
    "PavResult",
    "PhragmenTrace",
    "PriceSystem",
    "PropChoiceError",
    "PublicDecisionsSystem",
    "PurchaseEvent",
    "RankingSystem",
    "SearchExhaustedError",
    "SpReport",
    "SwapSearchResult",
    "TraceAuditResult",
    "ValidationError",
    "Voter",
    "WeightedSpBoundReport",
    "audit_core",
    "audit_ejr",
    "audit_ejr_weighted",
    "audit_fjr",
    "audit_pjr",
    "audit_pjr_weighted",
    "audit_restrained_ejr",
    "build_election",
    "build_fixture",
    "build_system",
    "canonical_dumps",
    "check_avg_satisfaction",
    "check_exchange_property",
    "check_weighted_coverage_bound",
    "check_weighted_sp_bound",
    "cohesive",
    "construct_fjr_outcome",
    "deserves",
    "deserves_weighted",
    "election_from_dict",
    "election_to_dict",
    "enumerate_feasible",
    "enumerate_feasible_counts",
    "enumerate_maximal",
    "one_swap",
    "refine_atoms",
    "representative_mask",
    "find_payments",
    "fixture_to_bundle",
    "fraction_to_str",
    "greedy_cohesive_partition",
    "max_deserved",
    "max_weighted_claim",
    "parse_fraction",
    "pav_score",
    "pav_swap_search",
    "price_system_from_dict",
    "price_system_to_dict",
    "run_phragmen",
    "run_phragmen_weighted",
    "search_stable_priceable",
    "solve_pav_exact",
    "system_to_spec",
    "to_jsonable",
    "trace_audit",
    "verify_sp",
    "witness_presets",
]
