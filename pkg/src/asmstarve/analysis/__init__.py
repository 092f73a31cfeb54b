"""Static starvation analysis: risky functions, risky predicates, vulnerable rules."""
from .footprints import (
    ModelFootprint,
    ProgramRule,
    WriteOccurrence,
    compute_footprint,
    formula_symbols,
    term_symbols,
)
from .grounding import (
    DEFAULT_STATE_CAP,
    GroundingSpace,
    build_grounding,
    int_samples,
    mentioned_locations,
    model_int_constants,
)
from .necessity import NecessityCheck, StarvationCycle, check_necessity, find_starvation_cycles
from .predicates import (
    MODES,
    PredicateVerdict,
    classify_all,
    classify_predicate,
    member_applicable,
    member_updates,
)
from .ranking import RankingCheck, RankingViolation, verify_all_rankings, verify_ranking
from .risky import RiskyReport, compute_risky_functions
from .vulnerable import AnalysisReport, RuleVerdict, analyze_model, certify_starvation_free

__all__ = [
    "AnalysisReport",
    "DEFAULT_STATE_CAP",
    "GroundingSpace",
    "MODES",
    "ModelFootprint",
    "NecessityCheck",
    "PredicateVerdict",
    "ProgramRule",
    "RankingCheck",
    "RankingViolation",
    "RiskyReport",
    "RuleVerdict",
    "StarvationCycle",
    "WriteOccurrence",
    "analyze_model",
    "build_grounding",
    "certify_starvation_free",
    "check_necessity",
    "classify_all",
    "classify_predicate",
    "compute_footprint",
    "compute_risky_functions",
    "find_starvation_cycles",
    "formula_symbols",
    "int_samples",
    "member_applicable",
    "member_updates",
    "mentioned_locations",
    "model_int_constants",
    "term_symbols",
    "verify_all_rankings",
    "verify_ranking",
]
