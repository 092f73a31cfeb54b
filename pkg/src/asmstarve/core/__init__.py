"""Core semantics: values, signatures, states, update sets, evaluation."""

from .values import UNDEF, Atom, Undef, Value, format_value, value_to_json, values_equal
from .signature import (
    BUILTIN_RESULT_TYPES,
    FunctionSymbol,
    Kind,
    Location,
    RuleDef,
    Scope,
    Vocabulary,
)
from .state import (
    InconsistentUpdateError,
    State,
    Update,
    UpdateSet,
    apply_updates,
    check_consistent,
    clashing_pair,
)
from .eval import (
    ArityError,
    DerivedCycleError,
    EvalError,
    KindViolationError,
    ResultDomainError,
    UnboundVariableError,
    applicable_labels,
    collect_updates,
    eval_formula,
    eval_term,
    member_label,
    program_members,
    value_in_result_domain,
)
from . import ast

__all__ = [
    "UNDEF",
    "Atom",
    "Undef",
    "Value",
    "format_value",
    "value_to_json",
    "values_equal",
    "BUILTIN_RESULT_TYPES",
    "FunctionSymbol",
    "Kind",
    "Location",
    "RuleDef",
    "Scope",
    "Vocabulary",
    "InconsistentUpdateError",
    "State",
    "Update",
    "UpdateSet",
    "apply_updates",
    "check_consistent",
    "clashing_pair",
    "ArityError",
    "DerivedCycleError",
    "EvalError",
    "KindViolationError",
    "ResultDomainError",
    "UnboundVariableError",
    "applicable_labels",
    "collect_updates",
    "eval_formula",
    "eval_term",
    "member_label",
    "program_members",
    "value_in_result_domain",
    "ast",
]
