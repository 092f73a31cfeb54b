"""Execution engine: distributed runs, scripted environments, exploration."""
from .envscript import EnvScript, EnvScriptError, env_script_to_dict, json_to_value, load_env_script, parse_env_script
from .executor import (
    AgentStepResult,
    ExecutionError,
    RandomScheduler,
    RoundRobinScheduler,
    Scheduler,
    ScriptedScheduler,
    Trace,
    TraceStep,
    agent_step,
    applicable_rules,
    binding_env,
    evaluate_predicates,
    initial_state,
    parse_trace_jsonl,
    run_distributed,
    scripted_from_names,
    trace_to_jsonl,
)
from .explorer import (
    CoherenceCheck,
    StateGraph,
    agents_independent,
    check_coherence,
    coherence_scan,
    enumerate_interleavings,
    predicate_cycles,
    predicate_nodes,
)

__all__ = [
    "AgentStepResult",
    "CoherenceCheck",
    "EnvScript",
    "EnvScriptError",
    "ExecutionError",
    "RandomScheduler",
    "RoundRobinScheduler",
    "Scheduler",
    "ScriptedScheduler",
    "StateGraph",
    "Trace",
    "TraceStep",
    "agent_step",
    "agents_independent",
    "applicable_rules",
    "binding_env",
    "check_coherence",
    "coherence_scan",
    "enumerate_interleavings",
    "env_script_to_dict",
    "evaluate_predicates",
    "initial_state",
    "json_to_value",
    "load_env_script",
    "parse_env_script",
    "parse_trace_jsonl",
    "predicate_cycles",
    "predicate_nodes",
    "run_distributed",
    "scripted_from_names",
    "trace_to_jsonl",
]
