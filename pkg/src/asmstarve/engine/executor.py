"""Distributed execution: one agent moves per step, environment first.

Each step applies the environment's scripted updates for that step (if any),
then lets the scheduled agent fire all of its applicable top-level rules in
parallel.  An agent with no applicable rule is quiescent; an applicable rule
that happens to yield no updates is still a real move.
"""
from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from ..core.eval import applicable_labels, collect_updates, eval_formula, eval_term
from ..core.signature import Location
from ..core.state import InconsistentUpdateError, State, Update, apply_updates, clashing_pair
from ..core.values import Atom, Value, value_to_json
from ..lang.model import Model
from .envscript import EnvScript

TERMINATION_REASONS = ("step-limit", "quiescent", "inconsistent-update")


class ExecutionError(Exception):
    pass


def initial_state(model: Model) -> State:
    """Build the initial state by running the initialization items in order.

    Items apply sequentially so later assignments can read what earlier ones
    set; within one item the usual parallel semantics hold.
    """
    s = State()
    for item in model.init:
        ups = collect_updates(s, model, {}, item, context="init")
        s = apply_updates(s, ups)
    return s


def binding_env(state: State, model: Model, agent: Atom) -> dict[str, Value]:
    """The variable environment an agent's program runs under."""
    prog = model.program_for(agent)
    if prog is None:
        raise ExecutionError(f"agent {agent.name} has no binding")
    rdef, binding = prog
    outer = {"self": agent, binding.var: agent}
    args = [eval_term(state, model, outer, a) for a in binding.args]
    env: dict[str, Value] = {"self": agent}
    env.update(zip(rdef.params, args))
    return env


def applicable_rules(state: State, model: Model, agent: Atom) -> list[str]:
    """Labels of the agent's top-level rules applicable in this state."""
    prog = model.program_for(agent)
    if prog is None:
        raise ExecutionError(f"agent {agent.name} has no binding")
    rdef, _ = prog
    return applicable_labels(state, model, binding_env(state, model, agent), rdef.body)


@dataclass
class AgentStepResult:
    """Outcome of offering one agent a move."""

    status: str  # "moved", "quiescent", or "inconsistent"
    fired: tuple[str, ...]
    updates: tuple[Update, ...]
    clash: Optional[tuple[Location, Value, Value]]
    state: State  # post-state ("moved"), else the unchanged pre-state


def agent_step(state: State, model: Model, agent: Atom) -> AgentStepResult:
    prog = model.program_for(agent)
    if prog is None:
        raise ExecutionError(f"agent {agent.name} has no binding")
    rdef, _ = prog
    env = binding_env(state, model, agent)
    fired = applicable_labels(state, model, env, rdef.body)
    if not fired:
        return AgentStepResult("quiescent", (), (), None, state)
    ups = collect_updates(state, model, env, rdef.body, context="agent")
    clash = clashing_pair(ups)
    if clash is not None:
        return AgentStepResult("inconsistent", tuple(fired), _dedup(ups), clash, state)
    return AgentStepResult("moved", tuple(fired), _dedup(ups), None, state.with_updates(ups))


def _dedup(updates: Iterable[Update]) -> tuple[Update, ...]:
    seen: list[Update] = []
    for u in updates:
        if u not in seen:
            seen.append(u)
    return tuple(seen)


# -- schedulers -------------------------------------------------------------


class Scheduler:
    """Picks which agent moves, given those currently able to move."""

    name = "scheduler"
    seed: Optional[int] = None

    def pick(self, step: int, applicable: Sequence[Atom]) -> Optional[Atom]:
        raise NotImplementedError

    def exhausted(self, step: int) -> bool:
        return False


class RoundRobinScheduler(Scheduler):
    """Rotates through the agents in binding order, skipping quiescent ones."""

    name = "round-robin"

    def __init__(self, agents: Sequence[Atom]):
        self.order = list(agents)
        self._next = 0

    def pick(self, step: int, applicable: Sequence[Atom]) -> Optional[Atom]:
        if not self.order:
            return None
        live = set(applicable)
        for i in range(len(self.order)):
            idx = (self._next + i) % len(self.order)
            if self.order[idx] in live:
                self._next = (idx + 1) % len(self.order)
                return self.order[idx]
        return None


class RandomScheduler(Scheduler):
    """Uniform choice among the agents able to move, reproducible by seed."""

    name = "random"

    def __init__(self, seed: int):
        self.seed = seed
        self._rng = random.Random(seed)

    def pick(self, step: int, applicable: Sequence[Atom]) -> Optional[Atom]:
        if not applicable:
            return None
        return self._rng.choice(list(applicable))


class ScriptedScheduler(Scheduler):
    """Replays a fixed agent sequence; a quiescent agent still takes its turn
    (recording an empty move), so adversarial schedules stay aligned."""

    name = "scripted"

    def __init__(self, agents: Sequence[Atom]):
        self.script = list(agents)

    def pick(self, step: int, applicable: Sequence[Atom]) -> Optional[Atom]:
        if step >= len(self.script):
            return None
        return self.script[step]

    def exhausted(self, step: int) -> bool:
        return step >= len(self.script)


def scripted_from_names(model: Model, names: Sequence[str]) -> ScriptedScheduler:
    agents = {a.name: a for a in model.agents()}
    script = []
    for n in names:
        if n not in agents:
            raise ExecutionError(f"scheduled name {n} is not an agent")
        script.append(agents[n])
    return ScriptedScheduler(script)


# -- traces ------------------------------------------------------------------


@dataclass
class TraceStep:
    step: int
    env_updates: tuple[Update, ...]
    agent: Optional[str]  # mover, or None for an environment-only step
    fired: tuple[str, ...]
    updates: tuple[Update, ...]
    state: State  # state after environment updates and the move
    applicable: tuple[str, ...] = ()  # agents able to move this step (not serialized)


@dataclass
class Trace:
    model_name: str
    scheduler: str
    seed: Optional[int]
    initial: State
    steps: list[TraceStep] = field(default_factory=list)
    termination: str = "step-limit"
    termination_detail: str = ""

    @property
    def final_state(self) -> State:
        return self.steps[-1].state if self.steps else self.initial


def evaluate_predicates(state: State, model: Model) -> dict[str, dict[str, bool]]:
    out: dict[str, dict[str, bool]] = {}
    for p in model.predicates:
        row: dict[str, bool] = {}
        for a in model.domains.get(p.domain, ()):
            row[a.name] = eval_formula(state, model, {p.var: a}, p.formula)
        out[p.name] = row
    return out


def run_distributed(
    model: Model,
    scheduler: Scheduler,
    *,
    steps: int = 100,
    env_script: Optional[EnvScript] = None,
) -> Trace:
    """Run the machine for at most ``steps`` scheduled moves."""
    state = initial_state(model)
    trace = Trace(model.name, scheduler.name, scheduler.seed, state)
    for t in range(steps):
        env_ups: tuple[Update, ...] = env_script.updates_at(t) if env_script else ()
        if env_ups:
            try:
                state = apply_updates(state, env_ups)
            except InconsistentUpdateError as e:
                trace.termination = "inconsistent-update"
                trace.termination_detail = f"environment step {t}: {e}"
                return trace
        applicable = [a for a in model.agents() if applicable_rules(state, model, a)]
        chosen = scheduler.pick(t, applicable)
        if chosen is None:
            if scheduler.exhausted(t):
                trace.termination = "step-limit"
                trace.termination_detail = "schedule exhausted"
                return trace
            if env_script is not None and env_script.has_updates_after(t):
                # nobody can move yet, but the environment still will
                trace.steps.append(
                    TraceStep(t, env_ups, None, (), (), state, tuple(a.name for a in applicable))
                )
                continue
            trace.termination = "quiescent"
            trace.termination_detail = f"all agents quiescent at step {t}"
            return trace
        result = agent_step(state, model, chosen)
        if result.status == "inconsistent":
            trace.termination = "inconsistent-update"
            loc, va, vb = result.clash
            trace.termination_detail = f"agent {chosen.name} at step {t}: {loc!r} gets {va!r} and {vb!r}"
            trace.steps.append(
                TraceStep(t, env_ups, chosen.name, result.fired, (), state, tuple(a.name for a in applicable))
            )
            return trace
        state = result.state
        trace.steps.append(
            TraceStep(
                t,
                env_ups,
                chosen.name,
                result.fired,
                result.updates,
                state,
                tuple(a.name for a in applicable),
            )
        )
    trace.termination = "step-limit"
    return trace


# -- trace serialization ------------------------------------------------------


def _updates_to_json(updates: Iterable[Update]) -> list[list]:
    rows = [[repr(loc), value_to_json(v)] for loc, v in updates]
    rows.sort(key=lambda r: r[0])
    return rows


def trace_to_jsonl(trace: Trace, model: Model) -> str:
    """Serialize a trace, one JSON object per line, byte-stable for a given
    model, scheduler, and seed."""
    header = {
        "model": trace.model_name,
        "scheduler": trace.scheduler,
        "seed": trace.seed,
        "steps": len(trace.steps),
        "termination": trace.termination,
    }
    lines = [json.dumps(header, sort_keys=True)]
    for row in trace.steps:
        lines.append(
            json.dumps(
                {
                    "step": row.step,
                    "env_updates": _updates_to_json(row.env_updates),
                    "agent": row.agent,
                    "fired_rules": list(row.fired),
                    "updates": _updates_to_json(row.updates),
                    "predicates": evaluate_predicates(row.state, model),
                },
                sort_keys=True,
            )
        )
    return "\n".join(lines) + "\n"


def parse_trace_jsonl(text: str) -> tuple[dict, list[dict]]:
    """Parse a serialized trace into its header and step rows."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ValueError("empty trace")
    header = json.loads(lines[0])
    if not isinstance(header, dict) or "model" not in header:
        raise ValueError("trace header missing")
    rows = []
    for ln in lines[1:]:
        row = json.loads(ln)
        if not isinstance(row, dict) or "step" not in row or "predicates" not in row:
            raise ValueError(f"malformed trace row: {ln[:80]}")
        rows.append(row)
    return header, rows
