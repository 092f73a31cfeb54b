"""Risky predicates: conditions an agent may get stuck in.

A predicate clears immediately when it mentions no risky symbol: whatever
keeps it true is beyond the environment's reach.  Otherwise two checks are
available.  The grounded (syntactic) check asks, per agent, for a rule of
that agent's program that fires in every sampled state satisfying the
predicate and whose updates always falsify it; such a rule liberates the
agent no matter what the environment does.  The exploration check walks the
reachable states instead and flags the predicate when some reachable state
satisfies it while no applicable rule of the agent falsifies it there.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from ..core.ast import Cond
from ..core.eval import EvalError, collect_updates, eval_formula
from ..core.state import State, check_consistent
from ..core.values import Atom
from ..engine.envscript import EnvScript
from ..engine.executor import binding_env, initial_state
from ..engine.explorer import StateGraph, enumerate_interleavings
from ..lang.model import Model, PredicateDef
from .footprints import ModelFootprint, ProgramRule, compute_footprint, formula_symbols
from .grounding import DEFAULT_STATE_CAP, GroundingSpace, build_grounding
from .risky import RiskyReport, compute_risky_functions

MODES = ("syntactic", "exploration")


@dataclass
class PredicateVerdict:
    name: str
    verdict: str  # "risky" or "not-risky"
    method: str  # "no-risky-symbols", "syntactic", "exploration", "syntactic-fallback"
    evidence: str
    per_agent: dict[str, bool] = field(default_factory=dict)
    witness: Optional[dict] = None  # exploration: where liberation failed
    exact: bool = True  # grounded check ran over exhaustive universes

    @property
    def risky(self) -> bool:
        return self.verdict == "risky"

    def to_dict(self) -> dict:
        out = {
            "name": self.name,
            "verdict": self.verdict,
            "method": self.method,
            "evidence": self.evidence,
            "per_agent": dict(self.per_agent),
        }
        if self.witness is not None:
            out["witness"] = self.witness
        return out


def member_applicable(model: Model, state: State, agent: Atom, member) -> bool:
    """Guard truth for a conditional, True otherwise.  Sampled states can make
    a guard unevaluable (arithmetic on junk); those count as not applicable."""
    if isinstance(member, Cond):
        env = binding_env(state, model, agent)
        try:
            return eval_formula(state, model, env, member.guard)
        except EvalError:
            return False
    return True


def member_updates(model: Model, state: State, agent: Atom, member):
    """The update list one top-level rule yields for this agent, or None when
    the rule's own updates clash or cannot be evaluated in this state."""
    env = binding_env(state, model, agent)
    try:
        ups = collect_updates(state, model, env, member, context="agent")
    except EvalError:
        return None
    if not check_consistent(ups):
        return None
    return ups


def _holds(model: Model, state: State, env: dict, formula) -> bool:
    try:
        return eval_formula(state, model, env, formula)
    except EvalError:
        return False


def _falsifies(
    model: Model,
    state: State,
    mover: Atom,
    member,
    pred: PredicateDef,
    holder: Optional[Atom] = None,
) -> bool:
    """Does ``mover`` running ``member`` here make the predicate false for
    ``holder``?  The holder defaults to the mover (self-liberation)."""
    ups = member_updates(model, state, mover, member)
    if ups is None:
        return False
    post = state.with_updates(ups)
    try:
        return not eval_formula(post, model, {pred.var: holder or mover}, pred.formula)
    except EvalError:
        return False


def _grounding_for_agent(
    model: Model, base: State, pred: PredicateDef, agent: Atom, rules: list[ProgramRule], cap: int
) -> GroundingSpace:
    nodes = [(pred.formula, {pred.var: agent})]
    env = binding_env(base, model, agent)
    for pr in rules:
        nodes.append((pr.member, env))
    return build_grounding(model, base, nodes, cap)


def _classify_syntactic_for_agent(
    model: Model,
    base: State,
    pred: PredicateDef,
    agent: Atom,
    footprint: ModelFootprint,
    cap: int,
) -> tuple[bool, str, bool]:
    """(risky_for_agent, evidence, exact)"""
    binding = model.binding_for(agent)
    rules = [pr for pr in footprint.program_rules if binding and pr.entry == binding.rule]
    space = _grounding_for_agent(model, base, pred, agent, rules, cap)
    p_env = {pred.var: agent}
    p_states = [s for s in space.states() if _holds(model, s, p_env, pred.formula)]
    if not p_states:
        return False, f"{agent.name}: unsatisfiable over the sampled states", space.exact
    if binding is None:
        return True, f"{agent.name}: no rules run for it, nothing can falsify the predicate", space.exact
    for pr in rules:
        if isinstance(pr.member, Cond):
            guard_ok = all(member_applicable(model, s, agent, pr.member) for s in p_states)
            if not guard_ok:
                continue
        if all(_falsifies(model, s, agent, pr.member, pred) for s in p_states):
            return (
                False,
                f"{agent.name}: rule {pr.id} fires whenever the predicate holds and always falsifies it",
                space.exact,
            )
    return (
        True,
        f"{agent.name}: no rule of {binding.rule} both fires in every satisfying state and falsifies the predicate",
        space.exact,
    )


def _classify_exploration_for_agent(
    model: Model,
    graph: StateGraph,
    pred: PredicateDef,
    agent: Atom,
    footprint: ModelFootprint,
) -> tuple[bool, str, Optional[dict]]:
    binding = model.binding_for(agent)
    rules = [pr for pr in footprint.program_rules if binding and pr.entry == binding.rule]
    p_env = {pred.var: agent}
    saw_p = False
    for key in graph.nodes:
        state = graph.state_of(key)
        if not eval_formula(state, model, p_env, pred.formula):
            continue
        saw_p = True
        liberated = False
        for pr in rules:
            if not member_applicable(model, state, agent, pr.member):
                continue
            if _falsifies(model, state, agent, pr.member, pred):
                liberated = True
                break
        if not liberated:
            witness = {
                "agent": agent.name,
                "step": graph.step_of(key),
                "state": repr(state),
            }
            return True, f"{agent.name}: reachable state with no falsifying rule", witness
    if not saw_p:
        return False, f"{agent.name}: no reachable state satisfies it", None
    return False, f"{agent.name}: every reachable satisfying state has a falsifying rule", None


def classify_predicate(
    model: Model,
    pred: PredicateDef,
    mode: str = "syntactic",
    *,
    risky: Optional[RiskyReport] = None,
    footprint: Optional[ModelFootprint] = None,
    env_script: Optional[EnvScript] = None,
    depth: Optional[int] = None,
    state_budget: int = 10_000,
    grounding_cap: int = DEFAULT_STATE_CAP,
    graph: Optional[StateGraph] = None,
) -> PredicateVerdict:
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    fp = footprint or compute_footprint(model)
    rk = risky or compute_risky_functions(model, fp)
    mentioned = formula_symbols(model, pred.formula)
    hit = sorted(mentioned & set(rk.risky))
    if not hit:
        shown = ", ".join(sorted(mentioned)) if mentioned else "none"
        return PredicateVerdict(
            pred.name,
            "not-risky",
            "no-risky-symbols",
            f"mentions no risky symbol (reads: {shown})",
        )

    atoms = model.domains.get(pred.domain, ())
    base = initial_state(model)
    per_agent: dict[str, bool] = {}
    notes: list[str] = []
    witness: Optional[dict] = None
    exact = True
    method = mode

    if mode == "exploration":
        g = graph or enumerate_interleavings(
            model, depth=depth, env_script=env_script, state_budget=state_budget
        )
        if g.truncated:
            method = "syntactic-fallback"
            notes.append("exploration truncated, grounded check used instead")
        else:
            for a in atoms:
                risky_a, why, w = _classify_exploration_for_agent(model, g, pred, a, fp)
                per_agent[a.name] = risky_a
                if risky_a and witness is None:
                    witness = w
                notes.append(why)

    if mode == "syntactic" or method == "syntactic-fallback":
        for a in atoms:
            risky_a, why, ex = _classify_syntactic_for_agent(model, base, pred, a, fp, grounding_cap)
            per_agent[a.name] = risky_a
            exact = exact and ex
            notes.append(why)

    verdict = "risky" if any(per_agent.values()) else "not-risky"
    evidence = f"mentions risky symbol(s) {', '.join(hit)}; " + "; ".join(notes)
    return PredicateVerdict(pred.name, verdict, method, evidence, per_agent, witness, exact)


def classify_all(
    model: Model,
    mode: str = "syntactic",
    *,
    env_script: Optional[EnvScript] = None,
    depth: Optional[int] = None,
    state_budget: int = 10_000,
    grounding_cap: int = DEFAULT_STATE_CAP,
) -> list[PredicateVerdict]:
    fp = compute_footprint(model)
    rk = compute_risky_functions(model, fp)
    graph = None
    if mode == "exploration":
        graph = enumerate_interleavings(
            model, depth=depth, env_script=env_script, state_budget=state_budget
        )
    return [
        classify_predicate(
            model,
            p,
            mode,
            risky=rk,
            footprint=fp,
            env_script=env_script,
            depth=depth,
            state_budget=state_budget,
            grounding_cap=grounding_cap,
            graph=graph,
        )
        for p in model.predicates
    ]
