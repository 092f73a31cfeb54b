"""Cross-checking the detector against actual starvation cycles.

If bounded exploration finds a cycle of reachable states in which a predicate
stays true for an agent, and at no state on the cycle does any applicable
rule of that agent falsify the predicate, then a scheduler can starve the
agent outright by looping there.  The detector is meant to be a necessary
condition, so every such cycle must come with at least one vulnerable rule in
the starved agent's program.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from ..core.eval import eval_formula
from ..core.values import Atom
from ..engine.envscript import EnvScript
from ..engine.explorer import StateGraph, enumerate_interleavings, predicate_cycles
from ..lang.model import Model, PredicateDef
from .footprints import compute_footprint
from .predicates import _falsifies, member_applicable
from .vulnerable import AnalysisReport


@dataclass
class StarvationCycle:
    predicate: str
    agent: str
    length: int
    liberation_free: bool  # no state on the cycle offers the agent an escape move
    entry: str  # rule definition the agent runs


def find_starvation_cycles(
    model: Model,
    graph: Optional[StateGraph] = None,
    *,
    depth: Optional[int] = None,
    env_script: Optional[EnvScript] = None,
    state_budget: int = 10_000,
    only_liberation_free: bool = True,
) -> list[StarvationCycle]:
    g = graph or enumerate_interleavings(
        model, depth=depth, env_script=env_script, state_budget=state_budget
    )
    fp = compute_footprint(model)
    findings: list[StarvationCycle] = []
    for pred in model.predicates:
        for agent in model.domains.get(pred.domain, ()):
            binding = model.binding_for(agent)
            if binding is None:
                continue
            rules = [pr for pr in fp.program_rules if pr.entry == binding.rule]
            for cycle in predicate_cycles(g, model, pred, agent):
                free = True
                for key in cycle:
                    state = g.state_of(key)
                    for pr in rules:
                        if member_applicable(model, state, agent, pr.member) and _falsifies(
                            model, state, agent, pr.member, pred
                        ):
                            free = False
                            break
                    if not free:
                        break
                if only_liberation_free and not free:
                    continue
                findings.append(
                    StarvationCycle(pred.name, agent.name, len(cycle), free, binding.rule)
                )
    return findings


@dataclass
class NecessityCheck:
    ok: bool
    cycles: list[StarvationCycle] = field(default_factory=list)
    misses: list[str] = field(default_factory=list)  # cycles with no flagged rule


def check_necessity(model: Model, report: AnalysisReport, cycles: list[StarvationCycle]) -> NecessityCheck:
    """Every starvation cycle over a risky predicate must be answered by a
    vulnerable rule in the starved agent's program.  Cycles over predicates
    the report already cleared make no starvation claim and are skipped."""
    vulnerable_entries = {
        rv.entry for rv in report.rules if rv.vulnerable
    }
    risky_preds = {v.name for v in report.predicates if v.risky}
    relevant = [c for c in cycles if c.predicate in risky_preds]
    out = NecessityCheck(True, relevant)
    for c in relevant:
        if c.entry not in vulnerable_entries:
            out.ok = False
            out.misses.append(
                f"{c.predicate}[{c.agent}] cycles (length {c.length}) but no rule of {c.entry} is flagged"
            )
    return out
