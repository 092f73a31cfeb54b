"""Checking declared ranking counters against executed traces.

A ranking declaration promises that while the predicate holds for an agent,
the counter strictly decreases on every move that agent makes without being
liberated.  A trace refutes the promise if some move of the agent keeps the
predicate true without decreasing the counter, or finds the counter undefined
while the predicate holds.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from ..core.eval import eval_formula, eval_term
from ..core.values import Undef, format_value
from ..engine.executor import Trace
from ..lang.model import Model, RankingDef


@dataclass
class RankingViolation:
    step: int
    agent: str
    before: str  # counter value before the move, rendered
    after: str
    reason: str


@dataclass
class RankingCheck:
    predicate: str
    ok: bool
    checked_moves: int
    violations: list[RankingViolation] = field(default_factory=list)


def verify_ranking(model: Model, ranking: RankingDef, trace: Trace) -> RankingCheck:
    pred = model.predicate(ranking.predicate)
    if pred is None:
        raise ValueError(f"unknown predicate {ranking.predicate}")
    atoms = {a.name: a for a in model.domains.get(pred.domain, ())}
    check = RankingCheck(pred.name, True, 0)
    prev_state = trace.initial
    for row in trace.steps:
        state = row.state
        mover = atoms.get(row.agent) if row.agent else None
        if mover is not None and row.fired:
            env = {pred.var: mover}
            held_before = eval_formula(prev_state, model, env, pred.formula)
            holds_after = eval_formula(state, model, env, pred.formula)
            if held_before:
                check.checked_moves += 1
                if holds_after:
                    before = eval_term(prev_state, model, env, ranking.counter)
                    after = eval_term(state, model, env, ranking.counter)
                    if isinstance(before, Undef) or isinstance(after, Undef):
                        check.ok = False
                        check.violations.append(
                            RankingViolation(
                                row.step,
                                mover.name,
                                format_value(before),
                                format_value(after),
                                "counter undefined while the predicate holds",
                            )
                        )
                    elif not (isinstance(before, int) and isinstance(after, int)):
                        check.ok = False
                        check.violations.append(
                            RankingViolation(
                                row.step,
                                mover.name,
                                format_value(before),
                                format_value(after),
                                "counter is not an integer",
                            )
                        )
                    elif after >= before:
                        check.ok = False
                        check.violations.append(
                            RankingViolation(
                                row.step,
                                mover.name,
                                format_value(before),
                                format_value(after),
                                "counter failed to decrease on the agent's move",
                            )
                        )
        prev_state = state
    return check


def verify_all_rankings(model: Model, trace: Trace) -> list[RankingCheck]:
    return [verify_ranking(model, r, trace) for r in model.rankings]
