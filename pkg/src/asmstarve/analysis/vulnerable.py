"""Vulnerable rules and the starvation-freedom certificate.

A rule is vulnerable when all three hold:

  1. some top-level guard conjunct reads a risky symbol, so the environment
     can keep the rule from firing;
  2. the rule is associated with a risky predicate: in some state satisfying
     the predicate the rule is applicable and its updates falsify it, so an
     agent stuck in that predicate relies on this rule to get out;
  3. no other rule can do that liberation: removal filtering clears a
     candidate when a non-candidate rule, applicable in some state satisfying
     the predicate, makes the predicate false there.  Filtering iterates,
     since each cleared rule becomes available to clear others.

An empty vulnerable set yields a starvation-freedom certificate.  The flags
are necessary-condition warnings, not starvation proofs; the certificate
conversely says no rule even passes the necessary conditions.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from ..core.state import State
from ..core.values import Atom
from ..engine.envscript import EnvScript
from ..engine.executor import binding_env, initial_state
from ..engine.explorer import StateGraph, enumerate_interleavings
from ..lang.model import Model, PredicateDef
from ..lang.printer import render_formula
from .footprints import ModelFootprint, ProgramRule, compute_footprint
from .grounding import DEFAULT_STATE_CAP, build_grounding
from .predicates import (
    PredicateVerdict,
    _falsifies,
    _holds,
    classify_predicate,
    member_applicable,
)
from .risky import RiskyReport, compute_risky_functions


@dataclass
class RuleVerdict:
    id: str
    entry: str
    label: str
    verdict: str  # "vulnerable" or "not-vulnerable"
    f1: bool
    f1_evidence: str
    associations: tuple[tuple[str, str], ...] = ()  # (predicate, agent)
    association_evidence: str = ""
    f2_exonerated_by: Optional[str] = None
    f2_evidence: str = ""

    @property
    def vulnerable(self) -> bool:
        return self.verdict == "vulnerable"

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "verdict": self.verdict,
            "f1_evidence": self.f1_evidence,
            "f2_evidence": self.f2_evidence,
            "associations": [list(x) for x in self.associations],
            "association_evidence": self.association_evidence,
        }


@dataclass
class AnalysisReport:
    model_name: str
    mode: str
    risky: RiskyReport
    predicates: list[PredicateVerdict]
    rules: list[RuleVerdict]
    vulnerable: tuple[str, ...]
    certificate: bool
    truncated: bool
    notes: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "model": self.model_name,
            "mode": self.mode,
            "risky_functions": [
                {"name": n, "chain": list(self.risky.chains[n])} for n in self.risky.risky
            ],
            "predicates": [p.to_dict() for p in self.predicates],
            "rules": [r.to_dict() for r in self.rules],
            "vulnerable": list(self.vulnerable),
            "certificate": self.certificate,
            "notes": list(self.notes),
        }


def _f1(pr: ProgramRule, risky: RiskyReport) -> tuple[bool, str]:
    if pr.top_guard is None:
        return False, "always applicable: no guard for the environment to hold shut"
    for conjunct, syms in pr.top_conjuncts:
        hit = sorted(syms & set(risky.risky))
        if hit:
            return True, f"guard conjunct `{render_formula(conjunct)}` reads risky {', '.join(hit)}"
    return False, "no top-level guard conjunct reads a risky symbol"


class _StatePool:
    """Enumerates the states semantic checks quantify over.

    Association and removal filtering ask whether SOME state satisfying a
    predicate lets a rule falsify it, so the pool is always the grounded
    sample; exploration mode appends reachable states as extra witnesses.
    Narrowing to reachable states alone would under-report: a partitioned
    network never reaches a reply-delivered state, yet the rule consuming
    replies is exactly the one a stuck initiator depends on."""

    def __init__(
        self,
        model: Model,
        mode: str,
        base: State,
        graph: Optional[StateGraph],
        grounding_cap: int,
    ):
        self.model = model
        self.mode = mode
        self.base = base
        self.graph = graph
        self.cap = grounding_cap
        self.capped = False

    def states(self, nodes) -> list[State]:
        space = build_grounding(self.model, self.base, nodes, self.cap)
        if space.capped:
            self.capped = True
        out = list(space.states())
        if self.mode == "exploration" and self.graph is not None and not self.graph.truncated:
            seen = set(out)
            for s in self.graph.states():
                if s not in seen:
                    seen.add(s)
                    out.append(s)
        return out


def _associated(
    model: Model, pool: _StatePool, pr: ProgramRule, pred: PredicateDef, agent: Atom
) -> Optional[str]:
    """Evidence string when the rule liberates this predicate somewhere."""
    p_env = {pred.var: agent}
    nodes = [(pred.formula, p_env), (pr.member, binding_env(pool.base, model, agent))]
    for s in pool.states(nodes):
        if not _holds(model, s, p_env, pred.formula):
            continue
        if not member_applicable(model, s, agent, pr.member):
            continue
        if _falsifies(model, s, agent, pr.member, pred):
            return f"falsifies {pred.name}[{agent.name}] from a state satisfying it"
    return None


def _covered(
    model: Model,
    pool: _StatePool,
    other: ProgramRule,
    pred: PredicateDef,
    agent: Atom,
) -> Optional[tuple[str, str]]:
    """(rule id, evidence) when some agent running ``other`` can falsify pred[agent]."""
    p_env = {pred.var: agent}
    for b in other.agents:
        nodes = [(pred.formula, p_env), (other.member, binding_env(pool.base, model, b))]
        for s in pool.states(nodes):
            if not _holds(model, s, p_env, pred.formula):
                continue
            if not member_applicable(model, s, b, other.member):
                continue
            if _falsifies(model, s, b, other.member, pred, holder=agent):
                return other.id, f"{other.id} run by {b.name} falsifies {pred.name}[{agent.name}]"
    return None


def analyze_model(
    model: Model,
    *,
    mode: str = "syntactic",
    env_script: Optional[EnvScript] = None,
    depth: Optional[int] = None,
    state_budget: int = 10_000,
    grounding_cap: int = DEFAULT_STATE_CAP,
) -> AnalysisReport:
    fp = compute_footprint(model)
    rk = compute_risky_functions(model, fp)
    notes: list[str] = []
    truncated = False

    graph: Optional[StateGraph] = None
    if mode == "exploration":
        graph = enumerate_interleavings(
            model, depth=depth, env_script=env_script, state_budget=state_budget
        )
        if graph.truncated:
            truncated = True
            notes.append(
                "exploration hit its budget; grounded checks used instead and no certificate is issued"
            )

    predicate_verdicts = [
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
    if any(not v.exact for v in predicate_verdicts):
        notes.append(
            "integer or sequence locations were sampled, not enumerated; grounded verdicts are approximate"
        )

    risky_preds = [
        (model.predicate(v.name), v) for v in predicate_verdicts if v.risky
    ]

    base = initial_state(model)
    pool = _StatePool(model, mode, base, graph, grounding_cap)

    verdicts: dict[str, RuleVerdict] = {}
    candidates: list[str] = []
    associations: dict[str, list[tuple[PredicateDef, Atom]]] = {}
    for pr in fp.program_rules:
        f1, f1_ev = _f1(pr, rk)
        rv = RuleVerdict(pr.id, pr.entry, pr.label, "not-vulnerable", f1, f1_ev)
        verdicts[pr.id] = rv
        if not f1:
            continue
        assoc: list[tuple[PredicateDef, Atom]] = []
        assoc_notes: list[str] = []
        for pred, pv in risky_preds:
            for agent in pr.agents:
                if agent not in model.domains.get(pred.domain, ()):
                    continue
                ev = _associated(model, pool, pr, pred, agent)
                if ev is not None:
                    assoc.append((pred, agent))
                    assoc_notes.append(ev)
        if assoc:
            rv.associations = tuple((p.name, a.name) for p, a in assoc)
            rv.association_evidence = "; ".join(assoc_notes)
            associations[pr.id] = assoc
            candidates.append(pr.id)
        else:
            rv.association_evidence = (
                "not associated with any risky predicate: it never liberates one"
                if risky_preds
                else "no risky predicates to be associated with"
            )

    # removal filtering: a candidate is cleared when, for each predicate and
    # agent it is associated with, some non-candidate rule covers the escape
    remaining = list(candidates)
    changed = True
    while changed:
        changed = False
        for rid in list(remaining):
            non_candidates = [pr for pr in fp.program_rules if pr.id not in remaining]
            cover_ids: list[str] = []
            cover_notes: list[str] = []
            all_covered = True
            for pred, agent in associations[rid]:
                covered = None
                for other in non_candidates:
                    covered = _covered(model, pool, other, pred, agent)
                    if covered is not None:
                        break
                if covered is None:
                    all_covered = False
                    break
                cover_ids.append(covered[0])
                cover_notes.append(covered[1])
            if all_covered:
                remaining.remove(rid)
                verdicts[rid].f2_exonerated_by = cover_ids[0] if cover_ids else None
                verdicts[rid].f2_evidence = "removed: " + "; ".join(cover_notes)
                changed = True

    for rid in remaining:
        verdicts[rid].verdict = "vulnerable"
        pairs = ", ".join(f"{p}[{a}]" for p, a in verdicts[rid].associations)
        verdicts[rid].f2_evidence = f"sole liberator of {pairs}: no other rule falsifies them"

    if pool.capped:
        truncated = True
        notes.append(
            "a grounded state sample overflowed its cap; checks ran on a partial sample and no certificate is issued"
        )

    vulnerable = tuple(rid for rid in (pr.id for pr in fp.program_rules) if rid in remaining)
    # a risky predicate that no rule ever liberates is worse than vulnerable:
    # once it holds nothing in the program can falsify it, so never certify
    associated_preds = {p for rv in verdicts.values() for p, _ in rv.associations}
    orphaned = [v.name for v in predicate_verdicts if v.risky and v.name not in associated_preds]
    certificate = not vulnerable and not truncated and not orphaned
    if orphaned and not vulnerable:
        notes.append(
            "no certificate: risky predicate(s) "
            + ", ".join(sorted(orphaned))
            + " have no liberating rule among the checked states"
        )
    if certificate:
        notes.append(
            "certificate: no rule passes the necessary starvation conditions "
            "(risky guard, liberation of a risky predicate, sole liberator)"
        )
    notes.append(
        "vulnerability flags are necessary-condition warnings, not proofs that starvation occurs"
    )

    rule_list = [verdicts[pr.id] for pr in fp.program_rules]
    return AnalysisReport(
        model.name,
        mode,
        rk,
        predicate_verdicts,
        rule_list,
        vulnerable,
        certificate,
        truncated,
        notes,
    )


def certify_starvation_free(model: Model, **kwargs) -> tuple[bool, AnalysisReport]:
    report = analyze_model(model, **kwargs)
    return report.certificate, report
