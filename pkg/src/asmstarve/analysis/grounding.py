"""Finite grounding of formulas and rules for state sampling.

Checks that quantify over states ("for every state satisfying p ...") run
over a sampled finite space: the dynamic locations the checked formulas and
rules mention become dimensions, every other location keeps its initial
value, and each dimension ranges over a small universe derived from its
result domain.  Atom and boolean dimensions are covered exactly; integer and
sequence dimensions are sampled around the constants the model itself uses,
so verdicts over them are approximations and are reported as such.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Iterator, Optional, Union

from ..core.ast import (
    And,
    Apply,
    Assign,
    Block,
    Call,
    Choose,
    Cond,
    Const,
    Eq,
    ExistsF,
    ForallF,
    ForallRule,
    Formula,
    InDomain,
    InSeq,
    Not,
    Or,
    Rule,
    Term,
)
from ..core.eval import EvalError, eval_term
from ..core.signature import Kind, Location, Scope
from ..core.state import State
from ..core.values import UNDEF, Undef, Value
from ..lang.model import Model

Node = Union[Term, Formula, Rule]

DEFAULT_STATE_CAP = 200_000
_SEQ_ELEMENT_CAP = 8
_INT_SAMPLE_CAP = 12


@dataclass
class GroundingSpace:
    dims: tuple[Location, ...]
    universes: tuple[tuple[Value, ...], ...]
    base: State
    exact: bool  # every dimension covered exhaustively and nothing capped
    capped: bool
    total: int  # product of universe sizes (before any cap)
    cap: int

    def states(self) -> Iterator[State]:
        if not self.dims:
            yield self.base
            return
        count = 0
        for combo in itertools.product(*self.universes):
            if count >= self.cap:
                return
            count += 1
            yield self.base.with_updates(zip(self.dims, combo))


def model_int_constants(model: Model) -> list[int]:
    """Integer literals appearing anywhere in the model."""
    found: set[int] = set()

    def walk_term(t: Term):
        if isinstance(t, Const) and isinstance(t.value, int) and not isinstance(t.value, bool):
            found.add(t.value)
        elif isinstance(t, Const) and isinstance(t.value, tuple):
            for v in t.value:
                if isinstance(v, int) and not isinstance(v, bool):
                    found.add(v)
        elif isinstance(t, Apply):
            for a in t.args:
                walk_term(a)

    def walk_formula(f: Formula):
        if isinstance(f, Eq):
            walk_term(f.left)
            walk_term(f.right)
        elif isinstance(f, InDomain):
            walk_term(f.item)
        elif isinstance(f, InSeq):
            walk_term(f.item)
            walk_term(f.seq)
        elif isinstance(f, Not):
            walk_formula(f.body)
        elif isinstance(f, (And, Or)):
            for x in f.items:
                walk_formula(x)
        elif isinstance(f, (ForallF, ExistsF)):
            walk_formula(f.body)

    def walk_rule(r: Rule):
        if isinstance(r, Assign):
            for a in r.target.args:
                walk_term(a)
            walk_term(r.value)
        elif isinstance(r, Cond):
            walk_formula(r.guard)
            walk_rule(r.then)
        elif isinstance(r, Block):
            for item in r.items:
                walk_rule(item)
        elif isinstance(r, ForallRule):
            walk_rule(r.body)
        elif isinstance(r, Choose):
            if r.seq is not None:
                walk_term(r.seq)
            if r.where is not None:
                walk_formula(r.where)
            if r.ranking is not None:
                walk_term(r.ranking)
            walk_rule(r.body)
        elif isinstance(r, Call):
            for a in r.args:
                walk_term(a)

    for item in model.init:
        walk_rule(item)
    for rdef in model.rules.values():
        walk_rule(rdef.body)
    for p in model.predicates:
        walk_formula(p.formula)
    for rk in model.rankings:
        walk_term(rk.counter)
    for sym in model.symbols.values():
        if sym.derived_def is not None:
            if sym.result == "bool":
                walk_formula(sym.derived_def)
            else:
                walk_term(sym.derived_def)
    return sorted(found)


def int_samples(model: Model) -> tuple[int, ...]:
    consts = model_int_constants(model)
    samples: set[int] = {0, 1}
    for c in consts:
        samples.update((c - 1, c, c + 1))
    return tuple(sorted(samples)[:_INT_SAMPLE_CAP])


def _universe(model: Model, sym_result: str, ints: tuple[int, ...]) -> tuple[tuple[Value, ...], bool]:
    """Value universe for one dimension and whether it is exhaustive."""
    if sym_result == "bool":
        return (UNDEF, True, False), True
    if sym_result == "int":
        return (UNDEF,) + ints, False
    if sym_result == "seq":
        elements: list[Value] = []
        for atoms in model.domains.values():
            elements.extend(atoms)
        elements.extend(ints)
        elements = elements[:_SEQ_ELEMENT_CAP]
        return (UNDEF, ()) + tuple((e,) for e in elements), False
    atoms = model.domains.get(sym_result, ())
    return (UNDEF,) + tuple(atoms), True


class _MentionWalker:
    """Collects the dynamic locations a node mentions, resolving argument
    terms in the base state.  Quantified variables are enumerated over their
    domains; a choose variable ranges over the base-state candidates, falling
    back to undef so walking stays total (locations with undef arguments are
    dropped: they cannot be real dimensions)."""

    def __init__(self, model: Model, base: State):
        self.m = model
        self.base = base
        self.found: list[Location] = []
        self.seen: set[Location] = set()

    def _record(self, loc: Location):
        if loc not in self.seen:
            self.seen.add(loc)
            self.found.append(loc)

    def _eval_arg(self, t: Term, env: dict) -> Value:
        try:
            return eval_term(self.base, self.m, env, t)
        except EvalError:
            return UNDEF

    def term(self, t: Term, env: dict):
        if isinstance(t, Apply):
            for a in t.args:
                self.term(a, env)
            sym = self.m.symbols.get(t.func)
            if sym is None:
                return
            if sym.kind is Kind.DERIVED:
                inner = {p: self._eval_arg(a, env) for p, a in zip(sym.derived_params, t.args)}
                if "self" in env:
                    inner["self"] = env["self"]
                if sym.result == "bool":
                    self.formula(sym.derived_def, inner)
                else:
                    self.term(sym.derived_def, inner)
                return
            if sym.kind is Kind.STATIC:
                return
            args = tuple(self._eval_arg(a, env) for a in t.args)
            if any(isinstance(a, Undef) for a in args):
                return
            if sym.scope is Scope.LOCAL:
                owner = env.get("self")
                if owner is None:
                    return
                self._record(Location(t.func, args, owner=owner))
            else:
                self._record(Location(t.func, args))

    def formula(self, f: Formula, env: dict):
        if isinstance(f, Eq):
            self.term(f.left, env)
            self.term(f.right, env)
        elif isinstance(f, InDomain):
            self.term(f.item, env)
        elif isinstance(f, InSeq):
            self.term(f.item, env)
            self.term(f.seq, env)
        elif isinstance(f, Not):
            self.formula(f.body, env)
        elif isinstance(f, (And, Or)):
            for x in f.items:
                self.formula(x, env)
        elif isinstance(f, (ForallF, ExistsF)):
            for a in self.m.domains.get(f.domain, ()):
                self.formula(f.body, {**env, f.var: a})

    def rule(self, r: Rule, env: dict):
        if isinstance(r, Assign):
            for a in r.target.args:
                self.term(a, env)
            self.term(r.value, env)
        elif isinstance(r, Cond):
            self.formula(r.guard, env)
            self.rule(r.then, env)
        elif isinstance(r, Block):
            for item in r.items:
                self.rule(item, env)
        elif isinstance(r, ForallRule):
            for a in self.m.domains.get(r.domain, ()):
                self.rule(r.body, {**env, r.var: a})
        elif isinstance(r, Choose):
            candidates: list[Value]
            if r.domain is not None:
                candidates = list(self.m.domains.get(r.domain, ()))
            else:
                self.term(r.seq, env)
                coll = self._eval_arg(r.seq, env)
                candidates = list(coll) if isinstance(coll, tuple) else []
            if not candidates:
                candidates = [UNDEF]
            for c in candidates:
                inner = {**env, r.var: c}
                if r.where is not None:
                    self.formula(r.where, inner)
                if r.ranking is not None:
                    self.term(r.ranking, inner)
                self.rule(r.body, inner)
        elif isinstance(r, Call):
            rdef = self.m.rules.get(r.rule)
            if rdef is None:
                return
            inner = {p: self._eval_arg(a, env) for p, a in zip(rdef.params, r.args)}
            if "self" in env:
                inner["self"] = env["self"]
            for a in r.args:
                self.term(a, env)
            self.rule(rdef.body, inner)


def mentioned_locations(model: Model, base: State, nodes: Iterable[tuple[Node, dict]]) -> list[Location]:
    """Dynamic locations mentioned by the given nodes under their environments."""
    w = _MentionWalker(model, base)
    for node, env in nodes:
        if isinstance(node, (Eq, InDomain, InSeq, Not, And, Or, ForallF, ExistsF)):
            w.formula(node, dict(env))
        elif isinstance(node, (Assign, Cond, Block, ForallRule, Choose, Call)):
            w.rule(node, dict(env))
        else:
            w.term(node, dict(env))
    return w.found


def build_grounding(
    model: Model,
    base: State,
    nodes: Iterable[tuple[Node, dict]],
    cap: int = DEFAULT_STATE_CAP,
) -> GroundingSpace:
    dims = mentioned_locations(model, base, nodes)
    ints = int_samples(model)
    universes: list[tuple[Value, ...]] = []
    exact = True
    for loc in dims:
        sym = model.symbols[loc.func]
        uni, exhaustive = _universe(model, sym.result, ints)
        universes.append(uni)
        exact = exact and exhaustive
    total = 1
    for u in universes:
        total *= len(u)
    capped = total > cap
    return GroundingSpace(
        tuple(dims),
        tuple(universes),
        base,
        exact and not capped,
        capped,
        total,
        cap,
    )
