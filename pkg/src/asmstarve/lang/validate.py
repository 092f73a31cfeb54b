"""Static validation of parsed models.

Errors cover kind violations (writes to monitored/derived symbols, static
writes outside initialization, reads of out symbols), arity and simple type
mismatches, derived-definition and call cycles, overlapping agent bindings,
and malformed initialization.  Warnings cover unused symbols and predicates
that depend on no location.
"""
from __future__ import annotations

from typing import Iterable, Optional

from ..core.ast import (
    And,
    Apply,
    Assign,
    Block,
    BUILTIN_FUNCS,
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
    SelfRef,
    Skip,
    SourcePos,
    Term,
    Var,
)
from ..core.signature import Kind, Scope
from ..core.values import Atom, Undef
from .diagnostics import Diagnostic
from .model import Model


class _Validator:
    def __init__(self, model: Model, filename: str):
        self.m = model
        self.filename = filename
        self.diags: list[Diagnostic] = []
        self.read_symbols: set[str] = set()
        self.written_by_rules: set[str] = set()

    def error(self, message: str, pos: Optional[SourcePos]):
        self.diags.append(Diagnostic("error", message, self.filename, pos.line if pos else 0, pos.col if pos else 0))

    def warning(self, message: str, pos: Optional[SourcePos]):
        self.diags.append(Diagnostic("warning", message, self.filename, pos.line if pos else 0, pos.col if pos else 0))

    # -- term/formula walks ----------------------------------------------

    def term_type(self, t: Term) -> Optional[str]:
        """Best-effort static type: a domain name, 'bool', 'int', 'seq', or None."""
        if isinstance(t, Const):
            v = t.value
            if isinstance(v, Undef):
                return None
            if isinstance(v, bool):
                return "bool"
            if isinstance(v, int):
                return "int"
            if isinstance(v, tuple):
                return "seq"
            if isinstance(v, Atom):
                return v.domain
            return None
        if isinstance(t, Apply):
            if t.func in ("+", "-"):
                return "int"
            if t.func == "append":
                return "seq"
            sym = self.m.symbols.get(t.func)
            return sym.result if sym else None
        return None

    def check_term(self, t: Term, scope: set[str], ctx: str):
        if isinstance(t, Const):
            return
        if isinstance(t, Var):
            if t.name not in scope:
                self.error(f"unbound variable {t.name}", t.pos)
            return
        if isinstance(t, SelfRef):
            if ctx != "rule":
                self.error(f"self is not available in {ctx} context", t.pos)
            return
        if isinstance(t, Apply):
            if t.func in BUILTIN_FUNCS:
                if len(t.args) != BUILTIN_FUNCS[t.func]:
                    self.error(f"{t.func} expects {BUILTIN_FUNCS[t.func]} arguments", t.pos)
                for a in t.args:
                    self.check_term(a, scope, ctx)
                return
            sym = self.m.symbols.get(t.func)
            if sym is None:
                self.error(f"unknown function {t.func}", t.pos)
                return
            self.read_symbols.add(sym.name)
            if sym.kind is Kind.OUT:
                self.error(f"out symbol {sym.name} may not be read", t.pos)
            if sym.scope is Scope.LOCAL and ctx != "rule":
                self.error(f"agent-local symbol {sym.name} is not available in {ctx} context", t.pos)
            if len(t.args) != sym.arity:
                self.error(f"{sym.name} expects {sym.arity} arguments, got {len(t.args)}", t.pos)
            for a, dom in zip(t.args, sym.arg_domains):
                self.check_term(a, scope, ctx)
                at = self.term_type(a)
                if at is not None and at != dom:
                    self.error(f"argument of {sym.name} has type {at}, expected {dom}", t.pos)
            return
        self.error(f"malformed term {t!r}", getattr(t, "pos", None))

    def check_formula(self, f: Formula, scope: set[str], ctx: str):
        if isinstance(f, Eq):
            self.check_term(f.left, scope, ctx)
            self.check_term(f.right, scope, ctx)
        elif isinstance(f, InDomain):
            if f.domain not in self.m.domains:
                self.error(f"unknown domain {f.domain}", f.pos)
            self.check_term(f.item, scope, ctx)
        elif isinstance(f, InSeq):
            self.check_term(f.item, scope, ctx)
            self.check_term(f.seq, scope, ctx)
            st = self.term_type(f.seq)
            if st is not None and st != "seq":
                self.error(f"membership target has type {st}, expected seq", f.pos)
        elif isinstance(f, Not):
            self.check_formula(f.body, scope, ctx)
        elif isinstance(f, (And, Or)):
            for x in f.items:
                self.check_formula(x, scope, ctx)
        elif isinstance(f, (ForallF, ExistsF)):
            if f.domain not in self.m.domains:
                self.error(f"unknown domain {f.domain}", f.pos)
            self.check_formula(f.body, scope | {f.var}, ctx)
        else:
            self.error(f"malformed formula {f!r}", getattr(f, "pos", None))

    # -- rule walk ----------------------------------------------------------

    def check_rule(self, r: Rule, scope: set[str], ctx: str, labels_seen: Optional[set[str]] = None):
        if r.label is not None and labels_seen is not None:
            if r.label in labels_seen:
                self.error(f"duplicate rule label {r.label}", r.pos)
            labels_seen.add(r.label)
        if isinstance(r, Skip):
            if ctx == "init":
                self.error("initialization allows only assignments and foralls", r.pos)
            return
        if isinstance(r, Assign):
            sym = self.m.symbols.get(r.target.func)
            if sym is None:
                self.error(f"unknown function {r.target.func}", r.pos)
                return
            if sym.kind is Kind.DERIVED:
                self.error(f"derived symbol {sym.name} cannot be written", r.pos)
            elif ctx == "rule":
                self.written_by_rules.add(sym.name)
                if sym.kind is Kind.STATIC:
                    self.error(f"static symbol {sym.name} may only be written during initialization", r.pos)
                elif sym.kind is Kind.MONITORED:
                    self.error(f"monitored symbol {sym.name} may only be written by the environment", r.pos)
            if sym.scope is Scope.LOCAL and ctx == "init":
                self.error(f"agent-local symbol {sym.name} cannot be initialized globally", r.pos)
            if len(r.target.args) != sym.arity:
                self.error(f"{sym.name} expects {sym.arity} arguments, got {len(r.target.args)}", r.pos)
            for a, dom in zip(r.target.args, sym.arg_domains):
                self.check_term(a, scope, ctx)
                at = self.term_type(a)
                if at is not None and at != dom:
                    self.error(f"argument of {sym.name} has type {at}, expected {dom}", r.pos)
            self.check_term(r.value, scope, ctx)
            vt = self.term_type(r.value)
            if vt is not None and vt != sym.result:
                self.error(f"value of type {vt} assigned to {sym.name} with result domain {sym.result}", r.pos)
            return
        if isinstance(r, Cond):
            if ctx == "init":
                self.error("initialization allows only assignments and foralls", r.pos)
            self.check_formula(r.guard, scope, ctx)
            self.check_rule(r.then, scope, ctx)
            return
        if isinstance(r, Block):
            inner_labels: set[str] = set()
            for item in r.items:
                self.check_rule(item, scope, ctx, inner_labels)
            return
        if isinstance(r, ForallRule):
            if r.domain not in self.m.domains:
                self.error(f"unknown domain {r.domain}", r.pos)
            self.check_rule(r.body, scope | {r.var}, ctx)
            return
        if isinstance(r, Choose):
            if ctx == "init":
                self.error("initialization allows only assignments and foralls", r.pos)
            if r.domain is not None and r.domain not in self.m.domains:
                self.error(f"unknown domain {r.domain}", r.pos)
            if r.seq is not None:
                self.check_term(r.seq, scope, ctx)
            inner = scope | {r.var}
            if r.where is not None:
                self.check_formula(r.where, inner, ctx)
            if r.ranking is not None:
                self.check_term(r.ranking, inner, ctx)
            self.check_rule(r.body, inner, ctx)
            return
        if isinstance(r, Call):
            if ctx == "init":
                self.error("initialization allows only assignments and foralls", r.pos)
            rdef = self.m.rules.get(r.rule)
            if rdef is None:
                self.error(f"unknown rule {r.rule}", r.pos)
                return
            if len(r.args) != len(rdef.params):
                self.error(f"rule {rdef.name} expects {len(rdef.params)} arguments, got {len(r.args)}", r.pos)
            for a in r.args:
                self.check_term(a, scope, ctx)
            return
        self.error(f"malformed rule {r!r}", getattr(r, "pos", None))

    # -- cycles ----------------------------------------------------------

    def _derived_refs(self, node) -> set[str]:
        out: set[str] = set()

        def walk_term(t: Term):
            if isinstance(t, Apply):
                sym = self.m.symbols.get(t.func)
                if sym is not None and sym.kind is Kind.DERIVED:
                    out.add(sym.name)
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

        if isinstance(node, (Eq, InDomain, InSeq, Not, And, Or, ForallF, ExistsF)):
            walk_formula(node)
        else:
            walk_term(node)
        return out

    def check_derived_cycles(self):
        graph = {
            s.name: self._derived_refs(s.derived_def)
            for s in self.m.symbols.values()
            if s.kind is Kind.DERIVED and s.derived_def is not None
        }
        state: dict[str, int] = {}

        def visit(name: str, path: list[str]) -> bool:
            if state.get(name) == 2:
                return False
            if state.get(name) == 1:
                cycle = " -> ".join(path[path.index(name):] + [name])
                self.error(f"cycle in derived definitions: {cycle}", None)
                return True
            state[name] = 1
            for dep in sorted(graph.get(name, ())):
                if visit(dep, path + [name]):
                    return True
            state[name] = 2
            return False

        for name in graph:
            if visit(name, []):
                break

    def check_call_cycles(self):
        def calls_in(r: Rule) -> set[str]:
            out: set[str] = set()
            if isinstance(r, Call):
                out.add(r.rule)
            elif isinstance(r, Cond):
                out |= calls_in(r.then)
            elif isinstance(r, Block):
                for item in r.items:
                    out |= calls_in(item)
            elif isinstance(r, (ForallRule, Choose)):
                out |= calls_in(r.body)
            return out

        graph = {name: calls_in(rdef.body) for name, rdef in self.m.rules.items()}
        state: dict[str, int] = {}

        def visit(name: str, path: list[str]) -> bool:
            if state.get(name) == 2:
                return False
            if state.get(name) == 1:
                cycle = " -> ".join(path[path.index(name):] + [name])
                self.error(f"cycle in rule calls: {cycle}", None)
                return True
            state[name] = 1
            for dep in sorted(graph.get(name, ())):
                if dep in graph and visit(dep, path + [name]):
                    return True
            state[name] = 2
            return False

        for name in graph:
            if visit(name, []):
                break

    # -- top level ----------------------------------------------------------

    def run(self) -> list[Diagnostic]:
        m = self.m
        for sym in m.symbols.values():
            for dom in sym.arg_domains:
                if dom not in m.domains:
                    self.error(f"unknown argument domain {dom} of {sym.name}", None)
            if sym.result not in m.domains and sym.result not in ("bool", "int", "seq"):
                self.error(f"unknown result domain {sym.result} of {sym.name}", None)
            if sym.kind is Kind.DERIVED:
                if sym.derived_def is None:
                    self.error(f"derived symbol {sym.name} has no definition", None)
                else:
                    ctx = "derived"
                    if sym.result == "bool":
                        self.check_formula(sym.derived_def, set(sym.derived_params), ctx)
                    else:
                        self.check_term(sym.derived_def, set(sym.derived_params), ctx)
        self.check_derived_cycles()
        self.check_call_cycles()

        for item in m.init:
            self.check_rule(item, set(), "init")

        for rdef in m.rules.values():
            top_labels: set[str] = set()
            self.check_rule(rdef.body, set(rdef.params), "rule", top_labels)

        bound_agents: dict[Atom, str] = {}
        for b in m.bindings:
            if b.domain not in m.domains:
                self.error(f"unknown domain {b.domain}", b.pos)
                continue
            rdef = m.rules.get(b.rule)
            if rdef is None:
                self.error(f"unknown rule {b.rule}", b.pos)
                continue
            if len(b.args) != len(rdef.params):
                self.error(f"rule {b.rule} expects {len(rdef.params)} arguments, got {len(b.args)}", b.pos)
            for a in b.args:
                self.check_term(a, {b.var}, "binding")
            for atom in m.domains[b.domain]:
                if atom in bound_agents:
                    self.error(f"agent {atom.name} is bound more than once", b.pos)
                bound_agents[atom] = b.rule

        for p in m.predicates:
            if p.domain not in m.domains:
                self.error(f"unknown domain {p.domain}", p.pos)
            self.check_formula(p.formula, {p.var}, "predicate")
            if not self._derived_refs(p.formula) and not self._mentions_symbol(p.formula):
                self.warning(f"predicate {p.name} depends on no location", p.pos)

        for r in m.rankings:
            pred = m.predicate(r.predicate)
            if pred is None:
                self.error(f"unknown predicate {r.predicate}", r.pos)
                continue
            self.check_term(r.counter, {pred.var}, "predicate")
            if isinstance(r.counter, Apply):
                sym = m.symbols.get(r.counter.func)
                if sym is not None:
                    if sym.result != "int":
                        self.error(f"ranking counter {sym.name} must have result domain int", r.pos)
                    elif sym.kind is not Kind.CONTROLLED:
                        self.warning(f"ranking counter {sym.name} is {sym.kind.value}, expected controlled", r.pos)

        used = self.read_symbols | self.written_by_rules
        for item in m.init:
            used |= _written_symbols(item)
        for sym in m.symbols.values():
            if sym.name not in used:
                self.warning(f"symbol {sym.name} is never used", None)
        return self.diags

    def _mentions_symbol(self, f: Formula) -> bool:
        found = False

        def walk_term(t: Term):
            nonlocal found
            if isinstance(t, Apply):
                if t.func in self.m.symbols:
                    found = True
                for a in t.args:
                    walk_term(a)

        def walk(f: Formula):
            if isinstance(f, Eq):
                walk_term(f.left)
                walk_term(f.right)
            elif isinstance(f, InDomain):
                walk_term(f.item)
            elif isinstance(f, InSeq):
                walk_term(f.item)
                walk_term(f.seq)
            elif isinstance(f, Not):
                walk(f.body)
            elif isinstance(f, (And, Or)):
                for x in f.items:
                    walk(x)
            elif isinstance(f, (ForallF, ExistsF)):
                walk(f.body)

        walk(f)
        return found


def _written_symbols(r: Rule) -> set[str]:
    if isinstance(r, Assign):
        return {r.target.func}
    if isinstance(r, Cond):
        return _written_symbols(r.then)
    if isinstance(r, Block):
        out: set[str] = set()
        for item in r.items:
            out |= _written_symbols(item)
        return out
    if isinstance(r, (ForallRule, Choose)):
        return _written_symbols(r.body)
    return set()


def validate_model(model: Model, filename: str = "<input>") -> list[Diagnostic]:
    """Validate a model; returns diagnostics (possibly empty)."""
    return _Validator(model, filename).run()
