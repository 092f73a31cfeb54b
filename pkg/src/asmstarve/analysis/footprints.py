"""Syntactic read/write footprints of rules.

The unit of analysis is the *assignment occurrence*: one textual assignment
together with the reads that decide whether and what it writes, namely the
guards on its own path (conditionals and choose filters it sits under) and
the symbols read by its right-hand side and target arguments.  Occurrence
granularity matters: two writers of one symbol under different guards are
judged separately, and pooling a whole rule's guards would poison writers
that are in fact insensitive to the environment.

Rule calls are inlined (the call graph is acyclic), so an occurrence inside a
helper is charged to every calling top-level rule, under that path's guards.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

from ..core.ast import (
    And,
    Apply,
    Assign,
    Block,
    Call,
    Choose,
    Cond,
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
    SourcePos,
    Term,
    Var,
    flatten_conjuncts,
)
from ..core.eval import MAX_CALL_DEPTH
from ..core.signature import Kind
from ..core.values import Atom
from ..lang.model import Model


def term_symbols(model: Model, t: Term) -> frozenset[str]:
    """Declared function symbols a term reads (derived symbols by name)."""
    out: set[str] = set()

    def walk(t: Term):
        if isinstance(t, Apply):
            if t.func in model.symbols:
                out.add(t.func)
            for a in t.args:
                walk(a)

    walk(t)
    return frozenset(out)


def formula_symbols(model: Model, f: Formula) -> frozenset[str]:
    out: set[str] = set()
    if isinstance(f, Eq):
        out |= term_symbols(model, f.left) | term_symbols(model, f.right)
    elif isinstance(f, InDomain):
        out |= term_symbols(model, f.item)
    elif isinstance(f, InSeq):
        out |= term_symbols(model, f.item) | term_symbols(model, f.seq)
    elif isinstance(f, Not):
        out |= formula_symbols(model, f.body)
    elif isinstance(f, (And, Or)):
        for x in f.items:
            out |= formula_symbols(model, x)
    elif isinstance(f, (ForallF, ExistsF)):
        out |= formula_symbols(model, f.body)
    return frozenset(out)


@dataclass(frozen=True)
class WriteOccurrence:
    """One assignment occurrence, with the reads that decide it."""

    symbol: str
    entry: str  # bound top-level rule definition this path starts from
    member_label: str  # top-level rule within the entry program
    ordinal: int  # distinguishes occurrences within one member
    guard_reads: frozenset[str]  # guards on the path, choose filters included
    value_reads: frozenset[str]  # right-hand side and target arguments
    pos: Optional[SourcePos] = field(default=None, compare=False, repr=False)

    @property
    def reads(self) -> frozenset[str]:
        return self.guard_reads | self.value_reads

    @property
    def id(self) -> str:
        return f"{self.entry}.{self.member_label}[{self.ordinal}]"


@dataclass
class ProgramRule:
    """A top-level member of a bound program, the unit rules are reported by."""

    entry: str
    label: str
    index: int
    member: Rule
    top_guard: Optional[Formula]  # outermost conditional's guard, if any
    top_conjuncts: tuple[tuple[Formula, frozenset[str]], ...]
    writes: tuple[WriteOccurrence, ...]
    write_symbols: frozenset[str]
    read_symbols: frozenset[str]
    agents: tuple[Atom, ...]  # agents bound to this entry

    @property
    def id(self) -> str:
        return f"{self.entry}.{self.label}"


@dataclass
class ModelFootprint:
    program_rules: tuple[ProgramRule, ...]
    occurrences: tuple[WriteOccurrence, ...]  # all, across program rules
    writers_of: dict[str, tuple[WriteOccurrence, ...]]
    init_writes: frozenset[str]
    env_writable: frozenset[str]  # monitored and shared symbols

    def rule_by_id(self, rule_id: str) -> Optional[ProgramRule]:
        for pr in self.program_rules:
            if pr.id == rule_id:
                return pr
        return None


class _Collector:
    def __init__(self, model: Model, entry: str, member_label: str):
        self.m = model
        self.entry = entry
        self.member_label = member_label
        self.occurrences: list[WriteOccurrence] = []
        self.reads: set[str] = set()

    def walk(self, r: Rule, guards: frozenset[str], depth: int = 0):
        if depth > MAX_CALL_DEPTH:
            raise RecursionError(f"rule call nesting too deep under {self.entry}")
        if isinstance(r, Assign):
            value_reads = term_symbols(self.m, r.value)
            for a in r.target.args:
                value_reads |= term_symbols(self.m, a)
            self.reads |= value_reads
            self.occurrences.append(
                WriteOccurrence(
                    r.target.func,
                    self.entry,
                    self.member_label,
                    len(self.occurrences),
                    guards,
                    value_reads,
                    r.pos,
                )
            )
        elif isinstance(r, Cond):
            gsyms = formula_symbols(self.m, r.guard)
            self.reads |= gsyms
            self.walk(r.then, guards | gsyms, depth)
        elif isinstance(r, Block):
            for item in r.items:
                self.walk(item, guards, depth)
        elif isinstance(r, ForallRule):
            self.walk(r.body, guards, depth)
        elif isinstance(r, Choose):
            aux: frozenset[str] = frozenset()
            if r.seq is not None:
                aux |= term_symbols(self.m, r.seq)
            if r.where is not None:
                aux |= formula_symbols(self.m, r.where)
            if r.ranking is not None:
                aux |= term_symbols(self.m, r.ranking)
            self.reads |= aux
            self.walk(r.body, guards | aux, depth)
        elif isinstance(r, Call):
            rdef = self.m.rules.get(r.rule)
            if rdef is None:
                return
            for a in r.args:
                arg_syms = term_symbols(self.m, a)
                self.reads |= arg_syms
                guards = guards | arg_syms  # argument reads decide what the callee writes
            self.walk(rdef.body, guards, depth + 1)
        # Skip: nothing


def _member_writes(model: Model, entry: str, label: str, member: Rule) -> tuple[list[WriteOccurrence], set[str]]:
    c = _Collector(model, entry, label)
    if isinstance(member, Cond):
        gsyms = formula_symbols(model, member.guard)
        c.reads |= gsyms
        c.walk(member.then, frozenset(gsyms))
    else:
        c.walk(member, frozenset())
    return c.occurrences, c.reads


def compute_footprint(model: Model) -> ModelFootprint:
    from ..core.eval import member_label, program_members

    entries: dict[str, list[Atom]] = {}
    for agent in model.agents():
        b = model.binding_for(agent)
        entries.setdefault(b.rule, []).append(agent)

    program_rules: list[ProgramRule] = []
    all_occ: list[WriteOccurrence] = []
    for entry, agents in entries.items():
        body = model.rules[entry].body
        for i, member in enumerate(program_members(body)):
            label = member_label(member, i)
            occs, reads = _member_writes(model, entry, label, member)
            if isinstance(member, Cond):
                top_guard: Optional[Formula] = member.guard
                conjuncts = tuple(
                    (c, formula_symbols(model, c)) for c in flatten_conjuncts(member.guard)
                )
            else:
                top_guard = None
                conjuncts = ()
            program_rules.append(
                ProgramRule(
                    entry,
                    label,
                    i,
                    member,
                    top_guard,
                    conjuncts,
                    tuple(occs),
                    frozenset(o.symbol for o in occs),
                    frozenset(reads),
                    tuple(agents),
                )
            )
            all_occ.extend(occs)

    init_writes: set[str] = set()

    def init_walk(r: Rule):
        if isinstance(r, Assign):
            init_writes.add(r.target.func)
        elif isinstance(r, Cond):
            init_walk(r.then)
        elif isinstance(r, Block):
            for item in r.items:
                init_walk(item)
        elif isinstance(r, (ForallRule, Choose)):
            init_walk(r.body)

    for item in model.init:
        init_walk(item)

    writers: dict[str, list[WriteOccurrence]] = {}
    for o in all_occ:
        writers.setdefault(o.symbol, []).append(o)

    env_writable = frozenset(
        s.name for s in model.symbols.values() if s.kind in (Kind.MONITORED, Kind.SHARED)
    )
    return ModelFootprint(
        tuple(program_rules),
        tuple(all_occ),
        {k: tuple(v) for k, v in writers.items()},
        frozenset(init_writes),
        env_writable,
    )
