"""Syntax trees for terms, formulas, and transition rules.

Nodes are immutable and compare structurally.  Source positions are carried
for diagnostics but excluded from equality so that a pretty-printed and
re-parsed model is structurally identical to the original.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

from .values import Value


@dataclass(frozen=True)
class SourcePos:
    line: int
    col: int


def _pos_field():
    return field(default=None, compare=False, repr=False)


# ---------------------------------------------------------------- terms


@dataclass(frozen=True)
class Const:
    value: Value
    pos: Optional[SourcePos] = _pos_field()


@dataclass(frozen=True)
class Var:
    name: str
    pos: Optional[SourcePos] = _pos_field()


@dataclass(frozen=True)
class SelfRef:
    pos: Optional[SourcePos] = _pos_field()


@dataclass(frozen=True)
class Apply:
    func: str
    args: tuple["Term", ...] = ()
    pos: Optional[SourcePos] = _pos_field()


Term = Union[Const, Var, SelfRef, Apply]

# Builtin operators usable in Apply position.  They are interpreted natively
# and may not be redeclared as model functions.
BUILTIN_FUNCS = {"append": 2, "+": 2, "-": 2}


# ---------------------------------------------------------------- formulas


@dataclass(frozen=True)
class Eq:
    left: Term
    right: Term
    pos: Optional[SourcePos] = _pos_field()


@dataclass(frozen=True)
class InDomain:
    """Membership of a term's value in a declared finite domain."""

    item: Term
    domain: str
    pos: Optional[SourcePos] = _pos_field()


@dataclass(frozen=True)
class InSeq:
    """Membership of a term's value in a sequence-valued term."""

    item: Term
    seq: Term
    pos: Optional[SourcePos] = _pos_field()


@dataclass(frozen=True)
class Not:
    body: "Formula"
    pos: Optional[SourcePos] = _pos_field()


@dataclass(frozen=True)
class And:
    items: tuple["Formula", ...]
    pos: Optional[SourcePos] = _pos_field()


@dataclass(frozen=True)
class Or:
    items: tuple["Formula", ...]
    pos: Optional[SourcePos] = _pos_field()


@dataclass(frozen=True)
class ForallF:
    var: str
    domain: str
    body: "Formula"
    pos: Optional[SourcePos] = _pos_field()


@dataclass(frozen=True)
class ExistsF:
    var: str
    domain: str
    body: "Formula"
    pos: Optional[SourcePos] = _pos_field()


Formula = Union[Eq, InDomain, InSeq, Not, And, Or, ForallF, ExistsF]


# ---------------------------------------------------------------- rules


@dataclass(frozen=True)
class Assign:
    target: Apply
    value: Term
    label: Optional[str] = None
    pos: Optional[SourcePos] = _pos_field()


@dataclass(frozen=True)
class Cond:
    guard: Formula
    then: "Rule"
    label: Optional[str] = None
    pos: Optional[SourcePos] = _pos_field()


@dataclass(frozen=True)
class Block:
    items: tuple["Rule", ...]
    label: Optional[str] = None
    pos: Optional[SourcePos] = _pos_field()


@dataclass(frozen=True)
class ForallRule:
    var: str
    domain: str
    body: "Rule"
    label: Optional[str] = None
    pos: Optional[SourcePos] = _pos_field()


@dataclass(frozen=True)
class Choose:
    """Deterministic choice: pick the unique candidate satisfying ``where``
    that maximizes ``ranking`` (ties broken by candidate order)."""

    var: str
    domain: Optional[str]  # declared domain name, or None when seq is given
    seq: Optional[Term]  # sequence-valued collection, or None
    where: Optional[Formula]
    ranking: Optional[Term]
    body: "Rule"
    label: Optional[str] = None
    pos: Optional[SourcePos] = _pos_field()


@dataclass(frozen=True)
class Call:
    rule: str
    args: tuple[Term, ...] = ()
    label: Optional[str] = None
    pos: Optional[SourcePos] = _pos_field()


@dataclass(frozen=True)
class Skip:
    label: Optional[str] = None
    pos: Optional[SourcePos] = _pos_field()


Rule = Union[Assign, Cond, Block, ForallRule, Choose, Call, Skip]


def with_label(rule: Rule, label: Optional[str]) -> Rule:
    from dataclasses import replace

    return replace(rule, label=label)


def flatten_conjuncts(f: Formula) -> tuple[Formula, ...]:
    """Split a formula into its top-level conjuncts (an ``And`` flattens,
    anything else is a single conjunct)."""
    if isinstance(f, And):
        out: list[Formula] = []
        for item in f.items:
            out.extend(flatten_conjuncts(item))
        return tuple(out)
    return (f,)
