"""The model type produced by the parser and consumed everywhere else."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from ..core.ast import Formula, Rule, SourcePos, Term
from ..core.signature import Vocabulary
from ..core.values import Atom


@dataclass
class AgentBinding:
    """Binds every atom of a domain as an agent running a rule.

    ``args`` are the actual arguments to the rule; they may mention the
    binding variable ``var``.
    """

    var: str
    domain: str
    rule: str
    args: tuple[Term, ...] = ()
    pos: Optional[SourcePos] = field(default=None, compare=False, repr=False)


@dataclass
class PredicateDef:
    """A named state predicate about one agent, scoped by a domain variable."""

    name: str
    var: str
    domain: str
    formula: Formula
    pos: Optional[SourcePos] = field(default=None, compare=False, repr=False)


@dataclass
class RankingDef:
    """Declares a counter term expected to decrease while a predicate holds.

    The counter term may mention the predicate's variable.
    """

    counter: Term
    predicate: str
    pos: Optional[SourcePos] = field(default=None, compare=False, repr=False)


@dataclass
class Model(Vocabulary):
    """A parsed machine model: vocabulary, initialization, agents, predicates."""

    name: str = ""
    init: tuple[Rule, ...] = ()
    bindings: tuple[AgentBinding, ...] = ()
    predicates: tuple[PredicateDef, ...] = ()
    rankings: tuple[RankingDef, ...] = ()

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Model):
            return NotImplemented
        return (
            self.name == other.name
            and self.domains == other.domains
            and self.symbols == other.symbols
            and self.rules == other.rules
            and self.init == other.init
            and self.bindings == other.bindings
            and self.predicates == other.predicates
            and self.rankings == other.rankings
        )

    # -- agent helpers -------------------------------------------------

    def agents(self) -> tuple[Atom, ...]:
        out: list[Atom] = []
        for b in self.bindings:
            for a in self.domains.get(b.domain, ()):
                if a not in out:
                    out.append(a)
        return tuple(out)

    def binding_for(self, agent: Atom) -> Optional[AgentBinding]:
        for b in self.bindings:
            if any(a == agent for a in self.domains.get(b.domain, ())):
                return b
        return None

    def program_for(self, agent: Atom):
        """The rule body an agent runs, plus its parameter environment."""
        b = self.binding_for(agent)
        if b is None:
            return None
        rdef = self.rules[b.rule]
        return rdef, b

    def predicate(self, name: str) -> Optional[PredicateDef]:
        for p in self.predicates:
            if p.name == name:
                return p
        return None
