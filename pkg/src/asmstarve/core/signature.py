"""Function signatures, locations, and the vocabulary shared by all machines."""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional, Union

from .ast import Formula, Term
from .values import Atom, Value

# Result types that are not declared domains.
BUILTIN_RESULT_TYPES = ("bool", "int", "seq")


class Kind(str, enum.Enum):
    """Who may write a function: the machine itself, its environment, both,
    neither (static / computed), or write-only output."""

    STATIC = "static"
    CONTROLLED = "controlled"
    MONITORED = "monitored"
    SHARED = "shared"
    DERIVED = "derived"
    OUT = "out"


class Scope(str, enum.Enum):
    GLOBAL = "global"
    LOCAL = "local"  # locations are namespaced by the owning agent


@dataclass(frozen=True)
class FunctionSymbol:
    name: str
    arg_domains: tuple[str, ...]
    result: str  # declared domain name or one of BUILTIN_RESULT_TYPES
    kind: Kind
    scope: Scope = Scope.GLOBAL
    # Only for derived symbols: formal parameter names and the defining
    # expression (a Formula when result is bool, a Term otherwise).
    derived_params: tuple[str, ...] = ()
    derived_def: Optional[Union[Term, Formula]] = None

    @property
    def arity(self) -> int:
        return len(self.arg_domains)


@dataclass(frozen=True)
class Location:
    """A function name applied to a tuple of argument values.  Locations of
    agent-local symbols additionally carry the owning agent."""

    func: str
    args: tuple[Value, ...] = ()
    owner: Optional[Value] = None

    def __repr__(self) -> str:
        from .values import format_value

        inner = ", ".join(format_value(a) for a in self.args)
        base = f"{self.func}({inner})"
        if self.owner is not None:
            return f"{format_value(self.owner)}.{base}"
        return base


@dataclass
class RuleDef:
    """A named, parameterized rule definition."""

    name: str
    params: tuple[str, ...]
    body: "Rule"  # noqa: F821  (core.ast.Rule)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, RuleDef):
            return NotImplemented
        return (self.name, self.params, self.body) == (other.name, other.params, other.body)


@dataclass
class Vocabulary:
    """Declared domains, function symbols, and rule definitions.

    ``domains`` maps a domain name to its atoms in declaration order; that
    order is the tie-break order for ``choose``.
    """

    domains: dict[str, tuple[Atom, ...]] = field(default_factory=dict)
    symbols: dict[str, FunctionSymbol] = field(default_factory=dict)
    rules: dict[str, RuleDef] = field(default_factory=dict)

    def atom(self, name: str) -> Optional[Atom]:
        for atoms in self.domains.values():
            for a in atoms:
                if a.name == name:
                    return a
        return None
