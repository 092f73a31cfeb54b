"""Runtime values stored in machine states.

A value is a boolean, an integer, an atom of a declared finite domain,
a finite sequence of values (a tuple), or the distinguished ``undef``.
Agents are represented by the atom naming them in their domain.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Union


class Undef:
    """The undefined value. A singleton; compares equal only to itself."""

    _instance: "Undef | None" = None
    __slots__ = ()

    def __new__(cls) -> "Undef":
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "undef"


UNDEF = Undef()


@dataclass(frozen=True)
class Atom:
    """A named element of a declared finite domain."""

    domain: str
    name: str

    def __repr__(self) -> str:
        return self.name


Value = Union[bool, int, Atom, Undef, tuple]


def values_equal(a: Value, b: Value) -> bool:
    """Total equality on values.

    Python's ``==`` conflates True with 1; machine values keep booleans and
    integers distinct, so comparison goes through here everywhere equality
    has semantic weight.
    """
    if isinstance(a, bool) != isinstance(b, bool):
        return False
    if isinstance(a, tuple) and isinstance(b, tuple):
        return len(a) == len(b) and all(values_equal(x, y) for x, y in zip(a, b))
    if isinstance(a, tuple) != isinstance(b, tuple):
        return False
    return a == b


def format_value(v: Value) -> str:
    """Render a value in source-text form (``undef``, ``true``, atom names)."""
    if isinstance(v, Undef):
        return "undef"
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, Atom):
        return v.name
    if isinstance(v, tuple):
        return "[" + ", ".join(format_value(x) for x in v) + "]"
    return str(v)


def value_to_json(v: Value) -> object:
    """Encode a value for JSON output. Atoms become their names, undef becomes null."""
    if isinstance(v, Undef):
        return None
    if isinstance(v, Atom):
        return v.name
    if isinstance(v, tuple):
        return [value_to_json(x) for x in v]
    return v
