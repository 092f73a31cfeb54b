"""States, update sets, consistency, and update application.

A state is an immutable total map from locations to values; locations not
explicitly stored read as undef, and a location is never stored with value
undef (so states that agree on every read compare equal).
"""
from __future__ import annotations

from typing import Iterable, Iterator, Mapping, Optional

from .signature import Location
from .values import UNDEF, Undef, Value, values_equal

Update = tuple[Location, Value]
UpdateSet = frozenset  # frozenset[Update]; duplicate (loc, value) pairs collapse


class InconsistentUpdateError(Exception):
    """Two updates target the same location with different values."""

    def __init__(self, location: Location, a: Value, b: Value):
        self.location = location
        self.values = (a, b)
        super().__init__(f"inconsistent updates to {location!r}: {a!r} vs {b!r}")


class State:
    """Immutable, undef-totalized location-to-value map."""

    __slots__ = ("_data", "_frozen")

    def __init__(self, mapping: Optional[Mapping[Location, Value]] = None):
        data = {}
        if mapping:
            for loc, v in mapping.items():
                if not isinstance(v, Undef):
                    data[loc] = v
        self._data = data
        self._frozen: Optional[frozenset] = None

    def get(self, loc: Location) -> Value:
        return self._data.get(loc, UNDEF)

    def items(self) -> Iterator[Update]:
        return iter(self._data.items())

    def locations(self) -> Iterator[Location]:
        return iter(self._data.keys())

    def with_updates(self, updates: Iterable[Update]) -> "State":
        data = dict(self._data)
        for loc, v in updates:
            if isinstance(v, Undef):
                data.pop(loc, None)
            else:
                data[loc] = v
        s = State.__new__(State)
        s._data = data
        s._frozen = None
        return s

    def freeze(self) -> frozenset:
        if self._frozen is None:
            self._frozen = frozenset(self._data.items())
        return self._frozen

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, State):
            return NotImplemented
        return self._data == other._data

    def __hash__(self) -> int:
        return hash(self.freeze())

    def __len__(self) -> int:
        return len(self._data)

    def __repr__(self) -> str:
        inner = ", ".join(f"{loc!r}={v!r}" for loc, v in sorted(self._data.items(), key=lambda p: repr(p[0])))
        return f"State({inner})"


def clashing_pair(updates: Iterable[Update]) -> Optional[tuple[Location, Value, Value]]:
    """Return a location written with two different values, or None."""
    seen: dict[Location, Value] = {}
    for loc, v in updates:
        if loc in seen and not values_equal(seen[loc], v):
            return (loc, seen[loc], v)
        seen.setdefault(loc, v)
    return None


def check_consistent(updates: Iterable[Update]) -> bool:
    """True iff no two updates write different values to one location.

    Updates writing the same value to the same location collapse and do not
    make the set inconsistent.
    """
    return clashing_pair(updates) is None


def apply_updates(state: State, updates: Iterable[Update]) -> State:
    """Apply a consistent update set; raises InconsistentUpdateError otherwise."""
    ups = list(updates)
    clash = clashing_pair(ups)
    if clash is not None:
        raise InconsistentUpdateError(*clash)
    return state.with_updates(ups)
