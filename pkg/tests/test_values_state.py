"""Value identity and state-as-mapping semantics."""

import pytest

from asmstarve.core.signature import Location
from asmstarve.core.state import (
    InconsistentUpdateError,
    State,
    apply_updates,
    check_consistent,
    clashing_pair,
)
from asmstarve.core.values import UNDEF, Atom, format_value, value_to_json, values_equal

P1 = Atom("philosophers", "p1")
F1 = Atom("forks", "f1")
OWNER_F1 = Location("owner", (F1,))
COUNT = Location("count", ())


def test_bool_and_int_are_distinct_values():
    # Python's True == 1 must not leak into state semantics
    assert not values_equal(True, 1)
    assert not values_equal(False, 0)
    assert values_equal(True, True)
    assert values_equal(1, 1)


def test_undef_is_its_own_value():
    assert values_equal(UNDEF, UNDEF)
    assert not values_equal(UNDEF, False)
    assert format_value(UNDEF) == "undef"


def test_format_value_shapes():
    assert format_value(P1) == "p1"
    assert format_value(True) == "true"
    assert format_value(0) == "0"
    assert format_value((P1, 2)) == "[p1, 2]"


def test_value_to_json_round_trip_shapes():
    assert value_to_json(UNDEF) is None
    assert value_to_json(P1) == "p1"
    assert value_to_json((1, 2)) == [1, 2]


def test_state_never_stores_undef():
    s = State({OWNER_F1: P1})
    s2 = s.with_updates([(OWNER_F1, UNDEF)])
    assert len(s2) == 0
    assert s2.get(OWNER_F1) is UNDEF
    # writing undef into a fresh state is also a no-op entry
    assert len(State({OWNER_F1: UNDEF})) == 0


def test_states_with_equal_reads_compare_equal():
    a = State({OWNER_F1: P1})
    b = State({OWNER_F1: P1, COUNT: UNDEF})
    assert a == b
    assert hash(a) == hash(b)


def test_location_identity_is_by_name_and_args():
    assert Location("owner", (F1,)) == OWNER_F1
    assert repr(OWNER_F1) == "owner(f1)"
    assert repr(COUNT) == "count()"


def test_clashing_pair_detects_conflicts():
    assert clashing_pair([(OWNER_F1, P1), (OWNER_F1, P1)]) is None
    loc, a, b = clashing_pair([(OWNER_F1, P1), (OWNER_F1, UNDEF)])
    assert loc == OWNER_F1
    # bool/int pairs clash even though Python equates them
    assert clashing_pair([(COUNT, True), (COUNT, 1)]) is not None


def test_check_consistent_mirrors_clashing_pair():
    assert check_consistent([(OWNER_F1, P1), (COUNT, 3)])
    assert not check_consistent([(COUNT, 1), (COUNT, 2)])


def test_apply_updates_raises_on_clash():
    s = State()
    with pytest.raises(InconsistentUpdateError):
        apply_updates(s, [(COUNT, 1), (COUNT, 2)])
    s2 = apply_updates(s, [(COUNT, 1), (COUNT, 1)])
    assert s2.get(COUNT) == 1
