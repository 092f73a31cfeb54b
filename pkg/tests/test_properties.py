"""Property suites over randomized states, updates, models, and schedules."""

from hypothesis import given, settings
from hypothesis import strategies as st

from asmstarve.core.eval import collect_updates
from asmstarve.core.signature import Location
from asmstarve.core.state import State, apply_updates, check_consistent
from asmstarve.core.values import UNDEF, Atom
from asmstarve.corpus.builders import aodv_source, dining_philosophers_source
from asmstarve.engine.executor import (
    RandomScheduler,
    RoundRobinScheduler,
    binding_env,
    initial_state,
    run_distributed,
)
from asmstarve.engine.explorer import enumerate_interleavings
from asmstarve.lang import parse_model, pretty_print, validate_model

ATOMS = [Atom("things", c) for c in "abcdef"]
LOCS = [Location("slot", (a,)) for a in ATOMS] + [Location("mark", ())]

values_st = st.one_of(
    st.just(UNDEF),
    st.booleans(),
    st.integers(-3, 3),
    st.sampled_from(ATOMS),
)
state_st = st.dictionaries(st.sampled_from(LOCS), values_st, max_size=6).map(State)
updates_st = st.lists(
    st.tuples(st.sampled_from(LOCS), values_st), max_size=5
).filter(check_consistent)


@given(state_st, updates_st)
def test_apply_updates_frame_property(state, updates):
    # exactly the written locations change; everything else is untouched
    after = apply_updates(state, updates)
    written = {loc: v for loc, v in updates}
    for loc in LOCS:
        if loc in written:
            assert after.get(loc) == written[loc] or (
                written[loc] is UNDEF and after.get(loc) is UNDEF
            )
        else:
            assert after.get(loc) == state.get(loc)


@given(state_st)
def test_reads_of_unset_locations_are_undef(state):
    assert state.get(Location("never_written", ())) is UNDEF


CHOOSE_TEMPLATE = """dasm pick
domain units = {{ u1 }}
domain items = {{ a, b, c, d, e, f }}
function queue : units -> seq monitored
function score : items -> int static
function picked : units -> items controlled
init {{
    queue(u1) := [{queue}]
{scores}
}}
rule Picker() = {{ pick: if picked(self) = undef then choose x in queue(self) max score(x) do picked(self) := x }}
agent u in units runs Picker()
"""


@settings(max_examples=60, deadline=None)
@given(
    queue=st.lists(st.sampled_from("abcdef"), min_size=1, max_size=6, unique=True),
    scores=st.lists(st.integers(0, 5), min_size=6, max_size=6),
)
def test_choose_max_matches_brute_force(queue, scores):
    table = dict(zip("abcdef", scores))
    src = CHOOSE_TEMPLATE.format(
        queue=", ".join(queue),
        scores="\n".join(f"    score({k}) := {v}" for k, v in table.items()),
    )
    res = parse_model(src)
    assert not res.diagnostics, [str(d) for d in res.diagnostics]
    m = res.model
    s = initial_state(m)
    u1 = Atom("units", "u1")
    rdef, _ = m.program_for(u1)
    ups = collect_updates(s, m, binding_env(s, m, u1), rdef.body)
    ((_, chosen),) = ups
    best = max(table[c] for c in queue)
    expect = next(c for c in queue if table[c] == best)
    assert chosen == Atom("items", expect)


@settings(max_examples=30, deadline=None)
@given(state_st, st.integers(0, 100))
def test_collect_updates_is_pure(state, _salt):
    # same state, same env, same rule: identical update lists every call
    res = parse_model(dining_philosophers_source(3))
    m = res.model
    s = initial_state(m)
    p1 = Atom("philosophers", "p1")
    rdef, _ = m.program_for(p1)
    env = binding_env(s, m, p1)
    assert collect_updates(s, m, env, rdef.body) == collect_updates(
        s, m, env, rdef.body
    )


@settings(max_examples=25, deadline=None)
@given(
    n=st.integers(2, 6),
    variant=st.sampled_from(["baseline", "bakery"]),
)
def test_philosopher_family_round_trips(n, variant):
    src = dining_philosophers_source(n, variant)
    res = parse_model(src)
    assert not res.diagnostics
    assert not [d for d in validate_model(res.model) if d.severity == "error"]
    printed = pretty_print(res.model)
    again = parse_model(printed)
    assert not again.diagnostics
    assert pretty_print(again.model) == printed


@settings(max_examples=25, deadline=None)
@given(
    hosts=st.integers(2, 4),
    topology=st.sampled_from(["partitioned", "line"]),
    with_timeout=st.booleans(),
)
def test_routing_family_round_trips(hosts, topology, with_timeout):
    src = aodv_source(hosts=hosts, topology=topology, with_timeout=with_timeout)
    res = parse_model(src)
    assert not res.diagnostics
    assert not [d for d in validate_model(res.model) if d.severity == "error"]
    printed = pretty_print(res.model)
    again = parse_model(printed)
    assert not again.diagnostics
    assert pretty_print(again.model) == printed


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 10_000))
def test_seeded_runs_replay_identically(seed, dp2):
    a = run_distributed(dp2, RandomScheduler(seed=seed), steps=25)
    b = run_distributed(dp2, RandomScheduler(seed=seed), steps=25)
    assert [(s.agent, s.fired, s.state) for s in a.steps] == [
        (s.agent, s.fired, s.state) for s in b.steps
    ]


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 10_000))
def test_every_run_stays_inside_the_explored_graph(seed, dp2):
    g = enumerate_interleavings(dp2, depth=12)
    tr = run_distributed(dp2, RandomScheduler(seed=seed), steps=30)
    for step in tr.steps:
        assert step.state in g.nodes


def test_aodv3_run_stays_inside_the_explored_graph(corpus):
    from conftest import env_for

    e = corpus["aodv3_no_timeout"]
    m = e.model()
    env = env_for("aodv3_no_timeout", "aodv3_line.json")
    g = enumerate_interleavings(m, env_script=env)
    states = {k[1] for k in g.nodes}
    tr = run_distributed(m, RoundRobinScheduler(m.agents()), steps=30, env_script=env)
    for step in tr.steps:
        assert step.state in states


@settings(max_examples=30, deadline=None)
@given(st.lists(st.booleans(), min_size=3, max_size=3))
def test_round_robin_offers_everyone_within_a_window(always_ignored):
    # with every agent applicable, any window of n picks covers all n agents
    agents = [Atom("d", c) for c in "xyz"]
    sch = RoundRobinScheduler(agents)
    picks = [sch.pick(i, agents) for i in range(9)]
    for start in range(0, 9 - 3 + 1):
        assert set(picks[start : start + 3]) == set(agents)


def test_shared_writes_are_single_agent_per_move(dp5):
    # each move is one agent's update set; shared locations get one writer
    tr = run_distributed(dp5, RandomScheduler(seed=13), steps=60)
    shared = {
        s.name for s in dp5.symbols.values() if s.kind.name in ("SHARED", "CONTROLLED")
    }
    for step in tr.steps:
        locs = [loc for loc, _ in step.updates if loc.func in shared]
        assert len(locs) == len(set(locs))
