"""Exhaustive interleaving exploration, coherence, and cycle detection."""

from asmstarve.core.signature import Location
from asmstarve.core.values import Atom
from asmstarve.engine.executor import initial_state
from asmstarve.engine.explorer import (
    agents_independent,
    check_coherence,
    coherence_scan,
    enumerate_interleavings,
    predicate_cycles,
    predicate_nodes,
)

from conftest import env_for


def test_dp2_state_space_is_three_states(dp2):
    # idle, p1 holding both forks, p2 holding both forks
    g = enumerate_interleavings(dp2, depth=12)
    assert len(g.nodes) == 3
    assert g.truncated is False
    assert g.depth_reached == 2
    assert g.inconsistent == []


def test_dp2_no_reachable_single_fork_state(dp2):
    g = enumerate_interleavings(dp2, depth=12)
    p1 = Atom("philosophers", "p1")
    p2 = Atom("philosophers", "p2")
    forks = [Location("owner", (Atom("forks", "f1"),)), Location("owner", (Atom("forks", "f2"),))]
    for state in g.nodes:
        for p in (p1, p2):
            held = sum(1 for loc in forks if state.get(loc) == p)
            assert held in (0, 2), (state, p)


def test_state_budget_truncates(dp5):
    g = enumerate_interleavings(dp5, state_budget=4)
    assert g.truncated is True
    assert len(g.nodes) <= 4


def test_dp2_coherence_scan_reports_dependent_pairs_only(dp2):
    g = enumerate_interleavings(dp2, depth=12)
    scan = coherence_scan(dp2, g)
    # the two philosophers contend for the same forks in every state
    assert len(scan) == 3
    for _, chk in scan:
        assert {chk.first, chk.second} == {"p1", "p2"}


def test_independent_pair_linearizations_commute(dp5):
    s0 = initial_state(dp5)
    agents = dp5.agents()
    p1, p3 = agents[0], agents[2]
    assert agents_independent(dp5, s0, p1, p3)
    chk = check_coherence(dp5, s0, p1, p3)
    assert chk.ab_state == chk.ba_state


def test_neighbours_are_dependent(dp5):
    s0 = initial_state(dp5)
    agents = dp5.agents()
    assert not agents_independent(dp5, s0, agents[0], agents[1])


def test_partitioned_aodv_graph_is_tiny_with_waiting_self_loop(aodv_nt):
    # empty env script: untimed graph, h1 loops on awaitReply forever
    env = env_for("aodv_no_timeout", "aodv2_partitioned.json")
    g = enumerate_interleavings(aodv_nt, env_script=env)
    assert g.time_expanded is False
    assert len(g.nodes) == 2
    assert g.truncated is False
    h1 = Atom("hosts", "h1")
    pred = aodv_nt.predicate("waiting")
    cycles = predicate_cycles(g, aodv_nt, pred, h1)
    assert len(cycles) == 1
    assert len(cycles[0]) == 1  # a self-loop in the waiting region
    nodes = predicate_nodes(g, aodv_nt, pred, h1)
    assert set(cycles[0]) <= set(nodes)


def test_env_script_horizon_caps_time_expansion(corpus):
    # replies arrive at step 4, so node timestamps saturate at 5
    e = corpus["aodv3_no_timeout"]
    m = e.model()
    env = env_for("aodv3_no_timeout", "aodv3_line.json")
    g = enumerate_interleavings(m, env_script=env)
    assert g.time_expanded is True
    assert g.truncated is False
    steps = sorted({k[0] for k in g.nodes})
    assert steps == [0, 1, 2, 3, 4, 5]
    assert len(g.nodes) == 6


def test_quiescent_states_recorded(aodv_t):
    env = env_for("aodv_timeout", "aodv2_partitioned.json")
    g = enumerate_interleavings(aodv_t, env_script=env)
    assert g.truncated is False
    # the request expires and both hosts go quiet for good
    assert len(g.quiescent) >= 1
    assert g.inconsistent == []
