"""Acceptance suite: ten scenario criteria, one test and one verdict line each.

Every expected value below is an exact frozen constant (no tolerances) except
criterion 5's wall-clock bound, which is a hard upper limit of 10 seconds.
Run with ``pytest -v`` for the per-criterion pass/fail lines, or ``-s`` to see
the verdict banners.
"""

import time

from asmstarve.analysis import (
    analyze_model,
    check_necessity,
    find_starvation_cycles,
    verify_all_rankings,
)
from asmstarve.core.signature import Location
from asmstarve.core.values import Atom
from asmstarve.engine.executor import (
    RandomScheduler,
    RoundRobinScheduler,
    run_distributed,
    scripted_from_names,
    trace_to_jsonl,
)
from asmstarve.engine.explorer import (
    agents_independent,
    check_coherence,
    coherence_scan,
    enumerate_interleavings,
)
from asmstarve.monitor import annotate_trace, detect_cyclical_return, progress_summary

from conftest import env_for


def verdict(n, text):
    print(f"\nacceptance {n:02d}: PASS - {text}")


def test_criterion_01_dp5_baseline_verdicts(dp5):
    """DP(5): risky functions, predicate split, vulnerable rule, no certificate."""
    rep = analyze_model(dp5)
    assert rep.risky.risky == ("owner",)
    verdicts = {v.name: v.verdict for v in rep.predicates}
    assert verdicts == {"eating": "not-risky", "thinking": "risky"}
    assert rep.vulnerable == ("Philosopher.takeForks",)
    assert rep.certificate is False
    verdict(1, "dp5 risky={owner}, thinking risky, takeForks flagged, no certificate")


def test_criterion_02_dp5_bakery_still_vulnerable(dp5_bakery):
    """Bakery turn-taking keeps the fork grab vulnerable, with the caveat note."""
    rep = analyze_model(dp5_bakery)
    assert rep.vulnerable == ("Philosopher.takeForks",)
    assert any("necessary-condition" in n for n in rep.notes)
    verdict(2, "bakery variant still flags takeForks; caveat present in report")


def test_criterion_03_partitioned_aodv_flag_and_alarm(aodv_nt):
    """No-timeout AODV: static flag on the reply wait plus a runtime alarm."""
    env = env_for("aodv_no_timeout", "aodv2_partitioned.json")
    rep = analyze_model(aodv_nt, env_script=env)
    assert rep.vulnerable == ("Initiator.awaitReply",)
    tr = run_distributed(
        aodv_nt, RoundRobinScheduler(aodv_nt.agents()), steps=100, env_script=env
    )
    at = annotate_trace(aodv_nt, tr)
    alarms = detect_cyclical_return(at, "waiting", "h1", 20)
    assert [(a.start_step, a.length) for a in alarms] == [(0, 100)]
    verdict(3, "awaitReply flagged; 100-move waiting alarm at threshold 20")


def test_criterion_04_timeout_certificate_and_bounded_wait(aodv_t):
    """Timeout AODV: certificate, and waiting bounded by timeout_init + 1 = 6
    consecutive initiator moves in every seeded run."""
    rep = analyze_model(aodv_t)
    assert rep.vulnerable == ()
    assert rep.certificate is True
    env = env_for("aodv_timeout", "aodv2_partitioned.json")
    for seed in (0, 1, 7, 42, 1234):
        tr = run_distributed(
            aodv_t, RandomScheduler(seed=seed), steps=100, env_script=env
        )
        at = annotate_trace(aodv_t, tr)
        stats = {(s.predicate, s.agent): s for s in progress_summary(at)}
        assert stats[("waiting", "h1")].longest_run <= 6, seed
        assert stats[("waiting", "h2")].longest_run <= 6, seed
        (check,) = verify_all_rankings(aodv_t, tr)
        assert check.ok is True, seed
    verdict(4, "certificate issued; waiting never exceeds 6 consecutive moves")


def test_criterion_05_dp2_exhaustive_exploration_is_clean_and_fast(dp2):
    """DP(2) to depth 12: no inconsistent update sets, no single-fork states,
    all inside 10 seconds."""
    t0 = time.monotonic()
    g = enumerate_interleavings(dp2, depth=12)
    elapsed = time.monotonic() - t0
    assert g.inconsistent == []
    assert g.truncated is False
    forks = [
        Location("owner", (Atom("forks", "f1"),)),
        Location("owner", (Atom("forks", "f2"),)),
    ]
    for state in g.nodes:
        for p in ("p1", "p2"):
            held = sum(1 for loc in forks if getattr(state.get(loc), "name", None) == p)
            assert held in (0, 2)
    assert elapsed < 10.0
    verdict(5, f"3 states, 0 inconsistent, 0 single-fork, {elapsed:.3f}s")


def test_criterion_06_coherence_certifies_only_commuting_pairs(dp2, dp5):
    """Independent pairs commute; dependent pairs are reported, never certified."""
    g = enumerate_interleavings(dp2, depth=12)
    reported = {(id(None), None)}
    scan = coherence_scan(dp2, g)
    divergent = {(key, chk.first, chk.second) for key, chk in scan}
    p1, p2 = dp2.agents()
    checked = 0
    for state in g.nodes:
        if agents_independent(dp2, state, p1, p2):
            chk = check_coherence(dp2, state, p1, p2)
            assert chk.ab_state == chk.ba_state
            assert (state, "p1", "p2") not in divergent
        else:
            chk = check_coherence(dp2, state, p1, p2)
            if chk.ab_state != chk.ba_state:
                assert (state, "p1", "p2") in divergent
        checked += 1
    assert checked == 3
    assert len(scan) == 3  # every dp2 state carries a fork conflict
    # a genuinely independent pair on the larger table commutes from the start
    agents5 = dp5.agents()
    from asmstarve.engine.executor import initial_state

    s0 = initial_state(dp5)
    assert agents_independent(dp5, s0, agents5[0], agents5[2])
    chk = check_coherence(dp5, s0, agents5[0], agents5[2])
    assert chk.ab_state == chk.ba_state
    verdict(6, "3 dependent pairs reported; independent pairs commute")


def test_criterion_07_syntactic_and_exploration_verdicts_agree(corpus):
    """On every corpus entry at 3 or fewer philosophers/hosts, the two
    classification modes give identical predicate verdicts."""
    small = [
        ("dp2", [None]),
        ("dp3", [None]),
        ("dp3_bakery", [None]),
        ("aodv_no_timeout", ["aodv2_partitioned.json"]),
        ("aodv_timeout", ["aodv2_partitioned.json"]),
        ("aodv3_no_timeout", ["aodv3_partitioned.json", "aodv3_line.json"]),
        ("aodv3_timeout", ["aodv3_partitioned.json", "aodv3_line.json"]),
    ]
    pairs = 0
    for name, env_files in small:
        m = corpus[name].model()
        for envf in env_files:
            env = env_for(name, envf) if envf else None
            syn = analyze_model(m, mode="syntactic", env_script=env)
            exp = analyze_model(m, mode="exploration", env_script=env)
            assert not exp.truncated, (name, envf)
            assert [(v.name, v.verdict) for v in syn.predicates] == [
                (v.name, v.verdict) for v in exp.predicates
            ], (name, envf)
            pairs += 1
    assert pairs == 9
    verdict(7, "predicate verdicts agree across 9 model/env instances")


def test_criterion_08_explored_starvation_cycles_are_flagged(dp2, aodv_nt):
    """Every lasso cycle holding a risky predicate corresponds to a flagged
    vulnerable rule for that agent, on DP(2) and partitioned AODV."""
    rep = analyze_model(dp2)
    cycles = find_starvation_cycles(dp2, only_liberation_free=False)
    assert len(cycles) == 2
    nec = check_necessity(dp2, rep, cycles)
    assert nec.ok is True and nec.misses == []

    env = env_for("aodv_no_timeout", "aodv2_partitioned.json")
    arep = analyze_model(aodv_nt, env_script=env)
    acycles = find_starvation_cycles(aodv_nt, env_script=env, only_liberation_free=False)
    assert len(acycles) == 1
    anec = check_necessity(aodv_nt, arep, acycles)
    assert anec.ok is True and anec.misses == []
    verdict(8, "all risky-predicate cycles matched by vulnerable-rule flags")


def test_criterion_09_fairness_and_adversarial_starvation(dp5):
    """Fair DP(5) feeds everyone; a hostile schedule starves p1 forever."""
    fair = run_distributed(dp5, RoundRobinScheduler(dp5.agents()), steps=200)
    stats = {
        (s.predicate, s.agent): s for s in progress_summary(annotate_trace(dp5, fair))
    }
    for p in ("p1", "p2", "p3", "p4", "p5"):
        assert stats[("eating", p)].longest_run >= 1, p

    # neighbours p2 and p5 alternate so one of p1's forks is always taken
    names = ["p2", "p5"] + ["p2", "p1", "p2", "p1", "p5", "p1", "p5", "p1"] * 25
    tr = run_distributed(dp5, scripted_from_names(dp5, names), steps=len(names))
    at = annotate_trace(dp5, tr)
    p1_moves = [s for s in tr.steps if s.agent == "p1"]
    assert len(p1_moves) == 100
    assert all(s.fired == () for s in p1_moves)
    st = {(s.predicate, s.agent): s for s in progress_summary(at)}
    assert st[("eating", "p1")].longest_run == 0
    alarms = detect_cyclical_return(at, "thinking", "p1", 20)
    assert [(a.start_step, a.length) for a in alarms] == [(3, 100)]
    verdict(9, "round-robin feeds all five; scripted schedule starves p1")


def test_criterion_10_traces_are_byte_identical_across_runs(dp5, aodv_t):
    """Same model, scheduler, seed, and env script: byte-identical trace files."""
    a = trace_to_jsonl(run_distributed(dp5, RandomScheduler(seed=99), steps=120), dp5)
    b = trace_to_jsonl(run_distributed(dp5, RandomScheduler(seed=99), steps=120), dp5)
    assert a.encode() == b.encode()

    env1 = env_for("aodv_timeout", "aodv2_partitioned.json")
    env2 = env_for("aodv_timeout", "aodv2_partitioned.json")
    c = trace_to_jsonl(
        run_distributed(aodv_t, RandomScheduler(seed=7), steps=80, env_script=env1),
        aodv_t,
    )
    d = trace_to_jsonl(
        run_distributed(aodv_t, RandomScheduler(seed=7), steps=80, env_script=env2),
        aodv_t,
    )
    assert c.encode() == d.encode()
    verdict(10, "seeded reruns byte-identical, with and without env script")
