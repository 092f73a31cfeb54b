"""Static starvation analysis: taint fixpoint, predicate verdicts, rule flags."""

import pytest

from asmstarve.analysis import (
    analyze_model,
    certify_starvation_free,
    check_necessity,
    classify_predicate,
    compute_footprint,
    compute_risky_functions,
    find_starvation_cycles,
    verify_all_rankings,
)
from asmstarve.engine.executor import RoundRobinScheduler, run_distributed
from asmstarve.lang import parse_model

from conftest import env_for


def small_model(src):
    res = parse_model(src)
    assert not res.diagnostics, [str(d) for d in res.diagnostics]
    return res.model


# -- footprints ----------------------------------------------------------------


def test_footprint_tracks_reads_per_write_occurrence(aodv_t):
    fp = compute_footprint(aodv_t)
    by_site = {
        (o.symbol, o.member_label): (sorted(o.guard_reads), sorted(o.value_reads))
        for o in fp.occurrences
        if o.symbol in ("waiting", "timeout")
    }
    # the countdown write sits directly under the waiting guard
    assert by_site[("timeout", "awaitReply")] == (["waiting"], ["timeout"])
    # the expiry write reads only the countdown and the flag itself
    assert by_site[("waiting", "expireRequest")] == (["timeout", "waiting"], [])
    # the arming write is gated by the full send condition
    assert by_site[("waiting", "sendRequest")] == (
        ["neighb", "routingTable", "waiting", "wishToInitiate"],
        [],
    )


def test_footprint_env_writable_set(aodv_t):
    fp = compute_footprint(aodv_t)
    assert sorted(fp.env_writable) == ["neighb", "replies", "wishToInitiate"]


# -- risky-function fixpoint ----------------------------------------------------


def test_dp5_risky_is_exactly_owner(dp5):
    rep = compute_risky_functions(dp5)
    assert rep.risky == ("owner",)
    assert rep.chains["owner"] == ("owner",)


def test_bakery_adds_the_turn_token(dp5_bakery):
    rep = compute_risky_functions(dp5_bakery)
    assert rep.risky == ("isMyTurn", "owner")


def test_aodv_no_timeout_waiting_is_tainted(aodv_nt):
    rep = compute_risky_functions(aodv_nt)
    assert rep.risky == (
        "neighb",
        "replies",
        "routingTable",
        "waiting",
        "wishToInitiate",
    )
    # waiting caught the taint through the send guard's neighbour check
    assert rep.chains["waiting"] == ("neighb", "waiting")


def test_aodv_timeout_clears_waiting_via_untainted_writer(aodv_t):
    rep = compute_risky_functions(aodv_t)
    assert rep.risky == ("neighb", "replies", "routingTable", "wishToInitiate")
    assert "waiting" in rep.cleared
    assert "expireRequest" in rep.cleared["waiting"]
    assert "timeout" in rep.cleared
    assert rep.iterations <= len(aodv_t.symbols)


def test_seed_containment_holds_on_every_corpus_model(corpus):
    for e in corpus.values():
        m = e.model()
        rep = compute_risky_functions(m)
        seeds = {
            s.name
            for s in m.symbols.values()
            if s.kind.name in ("MONITORED", "SHARED")
        }
        assert seeds <= set(rep.risky), e.name
        assert set(rep.risky).isdisjoint(rep.cleared), e.name


def test_taint_chains_are_well_formed(corpus):
    # each chain ends at its symbol and starts at a seed
    for e in corpus.values():
        m = e.model()
        rep = compute_risky_functions(m)
        seeds = {
            s.name
            for s in m.symbols.values()
            if s.kind.name in ("MONITORED", "SHARED")
        }
        for name, chain in rep.chains.items():
            assert chain[-1] == name
            assert chain[0] in seeds


# -- predicate classification ----------------------------------------------------


def test_dp_predicates_syntactic(dp5):
    rep = analyze_model(dp5)
    verdicts = {v.name: v for v in rep.predicates}
    assert verdicts["eating"].verdict == "not-risky"
    assert verdicts["eating"].method == "syntactic"
    assert verdicts["eating"].exact is True
    assert verdicts["thinking"].verdict == "risky"


def test_precheck_short_circuits_when_nothing_risky_is_mentioned(aodv_t):
    rep = analyze_model(aodv_t)
    (v,) = rep.predicates
    assert v.name == "waiting"
    assert v.verdict == "not-risky"
    assert v.method == "no-risky-symbols"
    assert v.exact is True


def test_risky_verdict_mentions_a_risky_location(corpus):
    for e in corpus.values():
        m = e.model()
        rep = analyze_model(m)
        risky = set(rep.risky.risky)
        for v in rep.predicates:
            if v.verdict == "risky":
                assert any(name in v.evidence for name in risky), (
                    e.name,
                    v.name,
                    v.evidence,
                )


def test_exploration_agrees_with_syntactic_on_small_instances(corpus):
    small = [
        ("dp2", None),
        ("dp3", None),
        ("dp3_bakery", None),
        ("aodv_no_timeout", "aodv2_partitioned.json"),
        ("aodv_timeout", "aodv2_partitioned.json"),
        ("aodv3_no_timeout", "aodv3_partitioned.json"),
        ("aodv3_no_timeout", "aodv3_line.json"),
        ("aodv3_timeout", "aodv3_partitioned.json"),
        ("aodv3_timeout", "aodv3_line.json"),
    ]
    for name, envf in small:
        m = corpus[name].model()
        env = env_for(name, envf) if envf else None
        syn = analyze_model(m, mode="syntactic", env_script=env)
        exp = analyze_model(m, mode="exploration", env_script=env)
        assert not exp.truncated, name
        assert [(v.name, v.verdict) for v in syn.predicates] == [
            (v.name, v.verdict) for v in exp.predicates
        ], (name, envf)
        assert syn.vulnerable == exp.vulnerable, (name, envf)
        assert syn.certificate == exp.certificate, (name, envf)


# -- vulnerable rules and the certificate -----------------------------------------


def test_dp5_flags_exactly_the_fork_grab(dp5):
    rep = analyze_model(dp5)
    assert rep.vulnerable == ("Philosopher.takeForks",)
    assert rep.certificate is False
    by_id = {r.id: r for r in rep.rules}
    take = by_id["Philosopher.takeForks"]
    assert take.f1 is True
    assert "owner" in take.f1_evidence
    assert take.associations == tuple(
        ("thinking", f"p{i}") for i in range(1, 6)
    )
    assert "sole liberator" in take.f2_evidence
    release = by_id["Philosopher.releaseForks"]
    assert release.verdict == "not-vulnerable"
    assert release.associations == ()  # eating is not risky, nothing to liberate


def test_bakery_keeps_the_grab_vulnerable(dp5_bakery):
    rep = analyze_model(dp5_bakery)
    assert rep.vulnerable == ("Philosopher.takeForks",)
    assert any("necessary-condition" in n for n in rep.notes)
    by_id = {r.id: r for r in rep.rules}
    assert by_id["Clerk.advanceTurn"].f1 is False


def test_aodv_no_timeout_flags_the_reply_wait(aodv_nt):
    env = env_for("aodv_no_timeout", "aodv2_partitioned.json")
    rep = analyze_model(aodv_nt, env_script=env)
    assert rep.vulnerable == ("Initiator.awaitReply",)
    assert rep.certificate is False
    by_id = {r.id: r for r in rep.rules}
    assert by_id["Initiator.awaitReply"].associations == (
        ("waiting", "h1"),
        ("waiting", "h2"),
    )


def test_aodv_timeout_earns_the_certificate(aodv_t):
    ok, rep = certify_starvation_free(aodv_t)
    assert ok is True
    assert rep.vulnerable == ()
    by_id = {r.id: r for r in rep.rules}
    # the wait rule no longer even reads a risky symbol at the top level
    assert by_id["Initiator.awaitReply"].f1 is False
    assert any("certificate" in n for n in rep.notes)


def test_certificate_tracks_vulnerable_emptiness(corpus):
    for e in corpus.values():
        m = e.model()
        env = env_for(e.name, e.env_files[0]) if e.env_files else None
        rep = analyze_model(m, env_script=env)
        assert not rep.truncated, e.name
        assert rep.certificate == (len(rep.vulnerable) == 0), e.name


def test_unliberatable_risky_predicate_blocks_certification():
    # nothing in the program ever lowers the flag: certifying would be wrong
    m = small_model(
        """dasm latch
domain units = { u1 }
function flag : units -> bool shared
function x : units -> int controlled
init { flag(u1) := true  x(u1) := 0 }
rule R() = { spin: if flag(u1) = true then x(self) := x(self) + 1 }
agent u in units runs R()
predicate stuck for u in units := flag(u) = true
"""
    )
    rep = analyze_model(m)
    assert rep.vulnerable == ()
    assert rep.certificate is False
    assert any("no liberating rule" in n for n in rep.notes)


def test_no_risky_functions_means_certificate():
    # all-controlled model with untainted writers: nothing can starve it
    m = small_model(
        """dasm calm
domain units = { u1 }
function x : units -> int controlled
init { x(u1) := 0 }
rule R() = { flip: if x(self) = 0 then x(self) := 1 unflip: if x(self) = 1 then x(self) := 0 }
agent u in units runs R()
predicate low for u in units := x(u) = 0
"""
    )
    rep = analyze_model(m)
    assert rep.risky.risky == ()
    assert rep.vulnerable == ()
    assert rep.certificate is True


def test_report_serialization_shape(dp5):
    d = analyze_model(dp5).to_dict()
    assert sorted(d) == [
        "certificate",
        "mode",
        "model",
        "notes",
        "predicates",
        "risky_functions",
        "rules",
        "vulnerable",
    ]
    assert d["risky_functions"] == [{"name": "owner", "chain": ["owner"]}]
    assert {p["name"] for p in d["predicates"]} == {"eating", "thinking"}
    assert sorted(d["rules"][0]) == [
        "association_evidence",
        "associations",
        "f1_evidence",
        "f2_evidence",
        "id",
        "verdict",
    ]


# -- lasso cycles and finite-scale necessity --------------------------------------


def test_dp2_thinking_cycles_are_matched_by_a_flag(dp2):
    rep = analyze_model(dp2)
    cycles = find_starvation_cycles(dp2, only_liberation_free=False)
    assert [(c.predicate, c.agent, c.length) for c in cycles] == [
        ("thinking", "p1", 2),
        ("thinking", "p2", 2),
    ]
    nec = check_necessity(dp2, rep, cycles)
    assert nec.ok is True
    assert nec.misses == []


def test_aodv_partitioned_liberation_free_loop(aodv_nt):
    env = env_for("aodv_no_timeout", "aodv2_partitioned.json")
    rep = analyze_model(aodv_nt, env_script=env)
    cycles = find_starvation_cycles(aodv_nt, env_script=env, only_liberation_free=False)
    assert [(c.predicate, c.agent, c.length, c.liberation_free) for c in cycles] == [
        ("waiting", "h1", 1, True)
    ]
    nec = check_necessity(aodv_nt, rep, cycles)
    assert nec.ok is True


def test_necessity_ignores_cycles_on_not_risky_predicates(aodv_t):
    # the timeout variant cycles through waiting states too, but waiting is
    # not risky there, so the check has nothing to demand
    env = env_for("aodv_timeout", "aodv2_partitioned.json")
    rep = analyze_model(aodv_t, env_script=env)
    cycles = find_starvation_cycles(aodv_t, env_script=env, only_liberation_free=False)
    nec = check_necessity(aodv_t, rep, cycles)
    assert nec.ok is True
    assert nec.misses == []


# -- ranking annotations -----------------------------------------------------------


def test_timeout_ranking_decreases_while_waiting(aodv_t):
    env = env_for("aodv_timeout", "aodv2_partitioned.json")
    tr = run_distributed(
        aodv_t, RoundRobinScheduler(aodv_t.agents()), steps=50, env_script=env
    )
    (check,) = verify_all_rankings(aodv_t, tr)
    assert check.predicate == "waiting"
    assert check.ok is True
    assert check.checked_moves == 6
    assert check.violations == []


def test_ranking_violations_are_reported(aodv_t):
    # a stuttering counter breaks the strict-decrease contract
    src = """dasm stutter
domain units = { u1 }
function busy : units -> bool shared
function count : units -> int controlled
init { busy(u1) := true  count(u1) := 3 }
rule R() = { hold: if busy(self) = true then count(self) := count(self) }
agent u in units runs R()
predicate busy for u in units := busy(u)
ranking count(u) for busy
"""
    m = small_model(src)
    tr = run_distributed(m, RoundRobinScheduler(m.agents()), steps=5)
    (check,) = verify_all_rankings(m, tr)
    assert check.ok is False
    assert len(check.violations) >= 1
