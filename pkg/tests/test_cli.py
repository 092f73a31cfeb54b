"""Command-line interface: exit codes, formats, and file handling."""

import json

import pytest
from click.testing import CliRunner

from asmstarve.cli import main
from asmstarve.corpus import entry


@pytest.fixture(scope="module")
def runner():
    return CliRunner()


@pytest.fixture(scope="module")
def paths(tmp_path_factory):
    """Corpus sources and scripts copied into a scratch directory."""
    d = tmp_path_factory.mktemp("cli")
    out = {}
    for name in ("dp2", "dining_philosophers", "aodv_no_timeout", "aodv_timeout"):
        e = entry(name)
        p = d / e.path.name
        p.write_text(e.source())
        out[name] = p
    e = entry("aodv_no_timeout")
    env = d / "aodv2_partitioned.json"
    env.write_text((e.path.parent / "aodv2_partitioned.json").read_text())
    out["env"] = env
    bad = d / "broken.asm"
    bad.write_text("dasm broken\ndomain d = { a }\ninit { y(a) := 0 }\n")
    out["bad"] = bad
    out["dir"] = d
    return out


def test_check_valid_model_exits_zero(runner, paths):
    res = runner.invoke(main, ["check", str(paths["dp2"])])
    assert res.exit_code == 0, res.output


def test_check_invalid_model_exits_two_with_diagnostic(runner, paths):
    res = runner.invoke(main, ["check", str(paths["bad"])])
    assert res.exit_code == 2
    assert "broken.asm:3:8: error: unknown function y" in res.output


def test_missing_file_is_usage_error(runner, paths):
    res = runner.invoke(main, ["check", str(paths["dir"] / "absent.asm")])
    assert res.exit_code == 2


def test_analyze_findings_exit_one(runner, paths):
    res = runner.invoke(main, ["analyze", str(paths["dining_philosophers"])])
    assert res.exit_code == 1
    assert "Philosopher.takeForks" in res.output
    assert "owner" in res.output


def test_analyze_certificate_exit_zero(runner, paths):
    res = runner.invoke(main, ["analyze", str(paths["aodv_timeout"])])
    assert res.exit_code == 0, res.output
    assert "certificate" in res.output.lower()


def test_analyze_json_is_the_report_dict(runner, paths):
    res = runner.invoke(
        main, ["analyze", str(paths["dining_philosophers"]), "--format", "json"]
    )
    body = json.loads(res.output)
    assert body["vulnerable"] == ["Philosopher.takeForks"]
    assert body["risky_functions"] == [{"name": "owner", "chain": ["owner"]}]
    assert body["certificate"] is False


def test_analyze_exploration_mode(runner, paths):
    res = runner.invoke(
        main,
        [
            "analyze",
            str(paths["aodv_no_timeout"]),
            "--mode",
            "exploration",
            "--env",
            str(paths["env"]),
            "--format",
            "json",
        ],
    )
    assert res.exit_code == 1
    body = json.loads(res.output)
    assert body["vulnerable"] == ["Initiator.awaitReply"]
    assert body["predicates"][0]["method"] == "exploration"


def test_run_writes_trace_file(runner, paths, tmp_path):
    trace = tmp_path / "dp2.trace"
    res = runner.invoke(
        main,
        ["run", str(paths["dp2"]), "--steps", "6", "--trace", str(trace)],
    )
    assert res.exit_code == 0, res.output
    lines = trace.read_text().splitlines()
    assert len(lines) == 7
    header = json.loads(lines[0])
    assert header["termination"] == "step-limit"


def test_run_seeded_twice_gives_identical_bytes(runner, paths, tmp_path):
    out = []
    for i in (1, 2):
        trace = tmp_path / f"r{i}.trace"
        res = runner.invoke(
            main,
            [
                "run",
                str(paths["dp2"]),
                "--scheduler",
                "random",
                "--seed",
                "99",
                "--steps",
                "30",
                "--trace",
                str(trace),
            ],
        )
        assert res.exit_code == 0, res.output
        out.append(trace.read_bytes())
    assert out[0] == out[1]


def test_run_scripted_needs_schedule_file(runner, paths):
    res = runner.invoke(
        main, ["run", str(paths["dp2"]), "--scheduler", "scripted"]
    )
    assert res.exit_code == 2


def test_run_scripted_schedule_file(runner, paths, tmp_path):
    sched = tmp_path / "sched.txt"
    sched.write_text("# hog the forks\np1\np1\np2\n")
    trace = tmp_path / "s.trace"
    res = runner.invoke(
        main,
        [
            "run",
            str(paths["dp2"]),
            "--scheduler",
            "scripted",
            "--schedule-file",
            str(sched),
            "--trace",
            str(trace),
        ],
    )
    assert res.exit_code == 0, res.output
    rows = [json.loads(x) for x in trace.read_text().splitlines()[1:]]
    assert [r["agent"] for r in rows] == ["p1", "p1", "p2"]


def test_explore_clean_consistency(runner, paths):
    res = runner.invoke(
        main, ["explore", str(paths["dp2"]), "--depth", "12"]
    )
    assert res.exit_code == 0, res.output
    assert "no inconsistent update sets" in res.output


def test_explore_coherence_findings_exit_one(runner, paths):
    res = runner.invoke(
        main,
        ["explore", str(paths["dp2"]), "--check", "consistency", "--check", "coherence"],
    )
    assert res.exit_code == 1
    assert "order-dependent" in res.output


def test_explore_json_counts(runner, paths):
    res = runner.invoke(
        main, ["explore", str(paths["dp2"]), "--depth", "12", "--format", "json"]
    )
    body = json.loads(res.output)
    assert body["nodes"] == 3
    assert body["inconsistent"] == []


def test_monitor_alarms_exit_one(runner, paths, tmp_path):
    trace = tmp_path / "stuck.trace"
    res = runner.invoke(
        main,
        [
            "run",
            str(paths["aodv_no_timeout"]),
            "--steps",
            "100",
            "--env",
            str(paths["env"]),
            "--trace",
            str(trace),
        ],
    )
    assert res.exit_code == 0, res.output
    res = runner.invoke(
        main,
        [
            "monitor",
            str(trace),
            "--predicate",
            "waiting",
            "--agent",
            "h1",
            "--threshold",
            "20",
        ],
    )
    assert res.exit_code == 1
    assert "waiting" in res.output and "h1" in res.output

    res = runner.invoke(
        main,
        ["monitor", str(trace), "--predicate", "waiting", "--threshold", "101"],
    )
    assert res.exit_code == 0, res.output


def test_monitor_json_alarm_shape(runner, paths, tmp_path):
    trace = tmp_path / "stuck.trace"
    runner.invoke(
        main,
        [
            "run",
            str(paths["aodv_no_timeout"]),
            "--steps",
            "40",
            "--env",
            str(paths["env"]),
            "--trace",
            str(trace),
        ],
    )
    res = runner.invoke(
        main,
        [
            "monitor",
            str(trace),
            "--predicate",
            "waiting",
            "--threshold",
            "10",
            "--format",
            "json",
        ],
    )
    body = json.loads(res.output)
    (alarm,) = body["alarms"]
    assert alarm["start"] == 0
    assert alarm["length"] == 40
    assert alarm["threshold"] == 10


def test_monitor_unknown_predicate_usage_error(runner, paths, tmp_path):
    trace = tmp_path / "t.trace"
    runner.invoke(
        main, ["run", str(paths["dp2"]), "--steps", "4", "--trace", str(trace)]
    )
    res = runner.invoke(main, ["monitor", str(trace), "--predicate", "nope"])
    assert res.exit_code == 2


def test_installed_script_entry_point():
    import subprocess

    out = subprocess.run(
        ["asmstarve", "--version"], capture_output=True, text=True
    )
    assert out.returncode == 0
    assert "0.1.0" in out.stdout
