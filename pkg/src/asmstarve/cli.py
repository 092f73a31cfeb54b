"""Command-line front end.

Every subcommand drives the HTTP service; by default an in-process instance,
or a remote one via --server.  Exit codes: 0 clean, 1 findings (vulnerable
rules, alarms, order-dependence, truncation), 2 usage, parse, or validation
errors.
"""
from __future__ import annotations

import json
import sys
from pathlib import Path
from typing import Optional

import click

EXIT_CLEAN = 0
EXIT_FINDINGS = 1
EXIT_USAGE = 2


class ServiceClient:
    """Uniform .post/.get over an in-process app or a remote server."""

    def __init__(self, server: Optional[str]):
        if server:
            import httpx

            self._client = httpx.Client(base_url=server, timeout=300.0)
        else:
            import warnings

            with warnings.catch_warnings():
                # the bundled test client import warns about its own plumbing
                warnings.simplefilter("ignore")
                from fastapi.testclient import TestClient

                from .service import app

            self._client = TestClient(app)

    def post(self, path: str, payload: dict):
        return self._client.post(path, json=payload)

    def get(self, path: str):
        return self._client.get(path)


def _print_diagnostics(diags: list[dict]) -> None:
    for d in diags:
        click.echo(
            f"{d['file']}:{d['line']}:{d['col']}: {d['severity']}: {d['message']}", err=True
        )


def _fail_http(resp) -> None:
    """Report a 4xx/5xx response and exit 2."""
    try:
        detail = resp.json().get("detail", {})
    except ValueError:
        detail = {}
    if isinstance(detail, dict):
        message = detail.get("message", f"service error (HTTP {resp.status_code})")
        _print_diagnostics(detail.get("diagnostics", []))
    else:
        message = str(detail)
    click.echo(f"error: {message}", err=True)
    sys.exit(EXIT_USAGE)


def _read_env(path: Optional[str]) -> Optional[dict]:
    if path is None:
        return None
    try:
        return json.loads(Path(path).read_text())
    except (OSError, ValueError) as e:
        click.echo(f"error: cannot read environment script {path}: {e}", err=True)
        sys.exit(EXIT_USAGE)


def _read_schedule(path: Optional[str]) -> Optional[list[str]]:
    if path is None:
        return None
    names = []
    for line in Path(path).read_text().splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            names.append(line)
    if not names:
        click.echo(f"error: schedule file {path} names no agents", err=True)
        sys.exit(EXIT_USAGE)
    return names


format_option = click.option(
    "--format",
    "fmt",
    type=click.Choice(["text", "json"]),
    default="text",
    show_default=True,
    help="Output format; json is stable for tooling.",
)
model_argument = click.argument("model", type=click.Path(exists=True, dir_okay=False))


@click.group()
@click.option("--server", default=None, help="Base URL of a running service; in-process when omitted.")
@click.version_option(package_name="asmstarve")
@click.pass_context
def main(ctx: click.Context, server: Optional[str]) -> None:
    """Model, run, explore, and analyze distributed abstract state machines
    for starvation risk."""
    ctx.obj = ServiceClient(server)


@main.command()
@model_argument
@format_option
@click.pass_obj
def check(client: ServiceClient, model: str, fmt: str) -> None:
    """Parse and validate a model file."""
    resp = client.post("/check", {"source": Path(model).read_text(), "filename": model})
    if resp.status_code != 200:
        _fail_http(resp)
    body = resp.json()
    if fmt == "json":
        click.echo(json.dumps(body, indent=2))
    else:
        _print_diagnostics(body["diagnostics"])
        click.echo("ok" if body["ok"] else "invalid")
    sys.exit(EXIT_CLEAN if body["ok"] else EXIT_USAGE)


def _render_analysis_text(body: dict) -> None:
    click.echo(f"model {body['model']} ({body['mode']} mode)")
    click.echo("risky functions:")
    if body["risky_functions"]:
        for rf in body["risky_functions"]:
            click.echo(f"  {rf['name']}  (via {' -> '.join(rf['chain'])})")
    else:
        click.echo("  none")
    click.echo("predicates:")
    for p in body["predicates"]:
        click.echo(f"  {p['name']}: {p['verdict']} [{p['method']}] {p['evidence']}")
    click.echo("rules:")
    for r in body["rules"]:
        click.echo(f"  {r['id']}: {r['verdict']}")
        click.echo(f"    guard: {r['f1_evidence']}")
        if r["association_evidence"]:
            click.echo(f"    association: {r['association_evidence']}")
        if r["f2_evidence"]:
            click.echo(f"    liberation: {r['f2_evidence']}")
    if body["vulnerable"]:
        click.echo("vulnerable rules: " + ", ".join(body["vulnerable"]))
    else:
        click.echo("vulnerable rules: none")
    click.echo(f"starvation-free certificate: {'yes' if body['certificate'] else 'no'}")
    for n in body["notes"]:
        click.echo(f"note: {n}")


@main.command()
@model_argument
@click.option(
    "--mode",
    type=click.Choice(["syntactic", "exploration"]),
    default="syntactic",
    show_default=True,
    help="How risky predicates are judged.",
)
@click.option("--bound", type=int, default=10_000, show_default=True, help="Exploration state budget.")
@click.option("--depth", type=int, default=None, help="Exploration depth limit in moves.")
@click.option("--env", "env_path", type=click.Path(exists=True, dir_okay=False), default=None,
              help="Environment script (JSON) applied during exploration.")
@format_option
@click.pass_obj
def analyze(
    client: ServiceClient,
    model: str,
    mode: str,
    bound: int,
    depth: Optional[int],
    env_path: Optional[str],
    fmt: str,
) -> None:
    """Report risky functions, risky predicates, and vulnerable rules."""
    payload = {
        "source": Path(model).read_text(),
        "filename": model,
        "mode": mode,
        "bound": bound,
        "depth": depth,
        "env": _read_env(env_path),
    }
    resp = client.post("/analyze", payload)
    if resp.status_code != 200:
        _fail_http(resp)
    body = resp.json()
    if fmt == "json":
        click.echo(json.dumps(body, indent=2))
    else:
        _render_analysis_text(body)
    findings = bool(body["vulnerable"]) or body.get("truncated", False)
    sys.exit(EXIT_FINDINGS if findings else EXIT_CLEAN)


@main.command()
@model_argument
@click.option(
    "--scheduler",
    type=click.Choice(["round-robin", "random", "scripted"]),
    default="round-robin",
    show_default=True,
)
@click.option("--seed", type=int, default=0, show_default=True, help="Seed for the random scheduler.")
@click.option("--steps", type=int, default=100, show_default=True, help="Step limit.")
@click.option("--env", "env_path", type=click.Path(exists=True, dir_okay=False), default=None,
              help="Environment script (JSON).")
@click.option("--schedule-file", type=click.Path(exists=True, dir_okay=False), default=None,
              help="Agent name per line; required with --scheduler scripted.")
@click.option("--trace", "trace_path", type=click.Path(dir_okay=False), default=None,
              help="Trace output path [default: <model>.trace].")
@format_option
@click.pass_obj
def run(
    client: ServiceClient,
    model: str,
    scheduler: str,
    seed: int,
    steps: int,
    env_path: Optional[str],
    schedule_file: Optional[str],
    trace_path: Optional[str],
    fmt: str,
) -> None:
    """Execute a model and write its trace file."""
    payload = {
        "source": Path(model).read_text(),
        "filename": model,
        "scheduler": scheduler,
        "seed": seed,
        "steps": steps,
        "env": _read_env(env_path),
        "schedule": _read_schedule(schedule_file),
    }
    resp = client.post("/run", payload)
    if resp.status_code != 200:
        _fail_http(resp)
    body = resp.json()
    out = Path(trace_path) if trace_path else Path(model).with_suffix(".trace")
    out.write_text(body["trace_jsonl"])
    if fmt == "json":
        summary = {k: body[k] for k in ("model", "scheduler", "seed", "steps", "termination")}
        summary["trace"] = str(out)
        click.echo(json.dumps(summary, indent=2))
    else:
        click.echo(
            f"{body['model']}: {body['steps']} steps, termination {body['termination']}, trace {out}"
        )
    sys.exit(EXIT_FINDINGS if body["termination"] == "inconsistent-update" else EXIT_CLEAN)


@main.command()
@model_argument
@click.option("--depth", type=int, default=None, help="Move-depth limit; exhaustive when omitted.")
@click.option(
    "--check",
    "checks",
    type=click.Choice(["consistency", "coherence", "quiescence"]),
    multiple=True,
    default=("consistency",),
    show_default=True,
    help="Checks to run over the explored states (repeatable).",
)
@click.option("--env", "env_path", type=click.Path(exists=True, dir_okay=False), default=None,
              help="Environment script (JSON).")
@click.option("--state-budget", type=int, default=100_000, show_default=True,
              help="Maximum states to explore.")
@format_option
@click.pass_obj
def explore(
    client: ServiceClient,
    model: str,
    depth: Optional[int],
    checks: tuple[str, ...],
    env_path: Optional[str],
    state_budget: int,
    fmt: str,
) -> None:
    """Enumerate reachable states and check consistency, coherence, quiescence."""
    payload = {
        "source": Path(model).read_text(),
        "filename": model,
        "depth": depth,
        "env": _read_env(env_path),
        "state_budget": state_budget,
        "checks": list(checks),
    }
    resp = client.post("/explore", payload)
    if resp.status_code != 200:
        _fail_http(resp)
    body = resp.json()
    if fmt == "json":
        click.echo(json.dumps(body, indent=2))
    else:
        click.echo(
            f"{body['model']}: {body['nodes']} states, depth {body['depth_reached']}"
            + (", truncated" if body["truncated"] else "")
        )
        if "consistency" in checks:
            n = len(body["inconsistent"])
            click.echo(
                "no inconsistent update sets"
                if n == 0
                else f"{n} inconsistent update sets:"
            )
            for row in body["inconsistent"]:
                click.echo(f"  agent {row['agent']} at {row['state']}")
        if "quiescence" in checks:
            click.echo(f"quiescent states: {body['quiescent_states']}")
        if "coherence" in checks:
            dep = body["order_dependent"] or []
            click.echo(
                "all agent pairs order-independent"
                if not dep
                else f"{len(dep)} order-dependent agent pairs:"
            )
            for row in dep:
                click.echo(f"  {row['first']} vs {row['second']} at {row['state']}")
    sys.exit(EXIT_FINDINGS if body["findings"] else EXIT_CLEAN)


@main.command()
@click.argument("trace", type=click.Path(exists=True, dir_okay=False))
@click.option("--predicate", default=None, help="Predicate to watch [default: all recorded].")
@click.option("--agent", default=None, help="Agent to watch [default: all].")
@click.option("--threshold", type=int, default=20, show_default=True,
              help="Alarm when a predicate stays true this many consecutive moves.")
@click.option(
    "--count-mode",
    type=click.Choice(["moves", "steps"]),
    default="moves",
    show_default=True,
    help="Count the agent's own moves or all steps.",
)
@click.option("--model", "model_path", type=click.Path(exists=True, dir_okay=False), default=None,
              help="Model file to cross-check recorded predicate names.")
@format_option
@click.pass_obj
def monitor(
    client: ServiceClient,
    trace: str,
    predicate: Optional[str],
    agent: Optional[str],
    threshold: int,
    count_mode: str,
    model_path: Optional[str],
    fmt: str,
) -> None:
    """Scan a trace file for cyclical-return alarms."""
    payload = {
        "trace_jsonl": Path(trace).read_text(),
        "predicate": predicate,
        "agent": agent,
        "threshold": threshold,
        "count_mode": count_mode,
        "source": Path(model_path).read_text() if model_path else None,
        "filename": model_path or "<model>",
    }
    resp = client.post("/monitor", payload)
    if resp.status_code != 200:
        _fail_http(resp)
    body = resp.json()
    if fmt == "json":
        click.echo(json.dumps(body, indent=2))
    else:
        for a in body["alarms"]:
            click.echo(
                f"alarm: {a['predicate']}[{a['agent']}] held for {a['length']} "
                f"consecutive {a['count_mode']} from step {a['start']} (threshold {a['threshold']})"
            )
        if not body["alarms"]:
            click.echo("no alarms")
    sys.exit(EXIT_FINDINGS if body["alarms"] else EXIT_CLEAN)


if __name__ == "__main__":
    main()
