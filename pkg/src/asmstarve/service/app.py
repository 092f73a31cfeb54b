"""HTTP service exposing parsing, analysis, execution, exploration, and
monitoring.  The CLI drives these endpoints in-process; the same app can be
served standalone with any ASGI server."""
from __future__ import annotations

from typing import Optional

from fastapi import FastAPI, HTTPException

from .. import __version__
from ..analysis import analyze_model
from ..engine.envscript import EnvScript, EnvScriptError, parse_env_script
from ..engine.executor import (
    RandomScheduler,
    RoundRobinScheduler,
    run_distributed,
    scripted_from_names,
    trace_to_jsonl,
)
from ..engine.explorer import coherence_scan, enumerate_interleavings
from ..core.values import format_value
from ..lang.model import Model
from ..lang.parser import parse_model
from ..lang.validate import validate_model
from .schemas import (
    AnalyzeRequest,
    CheckRequest,
    CheckResponse,
    CoherenceFinding,
    DiagnosticOut,
    ExploreRequest,
    ExploreResponse,
    MonitorRequest,
    MonitorResponse,
    RunRequest,
    RunResponse,
)

app = FastAPI(title="asmstarve", version=__version__)


def _diag_out(diags) -> list[DiagnosticOut]:
    return [
        DiagnosticOut(severity=d.severity, message=d.message, file=d.file, line=d.line, col=d.col)
        for d in diags
    ]


def _bad_request(message: str, diags=()) -> HTTPException:
    return HTTPException(
        status_code=400,
        detail={"message": message, "diagnostics": [d.model_dump() for d in _diag_out(diags)]},
    )


def _load_model(source: str, filename: str) -> tuple[Model, list]:
    """Parse and validate; 400 on errors, warnings passed through."""
    result = parse_model(source, filename)
    if not result.ok:
        raise _bad_request("model failed to parse", result.diagnostics)
    diags = validate_model(result.model, filename)
    if any(d.severity == "error" for d in diags):
        raise _bad_request("model failed validation", diags)
    return result.model, diags


def _load_env(env: Optional[dict], model: Model) -> Optional[EnvScript]:
    if env is None:
        return None
    try:
        return parse_env_script(env, model)
    except EnvScriptError as e:
        raise _bad_request(f"environment script rejected: {e}")


def describe_state(state) -> str:
    parts = [f"{loc!r}={format_value(v)}" for loc, v in sorted(state.items(), key=lambda p: repr(p[0]))]
    return ", ".join(parts) if parts else "all undef"


@app.get("/health")
def health() -> dict:
    return {"status": "ok", "version": __version__}


@app.post("/check", response_model=CheckResponse)
def check(req: CheckRequest) -> CheckResponse:
    result = parse_model(req.source, req.filename)
    if not result.ok:
        return CheckResponse(ok=False, diagnostics=_diag_out(result.diagnostics))
    diags = validate_model(result.model, req.filename)
    ok = not any(d.severity == "error" for d in diags)
    return CheckResponse(ok=ok, diagnostics=_diag_out(diags))


@app.post("/analyze")
def analyze(req: AnalyzeRequest) -> dict:
    model, _ = _load_model(req.source, req.filename)
    env = _load_env(req.env, model)
    report = analyze_model(
        model, mode=req.mode, env_script=env, depth=req.depth, state_budget=req.bound
    )
    out = report.to_dict()
    out["truncated"] = report.truncated
    return out


@app.post("/run", response_model=RunResponse)
def run(req: RunRequest) -> RunResponse:
    model, _ = _load_model(req.source, req.filename)
    env = _load_env(req.env, model)
    if req.scheduler == "round-robin":
        sched = RoundRobinScheduler(model.agents())
    elif req.scheduler == "random":
        sched = RandomScheduler(req.seed)
    else:
        if not req.schedule:
            raise _bad_request("scripted scheduler needs a schedule of agent names")
        try:
            sched = scripted_from_names(model, req.schedule)
        except KeyError as e:
            raise _bad_request(f"schedule names an unknown agent: {e}")
    trace = run_distributed(model, sched, steps=req.steps, env_script=env)
    return RunResponse(
        model=model.name,
        scheduler=trace.scheduler,
        seed=trace.seed,
        steps=len(trace.steps),
        termination=trace.termination,
        trace_jsonl=trace_to_jsonl(trace, model),
    )


@app.post("/explore", response_model=ExploreResponse)
def explore(req: ExploreRequest) -> ExploreResponse:
    model, _ = _load_model(req.source, req.filename)
    env = _load_env(req.env, model)
    graph = enumerate_interleavings(
        model, depth=req.depth, env_script=env, state_budget=req.state_budget
    )
    resp = ExploreResponse(
        model=model.name,
        nodes=len(graph.nodes),
        truncated=graph.truncated,
        depth_reached=graph.depth_reached,
    )
    if "consistency" in req.checks:
        resp.inconsistent = [
            {"state": describe_state(graph.state_of(k)), "agent": agent}
            for k, agent in graph.inconsistent
        ]
    if "quiescence" in req.checks:
        resp.quiescent_states = len(graph.quiescent)
    if "coherence" in req.checks:
        found = coherence_scan(model, graph)
        resp.order_dependent = [
            CoherenceFinding(
                state=describe_state(graph.state_of(k)), first=c.first, second=c.second
            )
            for k, c in found
        ]
    resp.findings = bool(
        resp.inconsistent or resp.order_dependent or graph.truncated
    )
    return resp


@app.post("/monitor", response_model=MonitorResponse)
def monitor(req: MonitorRequest) -> MonitorResponse:
    from ..monitor import annotate_jsonl, detect_all, detect_cyclical_return, progress_summary

    model = None
    if req.source is not None:
        model, _ = _load_model(req.source, req.filename)
    try:
        annotated = annotate_jsonl(req.trace_jsonl, model)
    except (ValueError, KeyError) as e:
        raise _bad_request(f"trace rejected: {e}")
    if req.predicate is not None and req.predicate not in annotated.predicate_names:
        raise _bad_request(
            f"trace records no predicate named {req.predicate!r}; "
            f"available: {', '.join(annotated.predicate_names) or 'none'}"
        )
    if req.predicate is None:
        alarms = detect_all(annotated, req.threshold, req.count_mode)
    else:
        agents = [req.agent] if req.agent else annotated.agents_of(req.predicate)
        alarms = []
        for a in agents:
            alarms.extend(
                detect_cyclical_return(annotated, req.predicate, a, req.threshold, req.count_mode)
            )
    stats = progress_summary(annotated, req.count_mode)
    return MonitorResponse(
        model=annotated.model_name,
        alarms=[a.to_dict() for a in alarms],
        stats=[s.to_dict() for s in stats],
    )
