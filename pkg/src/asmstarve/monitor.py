"""Runtime starvation monitoring over executed traces.

The monitor watches declared predicates along a trace and raises an alarm
when one stays true for an agent across too many of that agent's own moves
in a row.  Steps by other agents neither advance nor reset the count: an
agent that rarely gets scheduled is judged by what happens when it does
move.  Counting global steps instead is available behind ``count_mode``.

Predicates are evaluated on the state after each step, matching what trace
files record.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .engine.executor import Trace, evaluate_predicates, parse_trace_jsonl
from .lang.model import Model

COUNT_MODES = ("moves", "steps")


@dataclass
class AnnotatedRow:
    step: int
    agent: Optional[str]  # mover; None for environment-only steps
    fired: tuple[str, ...]
    predicates: dict[str, dict[str, bool]]  # predicate -> agent -> truth (post-state)


@dataclass
class AnnotatedTrace:
    model_name: str
    rows: list[AnnotatedRow]

    @property
    def predicate_names(self) -> list[str]:
        return sorted({p for r in self.rows for p in r.predicates})

    def agents_of(self, predicate: str) -> list[str]:
        agents: list[str] = []
        for r in self.rows:
            for a in r.predicates.get(predicate, {}):
                if a not in agents:
                    agents.append(a)
        return sorted(agents)


def annotate_trace(model: Model, trace: Trace) -> AnnotatedTrace:
    rows = [
        AnnotatedRow(s.step, s.agent, s.fired, evaluate_predicates(s.state, model))
        for s in trace.steps
    ]
    return AnnotatedTrace(trace.model_name, rows)


def annotate_jsonl(text: str, model: Optional[Model] = None) -> AnnotatedTrace:
    """Rebuild an annotated trace from its serialized form.  With a model,
    the recorded predicate names are cross-checked against its declarations."""
    header, raw_rows = parse_trace_jsonl(text)
    rows = []
    for r in raw_rows:
        preds = r.get("predicates", {})
        if not isinstance(preds, dict):
            raise ValueError(f"step {r.get('step')}: predicates must be an object")
        rows.append(
            AnnotatedRow(
                int(r["step"]),
                r.get("agent"),
                tuple(r.get("fired_rules", ())),
                {str(p): {str(a): bool(v) for a, v in row.items()} for p, row in preds.items()},
            )
        )
    if model is not None:
        declared = {p.name for p in model.predicates}
        for r in rows:
            unknown = set(r.predicates) - declared
            if unknown:
                raise ValueError(
                    f"trace step {r.step} records predicates not declared by model "
                    f"{model.name}: {', '.join(sorted(unknown))}"
                )
    return AnnotatedTrace(str(header.get("model", "")), rows)


@dataclass
class Alarm:
    predicate: str
    agent: str
    start_step: int  # global step index where the run began
    length: int  # moves (or steps) the predicate stayed true
    threshold: int
    count_mode: str

    def to_dict(self) -> dict:
        return {
            "predicate": self.predicate,
            "agent": self.agent,
            "start": self.start_step,
            "length": self.length,
            "threshold": self.threshold,
            "count_mode": self.count_mode,
        }


def _runs(annotated: AnnotatedTrace, predicate: str, agent: str, count_mode: str):
    """Maximal runs of consecutive true observations: (start_step, length)."""
    runs: list[tuple[int, int]] = []
    start: Optional[int] = None
    length = 0
    for row in annotated.rows:
        if count_mode == "moves" and row.agent != agent:
            continue
        value = row.predicates.get(predicate, {}).get(agent)
        if value is None:
            continue
        if value:
            if start is None:
                start = row.step
            length += 1
        else:
            if start is not None:
                runs.append((start, length))
            start, length = None, 0
    if start is not None:
        runs.append((start, length))
    return runs


def detect_cyclical_return(
    annotated: AnnotatedTrace,
    predicate: str,
    agent: str,
    threshold: int,
    count_mode: str = "moves",
) -> list[Alarm]:
    """Alarms for every maximal run of at least ``threshold`` consecutive
    observations of the predicate staying true for the agent."""
    if threshold < 1:
        raise ValueError("threshold must be at least 1")
    if count_mode not in COUNT_MODES:
        raise ValueError(f"unknown count mode {count_mode!r}")
    known = annotated.predicate_names
    if known and predicate not in known:
        raise ValueError(f"trace records no predicate named {predicate!r}")
    agent = getattr(agent, "name", agent)
    return [
        Alarm(predicate, agent, start, length, threshold, count_mode)
        for start, length in _runs(annotated, predicate, agent, count_mode)
        if length >= threshold
    ]


def detect_all(
    annotated: AnnotatedTrace, threshold: int, count_mode: str = "moves"
) -> list[Alarm]:
    alarms: list[Alarm] = []
    for p in annotated.predicate_names:
        for a in annotated.agents_of(p):
            alarms.extend(detect_cyclical_return(annotated, p, a, threshold, count_mode))
    return alarms


@dataclass
class ProgressStats:
    predicate: str
    agent: str
    observations: int  # agent's own moves (or global steps)
    longest_run: int
    flips_to_false: int  # liberations observed
    true_at_end: bool

    def to_dict(self) -> dict:
        return {
            "predicate": self.predicate,
            "agent": self.agent,
            "observations": self.observations,
            "longest_run": self.longest_run,
            "flips_to_false": self.flips_to_false,
            "true_at_end": self.true_at_end,
        }


def progress_summary(
    annotated: AnnotatedTrace, count_mode: str = "moves"
) -> list[ProgressStats]:
    """Per predicate and agent: how often it held, the longest stretch, and
    how often the agent got out.  ``longest_run >= k`` exactly when
    ``detect_cyclical_return`` with threshold ``k`` raises an alarm."""
    if count_mode not in COUNT_MODES:
        raise ValueError(f"unknown count mode {count_mode!r}")
    out: list[ProgressStats] = []
    for p in annotated.predicate_names:
        for a in annotated.agents_of(p):
            observations = 0
            longest = 0
            flips = 0
            last = False
            current = 0
            for row in annotated.rows:
                if count_mode == "moves" and row.agent != a:
                    continue
                value = row.predicates.get(p, {}).get(a)
                if value is None:
                    continue
                observations += 1
                if value:
                    current += 1
                    longest = max(longest, current)
                else:
                    if last:
                        flips += 1
                    current = 0
                last = bool(value)
            out.append(ProgressStats(p, a, observations, longest, flips, last))
    return out
