"""Request and response shapes for the HTTP service."""
from __future__ import annotations

from typing import Literal, Optional

from pydantic import BaseModel, Field

SchedulerName = Literal["round-robin", "random", "scripted"]
AnalysisMode = Literal["syntactic", "exploration"]
ExploreCheck = Literal["consistency", "coherence", "quiescence"]
CountMode = Literal["moves", "steps"]


class DiagnosticOut(BaseModel):
    severity: str
    message: str
    file: str
    line: int
    col: int


class CheckRequest(BaseModel):
    source: str
    filename: str = "<input>"


class CheckResponse(BaseModel):
    ok: bool
    diagnostics: list[DiagnosticOut] = Field(default_factory=list)


class AnalyzeRequest(BaseModel):
    source: str
    filename: str = "<input>"
    mode: AnalysisMode = "syntactic"
    env: Optional[dict] = None  # environment script, same shape as the .json files
    depth: Optional[int] = Field(default=None, ge=1)
    bound: int = Field(default=10_000, ge=1)  # exploration state budget


class RunRequest(BaseModel):
    source: str
    filename: str = "<input>"
    scheduler: SchedulerName = "round-robin"
    seed: int = 0
    steps: int = Field(default=100, ge=1)
    env: Optional[dict] = None
    schedule: Optional[list[str]] = None  # agent names, required for "scripted"


class RunResponse(BaseModel):
    model: str
    scheduler: str
    seed: Optional[int]
    steps: int
    termination: str
    trace_jsonl: str


class ExploreRequest(BaseModel):
    source: str
    filename: str = "<input>"
    depth: Optional[int] = Field(default=None, ge=1)
    env: Optional[dict] = None
    state_budget: int = Field(default=100_000, ge=1)
    checks: list[ExploreCheck] = Field(default_factory=lambda: ["consistency"])


class CoherenceFinding(BaseModel):
    state: str
    first: str
    second: str


class ExploreResponse(BaseModel):
    model: str
    nodes: int
    truncated: bool
    depth_reached: int
    inconsistent: list[dict] = Field(default_factory=list)  # {state, agent}
    quiescent_states: Optional[int] = None
    order_dependent: Optional[list[CoherenceFinding]] = None
    findings: bool = False


class MonitorRequest(BaseModel):
    trace_jsonl: str
    threshold: int = Field(default=20, ge=1)
    predicate: Optional[str] = None  # all recorded predicates when omitted
    agent: Optional[str] = None  # all agents when omitted
    count_mode: CountMode = "moves"
    source: Optional[str] = None  # optional model text to cross-check names
    filename: str = "<input>"


class MonitorResponse(BaseModel):
    model: str
    alarms: list[dict] = Field(default_factory=list)
    stats: list[dict] = Field(default_factory=list)
