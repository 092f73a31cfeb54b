"""Scripted environment behavior for reproducible runs.

A script is a JSON object mapping step numbers to update batches:

    {"steps": {"0": [{"location": "replies(h1)", "value": [2, 1]}], ...}}

Each batch is applied before the scheduled agent's move at that step.  Only
globally scoped monitored and shared symbols may be written, locations name
their arguments with atom names or integer literals, and values use JSON
(null for undef, strings for atoms, arrays for sequences).
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Union

from ..core.eval import value_in_result_domain
from ..core.signature import Kind, Location, Scope
from ..core.state import Update, clashing_pair
from ..core.values import UNDEF, Value, value_to_json
from ..lang.lexer import LexError, Token, tokenize
from ..lang.model import Model


class EnvScriptError(Exception):
    """The script is malformed or writes something the environment may not."""


@dataclass
class EnvScript:
    steps: dict[int, tuple[Update, ...]] = field(default_factory=dict)

    def updates_at(self, step: int) -> tuple[Update, ...]:
        return self.steps.get(step, ())

    def has_updates_after(self, step: int) -> bool:
        return any(t > step for t in self.steps)

    @property
    def max_step(self) -> int:
        return max(self.steps) if self.steps else -1

    @property
    def time_varying(self) -> bool:
        """True when updates land after step 0, so reachability depends on time."""
        return self.has_updates_after(0)


def json_to_value(model: Model, data, where: str) -> Value:
    if data is None:
        return UNDEF
    if isinstance(data, bool):
        return data
    if isinstance(data, int):
        return data
    if isinstance(data, str):
        atom = model.atom(data)
        if atom is None:
            raise EnvScriptError(f"{where}: unknown atom {data}")
        return atom
    if isinstance(data, list):
        return tuple(json_to_value(model, x, where) for x in data)
    raise EnvScriptError(f"{where}: unsupported value {data!r}")


def _parse_location(model: Model, text: str, where: str) -> Location:
    try:
        tokens = tokenize(text)
    except LexError as e:
        raise EnvScriptError(f"{where}: {e.message}") from e
    tokens = [t for t in tokens if t.kind != "eof"]
    if not tokens or tokens[0].kind != "ident":
        raise EnvScriptError(f"{where}: location must start with a function name: {text!r}")
    name = tokens[0].text
    sym = model.symbols.get(name)
    if sym is None:
        raise EnvScriptError(f"{where}: unknown function {name}")
    args: list[Value] = []
    rest = tokens[1:]
    if rest:
        if rest[0].text != "(" or rest[-1].text != ")":
            raise EnvScriptError(f"{where}: malformed location {text!r}")
        expect_arg = True
        for t in rest[1:-1]:
            if expect_arg:
                args.append(_arg_value(model, t, where))
                expect_arg = False
            else:
                if t.text != ",":
                    raise EnvScriptError(f"{where}: malformed location {text!r}")
                expect_arg = True
        if expect_arg and len(rest) > 2:
            raise EnvScriptError(f"{where}: malformed location {text!r}")
    if len(args) != sym.arity:
        raise EnvScriptError(f"{where}: {name} expects {sym.arity} arguments, got {len(args)}")
    return Location(name, tuple(args))


def _arg_value(model: Model, t: Token, where: str) -> Value:
    if t.kind == "int":
        return int(t.text)
    if t.text == "true":
        return True
    if t.text == "false":
        return False
    if t.text == "undef":
        return UNDEF
    if t.kind == "ident":
        atom = model.atom(t.text)
        if atom is None:
            raise EnvScriptError(f"{where}: unknown atom {t.text}")
        return atom
    raise EnvScriptError(f"{where}: bad location argument {t.text!r}")


def parse_env_script(data: Union[str, dict], model: Model) -> EnvScript:
    """Parse and validate a script against a model.  Raises EnvScriptError."""
    if isinstance(data, str):
        try:
            data = json.loads(data)
        except json.JSONDecodeError as e:
            raise EnvScriptError(f"invalid JSON: {e}") from e
    if not isinstance(data, dict) or not isinstance(data.get("steps", {}), dict):
        raise EnvScriptError('script must be an object with a "steps" mapping')
    steps: dict[int, tuple[Update, ...]] = {}
    for step_key, batch in data.get("steps", {}).items():
        try:
            step = int(step_key)
        except (TypeError, ValueError):
            raise EnvScriptError(f"step key {step_key!r} is not an integer") from None
        if step < 0:
            raise EnvScriptError(f"step {step} is negative")
        if not isinstance(batch, list):
            raise EnvScriptError(f"step {step}: updates must be a list")
        ups: list[Update] = []
        for i, entry in enumerate(batch):
            where = f"step {step}, update {i}"
            if not isinstance(entry, dict) or "location" not in entry or "value" not in entry:
                raise EnvScriptError(f'{where}: expected {{"location", "value"}}')
            loc = _parse_location(model, str(entry["location"]), where)
            sym = model.symbols[loc.func]
            if sym.kind not in (Kind.MONITORED, Kind.SHARED):
                raise EnvScriptError(
                    f"{where}: environment may only write monitored or shared symbols, {loc.func} is {sym.kind.value}"
                )
            if sym.scope is Scope.LOCAL:
                raise EnvScriptError(f"{where}: agent-local symbol {loc.func} cannot be scripted")
            for a, dom in zip(loc.args, sym.arg_domains):
                if not hasattr(a, "domain") or a.domain != dom:
                    raise EnvScriptError(f"{where}: argument {a!r} not in domain {dom}")
            v = json_to_value(model, entry["value"], where)
            if not value_in_result_domain(model, sym, v):
                raise EnvScriptError(f"{where}: value {v!r} outside result domain {sym.result} of {loc.func}")
            ups.append((loc, v))
        clash = clashing_pair(ups)
        if clash is not None:
            loc, va, vb = clash
            raise EnvScriptError(f"step {step}: {loc!r} written with both {va!r} and {vb!r}")
        if ups:
            steps[step] = tuple(ups)
    return EnvScript(steps)


def env_script_to_dict(script: EnvScript) -> dict:
    out: dict[str, list] = {}
    for step in sorted(script.steps):
        out[str(step)] = [
            {"location": repr(loc), "value": value_to_json(v)} for loc, v in script.steps[step]
        ]
    return {"steps": out}


def load_env_script(path: str, model: Model) -> EnvScript:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_env_script(fh.read(), model)
