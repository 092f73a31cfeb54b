"""Registry over the bundled corpus: models, environment scripts, and the
frozen expected verdicts the test suite pins against."""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from ..engine.envscript import EnvScript, parse_env_script
from ..lang.model import Model
from ..lang.parser import parse_model
from . import builders

DATA_DIR = Path(__file__).parent / "data"


@dataclass(frozen=True)
class CorpusEntry:
    name: str
    file: str
    builder: str
    params: dict
    env_files: tuple[str, ...]
    expected: dict

    @property
    def path(self) -> Path:
        return DATA_DIR / self.file

    def source(self) -> str:
        return self.path.read_text()

    def model(self) -> Model:
        result = parse_model(self.source(), self.file)
        if not result.ok:
            msgs = "; ".join(d.format() for d in result.diagnostics)
            raise AssertionError(f"bundled corpus file failed to parse: {msgs}")
        return result.model

    def build(self) -> Model:
        fn = getattr(builders, self.builder)
        return fn(**self.params)

    def env(self, env_file: Optional[str] = None) -> Optional[EnvScript]:
        """The named env script, or the entry's first one, parsed against the model."""
        chosen = env_file or (self.env_files[0] if self.env_files else None)
        if chosen is None:
            return None
        if chosen not in self.env_files:
            raise KeyError(f"{self.name} has no env script {chosen!r}")
        data = json.loads((DATA_DIR / chosen).read_text())
        return parse_env_script(data, self.model())


def load_manifest() -> dict:
    return json.loads((DATA_DIR / "corpus.json").read_text())


def entries() -> list[CorpusEntry]:
    manifest = load_manifest()
    out = []
    for row in manifest["entries"]:
        out.append(
            CorpusEntry(
                name=row["name"],
                file=row["file"],
                builder=row["builder"],
                params=row["params"],
                env_files=tuple(row.get("env_files", ())),
                expected=row["expected"],
            )
        )
    return out


def entry(name: str) -> CorpusEntry:
    for e in entries():
        if e.name == name:
            return e
    raise KeyError(f"no corpus entry named {name!r}")


def load_model(name: str) -> Model:
    return entry(name).model()
