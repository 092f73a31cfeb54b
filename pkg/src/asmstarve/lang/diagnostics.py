"""Diagnostics shared by the parser and the validator."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional


@dataclass(frozen=True)
class Diagnostic:
    severity: str  # 'error' or 'warning'
    message: str
    file: str = "<input>"
    line: int = 0
    col: int = 0

    def format(self) -> str:
        return f"{self.file}:{self.line}:{self.col}: {self.severity}: {self.message}"


class ParseError(Exception):
    def __init__(self, message: str, line: int, col: int):
        self.message = message
        self.line = line
        self.col = col
        super().__init__(f"{line}:{col}: {message}")

    def to_diagnostic(self, filename: str = "<input>") -> Diagnostic:
        return Diagnostic("error", self.message, filename, self.line, self.col)


def has_errors(diags: list[Diagnostic]) -> bool:
    return any(d.severity == "error" for d in diags)
