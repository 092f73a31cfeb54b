"""Hand-rolled lexer with line/column tracking for diagnostics."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

KEYWORDS = {
    "dasm",
    "domain",
    "function",
    "init",
    "rule",
    "agent",
    "predicate",
    "ranking",
    "runs",
    "in",
    "if",
    "then",
    "forall",
    "exists",
    "choose",
    "do",
    "with",
    "max",
    "and",
    "or",
    "not",
    "self",
    "undef",
    "true",
    "false",
    "skip",
    "for",
}

# Longest symbols first so ':=' wins over ':'.
SYMBOLS = [":=", "->", "!=", "(", ")", "{", "}", "[", "]", ",", ":", "=", "+", "-"]


@dataclass(frozen=True)
class Token:
    kind: str  # 'ident', 'int', 'keyword', 'symbol', 'eof'
    text: str
    line: int
    col: int


class LexError(Exception):
    def __init__(self, message: str, line: int, col: int):
        self.message = message
        self.line = line
        self.col = col
        super().__init__(f"{line}:{col}: {message}")


def tokenize(source: str) -> list[Token]:
    tokens: list[Token] = []
    i = 0
    line = 1
    col = 1
    n = len(source)
    while i < n:
        c = source[i]
        if c == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if c in " \t\r":
            i += 1
            col += 1
            continue
        if c == "#":  # comment to end of line
            while i < n and source[i] != "\n":
                i += 1
            continue
        if c.isalpha() or c == "_":
            start = i
            while i < n and (source[i].isalnum() or source[i] == "_"):
                i += 1
            text = source[start:i]
            kind = "keyword" if text in KEYWORDS else "ident"
            tokens.append(Token(kind, text, line, col))
            col += i - start
            continue
        if c.isdigit():
            start = i
            while i < n and source[i].isdigit():
                i += 1
            tokens.append(Token("int", source[start:i], line, col))
            col += i - start
            continue
        matched: Optional[str] = None
        for sym in SYMBOLS:
            if source.startswith(sym, i):
                matched = sym
                break
        if matched is None:
            raise LexError(f"unexpected character {c!r}", line, col)
        tokens.append(Token("symbol", matched, line, col))
        i += len(matched)
        col += len(matched)
    tokens.append(Token("eof", "", line, col))
    return tokens
