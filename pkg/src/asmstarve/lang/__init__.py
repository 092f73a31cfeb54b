"""Modeling language: lexer, parser, printer, validation."""
from .diagnostics import Diagnostic, ParseError, has_errors
from .lexer import LexError, Token, tokenize
from .model import AgentBinding, Model, PredicateDef, RankingDef
from .parser import ParseResult, parse_model
from .printer import PrintError, pretty_print, render_formula, render_rule, render_term
from .validate import validate_model

__all__ = [
    "AgentBinding",
    "Diagnostic",
    "LexError",
    "Model",
    "ParseError",
    "ParseResult",
    "PredicateDef",
    "PrintError",
    "RankingDef",
    "Token",
    "has_errors",
    "parse_model",
    "pretty_print",
    "render_formula",
    "render_rule",
    "render_term",
    "tokenize",
    "validate_model",
]
