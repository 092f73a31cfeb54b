"""Surface syntax: lexer, parser, validator, and printer behavior."""

from asmstarve.corpus import entries
from asmstarve.lang import parse_model, pretty_print, tokenize, validate_model


def diags_of(src, validate=False):
    res = parse_model(src, "probe.asm")
    if res.diagnostics or not validate:
        return res.diagnostics
    return validate_model(res.model, "probe.asm")


def test_tokenizer_classifies_core_tokens():
    toks = tokenize("rule R() = x(self) := [1, a]")
    kinds = [(t.kind, t.text) for t in toks if t.kind != "eof"]
    assert ("keyword", "rule") in kinds
    assert ("symbol", ":=") in kinds
    assert ("int", "1") in kinds
    assert ("ident", "a") in kinds


def test_lexer_reports_bad_character_position():
    src = (
        "dasm m\n"
        "domain d = { a }\n"
        "function x : d -> int controlled\n"
        "init { x(a) := 0 }\n"
        "rule R() = { l: if x(self) = 0 then x(self) := $ }\n"
        "agent u in d runs R()"
    )
    (d,) = diags_of(src)
    assert d.severity == "error"
    assert "unexpected character" in d.message
    assert (d.line, d.col) == (5, 48)
    assert d.format() == "probe.asm:5:48: error: " + d.message


def test_parser_requires_declaration_before_use():
    (d,) = diags_of("dasm m\ndomain d = { a }\ninit { y(a) := 0 }\n")
    assert "unknown function y" in d.message
    assert (d.line, d.col) == (3, 8)


def test_parser_rejects_duplicate_atoms():
    (d,) = diags_of("dasm m\ndomain d = { a, a }\n")
    assert "atom a already declared" in d.message
    assert (d.line, d.col) == (2, 17)


def test_parser_rejects_builtin_arity_mismatch():
    src = (
        "dasm m\n"
        "domain d = { a }\n"
        "function x : d -> seq controlled\n"
        "init { x(a) := [] }\n"
        "rule R() = { l: x(a) := append(x(a)) }\n"
        "agent u in d runs R()"
    )
    (d,) = diags_of(src)
    assert "append takes 2 arguments, got 1" in d.message


def test_validator_rejects_duplicate_labels():
    src = (
        "dasm m\n"
        "domain d = { a }\n"
        "function x : d -> int controlled\n"
        "init { x(a) := 0 }\n"
        "rule R() = { l: skip l: skip }\n"
        "agent u in d runs R()"
    )
    (d,) = diags_of(src, validate=True)
    assert "duplicate rule label l" in d.message
    assert (d.line, d.col) == (5, 25)


def test_validator_rejects_static_write_outside_init():
    src = (
        "dasm m\n"
        "domain d = { a }\n"
        "function base : d -> int static\n"
        "function x : d -> int controlled\n"
        "init { base(a) := 1  x(a) := 0 }\n"
        "rule R() = { l: if x(self) = 0 then base(self) := 2 }\n"
        "agent u in d runs R()"
    )
    (d,) = diags_of(src, validate=True)
    assert "may only be written during initialization" in d.message


def test_validator_rejects_monitored_write_by_rule():
    src = (
        "dasm m\n"
        "domain d = { a }\n"
        "function sensor : d -> int monitored\n"
        "function x : d -> int controlled\n"
        "init { sensor(a) := 1  x(a) := 0 }\n"
        "rule R() = { l: if x(self) = 0 then sensor(self) := 2 }\n"
        "agent u in d runs R()"
    )
    (d,) = diags_of(src, validate=True)
    assert "may only be written by the environment" in d.message


def test_validator_rejects_out_read():
    src = (
        "dasm m\n"
        "domain d = { a }\n"
        "function port : d -> int out\n"
        "function x : d -> int controlled\n"
        "init { x(a) := 0 }\n"
        "rule R() = { l: if port(self) = 0 then x(self) := 2 }\n"
        "agent u in d runs R()"
    )
    (d,) = diags_of(src, validate=True)
    assert "may not be read" in d.message


def test_validator_rejects_unknown_rule_binding():
    src = (
        "dasm m\n"
        "domain d = { a }\n"
        "function x : d -> int controlled\n"
        "init { x(a) := 0 }\n"
        "agent u in d runs Nope()"
    )
    (d,) = diags_of(src)
    assert "unknown rule Nope" in d.message


def test_validator_checks_rule_call_arity():
    src = (
        "dasm m\n"
        "domain d = { a }\n"
        "function x : d -> int controlled\n"
        "init { x(a) := 0 }\n"
        "rule Sub(p) = x(p) := 1\n"
        "rule R() = { l: if x(self) = 0 then Sub() }\n"
        "agent u in d runs R()"
    )
    (d,) = diags_of(src, validate=True)
    assert "rule Sub expects 1 arguments, got 0" in d.message


def test_validator_warns_on_unused_symbol():
    src = (
        "dasm m\n"
        "domain d = { a }\n"
        "function x : d -> int controlled\n"
        "rule R() = { l: skip }\n"
        "agent u in d runs R()"
    )
    (d,) = diags_of(src, validate=True)
    assert d.severity == "warning"
    assert "symbol x is never used" in d.message


def test_validator_flags_static_type_mismatch():
    src = (
        "dasm m\n"
        "domain d = { a }\n"
        "function x : d -> int controlled\n"
        "init { x(a) := 0 }\n"
        "rule R() = { l: if x(self) = 0 then x(self) := a }\n"
        "agent u in d runs R()"
    )
    (d,) = diags_of(src, validate=True)
    assert "assigned to x with result domain int" in d.message


def test_corpus_models_parse_and_validate_clean():
    for e in entries():
        res = parse_model(e.source(), str(e.path))
        assert not res.diagnostics, (e.name, [str(d) for d in res.diagnostics])
        errs = [d for d in validate_model(res.model) if d.severity == "error"]
        assert not errs, (e.name, [str(d) for d in errs])


def test_pretty_print_round_trips_every_corpus_model():
    for e in entries():
        printed = pretty_print(e.model())
        res = parse_model(printed, "roundtrip.asm")
        assert not res.diagnostics, (e.name, [str(d) for d in res.diagnostics])
        assert pretty_print(res.model) == printed, e.name
