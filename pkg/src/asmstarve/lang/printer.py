"""Canonical pretty-printer; re-parsing its output reproduces the model."""
from __future__ import annotations

from ..core.ast import (
    And,
    Apply,
    Assign,
    Block,
    BUILTIN_FUNCS,
    Call,
    Choose,
    Cond,
    Const,
    Eq,
    ExistsF,
    ForallF,
    ForallRule,
    Formula,
    InDomain,
    InSeq,
    Not,
    Or,
    Rule,
    SelfRef,
    Skip,
    Term,
    Var,
)
from ..core.signature import Kind
from ..core.values import format_value
from .model import Model


class PrintError(Exception):
    pass


# formula precedence levels: quantifiers bind weakest, atoms strongest
_PREC_QUANT = 0
_PREC_OR = 1
_PREC_AND = 2
_PREC_NOT = 3
_PREC_ATOM = 4


def render_term(t: Term) -> str:
    if isinstance(t, Const):
        return format_value(t.value)
    if isinstance(t, Var):
        return t.name
    if isinstance(t, SelfRef):
        return "self"
    if isinstance(t, Apply):
        if t.func in ("+", "-"):
            left, right = t.args
            if isinstance(right, Apply) and right.func in ("+", "-"):
                raise PrintError("right-nested arithmetic has no concrete syntax; rebalance the term")
            return f"{render_term(left)} {t.func} {render_term(right)}"
        inner = ", ".join(render_term(a) for a in t.args)
        return f"{t.func}({inner})"
    raise PrintError(f"not a term: {t!r}")


def _prec(f: Formula) -> int:
    if isinstance(f, (ForallF, ExistsF)):
        return _PREC_QUANT
    if isinstance(f, Or):
        return _PREC_OR
    if isinstance(f, And):
        return _PREC_AND
    if isinstance(f, Not):
        # negated equality renders as the atomic '!=' form
        if isinstance(f.body, Eq) and not _is_true_const(f.body.right):
            return _PREC_ATOM
        return _PREC_NOT
    return _PREC_ATOM


def _is_true_const(t: Term) -> bool:
    return isinstance(t, Const) and t.value is True


def render_formula(f: Formula, min_prec: int = 0) -> str:
    text = _render_formula_inner(f)
    if _prec(f) < min_prec:
        return f"({text})"
    return text


def _render_formula_inner(f: Formula) -> str:
    if isinstance(f, Eq):
        if _is_true_const(f.right):
            return render_term(f.left)
        return f"{render_term(f.left)} = {render_term(f.right)}"
    if isinstance(f, InDomain):
        return f"{render_term(f.item)} in {f.domain}"
    if isinstance(f, InSeq):
        return f"{render_term(f.item)} in {render_term(f.seq)}"
    if isinstance(f, Not):
        if isinstance(f.body, Eq) and not _is_true_const(f.body.right):
            return f"{render_term(f.body.left)} != {render_term(f.body.right)}"
        return f"not {render_formula(f.body, _PREC_ATOM)}"
    if isinstance(f, And):
        return " and ".join(render_formula(x, _PREC_NOT) for x in f.items)
    if isinstance(f, Or):
        return " or ".join(render_formula(x, _PREC_AND) for x in f.items)
    if isinstance(f, (ForallF, ExistsF)):
        kw = "forall" if isinstance(f, ForallF) else "exists"
        return f"{kw} {f.var} in {f.domain} : {render_formula(f.body)}"
    raise PrintError(f"not a formula: {f!r}")


def render_rule(rule: Rule, indent: int = 0) -> list[str]:
    pad = "  " * indent
    prefix = f"{rule.label}: " if rule.label else ""
    if isinstance(rule, Skip):
        return [f"{pad}{prefix}skip"]
    if isinstance(rule, Assign):
        return [f"{pad}{prefix}{render_term(rule.target)} := {render_term(rule.value)}"]
    if isinstance(rule, Call):
        inner = ", ".join(render_term(a) for a in rule.args)
        return [f"{pad}{prefix}{rule.rule}({inner})"]
    if isinstance(rule, Block):
        lines = [f"{pad}{prefix}{{"]
        for item in rule.items:
            lines.extend(render_rule(item, indent + 1))
        lines.append(f"{pad}}}")
        return lines
    if isinstance(rule, Cond):
        head = f"{pad}{prefix}if {render_formula(rule.guard)} then"
        return _with_body(head, rule.then, indent)
    if isinstance(rule, ForallRule):
        head = f"{pad}{prefix}forall {rule.var} in {rule.domain} do"
        return _with_body(head, rule.body, indent)
    if isinstance(rule, Choose):
        coll = rule.domain if rule.domain is not None else render_term(rule.seq)
        head = f"{pad}{prefix}choose {rule.var} in {coll}"
        if rule.where is not None:
            head += f" with {render_formula(rule.where)}"
        if rule.ranking is not None:
            head += f" max {render_term(rule.ranking)}"
        head += " do"
        return _with_body(head, rule.body, indent)
    raise PrintError(f"not a rule: {rule!r}")


def _with_body(head: str, body: Rule, indent: int) -> list[str]:
    lines = render_rule(body, indent + 1)
    if isinstance(body, Block) and body.label is None:
        # merge the opening brace onto the head line
        body_lines = render_rule(body, indent)
        return [f"{head} {body_lines[0].lstrip()}"] + body_lines[1:]
    return [head] + lines


def pretty_print(model: Model) -> str:
    """Emit the model in canonical concrete syntax."""
    out: list[str] = [f"dasm {model.name}", ""]
    for name, atoms in model.domains.items():
        names = ", ".join(a.name for a in atoms)
        out.append(f"domain {name} = {{ {names} }}")
    if model.domains:
        out.append("")
    for sym in model.symbols.values():
        if sym.arg_domains:
            sig = " x ".join(sym.arg_domains) + f" -> {sym.result}"
        else:
            sig = f"-> {sym.result}"
        line = f"function {sym.name} : {sig} {sym.kind.value}"
        if sym.scope.value == "local":
            line += " local"
        if sym.kind is Kind.DERIVED:
            params = ", ".join(sym.derived_params)
            body = (
                render_formula(sym.derived_def)
                if sym.result == "bool"
                else render_term(sym.derived_def)
            )
            line += f"({params}) := {body}"
        out.append(line)
    if model.symbols:
        out.append("")
    if model.init:
        out.append("init {")
        for item in model.init:
            out.extend(render_rule(item, 1))
        out.append("}")
        out.append("")
    for rdef in model.rules.values():
        params = ", ".join(rdef.params)
        body_lines = render_rule(rdef.body, 0)
        out.append(f"rule {rdef.name}({params}) = {body_lines[0]}")
        out.extend(body_lines[1:])
        out.append("")
    for b in model.bindings:
        inner = ", ".join(render_term(a) for a in b.args)
        out.append(f"agent {b.var} in {b.domain} runs {b.rule}({inner})")
    if model.bindings:
        out.append("")
    for p in model.predicates:
        out.append(f"predicate {p.name} for {p.var} in {p.domain} := {render_formula(p.formula)}")
    if model.predicates:
        out.append("")
    for r in model.rankings:
        out.append(f"ranking {render_term(r.counter)} for {r.predicate}")
    while out and out[-1] == "":
        out.pop()
    return "\n".join(out) + "\n"
