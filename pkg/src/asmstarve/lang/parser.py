"""Recursive-descent parser for the machine description language.

Names must be declared before use; the parser resolves identifiers against
the declarations seen so far, so a bare identifier in term position is either
a bound variable or a declared domain atom.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from ..core import ast
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
    SourcePos,
    Term,
    Var,
)
from ..core.signature import BUILTIN_RESULT_TYPES, FunctionSymbol, Kind, RuleDef, Scope
from ..core.values import UNDEF, Atom
from .diagnostics import Diagnostic, ParseError
from .lexer import LexError, Token, tokenize
from .model import AgentBinding, Model, PredicateDef, RankingDef

KIND_NAMES = {k.value: k for k in Kind}


@dataclass
class ParseResult:
    model: Optional[Model]
    diagnostics: list[Diagnostic] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.model is not None


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.i = 0
        self.model = Model()
        self.scopes: list[set[str]] = []

    # -- token plumbing -------------------------------------------------

    @property
    def ct(self) -> Token:
        return self.tokens[self.i]

    def advance(self) -> Token:
        t = self.ct
        if t.kind != "eof":
            self.i += 1
        return t

    def at(self, kind: str, text: Optional[str] = None) -> bool:
        t = self.ct
        return t.kind == kind and (text is None or t.text == text)

    def at_next(self, kind: str, text: Optional[str] = None) -> bool:
        if self.i + 1 >= len(self.tokens):
            return False
        t = self.tokens[self.i + 1]
        return t.kind == kind and (text is None or t.text == text)

    def expect(self, kind: str, text: Optional[str] = None) -> Token:
        if not self.at(kind, text):
            want = text if text is not None else kind
            raise ParseError(f"expected {want!r}, found {self.ct.text or 'end of input'!r}", self.ct.line, self.ct.col)
        return self.advance()

    def pos(self, t: Token) -> SourcePos:
        return SourcePos(t.line, t.col)

    # -- scoping --------------------------------------------------------

    def bound(self, name: str) -> bool:
        return any(name in s for s in self.scopes)

    def push(self, *names: str):
        self.scopes.append(set(names))

    def pop(self):
        self.scopes.pop()

    # -- model ----------------------------------------------------------

    def parse_model(self) -> Model:
        t = self.expect("keyword", "dasm")
        self.model.name = self.expect("ident").text
        while not self.at("eof"):
            if self.at("keyword", "domain"):
                self.parse_domain()
            elif self.at("keyword", "function"):
                self.parse_function()
            elif self.at("keyword", "init"):
                self.parse_init()
            elif self.at("keyword", "rule"):
                self.parse_rule_def()
            elif self.at("keyword", "agent"):
                self.parse_binding()
            elif self.at("keyword", "predicate"):
                self.parse_predicate()
            elif self.at("keyword", "ranking"):
                self.parse_ranking()
            else:
                raise ParseError(f"expected a declaration, found {self.ct.text!r}", self.ct.line, self.ct.col)
        _ = t
        return self.model

    def parse_domain(self):
        self.expect("keyword", "domain")
        name_tok = self.expect("ident")
        name = name_tok.text
        if name in self.model.domains or name in BUILTIN_RESULT_TYPES:
            raise ParseError(f"domain {name} already declared", name_tok.line, name_tok.col)
        self.expect("symbol", "=")
        self.expect("symbol", "{")
        atoms: list[Atom] = []
        while True:
            at = self.expect("ident")
            if self.model.atom(at.text) is not None or any(a.name == at.text for a in atoms):
                raise ParseError(f"atom {at.text} already declared", at.line, at.col)
            atoms.append(Atom(name, at.text))
            if self.at("symbol", ","):
                self.advance()
                continue
            break
        self.expect("symbol", "}")
        self.model.domains[name] = tuple(atoms)

    def _result_name(self) -> str:
        t = self.expect("ident")
        if t.text not in BUILTIN_RESULT_TYPES and t.text not in self.model.domains:
            raise ParseError(f"unknown domain {t.text}", t.line, t.col)
        return t.text

    def _arg_domain_name(self) -> str:
        t = self.expect("ident")
        if t.text not in self.model.domains:
            raise ParseError(f"argument domains must be declared finite domains, got {t.text}", t.line, t.col)
        return t.text

    def parse_function(self):
        self.expect("keyword", "function")
        name_tok = self.expect("ident")
        name = name_tok.text
        if name in self.model.symbols or name in BUILTIN_FUNCS:
            raise ParseError(f"function {name} already declared", name_tok.line, name_tok.col)
        self.expect("symbol", ":")
        arg_domains: list[str] = []
        if self.at("symbol", "->"):
            self.advance()
        else:
            arg_domains.append(self._arg_domain_name())
            while self.at("ident", "x"):
                self.advance()
                arg_domains.append(self._arg_domain_name())
            self.expect("symbol", "->")
        result = self._result_name()
        kind_tok = self.expect("ident")
        if kind_tok.text not in KIND_NAMES:
            raise ParseError(f"unknown function kind {kind_tok.text}", kind_tok.line, kind_tok.col)
        kind = KIND_NAMES[kind_tok.text]
        scope = Scope.GLOBAL
        if self.at("ident", "local"):
            self.advance()
            scope = Scope.LOCAL
        params: tuple[str, ...] = ()
        definition = None
        if kind is Kind.DERIVED:
            self.expect("symbol", "(")
            names = []
            if not self.at("symbol", ")"):
                while True:
                    names.append(self.expect("ident").text)
                    if self.at("symbol", ","):
                        self.advance()
                        continue
                    break
            self.expect("symbol", ")")
            if len(names) != len(arg_domains):
                raise ParseError(
                    f"derived {name} declares {len(arg_domains)} arguments but {len(names)} parameters",
                    name_tok.line,
                    name_tok.col,
                )
            params = tuple(names)
            self.expect("symbol", ":=")
            self.push(*params)
            definition = self.parse_formula() if result == "bool" else self.parse_term()
            self.pop()
        self.model.symbols[name] = FunctionSymbol(
            name=name,
            arg_domains=tuple(arg_domains),
            result=result,
            kind=kind,
            scope=scope,
            derived_params=params,
            derived_def=definition,
        )

    def parse_init(self):
        t = self.expect("keyword", "init")
        if self.model.init:
            raise ParseError("init block already declared", t.line, t.col)
        self.expect("symbol", "{")
        items: list[Rule] = []
        while not self.at("symbol", "}"):
            items.append(self.parse_rule())
        self.expect("symbol", "}")
        self.model.init = tuple(items)

    def parse_rule_def(self):
        self.expect("keyword", "rule")
        name_tok = self.expect("ident")
        name = name_tok.text
        if name in self.model.rules:
            raise ParseError(f"rule {name} already declared", name_tok.line, name_tok.col)
        self.expect("symbol", "(")
        params: list[str] = []
        if not self.at("symbol", ")"):
            while True:
                params.append(self.expect("ident").text)
                if self.at("symbol", ","):
                    self.advance()
                    continue
                break
        self.expect("symbol", ")")
        self.expect("symbol", "=")
        self.push(*params)
        body = self.parse_rule()
        self.pop()
        self.model.rules[name] = RuleDef(name, tuple(params), body)

    def parse_binding(self):
        t = self.expect("keyword", "agent")
        var = self.expect("ident").text
        self.expect("keyword", "in")
        dom_tok = self.expect("ident")
        if dom_tok.text not in self.model.domains:
            raise ParseError(f"unknown domain {dom_tok.text}", dom_tok.line, dom_tok.col)
        self.expect("keyword", "runs")
        rule_tok = self.expect("ident")
        if rule_tok.text not in self.model.rules:
            raise ParseError(f"unknown rule {rule_tok.text}", rule_tok.line, rule_tok.col)
        self.expect("symbol", "(")
        args: list[Term] = []
        self.push(var)
        if not self.at("symbol", ")"):
            while True:
                args.append(self.parse_term())
                if self.at("symbol", ","):
                    self.advance()
                    continue
                break
        self.pop()
        self.expect("symbol", ")")
        self.model.bindings = self.model.bindings + (
            AgentBinding(var, dom_tok.text, rule_tok.text, tuple(args), pos=self.pos(t)),
        )

    def parse_predicate(self):
        t = self.expect("keyword", "predicate")
        name_tok = self.expect("ident")
        if any(p.name == name_tok.text for p in self.model.predicates):
            raise ParseError(f"predicate {name_tok.text} already declared", name_tok.line, name_tok.col)
        self.expect("keyword", "for")
        var = self.expect("ident").text
        self.expect("keyword", "in")
        dom_tok = self.expect("ident")
        if dom_tok.text not in self.model.domains:
            raise ParseError(f"unknown domain {dom_tok.text}", dom_tok.line, dom_tok.col)
        self.expect("symbol", ":=")
        self.push(var)
        formula = self.parse_formula()
        self.pop()
        self.model.predicates = self.model.predicates + (
            PredicateDef(name_tok.text, var, dom_tok.text, formula, pos=self.pos(t)),
        )

    def parse_ranking(self):
        t = self.expect("keyword", "ranking")
        # the counter term may use the predicate's variable; resolve it after
        # reading the predicate name by re-parsing within its scope
        start = self.i
        depth = 0
        while not (self.at("keyword", "for") and depth == 0):
            if self.at("symbol", "("):
                depth += 1
            elif self.at("symbol", ")"):
                depth -= 1
            elif self.at("eof"):
                raise ParseError("expected 'for' in ranking declaration", self.ct.line, self.ct.col)
            self.advance()
        for_idx = self.i
        self.expect("keyword", "for")
        pred_tok = self.expect("ident")
        pred = next((p for p in self.model.predicates if p.name == pred_tok.text), None)
        if pred is None:
            raise ParseError(f"unknown predicate {pred_tok.text}", pred_tok.line, pred_tok.col)
        end = self.i
        self.i = start
        self.push(pred.var)
        counter = self.parse_term()
        self.pop()
        if self.i != for_idx:
            raise ParseError("malformed counter term in ranking declaration", self.ct.line, self.ct.col)
        self.i = end
        self.model.rankings = self.model.rankings + (RankingDef(counter, pred_tok.text, pos=self.pos(t)),)

    # -- rules ------------------------------------------------------------

    def parse_rule(self) -> Rule:
        label = None
        if self.at("ident") and self.at_next("symbol", ":"):
            label = self.advance().text
            self.advance()
        rule = self.parse_rule_core()
        if label is not None:
            rule = ast.with_label(rule, label)
        return rule

    def parse_rule_core(self) -> Rule:
        t = self.ct
        if self.at("keyword", "skip"):
            self.advance()
            return Skip(pos=self.pos(t))
        if self.at("keyword", "if"):
            self.advance()
            guard = self.parse_formula()
            self.expect("keyword", "then")
            body = self.parse_rule()
            return Cond(guard, body, pos=self.pos(t))
        if self.at("symbol", "{"):
            self.advance()
            items: list[Rule] = []
            while not self.at("symbol", "}"):
                items.append(self.parse_rule())
            self.expect("symbol", "}")
            return Block(tuple(items), pos=self.pos(t))
        if self.at("keyword", "forall"):
            self.advance()
            var = self.expect("ident").text
            self.expect("keyword", "in")
            dom_tok = self.expect("ident")
            if dom_tok.text not in self.model.domains:
                raise ParseError(f"forall ranges over a declared domain, got {dom_tok.text}", dom_tok.line, dom_tok.col)
            self.expect("keyword", "do")
            self.push(var)
            body = self.parse_rule()
            self.pop()
            return ForallRule(var, dom_tok.text, body, pos=self.pos(t))
        if self.at("keyword", "choose"):
            self.advance()
            var = self.expect("ident").text
            self.expect("keyword", "in")
            domain, seq = self.parse_collection()
            where = None
            ranking = None
            self.push(var)
            if self.at("keyword", "with"):
                self.advance()
                where = self.parse_formula()
            if self.at("keyword", "max"):
                self.advance()
                ranking = self.parse_term()
            self.expect("keyword", "do")
            body = self.parse_rule()
            self.pop()
            return Choose(var, domain, seq, where, ranking, body, pos=self.pos(t))
        if self.at("ident"):
            name_tok = self.advance()
            self.expect("symbol", "(")
            args: list[Term] = []
            if not self.at("symbol", ")"):
                while True:
                    args.append(self.parse_term())
                    if self.at("symbol", ","):
                        self.advance()
                        continue
                    break
            self.expect("symbol", ")")
            if self.at("symbol", ":="):
                self.advance()
                if name_tok.text not in self.model.symbols:
                    raise ParseError(f"unknown function {name_tok.text}", name_tok.line, name_tok.col)
                value = self.parse_term()
                target = Apply(name_tok.text, tuple(args), pos=self.pos(name_tok))
                return Assign(target, value, pos=self.pos(name_tok))
            if name_tok.text not in self.model.rules:
                raise ParseError(f"unknown rule {name_tok.text}", name_tok.line, name_tok.col)
            return Call(name_tok.text, tuple(args), pos=self.pos(name_tok))
        raise ParseError(f"expected a rule, found {self.ct.text or 'end of input'!r}", t.line, t.col)

    def parse_collection(self) -> tuple[Optional[str], Optional[Term]]:
        """After 'in': a declared domain name, or a sequence-valued term."""
        if self.at("ident") and self.ct.text in self.model.domains and not self.at_next("symbol", "("):
            return self.advance().text, None
        return None, self.parse_term()

    # -- formulas -----------------------------------------------------------

    def parse_formula(self) -> Formula:
        items = [self.parse_and()]
        while self.at("keyword", "or"):
            self.advance()
            items.append(self.parse_and())
        if len(items) == 1:
            return items[0]
        return Or(tuple(items))

    def parse_and(self) -> Formula:
        items = [self.parse_unary_formula()]
        while self.at("keyword", "and"):
            self.advance()
            items.append(self.parse_unary_formula())
        if len(items) == 1:
            return items[0]
        return And(tuple(items))

    def parse_unary_formula(self) -> Formula:
        t = self.ct
        if self.at("keyword", "not"):
            self.advance()
            return Not(self.parse_unary_formula(), pos=self.pos(t))
        if self.at("keyword", "forall") or self.at("keyword", "exists"):
            kw = self.advance().text
            var = self.expect("ident").text
            self.expect("keyword", "in")
            dom_tok = self.expect("ident")
            if dom_tok.text not in self.model.domains:
                raise ParseError(f"unknown domain {dom_tok.text}", dom_tok.line, dom_tok.col)
            self.expect("symbol", ":")
            self.push(var)
            body = self.parse_formula()
            self.pop()
            node = ForallF if kw == "forall" else ExistsF
            return node(var, dom_tok.text, body, pos=self.pos(t))
        if self.at("symbol", "("):
            self.advance()
            inner = self.parse_formula()
            self.expect("symbol", ")")
            return inner
        return self.parse_comparison()

    def parse_comparison(self) -> Formula:
        t = self.ct
        left = self.parse_term()
        if self.at("symbol", "="):
            self.advance()
            return Eq(left, self.parse_term(), pos=self.pos(t))
        if self.at("symbol", "!="):
            self.advance()
            return Not(Eq(left, self.parse_term(), pos=self.pos(t)), pos=self.pos(t))
        if self.at("keyword", "in"):
            self.advance()
            domain, seq = self.parse_collection()
            if domain is not None:
                return InDomain(left, domain, pos=self.pos(t))
            return InSeq(left, seq, pos=self.pos(t))
        # a bare term in formula position asserts boolean truth
        return Eq(left, Const(True), pos=self.pos(t))

    # -- terms ----------------------------------------------------------------

    def parse_term(self) -> Term:
        left = self.parse_primary()
        while self.at("symbol", "+") or self.at("symbol", "-"):
            op = self.advance().text
            right = self.parse_primary()
            left = Apply(op, (left, right))
        return left

    def parse_const_item(self) -> Const:
        item = self.parse_primary()
        if not isinstance(item, Const):
            raise ParseError("sequence literals may contain only constants", self.ct.line, self.ct.col)
        return item

    def parse_primary(self) -> Term:
        t = self.ct
        if self.at("int"):
            self.advance()
            return Const(int(t.text), pos=self.pos(t))
        if self.at("symbol", "-") and self.at_next("int"):
            self.advance()
            num = self.advance()
            return Const(-int(num.text), pos=self.pos(t))
        if self.at("keyword", "true"):
            self.advance()
            return Const(True, pos=self.pos(t))
        if self.at("keyword", "false"):
            self.advance()
            return Const(False, pos=self.pos(t))
        if self.at("keyword", "undef"):
            self.advance()
            return Const(UNDEF, pos=self.pos(t))
        if self.at("keyword", "self"):
            self.advance()
            return SelfRef(pos=self.pos(t))
        if self.at("symbol", "["):
            self.advance()
            items: list = []
            if not self.at("symbol", "]"):
                while True:
                    items.append(self.parse_const_item().value)
                    if self.at("symbol", ","):
                        self.advance()
                        continue
                    break
            self.expect("symbol", "]")
            return Const(tuple(items), pos=self.pos(t))
        if self.at("ident"):
            name_tok = self.advance()
            name = name_tok.text
            if self.at("symbol", "("):
                self.advance()
                args: list[Term] = []
                if not self.at("symbol", ")"):
                    while True:
                        args.append(self.parse_term())
                        if self.at("symbol", ","):
                            self.advance()
                            continue
                        break
                self.expect("symbol", ")")
                if name in BUILTIN_FUNCS:
                    if len(args) != BUILTIN_FUNCS[name]:
                        raise ParseError(
                            f"{name} takes {BUILTIN_FUNCS[name]} arguments, got {len(args)}",
                            name_tok.line,
                            name_tok.col,
                        )
                elif name not in self.model.symbols:
                    raise ParseError(f"unknown function {name}", name_tok.line, name_tok.col)
                return Apply(name, tuple(args), pos=self.pos(name_tok))
            if self.bound(name):
                return Var(name, pos=self.pos(name_tok))
            atom = self.model.atom(name)
            if atom is not None:
                return Const(atom, pos=self.pos(name_tok))
            raise ParseError(f"unknown name {name}", name_tok.line, name_tok.col)
        raise ParseError(f"expected a term, found {self.ct.text or 'end of input'!r}", t.line, t.col)


def parse_model(source: str, filename: str = "<input>") -> ParseResult:
    """Parse model source text; on failure the result carries diagnostics."""
    try:
        tokens = tokenize(source)
    except LexError as e:
        return ParseResult(None, [Diagnostic("error", e.message, filename, e.line, e.col)])
    try:
        model = _Parser(tokens).parse_model()
    except ParseError as e:
        return ParseResult(None, [e.to_diagnostic(filename)])
    return ParseResult(model, [])
