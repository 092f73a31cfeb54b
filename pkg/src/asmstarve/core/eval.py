"""Term and formula evaluation and parallel update collection.

Evaluation is total over well-formed input: unset locations read undef,
equality and membership are defined for every value pair, and a ``choose``
with no candidate contributes nothing.  Errors are reserved for genuinely
ill-formed situations (unbound variables, arity mismatches, derived-definition
cycles, writes that violate a symbol's kind or result domain).
"""
from __future__ import annotations

from typing import Mapping, Optional

from .ast import (
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
from .signature import FunctionSymbol, Kind, Location, Scope, Vocabulary
from .state import State, Update
from .values import UNDEF, Atom, Undef, Value, values_equal

Env = Mapping[str, Value]  # variable bindings; the executing agent is under "self"

MAX_CALL_DEPTH = 64


class EvalError(Exception):
    def __init__(self, message: str, pos=None):
        self.message = message
        self.pos = pos
        super().__init__(message)


class UnboundVariableError(EvalError):
    pass


class ArityError(EvalError):
    pass


class DerivedCycleError(EvalError):
    pass


class KindViolationError(EvalError):
    """A rule wrote a symbol its kind forbids (monitored/derived, or static
    outside initialization)."""


class ResultDomainError(EvalError):
    """A write carried a value outside the symbol's declared result domain."""


def _location(vocab: Vocabulary, sym: FunctionSymbol, args: tuple[Value, ...], env: Env) -> Location:
    if sym.scope is Scope.LOCAL:
        owner = env.get("self")
        if owner is None:
            raise EvalError(f"agent-local symbol {sym.name} used outside an agent context")
        return Location(sym.name, args, owner=owner)
    return Location(sym.name, args)


def _eval_builtin(func: str, args: list[Value], pos) -> Value:
    if func == "append":
        seq, item = args
        if isinstance(seq, Undef):
            seq = ()
        if not isinstance(seq, tuple):
            raise EvalError(f"append expects a sequence, got {seq!r}", pos)
        return seq + (item,)
    # integer arithmetic; undef operands propagate undef to stay total
    a, b = args
    if isinstance(a, Undef) or isinstance(b, Undef):
        return UNDEF
    if isinstance(a, bool) or isinstance(b, bool) or not isinstance(a, int) or not isinstance(b, int):
        raise EvalError(f"arithmetic on non-integers: {a!r} {func} {b!r}", pos)
    return a + b if func == "+" else a - b


def eval_term(state: State, vocab: Vocabulary, env: Env, term: Term, _derived_stack: tuple[str, ...] = ()) -> Value:
    """Evaluate a term in a state under variable bindings."""
    if isinstance(term, Const):
        return term.value
    if isinstance(term, Var):
        if term.name not in env:
            raise UnboundVariableError(f"unbound variable {term.name}", term.pos)
        return env[term.name]
    if isinstance(term, SelfRef):
        if "self" not in env:
            raise EvalError("self used outside an agent context", term.pos)
        return env["self"]
    if isinstance(term, Apply):
        if term.func in BUILTIN_FUNCS:
            if len(term.args) != BUILTIN_FUNCS[term.func]:
                raise ArityError(f"{term.func} expects {BUILTIN_FUNCS[term.func]} arguments", term.pos)
            return _eval_builtin(term.func, [eval_term(state, vocab, env, a, _derived_stack) for a in term.args], term.pos)
        sym = vocab.symbols.get(term.func)
        if sym is None:
            raise EvalError(f"unknown function {term.func}", term.pos)
        if len(term.args) != sym.arity:
            raise ArityError(f"{sym.name} expects {sym.arity} arguments, got {len(term.args)}", term.pos)
        args = tuple(eval_term(state, vocab, env, a, _derived_stack) for a in term.args)
        if sym.kind is Kind.DERIVED:
            if sym.name in _derived_stack:
                chain = " -> ".join(_derived_stack + (sym.name,))
                raise DerivedCycleError(f"cycle in derived definitions: {chain}", term.pos)
            inner = dict(zip(sym.derived_params, args))
            if "self" in env:
                inner["self"] = env["self"]
            stack = _derived_stack + (sym.name,)
            if sym.result == "bool":
                return eval_formula(state, vocab, inner, sym.derived_def, stack)
            return eval_term(state, vocab, inner, sym.derived_def, stack)
        return state.get(_location(vocab, sym, args, env))
    raise EvalError(f"not a term: {term!r}")


def eval_formula(state: State, vocab: Vocabulary, env: Env, f: Formula, _derived_stack: tuple[str, ...] = ()) -> bool:
    """Evaluate a formula to a boolean; never partial."""
    if isinstance(f, Eq):
        return values_equal(
            eval_term(state, vocab, env, f.left, _derived_stack),
            eval_term(state, vocab, env, f.right, _derived_stack),
        )
    if isinstance(f, InDomain):
        atoms = vocab.domains.get(f.domain)
        if atoms is None:
            raise EvalError(f"unknown domain {f.domain}", f.pos)
        v = eval_term(state, vocab, env, f.item, _derived_stack)
        return any(values_equal(v, a) for a in atoms)
    if isinstance(f, InSeq):
        v = eval_term(state, vocab, env, f.item, _derived_stack)
        seq = eval_term(state, vocab, env, f.seq, _derived_stack)
        if not isinstance(seq, tuple):
            return False
        return any(values_equal(v, x) for x in seq)
    if isinstance(f, Not):
        return not eval_formula(state, vocab, env, f.body, _derived_stack)
    if isinstance(f, And):
        return all(eval_formula(state, vocab, env, x, _derived_stack) for x in f.items)
    if isinstance(f, Or):
        return any(eval_formula(state, vocab, env, x, _derived_stack) for x in f.items)
    if isinstance(f, (ForallF, ExistsF)):
        atoms = vocab.domains.get(f.domain)
        if atoms is None:
            raise EvalError(f"unknown domain {f.domain}", f.pos)
        results = (
            eval_formula(state, vocab, {**env, f.var: a}, f.body, _derived_stack) for a in atoms
        )
        return all(results) if isinstance(f, ForallF) else any(results)
    raise EvalError(f"not a formula: {f!r}")


def value_in_result_domain(vocab: Vocabulary, sym: FunctionSymbol, v: Value) -> bool:
    if isinstance(v, Undef):
        return True  # undef belongs to every result domain
    if sym.result == "bool":
        return isinstance(v, bool)
    if sym.result == "int":
        return isinstance(v, int) and not isinstance(v, bool)
    if sym.result == "seq":
        return isinstance(v, tuple)
    atoms = vocab.domains.get(sym.result, ())
    return isinstance(v, Atom) and any(values_equal(v, a) for a in atoms)


def _check_write(vocab: Vocabulary, sym: FunctionSymbol, v: Value, context: str, pos) -> None:
    if sym.kind is Kind.DERIVED:
        raise KindViolationError(f"derived symbol {sym.name} cannot be written", pos)
    if context == "agent" and sym.kind in (Kind.STATIC, Kind.MONITORED):
        raise KindViolationError(f"{sym.kind.value} symbol {sym.name} cannot be written by a rule", pos)
    if not value_in_result_domain(vocab, sym, v):
        raise ResultDomainError(f"value {v!r} outside result domain {sym.result} of {sym.name}", pos)


def _choose_candidates(state: State, vocab: Vocabulary, env: Env, rule: Choose) -> list[Value]:
    if rule.domain is not None:
        atoms = vocab.domains.get(rule.domain)
        if atoms is None:
            raise EvalError(f"unknown domain {rule.domain}", rule.pos)
        return list(atoms)
    coll = eval_term(state, vocab, env, rule.seq)
    if isinstance(coll, Undef):
        return []
    if not isinstance(coll, tuple):
        raise EvalError(f"choose expects a sequence, got {coll!r}", rule.pos)
    return list(coll)


def _rank(state: State, vocab: Vocabulary, env: Env, ranking: Term, candidate: Value, var: str):
    v = eval_term(state, vocab, {**env, var: candidate}, ranking)
    if isinstance(v, Undef):
        return (0, 0)  # ranks below every integer
    if isinstance(v, bool) or not isinstance(v, int):
        raise EvalError(f"ranking term must be an integer, got {v!r}")
    return (1, v)


def collect_updates(
    state: State,
    vocab: Vocabulary,
    env: Env,
    rule: Rule,
    context: str = "agent",
    _depth: int = 0,
) -> list[Update]:
    """Collect the update set a rule yields in a state, in parallel semantics.

    The result may contain the same (location, value) pair more than once;
    set semantics collapse those.  Consistency is *not* checked here.
    """
    if _depth > MAX_CALL_DEPTH:
        raise EvalError("rule call nesting too deep (cyclic calls?)", getattr(rule, "pos", None))
    if isinstance(rule, Skip):
        return []
    if isinstance(rule, Assign):
        sym = vocab.symbols.get(rule.target.func)
        if sym is None:
            raise EvalError(f"unknown function {rule.target.func}", rule.pos)
        if len(rule.target.args) != sym.arity:
            raise ArityError(f"{sym.name} expects {sym.arity} arguments", rule.pos)
        args = tuple(eval_term(state, vocab, env, a) for a in rule.target.args)
        v = eval_term(state, vocab, env, rule.value)
        _check_write(vocab, sym, v, context, rule.pos)
        return [(_location(vocab, sym, args, env), v)]
    if isinstance(rule, Cond):
        if eval_formula(state, vocab, env, rule.guard):
            return collect_updates(state, vocab, env, rule.then, context, _depth)
        return []
    if isinstance(rule, Block):
        out: list[Update] = []
        for item in rule.items:
            out.extend(collect_updates(state, vocab, env, item, context, _depth))
        return out
    if isinstance(rule, ForallRule):
        atoms = vocab.domains.get(rule.domain)
        if atoms is None:
            raise EvalError(f"unknown domain {rule.domain}", rule.pos)
        out = []
        for a in atoms:
            out.extend(collect_updates(state, vocab, {**env, rule.var: a}, rule.body, context, _depth))
        return out
    if isinstance(rule, Choose):
        candidates = _choose_candidates(state, vocab, env, rule)
        if rule.where is not None:
            candidates = [
                c for c in candidates if eval_formula(state, vocab, {**env, rule.var: c}, rule.where)
            ]
        if not candidates:
            return []
        if rule.ranking is not None:
            best = candidates[0]
            best_rank = _rank(state, vocab, env, rule.ranking, best, rule.var)
            for c in candidates[1:]:
                r = _rank(state, vocab, env, rule.ranking, c, rule.var)
                if r > best_rank:  # strictly greater: ties keep the earliest candidate
                    best, best_rank = c, r
            chosen = best
        else:
            chosen = candidates[0]
        return collect_updates(state, vocab, {**env, rule.var: chosen}, rule.body, context, _depth)
    if isinstance(rule, Call):
        rdef = vocab.rules.get(rule.rule)
        if rdef is None:
            raise EvalError(f"unknown rule {rule.rule}", rule.pos)
        if len(rule.args) != len(rdef.params):
            raise ArityError(f"rule {rdef.name} expects {len(rdef.params)} arguments", rule.pos)
        inner: dict[str, Value] = {p: eval_term(state, vocab, env, a) for p, a in zip(rdef.params, rule.args)}
        if "self" in env:
            inner["self"] = env["self"]
        return collect_updates(state, vocab, inner, rdef.body, context, _depth + 1)
    raise EvalError(f"not a rule: {rule!r}")


def program_members(program: Rule) -> tuple[Rule, ...]:
    """The top-level members of a program: a block's items, else the rule itself."""
    if isinstance(program, Block):
        return program.items
    return (program,)


def member_label(member: Rule, index: int) -> str:
    return member.label if member.label else f"rule[{index}]"


def applicable_labels(state: State, vocab: Vocabulary, env: Env, program: Rule) -> list[str]:
    """Labels of the program's top-level rules that apply in this state.

    A conditional applies when its guard holds; every other rule form always
    applies.  An agent with no applicable rule is quiescent, even if an
    applicable rule happens to yield no updates.
    """
    fired = []
    for i, member in enumerate(program_members(program)):
        if isinstance(member, Cond):
            if eval_formula(state, vocab, env, member.guard):
                fired.append(member_label(member, i))
        else:
            fired.append(member_label(member, i))
    return fired
