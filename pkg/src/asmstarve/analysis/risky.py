"""Risky functions: symbols whose values the environment can keep steering.

Monitored and shared symbols seed the set (the environment writes them at
will).  A controlled symbol joins when it has at least one writer and *every*
assignment occurrence writing it depends on a currently risky symbol, through
its path guards or the values it writes; a derived symbol joins when its
definition reads a risky symbol.  The set grows monotonically from the seed
to a fixpoint.  Static and out symbols never join: static never changes after
initialization, out is never read back.

A controlled symbol with one environment-insensitive writer escapes: that
writer pins the symbol's evolution to non-risky information.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from ..core.signature import Kind
from ..lang.model import Model
from .footprints import ModelFootprint, compute_footprint, formula_symbols, term_symbols


@dataclass
class RiskyReport:
    risky: tuple[str, ...]  # sorted
    chains: dict[str, tuple[str, ...]]  # symbol -> support chain back to a seed
    reasons: dict[str, str]
    cleared: dict[str, str]  # controlled/derived symbols that stayed out, with why
    iterations: int

    def is_risky(self, name: str) -> bool:
        return name in self.chains


def _derived_symbol_reads(model: Model, name: str) -> frozenset[str]:
    sym = model.symbols[name]
    if sym.derived_def is None:
        return frozenset()
    if sym.result == "bool":
        return formula_symbols(model, sym.derived_def)
    return term_symbols(model, sym.derived_def)


def compute_risky_functions(model: Model, footprint: Optional[ModelFootprint] = None) -> RiskyReport:
    fp = footprint or compute_footprint(model)
    risky: set[str] = set()
    chains: dict[str, tuple[str, ...]] = {}
    reasons: dict[str, str] = {}

    for sym in model.symbols.values():
        if sym.kind is Kind.MONITORED:
            risky.add(sym.name)
            chains[sym.name] = (sym.name,)
            reasons[sym.name] = "monitored: written only by the environment"
        elif sym.kind is Kind.SHARED:
            risky.add(sym.name)
            chains[sym.name] = (sym.name,)
            reasons[sym.name] = "shared: the environment can overwrite it between moves"

    candidates = [
        s for s in model.symbols.values() if s.kind in (Kind.CONTROLLED, Kind.DERIVED)
    ]
    iterations = 0
    changed = True
    while changed:
        changed = False
        iterations += 1
        if iterations > len(model.symbols) + 1:
            raise AssertionError("risky-function fixpoint failed to converge")
        for sym in candidates:
            if sym.name in risky:
                continue
            if sym.kind is Kind.DERIVED:
                refs = _derived_symbol_reads(model, sym.name)
                hit = sorted(refs & risky)
                if hit:
                    risky.add(sym.name)
                    chains[sym.name] = chains[hit[0]] + (sym.name,)
                    reasons[sym.name] = f"derived from risky symbol {hit[0]}"
                    changed = True
                continue
            occs = fp.writers_of.get(sym.name, ())
            if not occs:
                continue  # never written by a rule: fixed after initialization
            if all(o.reads & risky for o in occs):
                hit = sorted(occs[0].reads & risky)[0]
                risky.add(sym.name)
                chains[sym.name] = chains[hit] + (sym.name,)
                reasons[sym.name] = (
                    f"all {len(occs)} writer(s) depend on risky symbols, e.g. {occs[0].id} reads "
                    + "{" + ", ".join(sorted(occs[0].reads & risky)) + "}"
                )
                changed = True

    cleared: dict[str, str] = {}
    for sym in candidates:
        if sym.name in risky:
            continue
        if sym.kind is Kind.DERIVED:
            refs = _derived_symbol_reads(model, sym.name)
            cleared[sym.name] = "definition reads only non-risky symbols {" + ", ".join(sorted(refs)) + "}"
            continue
        occs = fp.writers_of.get(sym.name, ())
        if not occs:
            cleared[sym.name] = "no rule writes it, so it never changes after initialization"
            continue
        escapers = [o for o in occs if not (o.reads & risky)]
        o = escapers[0]
        cleared[sym.name] = (
            f"writer {o.id} reads only non-risky symbols " + "{" + ", ".join(sorted(o.reads)) + "}"
        )

    return RiskyReport(tuple(sorted(risky)), chains, reasons, cleared, iterations)
