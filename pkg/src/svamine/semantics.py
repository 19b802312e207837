"""Reference semantics on concrete traces, and brute-force checking.

This module deliberately shares no code with the propositional encoder; it
evaluates properties directly on values so it can serve as an oracle.

A trace maps each signal name to a list of per-cycle values: 0/1 for bits,
integers (or opaque constant names) for words.
"""

from __future__ import annotations

import itertools
from typing import Iterator, Mapping, Optional, Sequence

from .diagram import Explicit, Symbolic, TimingDiagram
from .props import (And, Delay, Eq, Fell, Implic, LevelConst, Neq, Node, Not, Rose, SigRef,
                    Stable, WordConst, signal_names)

Trace = Mapping[str, Sequence]


def _value(node: Node, cyc: int, trace: Trace, inv):
    if isinstance(node, SigRef):
        return trace[node.name][cyc]
    if isinstance(node, LevelConst):
        return 1 if node.high else 0
    raise TypeError(node)


def _cmp(node, cyc: int, trace: Trace, inv) -> bool:
    lhs, rhs = node.lhs, node.rhs
    if not isinstance(lhs, SigRef):
        lhs, rhs = rhs, lhs
    a = trace[lhs.name][cyc]
    if isinstance(rhs, WordConst):
        b = inv.constant_key(lhs.name, rhs.value)
    else:
        b = _value(rhs, cyc, trace, inv)
    return a == b


def eval_at(node: Node, cyc: int, trace: Trace, length: int, inv) -> Optional[bool]:
    """Truth of ``node`` anchored at ``cyc``; None when it leaves the window."""
    if isinstance(node, Eq):
        return _cmp(node, cyc, trace, inv)
    if isinstance(node, Neq):
        return not _cmp(node, cyc, trace, inv)
    if isinstance(node, And):
        vals = [eval_at(op, cyc, trace, length, inv) for op in node.operands]
        return None if None in vals else all(vals)
    if isinstance(node, Not):
        v = eval_at(node.operand, cyc, trace, length, inv)
        return None if v is None else not v
    if isinstance(node, Delay):
        t = cyc + node.cycles
        return None if t >= length else eval_at(node.operand, t, trace, length, inv)
    if isinstance(node, (Stable, Rose, Fell)):
        if cyc == 0:
            return None
        seq = trace[node.operand.name]
        now, before = seq[cyc], seq[cyc - 1]
        if isinstance(node, Stable):
            return now == before
        if isinstance(node, Rose):
            return now == 1 and before == 0
        return now == 0 and before == 1
    if isinstance(node, Implic):
        a = eval_at(node.ante, cyc, trace, length, inv)
        c = eval_at(node.cons, cyc, trace, length, inv)
        if a is None or c is None:
            return None
        return (not a) or c
    raise TypeError(f"cannot evaluate {node!r}")


def holds_on_trace(prop: Node, trace: Trace, length: int, inv) -> bool:
    """Every defined per-cycle obligation is true."""
    return all(eval_at(prop, c, trace, length, inv) is not False for c in range(length))


def word_universe(sig) -> list:
    """All values a word can take: every integer of its width plus opaque constants."""
    vals: list = list(range(1 << sig.width))
    vals.extend(c.name for c in sig.constants if c.value is None)
    return vals


def _slots(td: TimingDiagram, domains, signals):
    inv = td.inventory
    slots = []  # (signal, [cycles], candidate values)
    fixed: dict = {}
    for name, cells in td.signals:
        if signals is not None and name not in signals:
            continue
        sig = inv[name]
        universe = [0, 1] if not sig.is_word else list(
            (domains or {}).get(name) or word_universe(sig))
        labels: dict = {}
        for cyc, cell in enumerate(cells):
            if isinstance(cell, Explicit):
                fixed[(name, cyc)] = inv.constant_key(name, cell.value) if sig.is_word else cell.value
            elif isinstance(cell, Symbolic):
                labels.setdefault(cell.label, []).append(cyc)
            else:
                slots.append((name, [cyc], universe))
        for cycs in labels.values():
            slots.append((name, cycs, universe))
    return slots, fixed


def completion_count(td: TimingDiagram, domains=None, signals=None) -> int:
    slots, _ = _slots(td, domains, signals)
    n = 1
    for s in slots:
        n *= len(s[2])
    return n


def completions(td: TimingDiagram, domains: Optional[Mapping[str, Sequence]] = None,
                signals: Optional[Sequence[str]] = None) -> Iterator[dict]:
    """Every concrete trace the diagram admits.

    Bits range over {0, 1}; words over ``domains[name]`` when given, else
    over :func:`word_universe`.  With ``signals``, only those rows are
    enumerated (and present in the traces).
    """
    slots, fixed = _slots(td, domains, signals)
    names = [n for n in td.names if signals is None or n in signals]
    for choice in itertools.product(*(s[2] for s in slots)):
        trace = {name: [None] * td.length for name in names}
        for (name, cyc), v in fixed.items():
            trace[name][cyc] = v
        for (name, cycs, _), v in zip(slots, choice):
            for c in cycs:
                trace[name][c] = v
        yield trace


def brute_check(prop: Node, td: TimingDiagram, domains=None) -> tuple[bool, Optional[dict]]:
    """(holds, counterexample) by enumerating all completions.

    Only the rows of signals the property mentions are enumerated; the
    other rows cannot influence the verdict.
    """
    for trace in completions(td, domains, set(signal_names(prop))):
        if not holds_on_trace(prop, trace, td.length, td.inventory):
            return False, trace
    return True, None


def brute_vacuous(prop: Implic, diagrams: Sequence[TimingDiagram], domains=None) -> bool:
    """True when no completion of any diagram satisfies the antecedent anywhere."""
    for td in diagrams:
        for trace in completions(td, domains, set(signal_names(prop.ante))):
            for c in range(td.length):
                if eval_at(prop.ante, c, trace, td.length, td.inventory):
                    return False
    return True


def consistent(trace: Trace, td: TimingDiagram) -> bool:
    """Whether ``trace`` is a completion of ``td``."""
    inv = td.inventory
    for name, cells in td.signals:
        seq = trace[name]
        sig = inv[name]
        labels: dict = {}
        for cyc, cell in enumerate(cells):
            v = seq[cyc]
            if sig.is_word:
                ok = v in word_universe(sig) if isinstance(v, str) else 0 <= v < (1 << sig.width)
            else:
                ok = v in (0, 1)
            if not ok:
                return False
            if isinstance(cell, Explicit):
                want = inv.constant_key(name, cell.value) if sig.is_word else cell.value
                if v != want:
                    return False
            elif isinstance(cell, Symbolic):
                if labels.setdefault(cell.label, v) != v:
                    return False
    return True
