"""Per-cycle localization of properties over a timing diagram.

A property is turned into one propositional obligation per origin cycle.
An obligation that would reference a cycle outside ``[0, CYC_MAX]`` is
undefined (``None``) and skipped; undefinedness of any subterm makes the
whole obligation undefined, including for implications and negations.
"""

from __future__ import annotations

from typing import Optional

from .diagram import TimingDiagram
from .logic import (TRUE, ConstTerm, CycleTerm, Formula, bit, conj, iff, implies, neg,
                    word_eq)
from .props import (And, Delay, Eq, Fell, Implic, LevelConst, Neq, Node, Not, Rose, SigRef,
                    Stable, WordConst, signal_names)


class MissingSignalError(ValueError):
    pass


def localize(prop: Node, cyc: int, td: TimingDiagram) -> Optional[Formula]:
    """Obligation of ``prop`` anchored at cycle ``cyc``, or ``None`` if undefined."""
    if not 0 <= cyc <= td.cyc_max:
        raise ValueError(f"cycle {cyc} outside [0, {td.cyc_max}]")
    return _loc(prop, cyc, td.cyc_max, td.inventory)


def _loc(node: Node, cyc: int, cyc_max: int, inv) -> Optional[Formula]:
    if isinstance(node, Eq):
        return _compare(node, cyc, inv)
    if isinstance(node, Neq):
        f = _compare(node, cyc, inv)
        return neg(f)
    if isinstance(node, And):
        parts = []
        for op in node.operands:
            f = _loc(op, cyc, cyc_max, inv)
            if f is None:
                return None
            parts.append(f)
        return conj(*parts)
    if isinstance(node, Not):
        f = _loc(node.operand, cyc, cyc_max, inv)
        return None if f is None else neg(f)
    if isinstance(node, Delay):
        target = cyc + node.cycles
        if target > cyc_max:
            return None
        return _loc(node.operand, target, cyc_max, inv)
    if isinstance(node, Stable):
        if cyc == 0:
            return None
        name = node.operand.name
        if inv[name].is_word:
            return word_eq(CycleTerm(name, cyc), CycleTerm(name, cyc - 1))
        return iff(bit(name, cyc), bit(name, cyc - 1))
    if isinstance(node, Rose):
        if cyc == 0:
            return None
        name = node.operand.name
        return conj(bit(name, cyc), neg(bit(name, cyc - 1)))
    if isinstance(node, Fell):
        if cyc == 0:
            return None
        name = node.operand.name
        return conj(neg(bit(name, cyc)), bit(name, cyc - 1))
    if isinstance(node, Implic):
        ante = _loc(node.ante, cyc, cyc_max, inv)
        if ante is None:
            return None
        cons = _loc(node.cons, cyc, cyc_max, inv)
        if cons is None:
            return None
        return implies(ante, cons)
    raise TypeError(f"cannot localize {node!r}")


def _compare(node, cyc: int, inv) -> Formula:
    lhs, rhs = node.lhs, node.rhs
    if not isinstance(lhs, SigRef):
        lhs, rhs = rhs, lhs
    if isinstance(rhs, LevelConst):
        v = bit(lhs.name, cyc)
        return v if rhs.high else neg(v)
    left = CycleTerm(lhs.name, cyc)
    if isinstance(rhs, SigRef):
        return word_eq(left, CycleTerm(rhs.name, cyc))
    if isinstance(rhs, WordConst):
        return word_eq(left, ConstTerm(lhs.name, inv.constant_key(lhs.name, rhs.value)))
    raise TypeError(f"cannot compare {node!r}")


def obligations(prop: Node, td: TimingDiagram) -> list[tuple[int, Formula]]:
    """``(cycle, obligation)`` for every origin where the property is defined."""
    missing = [n for n in signal_names(prop) if n not in td]
    if missing:
        raise MissingSignalError(
            f"property mentions {', '.join(missing)}, absent from diagram {td.name!r}")
    out = []
    for cyc in range(td.length):
        f = _loc(prop, cyc, td.cyc_max, td.inventory)
        if f is not None:
            out.append((cyc, f))
    return out


def encode_property(prop: Node, td: TimingDiagram) -> Formula:
    """Conjunction of all defined obligations; ``true`` if there are none."""
    parts = [f for _, f in obligations(prop, td)]
    return conj(*parts) if parts else TRUE
