"""Candidate generation: fill template holes with declared signals and values."""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from typing import Iterable, Sequence

from .props import (HIGH, LOW, And, Delay, Eq, Fell, Hole, HoleKind, Implic, LevelConst, Neq,
                    Node, Not, Rose, SigRef, Stable, WordConst, canonicalize, signal_names)
from .signals import SignalInventory

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class Candidate:
    node: Node
    template: int  # index into the template list


def _signals_for(hole: Hole, inv: SignalInventory) -> list[Node]:
    if hole.kind is HoleKind.SIGNAL:
        sigs = inv.bits(hole.tag)
    elif hole.kind is HoleKind.WORD:
        sigs = inv.words(hole.tag)
    elif hole.kind is HoleKind.SIGNAL_OR_WORD:
        sigs = [s for s in inv if hole.tag is None or s.subtype == hole.tag]
    else:
        return []
    return [SigRef(s.name) for s in sigs]


def _operand_fillers(node: Node, inv: SignalInventory) -> list[Node]:
    if isinstance(node, Hole):
        return _signals_for(node, inv)
    return [node]


def _rhs_fillers(rhs: Node, lhs: SigRef, inv: SignalInventory) -> list[Node]:
    sig = inv[lhs.name]
    if isinstance(rhs, Hole):
        if rhs.kind is HoleKind.LEVEL:
            return [] if sig.is_word else [HIGH, LOW]
        if rhs.kind is HoleKind.VALUE:
            return [WordConst(c.token) for c in sig.constants] if sig.is_word else []
        if not sig.is_word:
            return []
        return [r for r in _signals_for(rhs, inv)
                if inv[r.name].is_word and r.name != lhs.name and inv[r.name].width == sig.width]
    if isinstance(rhs, LevelConst):
        return [] if sig.is_word else [rhs]
    if isinstance(rhs, WordConst):
        return [rhs] if sig.is_word else []
    if isinstance(rhs, SigRef):
        other = inv.get(rhs.name)
        ok = other is not None and sig.is_word and other.is_word and other.name != sig.name
        return [rhs] if ok else []
    return []


def _expand(node: Node, inv: SignalInventory) -> list[Node]:
    if isinstance(node, (Eq, Neq)):
        lhs, rhs = node.lhs, node.rhs
        out = []
        for lf in _operand_fillers(lhs, inv):
            if not isinstance(lf, SigRef):
                continue
            for rf in _rhs_fillers(rhs, lf, inv):
                out.append(type(node)(lf, rf))
        return out
    if isinstance(node, And):
        out = []
        for combo in itertools.product(*(_expand(op, inv) for op in node.operands)):
            used: set[str] = set()
            for op in combo:
                names = set(signal_names(op))
                if names & used:
                    break
                used |= names
            else:
                out.append(And(combo))
        return out
    if isinstance(node, Implic):
        return [Implic(a, c) for a in _expand(node.ante, inv) for c in _expand(node.cons, inv)]
    if isinstance(node, Delay):
        return [Delay(node.cycles, x) for x in _expand(node.operand, inv)]
    if isinstance(node, Not):
        return [Not(x) for x in _expand(node.operand, inv)]
    if isinstance(node, Stable):
        return [Stable(s) for s in _operand_fillers(node.operand, inv)]
    if isinstance(node, (Rose, Fell)):
        return [type(node)(s) for s in _operand_fillers(node.operand, inv)
                if not inv[s.name].is_word]
    return [node]


def generate_with_origin(templates: Sequence[Node], inv: SignalInventory) -> list[Candidate]:
    """Candidates in template order, each tagged with its template index."""
    seen: set = set()
    out = []
    for index, template in enumerate(templates):
        expanded = _expand(template, inv)
        for node in expanded:
            canon = canonicalize(node, inv)
            if canon in seen:
                continue
            seen.add(canon)
            out.append(Candidate(canon, index))
        if not expanded:
            log.warning("template %d produces no candidates for this inventory", index)
    return out


def generate_candidates(templates: Iterable[Node], inv: SignalInventory) -> list[Node]:
    """Every type-compatible ground instance of ``templates``, deduplicated.

    Within one conjunction the operands must mention disjoint signals.
    """
    return [c.node for c in generate_with_origin(list(templates), inv)]
