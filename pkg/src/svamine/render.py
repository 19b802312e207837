"""Render properties and templates as SVA text or English sentences."""

from __future__ import annotations

from typing import Optional

from .props import (And, Delay, Eq, Fell, Hole, HoleKind, Implic, LevelConst, Neq, Node,
                    Not, PropertyError, Rose, SigRef, Stable, WordConst, is_ground)

_SVA_HOLES = {
    HoleKind.SIGNAL: "<signal>",
    HoleKind.WORD: "<word>",
    HoleKind.SIGNAL_OR_WORD: "<sw>",
    HoleKind.LEVEL: "<level>",
    HoleKind.VALUE: "<value>",
}

_NL_HOLES = {
    HoleKind.SIGNAL: "[signal]",
    HoleKind.WORD: "[word]",
    HoleKind.SIGNAL_OR_WORD: "[signal/word]",
    HoleKind.LEVEL: "[level]",
    HoleKind.VALUE: "[value]",
}


def render_sva(node: Node, wrap: Optional[str] = None, template: bool = False) -> str:
    """Render ``node`` in SVA concrete syntax.

    With ``wrap`` set to a clock name the expression is embedded in an
    ``assert property (@(posedge clk) ...);`` statement.  Holes are only
    accepted when ``template`` is true.
    """
    if not template and not is_ground(node):
        raise PropertyError("cannot render a template as a property", node)
    text = _sva(node)
    if wrap:
        return f"assert property (@(posedge {wrap}) {text});"
    return text


def _operand(node: Node) -> str:
    if isinstance(node, SigRef):
        return node.name
    if isinstance(node, LevelConst):
        return "HIGH" if node.high else "LOW"
    if isinstance(node, WordConst):
        return str(node.value)
    if isinstance(node, Hole):
        text = _SVA_HOLES[node.kind]
        return text[:-1] + f":{node.tag}>" if node.tag else text
    raise PropertyError("not a comparison operand", node)


def _sva(node: Node) -> str:
    if isinstance(node, Implic):
        cons = _sva(node.cons)
        if not isinstance(node.cons, (Delay, Stable, Rose, Fell)):
            cons = f"({cons})"
        return f"({_sva(node.ante)}) |-> {cons}"
    if isinstance(node, Eq):
        if isinstance(node.rhs, LevelConst) and isinstance(node.lhs, SigRef):
            return node.lhs.name if node.rhs.high else f"!{node.lhs.name}"
        return f"{_operand(node.lhs)} == {_operand(node.rhs)}"
    if isinstance(node, Neq):
        return f"{_operand(node.lhs)} != {_operand(node.rhs)}"
    if isinstance(node, And):
        return " && ".join(_sva(op) for op in node.operands)
    if isinstance(node, Not):
        return "!" + _atom(node.operand)
    if isinstance(node, Delay):
        return f"##{node.cycles} " + _atom(node.operand)
    if isinstance(node, (Stable, Rose, Fell)):
        return f"${type(node).__name__.lower()}({_operand(node.operand)})"
    raise PropertyError("cannot render node", node)


def _atom(node: Node) -> str:
    text = _sva(node)
    if isinstance(node, (And, Implic)) or (
            isinstance(node, (Eq, Neq)) and " " in text):
        return f"({text})"
    return text


# ---------------------------------------------------------------------------


def render_nl(node: Node) -> str:
    """Render ``node`` as an English sentence."""
    if isinstance(node, Implic):
        return f"If {_nl(node.ante)}, then {_nl(node.cons)}."
    return _nl(node)


def _nl_operand(node: Node) -> str:
    if isinstance(node, Hole):
        text = _NL_HOLES[node.kind]
        return text[:-1] + f":{node.tag}]" if node.tag else text
    return _operand(node)


def _when(cycles: int) -> str:
    return "in the next cycle" if cycles == 1 else f"in {cycles} cycles"


def _nl(node: Node) -> str:
    if isinstance(node, Eq):
        if isinstance(node.rhs, (SigRef,)) or (
                isinstance(node.rhs, Hole) and node.rhs.kind in
                (HoleKind.SIGNAL, HoleKind.WORD, HoleKind.SIGNAL_OR_WORD)):
            return f"{_nl_operand(node.lhs)} is equal to {_nl_operand(node.rhs)}"
        return f"{_nl_operand(node.lhs)} is {_nl_operand(node.rhs)}"
    if isinstance(node, Neq):
        if isinstance(node.rhs, SigRef):
            return f"{_nl_operand(node.lhs)} is not equal to {_nl_operand(node.rhs)}"
        return f"{_nl_operand(node.lhs)} is not {_nl_operand(node.rhs)}"
    if isinstance(node, And):
        return " and ".join(_nl(op) for op in node.operands)
    if isinstance(node, Stable):
        return f"{_nl_operand(node.operand)} is unchanged from the previous cycle"
    if isinstance(node, Rose):
        return f"{_nl_operand(node.operand)} rises"
    if isinstance(node, Fell):
        return f"{_nl_operand(node.operand)} falls"
    if isinstance(node, Not):
        if isinstance(node.operand, Stable):
            return f"{_nl_operand(node.operand.operand)} changes from the previous cycle"
        return f"it is not the case that {_nl(node.operand)}"
    if isinstance(node, Delay):
        inner = node.operand
        if isinstance(inner, Stable):
            return f"{_nl_operand(inner.operand)} remains stable {_when(node.cycles)}"
        if isinstance(inner, And):
            return f"{_when(node.cycles)}, {_nl(inner)}"
        return f"{_nl(inner)} {_when(node.cycles)}"
    if isinstance(node, Implic):
        return render_nl(node)
    return _nl_operand(node)
