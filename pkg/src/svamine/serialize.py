"""JSON interchange for property trees and inter-stage files.

Each node becomes an object with an ``op`` field::

    {"op": "implies", "ante": {...}, "cons": {...}}
    {"op": "eq", "lhs": {"op": "sig", "name": "VALID"}, "rhs": {"op": "level", "high": true}}
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Sequence, Union

from .props import (And, Delay, Eq, Fell, Hole, HoleKind, Implic, LevelConst, Neq, Node, Not,
                    PropertyError, Rose, SigRef, Stable, WordConst, check_well_formed)

FORMAT = "svamine-properties"
VERSION = 1


class SerializeError(ValueError):
    pass


_UNARY = {Not: "not", Stable: "stable", Rose: "rose", Fell: "fell"}
_UNARY_BY_OP = {v: k for k, v in _UNARY.items()}


def to_json(node: Node) -> dict:
    if isinstance(node, SigRef):
        return {"op": "sig", "name": node.name}
    if isinstance(node, LevelConst):
        return {"op": "level", "high": node.high}
    if isinstance(node, WordConst):
        return {"op": "const", "value": node.value}
    if isinstance(node, Hole):
        out: dict = {"op": "hole", "kind": node.kind.value}
        if node.tag is not None:
            out["tag"] = node.tag
        return out
    if isinstance(node, (Eq, Neq)):
        return {"op": "eq" if isinstance(node, Eq) else "neq",
                "lhs": to_json(node.lhs), "rhs": to_json(node.rhs)}
    if isinstance(node, And):
        return {"op": "and", "args": [to_json(a) for a in node.operands]}
    if isinstance(node, Delay):
        return {"op": "delay", "cycles": node.cycles, "arg": to_json(node.operand)}
    if type(node) in _UNARY:
        return {"op": _UNARY[type(node)], "arg": to_json(node.operand)}
    if isinstance(node, Implic):
        return {"op": "implies", "ante": to_json(node.ante), "cons": to_json(node.cons)}
    raise SerializeError(f"cannot serialize {node!r}")


def from_json(obj: Any) -> Node:
    if not isinstance(obj, dict) or "op" not in obj:
        raise SerializeError(f"not a property node: {obj!r}")
    op = obj["op"]
    try:
        if op == "sig":
            return SigRef(str(obj["name"]))
        if op == "level":
            return LevelConst(bool(obj["high"]))
        if op == "const":
            return WordConst(obj["value"])
        if op == "hole":
            return Hole(HoleKind(obj["kind"]), obj.get("tag"))
        if op in ("eq", "neq"):
            cls = Eq if op == "eq" else Neq
            return cls(from_json(obj["lhs"]), from_json(obj["rhs"]))
        if op == "and":
            return And(from_json(a) for a in obj["args"])
        if op == "delay":
            return Delay(int(obj["cycles"]), from_json(obj["arg"]))
        if op in _UNARY_BY_OP:
            return _UNARY_BY_OP[op](from_json(obj["arg"]))
        if op == "implies":
            return Implic(from_json(obj["ante"]), from_json(obj["cons"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise SerializeError(f"malformed {op!r} node: {exc}") from exc
    raise SerializeError(f"unknown op {op!r}")


def dump_properties(props: Sequence[Node], extra: Sequence[dict] = ()) -> str:
    """JSON document listing properties; ``extra`` adds per-entry fields."""
    entries = []
    for i, p in enumerate(props):
        entry = {"ast": to_json(p)}
        if i < len(extra):
            entry.update(extra[i])
        entries.append(entry)
    doc = {"format": FORMAT, "version": VERSION, "properties": entries}
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def load_properties_json(text: str) -> tuple[list[Node], list[dict]]:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SerializeError(f"invalid JSON: {exc}") from exc
    if not isinstance(doc, dict) or doc.get("format") != FORMAT:
        raise SerializeError("not a property file")
    props, extras = [], []
    for n, entry in enumerate(doc.get("properties", [])):
        node = from_json(entry.get("ast"))
        try:
            check_well_formed(node)
        except PropertyError as exc:
            raise SerializeError(f"property {n}: {exc}") from None
        props.append(node)
        extras.append({k: v for k, v in entry.items() if k != "ast"})
    return props, extras


def write_text(path: Union[str, Path], text: str) -> None:
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    Path(path).write_text(text, encoding="utf-8")
