"""Property AST for the supported SVA fragment.

A property is a tree of immutable nodes.  The same node types double as
templates when some leaves are :class:`Hole` placeholders.  The fragment is
closed over ``|->``, ``&&``, ``!``, ``==``, ``!=``, ``##k``, ``$stable``,
``$rose`` and ``$fell``; implication may only appear at the root.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Optional, Sequence, Union


class PropertyError(ValueError):
    """A node violates a structural invariant of the fragment."""

    def __init__(self, message: str, subterm: Optional["Node"] = None):
        if subterm is not None:
            message = f"{message}: {subterm!r}"
        super().__init__(message)
        self.subterm = subterm


class HoleKind(enum.Enum):
    SIGNAL = "signal"
    WORD = "word"
    SIGNAL_OR_WORD = "sw"
    LEVEL = "level"
    VALUE = "value"


@dataclass(frozen=True)
class SigRef:
    name: str


@dataclass(frozen=True)
class LevelConst:
    high: bool

    def __repr__(self) -> str:
        return "HIGH" if self.high else "LOW"


HIGH = LevelConst(True)
LOW = LevelConst(False)


@dataclass(frozen=True)
class WordConst:
    """A word constant: an integer bit pattern or a declared constant name."""

    value: Union[int, str]


@dataclass(frozen=True)
class Hole:
    kind: HoleKind
    tag: Optional[str] = None


@dataclass(frozen=True)
class Eq:
    lhs: "Node"
    rhs: "Node"


@dataclass(frozen=True)
class Neq:
    lhs: "Node"
    rhs: "Node"


@dataclass(frozen=True)
class And:
    operands: tuple

    def __init__(self, operands: Iterable["Node"]):
        object.__setattr__(self, "operands", tuple(operands))


@dataclass(frozen=True)
class Not:
    operand: "Node"


@dataclass(frozen=True)
class Delay:
    cycles: int
    operand: "Node"


@dataclass(frozen=True)
class Stable:
    operand: "Node"


@dataclass(frozen=True)
class Rose:
    operand: "Node"


@dataclass(frozen=True)
class Fell:
    operand: "Node"


@dataclass(frozen=True)
class Implic:
    ante: "Node"
    cons: "Node"


Node = Union[SigRef, LevelConst, WordConst, Hole, Eq, Neq, And, Not, Delay,
             Stable, Rose, Fell, Implic]

LOOKBACK = (Stable, Rose, Fell)
VALUE_NODES = (LevelConst, WordConst)

_TAGS = {SigRef: 0, Hole: 1, LevelConst: 2, WordConst: 3, Eq: 4, Neq: 5,
         Stable: 6, Rose: 7, Fell: 8, Not: 9, Delay: 10, And: 11, Implic: 12}


def children(node: Node) -> tuple:
    if isinstance(node, (Eq, Neq)):
        return (node.lhs, node.rhs)
    if isinstance(node, And):
        return node.operands
    if isinstance(node, (Not, Delay, Stable, Rose, Fell)):
        return (node.operand,)
    if isinstance(node, Implic):
        return (node.ante, node.cons)
    return ()


def walk(node: Node) -> Iterator[Node]:
    """Pre-order traversal."""
    yield node
    for child in children(node):
        yield from walk(child)


def signal_names(node: Node) -> list[str]:
    """Signal names in first-occurrence order."""
    seen: dict[str, None] = {}
    for sub in walk(node):
        if isinstance(sub, SigRef):
            seen.setdefault(sub.name)
    return list(seen)


def holes(node: Node) -> list[Hole]:
    return [sub for sub in walk(node) if isinstance(sub, Hole)]


def is_ground(node: Node) -> bool:
    return not any(isinstance(sub, Hole) for sub in walk(node))


def validate(node: Node) -> None:
    """Check the structural invariants, raising :class:`PropertyError`."""
    _validate(node, root=True)


def _validate(node: Node, root: bool) -> None:
    if isinstance(node, Implic):
        if not root:
            raise PropertyError("implication is only allowed at the root", node)
        _validate(node.ante, False)
        _validate(node.cons, False)
        return
    if isinstance(node, (SigRef, LevelConst, WordConst, Hole)):
        if isinstance(node, WordConst) and isinstance(node.value, int) and node.value < 0:
            raise PropertyError("negative word constant", node)
        return
    if isinstance(node, (Eq, Neq)):
        lhs, rhs = node.lhs, node.rhs
        if not _is_operand(lhs) or not _is_operand(rhs):
            raise PropertyError("comparison operands must be signals or values", node)
        if _operand_class(lhs) and _operand_class(rhs):
            raise PropertyError("comparison between two constants", node)
        return
    if isinstance(node, And):
        if len(node.operands) < 2:
            raise PropertyError("conjunction needs at least two operands", node)
        for op in node.operands:
            _validate(op, False)
        return
    if isinstance(node, LOOKBACK):
        op = node.operand
        if not (isinstance(op, SigRef)
                or (isinstance(op, Hole) and op.kind in (HoleKind.SIGNAL, HoleKind.WORD,
                                                           HoleKind.SIGNAL_OR_WORD))):
            raise PropertyError(f"${type(node).__name__.lower()} takes a single signal", node)
        if not isinstance(node, Stable) and isinstance(op, Hole) and op.kind is not HoleKind.SIGNAL:
            raise PropertyError("edge operators apply to 1-bit signals only", node)
        return
    if isinstance(node, Delay):
        if not isinstance(node.cycles, int) or node.cycles < 1:
            raise PropertyError("delay must be a positive cycle count", node)
        _validate(node.operand, False)
        return
    if isinstance(node, Not):
        _validate(node.operand, False)
        return
    raise PropertyError("unknown node", node)


def _is_operand(node: Node) -> bool:
    return isinstance(node, (SigRef, LevelConst, WordConst, Hole))


def _check_bool(node: Node) -> None:
    if isinstance(node, (SigRef, LevelConst, WordConst, Hole)):
        raise PropertyError("expected a boolean expression", node)


def check_well_formed(node: Node) -> None:
    """Structural validation plus boolean-position checks."""
    validate(node)
    for sub in walk(node):
        if isinstance(sub, And):
            for op in sub.operands:
                _check_bool(op)
        elif isinstance(sub, (Not, Delay)):
            _check_bool(sub.operand)
        elif isinstance(sub, Implic):
            _check_bool(sub.ante)
            _check_bool(sub.cons)
    if isinstance(node, (SigRef, LevelConst, WordConst, Hole)):
        _check_bool(node)


# ---------------------------------------------------------------------------
# Canonical order and canonicalization

Order = Union[Sequence[str], Mapping[str, int], None]


def _rank_map(order) -> Mapping[str, int]:
    if order is None:
        return {}
    if isinstance(order, Mapping):
        return order
    names = getattr(order, "names", order)
    return {name: i for i, name in enumerate(names)}


def _name_key(name: str, rank: Mapping[str, int]) -> tuple:
    if name in rank:
        return (0, rank[name], "")
    return (1, 0, name)


_NO_ROOT = (2, 0, "")


def sort_key(node: Node, order: Order = None) -> tuple:
    """Total structural order: root signal rank first, then structure."""
    return _key(node, _rank_map(order))


def _key(node: Node, rank: Mapping[str, int]) -> tuple:
    root = _NO_ROOT
    for sub in walk(node):
        if isinstance(sub, SigRef):
            root = _name_key(sub.name, rank)
            break
    return (root, _local_key(node, rank))


def _local_key(node: Node, rank: Mapping[str, int]) -> tuple:
    tag = _TAGS[type(node)]
    if isinstance(node, SigRef):
        return (tag, _name_key(node.name, rank))
    if isinstance(node, LevelConst):
        return (tag, int(node.high))
    if isinstance(node, WordConst):
        v = node.value
        return (tag, (0, v, "") if isinstance(v, int) else (1, 0, v))
    if isinstance(node, Hole):
        return (tag, node.kind.value, node.tag or "")
    if isinstance(node, Delay):
        return (tag, node.cycles, _local_key(node.operand, rank))
    return (tag,) + tuple(_local_key(c, rank) for c in children(node))


def _operand_class(node: Node) -> int:
    if isinstance(node, SigRef):
        return 0
    if isinstance(node, Hole) and node.kind in (HoleKind.SIGNAL, HoleKind.WORD,
                                                 HoleKind.SIGNAL_OR_WORD):
        return 0
    return 1


def canonicalize(node: Node, order: Order = None) -> Node:
    """Return the canonical form of ``node``.

    ``order`` is the signal declaration order (a list of names, a rank
    mapping or a signal inventory); unknown names sort after known ones,
    alphabetically.  The result is idempotent and denotes the same bounded
    obligations as the input.
    """
    check_well_formed(node)
    return _canon(node, _rank_map(order))


def _canon(node: Node, rank: Mapping[str, int]) -> Node:
    if isinstance(node, (SigRef, LevelConst, WordConst, Hole)):
        return node
    if isinstance(node, (Eq, Neq)):
        lhs, rhs = node.lhs, node.rhs
        if (_operand_class(lhs), _key(lhs, rank)) > (_operand_class(rhs), _key(rhs, rank)):
            lhs, rhs = rhs, lhs
        if isinstance(node, Neq) and isinstance(rhs, LevelConst):
            return Eq(lhs, LevelConst(not rhs.high))
        return type(node)(lhs, rhs)
    if isinstance(node, Not):
        inner = _canon(node.operand, rank)
        if isinstance(inner, Not):
            return inner.operand
        if isinstance(inner, Eq):
            return _canon(Neq(inner.lhs, inner.rhs), rank)
        if isinstance(inner, Neq):
            return Eq(inner.lhs, inner.rhs)
        return Not(inner)
    if isinstance(node, Delay):
        inner = _canon(node.operand, rank)
        if isinstance(inner, Delay):
            return Delay(node.cycles + inner.cycles, inner.operand)
        return Delay(node.cycles, inner)
    if isinstance(node, And):
        flat: list[Node] = []
        for op in node.operands:
            op = _canon(op, rank)
            if isinstance(op, And):
                flat.extend(op.operands)
            else:
                flat.append(op)
        flat.sort(key=lambda n: _key(n, rank))
        deduped: list[Node] = []
        for op in flat:
            # Duplicate ground conjuncts are redundant; hole-bearing ones are
            # distinct placeholders and must stay.
            if deduped and deduped[-1] == op and is_ground(op):
                continue
            deduped.append(op)
        if len(deduped) == 1:
            return deduped[0]
        return And(deduped)
    if isinstance(node, (Stable, Rose, Fell)):
        return node
    if isinstance(node, Implic):
        return Implic(_canon(node.ante, rank), _canon(node.cons, rank))
    raise PropertyError("unknown node", node)


# ---------------------------------------------------------------------------


def max_delay(node: Node) -> int:
    if isinstance(node, Delay):
        return node.cycles + max_delay(node.operand)
    return max((max_delay(c) for c in children(node)), default=0)


def has_lookback(node: Node) -> bool:
    return any(isinstance(sub, LOOKBACK) for sub in walk(node))


def temporal_depth(node: Node) -> int:
    """Largest accumulated delay, plus one if any operator looks back a cycle."""
    return max_delay(node) + (1 if has_lookback(node) else 0)
