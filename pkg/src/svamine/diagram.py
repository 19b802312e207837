"""Timing diagrams in signal-vector form and their propositional encoding.

Diagram file::

    name: valid_before_ready
    VALID = [0, 1, 1, 1, 0]
    READY = [0, 0, 0, 1, 0]
    DATA  = [X, V1, V1, V1, X]

Cells are ``0``/``1``, ``X`` (unconstrained), integer literals for words
(``0x1f``, ``7``), a declared constant name of the word, or any other
identifier, which is a symbolic label.  Equal labels on one signal denote
one unknown value; labels are scoped per signal.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Optional, Union

from .logic import ConstTerm, CycleTerm, Formula, bit, conj, iff, neg, word_eq
from .signals import SignalInventory, parse_int


class DiagramError(ValueError):
    def __init__(self, message: str, line: Optional[int] = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


@dataclass(frozen=True)
class Explicit:
    value: Union[int, str]

    def __str__(self) -> str:
        return str(self.value)


@dataclass(frozen=True)
class Unknown:
    def __str__(self) -> str:
        return "X"


@dataclass(frozen=True)
class Symbolic:
    label: str

    def __str__(self) -> str:
        return self.label


X = Unknown()
Cell = Union[Explicit, Unknown, Symbolic]


@dataclass(frozen=True)
class TimingDiagram:
    name: str
    inventory: SignalInventory
    signals: tuple  # ((name, (cell, ...)), ...)

    def __post_init__(self):
        object.__setattr__(self, "signals",
                           tuple((n, tuple(cells)) for n, cells in self.signals))
        lengths = {len(cells) for _, cells in self.signals}
        if len(lengths) > 1:
            raise DiagramError(f"diagram {self.name!r}: signal vectors differ in length "
                               f"({', '.join(f'{n}={len(c)}' for n, c in self.signals)})")
        if lengths == {0}:
            raise DiagramError(f"diagram {self.name!r} has no cycles")
        seen = set()
        for name, cells in self.signals:
            if name in seen:
                raise DiagramError(f"signal {name!r} listed twice")
            seen.add(name)
            sig = self.inventory.get(name)
            if sig is None:
                raise DiagramError(f"undeclared signal {name!r}")
            for cell in cells:
                if isinstance(cell, Explicit):
                    _check_explicit(sig, cell.value)

    @property
    def length(self) -> int:
        return len(self.signals[0][1]) if self.signals else 0

    @property
    def cyc_max(self) -> int:
        return self.length - 1

    @property
    def names(self) -> list[str]:
        return [n for n, _ in self.signals]

    def __contains__(self, name: str) -> bool:
        return any(n == name for n, _ in self.signals)

    def __getitem__(self, name: str) -> tuple:
        for n, cells in self.signals:
            if n == name:
                return cells
        raise KeyError(name)

    def __str__(self) -> str:
        return format_diagram(self)


def _check_explicit(sig, value) -> None:
    if not sig.is_word:
        if value not in (0, 1):
            raise DiagramError(f"1-bit signal {sig.name} cannot hold {value!r}")
        return
    if isinstance(value, int):
        if not 0 <= value < (1 << sig.width):
            raise DiagramError(f"value {value:#x} does not fit {sig.name}[{sig.width}]")
    elif not any(c.name == value for c in sig.constants):
        raise DiagramError(f"{value!r} is not a declared constant of {sig.name}")


def all_x(inv: SignalInventory, length: int, name: str = "all-X",
          signals: Optional[Iterable[str]] = None) -> TimingDiagram:
    """A fully unconstrained diagram over ``signals`` (default: all of ``inv``)."""
    names = list(signals) if signals is not None else inv.names
    return TimingDiagram(name, inv, tuple((n, (X,) * length) for n in names))


# ---------------------------------------------------------------------------
# Text format

_ROW = re.compile(r"^(?P<name>[A-Za-z_][\w#$]*)\s*=\s*\[(?P<cells>[^\]]*)\]\s*$")
_LABEL = re.compile(r"^[A-Za-z_]\w*$")


def _strip_comment(raw: str) -> str:
    m = re.search(r"(^|\s)#", raw)
    return (raw[:m.start()] if m else raw).strip()


def _parse_cell(token: str, sig, lineno: int) -> Cell:
    if not token:
        raise DiagramError("empty cell", lineno)
    if token in ("X", "x"):
        return X
    if token[0].isdigit():
        try:
            value = parse_int(token)
        except ValueError:
            raise DiagramError(f"malformed cell {token!r}", lineno) from None
        try:
            _check_explicit(sig, value)
        except DiagramError as exc:
            raise DiagramError(str(exc), lineno) from None
        return Explicit(value)
    if _LABEL.match(token):
        if sig.is_word and any(c.name == token for c in sig.constants):
            return Explicit(token)
        return Symbolic(token)
    raise DiagramError(f"malformed cell {token!r}", lineno)


def parse_diagram(text: str, inv: SignalInventory, name: Optional[str] = None) -> TimingDiagram:
    rows = []
    header = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = _strip_comment(raw)
        if not line:
            continue
        m = re.match(r"^name\s*:\s*(\S.*)$", line)
        if m:
            header = m.group(1).strip()
            continue
        m = _ROW.match(line)
        if not m:
            raise DiagramError(f"cannot parse row {line!r}", lineno)
        sig = inv.get(m.group("name"))
        if sig is None:
            raise DiagramError(f"undeclared signal {m.group('name')!r}", lineno)
        tokens = [t.strip() for t in m.group("cells").split(",")]
        if tokens == [""]:
            tokens = []
        rows.append((sig.name, tuple(_parse_cell(t, sig, lineno) for t in tokens), lineno))
    if not rows:
        raise DiagramError("diagram lists no signals")
    lengths = {len(r[1]) for r in rows}
    if len(lengths) > 1:
        detail = ", ".join(f"{n}={len(c)} (line {ln})" for n, c, ln in rows)
        raise DiagramError(f"signal vectors differ in length: {detail}")
    return TimingDiagram(header or name or "diagram", inv, tuple((n, c) for n, c, _ in rows))


def load_diagram(path: Union[str, Path], inv: SignalInventory) -> TimingDiagram:
    path = Path(path)
    return parse_diagram(path.read_text(encoding="utf-8"), inv, name=path.stem)


def format_diagram(td: TimingDiagram) -> str:
    lines = [f"name: {td.name}"]
    width = max(len(n) for n in td.names)
    for name, cells in td.signals:
        lines.append(f"{name.ljust(width)} = [{', '.join(str(c) for c in cells)}]")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------


def encode_diagram(td: TimingDiagram) -> Formula:
    """Conjunction of the per-cycle constraints a diagram imposes.

    Explicit cells pin their cycle term, repeated symbolic labels on one
    signal are chained by equalities between consecutive occurrences, and
    ``X`` cells contribute nothing.
    """
    inv = td.inventory
    parts = []
    for name, cells in td.signals:
        sig = inv[name]
        last_seen: dict[str, int] = {}
        for cyc, cell in enumerate(cells):
            if isinstance(cell, Explicit):
                if sig.is_word:
                    key = inv.constant_key(name, cell.value)
                    parts.append(word_eq(CycleTerm(name, cyc), ConstTerm(name, key)))
                else:
                    parts.append(bit(name, cyc) if cell.value else neg(bit(name, cyc)))
            elif isinstance(cell, Symbolic):
                prev = last_seen.get(cell.label)
                if prev is not None:
                    if sig.is_word:
                        parts.append(word_eq(CycleTerm(name, prev), CycleTerm(name, cyc)))
                    else:
                        parts.append(iff(bit(name, prev), bit(name, cyc)))
                last_seen[cell.label] = cyc
    return conj(*parts)
