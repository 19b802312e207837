"""Signal inventory: the interface signals a property may mention."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator, Optional, Union

from .props import Eq, Fell, Hole, LevelConst, Neq, Node, PropertyError, Rose, SigRef, walk


class SignalsError(ValueError):
    """Malformed signals file or inconsistent inventory."""

    def __init__(self, message: str, line: Optional[int] = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


@dataclass(frozen=True)
class WordConstant:
    """A declared constant of a word signal.

    At least one of ``name`` and ``value`` is set.  A name without a value is
    an opaque constant that differs from every other declared constant.
    """

    name: Optional[str] = None
    value: Optional[int] = None

    @property
    def token(self) -> Union[int, str]:
        return self.name if self.name is not None else self.value


@dataclass(frozen=True)
class Signal:
    name: str
    kind: str  # "signal" (1 bit) or "word"
    width: int = 1
    subtype: Optional[str] = None
    constants: tuple = ()

    @property
    def is_word(self) -> bool:
        return self.kind == "word"


@dataclass(frozen=True)
class SignalInventory:
    entries: tuple = ()
    _index: dict = field(default=None, compare=False, hash=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(self.entries))
        index = {}
        for sig in self.entries:
            if sig.name in index:
                raise SignalsError(f"duplicate signal {sig.name!r}")
            if sig.kind == "signal":
                if sig.width != 1:
                    raise SignalsError(f"signal {sig.name!r} must be 1 bit wide")
                if sig.constants:
                    raise SignalsError(f"1-bit signal {sig.name!r} cannot declare constants")
            elif sig.kind == "word":
                if sig.width < 2:
                    raise SignalsError(f"word {sig.name!r} needs width >= 2")
                for const in sig.constants:
                    if const.value is not None and not 0 <= const.value < (1 << sig.width):
                        raise SignalsError(
                            f"constant {const.value:#x} does not fit {sig.name}[{sig.width}]")
            else:
                raise SignalsError(f"unknown signal kind {sig.kind!r}")
            index[sig.name] = sig
        object.__setattr__(self, "_index", index)

    def __iter__(self) -> Iterator[Signal]:
        return iter(self.entries)

    def __len__(self) -> int:
        return len(self.entries)

    def __contains__(self, name: str) -> bool:
        return name in self._index

    def __getitem__(self, name: str) -> Signal:
        return self._index[name]

    @property
    def names(self) -> list[str]:
        return [s.name for s in self.entries]

    def get(self, name: str) -> Optional[Signal]:
        return self._index.get(name)

    def bits(self, subtype: Optional[str] = None) -> list[Signal]:
        return [s for s in self.entries if not s.is_word and _matches(s, subtype)]

    def words(self, subtype: Optional[str] = None) -> list[Signal]:
        return [s for s in self.entries if s.is_word and _matches(s, subtype)]

    def subset(self, names) -> "SignalInventory":
        wanted = set(names)
        return SignalInventory(tuple(s for s in self.entries if s.name in wanted))

    def find_constant(self, signal: str, token: Union[int, str]) -> Optional[WordConstant]:
        sig = self._index.get(signal)
        if sig is None:
            return None
        for const in sig.constants:
            if token == const.name or (isinstance(token, int) and token == const.value):
                return const
        return None

    def constant_key(self, signal: str, token: Union[int, str]) -> Union[int, str]:
        """Value identity of a word constant: its integer, or its name if opaque."""
        if isinstance(token, int):
            return token
        const = self.find_constant(signal, token)
        if const is None:
            raise KeyError(f"{token!r} is not a declared constant of {signal}")
        return const.value if const.value is not None else const.name


def _matches(sig: Signal, subtype: Optional[str]) -> bool:
    return subtype is None or sig.subtype == subtype


def check_types(node: Node, inv: SignalInventory) -> None:
    """Check that a ground property is type-consistent with ``inv``.

    Raises :class:`PropertyError` for unknown names or operand mismatches.
    """
    for sub in walk(node):
        if isinstance(sub, SigRef) and sub.name not in inv:
            raise PropertyError(f"unknown signal {sub.name!r}", sub)
    for sub in walk(node):
        if isinstance(sub, Hole):
            raise PropertyError("property still contains holes", sub)
        if isinstance(sub, (Eq, Neq)):
            _check_comparison(sub, inv)
        elif isinstance(sub, (Rose, Fell)):
            if inv[sub.operand.name].is_word:
                raise PropertyError("edge operators apply to 1-bit signals only", sub)


def _check_comparison(node, inv: SignalInventory) -> None:
    lhs, rhs = node.lhs, node.rhs
    if not isinstance(lhs, SigRef):
        lhs, rhs = rhs, lhs
    if not isinstance(lhs, SigRef):
        raise PropertyError("comparison needs a signal operand", node)
    sig = inv[lhs.name]
    if not sig.is_word:
        if not isinstance(rhs, LevelConst):
            raise PropertyError("1-bit signals compare only with HIGH/LOW", node)
        return
    if isinstance(rhs, LevelConst):
        raise PropertyError("words compare with word constants, not levels", node)
    if isinstance(rhs, SigRef):
        other = inv[rhs.name]
        if not other.is_word:
            raise PropertyError("word compared with a 1-bit signal", node)
        if other.width != sig.width:
            raise PropertyError("word comparison between different widths", node)
        if other.name == sig.name:
            raise PropertyError("word compared with itself", node)
        return
    if isinstance(rhs.value, int):
        if rhs.value >= (1 << sig.width):
            raise PropertyError(f"constant does not fit {sig.name}[{sig.width}]", node)
    elif inv.find_constant(sig.name, rhs.value) is None:
        raise PropertyError(f"{rhs.value!r} is not a declared constant of {sig.name}", node)


# ---------------------------------------------------------------------------
# File format:  NAME: signal [subtype=TAG]
#               NAME: word[W] [subtype=TAG] [constants=A,0x3,B=7]

_LINE = re.compile(r"^(?P<name>[A-Za-z_][\w#$]*)\s*:\s*(?P<kind>signal|word\s*\[\s*(?P<width>\d+)\s*\])"
                   r"(?P<opts>(\s+\w+=\S+)*)\s*$")
_IDENT = re.compile(r"^[A-Za-z_]\w*$")


def parse_int(text: str) -> int:
    text = text.strip().replace("_", "")
    m = re.fullmatch(r"(\d*)'([hHbBdD])([0-9a-fA-F]+)", text)
    if m:
        return int(m.group(3), {"h": 16, "b": 2, "d": 10}[m.group(2).lower()])
    if text.lower().startswith("0x"):
        return int(text, 16)
    if text.lower().startswith("0b"):
        return int(text, 2)
    if not text.isdigit():
        raise ValueError(f"not an integer literal: {text!r}")
    return int(text, 10)


def _parse_constant(item: str, line: int) -> WordConstant:
    if "=" in item:
        name, _, value = item.partition("=")
        if not _IDENT.match(name):
            raise SignalsError(f"bad constant name {name!r}", line)
        try:
            return WordConstant(name=name, value=parse_int(value))
        except ValueError as exc:
            raise SignalsError(str(exc), line) from None
    if _IDENT.match(item):
        return WordConstant(name=item)
    try:
        return WordConstant(value=parse_int(item))
    except ValueError as exc:
        raise SignalsError(str(exc), line) from None


def parse_signals(text: str) -> SignalInventory:
    entries = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = _strip_comment(raw)
        if not line:
            continue
        m = _LINE.match(line)
        if not m:
            raise SignalsError(f"cannot parse signal declaration {line!r}", lineno)
        width = int(m.group("width")) if m.group("width") else 1
        kind = "word" if m.group("width") else "signal"
        subtype = None
        constants: list[WordConstant] = []
        for opt in m.group("opts").split():
            key, _, value = opt.partition("=")
            if key == "subtype":
                subtype = value
            elif key == "constants":
                if kind != "word":
                    raise SignalsError("only words may declare constants", lineno)
                constants = [_parse_constant(c, lineno) for c in value.split(",") if c]
            else:
                raise SignalsError(f"unknown option {key!r}", lineno)
        entries.append(Signal(m.group("name"), kind, width, subtype, tuple(constants)))
    try:
        return SignalInventory(tuple(entries))
    except SignalsError:
        raise
    except ValueError as exc:
        raise SignalsError(str(exc)) from None


def _strip_comment(raw: str) -> str:
    # '#' is a legal trailing character of signal names (active-low PCI style);
    # a comment starts at a '#' preceded by whitespace or at column 0.
    m = re.search(r"(^|\s)#", raw)
    return (raw[:m.start()] if m else raw).strip()


def load_signals(path: Union[str, Path]) -> SignalInventory:
    return parse_signals(Path(path).read_text(encoding="utf-8"))


def format_signals(inv: SignalInventory) -> str:
    lines = []
    for sig in inv:
        text = f"{sig.name}: " + (f"word[{sig.width}]" if sig.is_word else "signal")
        if sig.subtype:
            text += f" subtype={sig.subtype}"
        if sig.constants:
            items = []
            for c in sig.constants:
                if c.name is not None and c.value is not None:
                    items.append(f"{c.name}={c.value:#x}")
                elif c.name is not None:
                    items.append(c.name)
                else:
                    items.append(f"{c.value:#x}")
            text += " constants=" + ",".join(items)
        lines.append(text)
    return "\n".join(lines) + "\n"
