"""Parser for the SVA fragment produced by :func:`svamine.render.render_sva`."""

from __future__ import annotations

import re
from typing import Optional

from .props import (HIGH, LOW, And, Delay, Eq, Fell, Implic, LevelConst, Neq, Node, Not,
                    Rose, SigRef, Stable, WordConst, canonicalize)
from .signals import SignalInventory, parse_int


class SvaSyntaxError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


class UnsupportedConstruct(SvaSyntaxError):
    def __init__(self, token: str, position: int):
        super().__init__(f"unsupported SVA construct {token!r}", position)
        self.token = token


_TOKEN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<bracket>\[[^\]]*\])
  | (?P<op>\|->|\|=>|&&|\|\||==|!=|!|\(|\)|;|@|,)
  | (?P<delay>\#\#\d+)
  | (?P<baddelay>\#\#\S*)
  | (?P<func>\$[A-Za-z_]\w*)
  | (?P<num>\d+'[hHbBdD][0-9a-fA-F_]+|0[xX][0-9a-fA-F_]+|0[bB][01_]+|\d+)
  | (?P<ident>[A-Za-z_][\w#$]*)
  | (?P<other>.)
""", re.VERBOSE)

_UNSUPPORTED_WORDS = {"or", "and", "not", "intersect", "within", "throughout", "until",
                      "s_until", "until_with", "eventually", "s_eventually", "always",
                      "s_always", "nexttime", "first_match", "if", "else", "iff",
                      "disable", "implies", "strong", "weak", "case", "accept_on",
                      "reject_on"}
_FUNCS = {"$stable": Stable, "$rose": Rose, "$fell": Fell}


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    for m in _TOKEN.finditer(text):
        kind = m.lastgroup
        value = m.group()
        if kind == "ws":
            continue
        if kind in ("bracket", "baddelay") or value in ("|=>", "||"):
            raise UnsupportedConstruct(value, m.start())
        if kind == "other":
            raise SvaSyntaxError(f"unexpected character {value!r}", m.start())
        if kind == "ident" and value in _UNSUPPORTED_WORDS:
            raise UnsupportedConstruct(value, m.start())
        if kind == "func" and value not in _FUNCS:
            raise UnsupportedConstruct(value, m.start())
        tokens.append((kind, value, m.start()))
    tokens.append(("eof", "", len(text)))
    return tokens


_WRAPPER = re.compile(r"^\s*assert\s+property\s*\(\s*@\s*\(\s*posedge\s+\w+\s*\)(?P<body>.*)\)\s*;?\s*$",
                      re.DOTALL)


def parse_sva(text: str, inventory: Optional[SignalInventory] = None) -> Node:
    """Parse an SVA expression of the supported fragment into a canonical AST.

    An ``assert property (@(posedge clk) ...);`` wrapper is accepted and
    discarded.  With an ``inventory``, identifiers on the right of ``==``
    resolve to declared word constants and ``0``/``1`` against 1-bit signals
    become ``LOW``/``HIGH``.
    """
    m = _WRAPPER.match(text)
    if m:
        offset = m.start("body")
        text = m.group("body")
    else:
        offset = 0
        if re.match(r"^\s*assert\b", text):
            raise SvaSyntaxError("malformed assert statement", 0)
    parser = _Parser(_tokenize(text), inventory, offset)
    node = parser.parse()
    return canonicalize(node, inventory)


class _Parser:
    def __init__(self, tokens, inventory, offset):
        self.tokens = tokens
        self.pos = 0
        self.inv = inventory
        self.offset = offset

    def peek(self):
        return self.tokens[self.pos]

    def next(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def error(self, message, tok=None):
        tok = tok or self.peek()
        return SvaSyntaxError(message, tok[2] + self.offset)

    def expect(self, value):
        tok = self.next()
        if tok[1] != value:
            raise self.error(f"expected {value!r}, found {tok[1] or 'end of input'!r}", tok)
        return tok

    def parse(self) -> Node:
        ante = self.conj()
        if self.peek()[1] == "|->":
            self.next()
            cons = self.conj()
            node = Implic(ante, cons)
        else:
            node = ante
        if self.peek()[1] == ";":
            self.next()
        tok = self.peek()
        if tok[0] != "eof":
            raise self.error(f"unexpected token {tok[1]!r}", tok)
        return node

    def conj(self) -> Node:
        items = [self.unary()]
        while self.peek()[1] == "&&":
            self.next()
            items.append(self.unary())
        return items[0] if len(items) == 1 else And(items)

    def unary(self) -> Node:
        kind, value, _ = self.peek()
        if value == "!":
            self.next()
            return Not(self.unary())
        if kind == "delay":
            self.next()
            cycles = int(value[2:])
            if cycles < 1:
                raise self.error("delay must be at least one cycle")
            return Delay(cycles, self.unary())
        return self.primary()

    def primary(self) -> Node:
        tok = self.next()
        kind, value, _ = tok
        if value == "(":
            inner = self.conj()
            if self.peek()[1] == "|->":
                raise self.error("implication is only allowed at the top level")
            self.expect(")")
            return inner
        if kind == "func":
            self.expect("(")
            arg = self.next()
            if arg[0] != "ident":
                raise self.error("expected a signal name", arg)
            self.expect(")")
            return _FUNCS[value](SigRef(arg[1]))
        if kind == "ident":
            if value in ("HIGH", "LOW"):
                raise self.error("level constant outside a comparison", tok)
            lhs = SigRef(value)
            op = self.peek()[1]
            if op in ("==", "!="):
                self.next()
                rhs = self.value(lhs)
                return Eq(lhs, rhs) if op == "==" else Neq(lhs, rhs)
            return Eq(lhs, HIGH)
        if kind == "num":
            raise self.error("constant outside a comparison", tok)
        raise self.error(f"unexpected token {value or 'end of input'!r}", tok)

    def value(self, lhs: SigRef) -> Node:
        tok = self.next()
        kind, value, _ = tok
        sig = self.inv.get(lhs.name) if self.inv is not None else None
        if kind == "ident":
            if value == "HIGH":
                return HIGH
            if value == "LOW":
                return LOW
            if self.inv is not None and value not in self.inv and sig is not None \
                    and self.inv.find_constant(sig.name, value) is not None:
                return WordConst(value)
            return SigRef(value)
        if kind == "num":
            number = parse_int(value)
            if sig is not None and not sig.is_word:
                if number not in (0, 1):
                    raise self.error("1-bit signal compared with a multi-bit value", tok)
                return LevelConst(bool(number))
            if sig is not None:
                const = self.inv.find_constant(sig.name, number)
                if const is not None and const.name is not None:
                    return WordConst(const.name)
            return WordConst(number)
        raise self.error("expected a value", tok)
