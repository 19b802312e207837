"""Template grammars and exhaustive template enumeration.

Grammar files are line-oriented BNF::

    # comment
    <implic> ::= |-> <conj> <delay>
    <conj>   ::= && <assign> <assign>
               | && <assign> <assign> <assign>
    <assign> ::= == <signal> <level>

Each alternative is a prefix-notation operator application.  ``&&`` takes
all remaining operands of its alternative, every other operator has a fixed
arity.  The first rule is the top-level rule.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Union

from .props import (HIGH, LOW, And, Delay, Eq, Fell, Hole, HoleKind, Implic, Neq, Node, Not,
                    PropertyError, Rose, Stable, canonicalize)

DEFAULT_CAP = 10 ** 6


class GrammarError(ValueError):
    def __init__(self, message: str, line: Optional[int] = None, column: Optional[int] = None):
        if line is not None:
            message = f"line {line}, column {column}: {message}"
        super().__init__(message)
        self.line = line
        self.column = column


class TemplateCapExceeded(GrammarError):
    def __init__(self, count: int, cap: int):
        super().__init__(f"grammar generates {count} sentences, more than the cap of {cap}")
        self.count = count
        self.cap = cap


_HOLE_TOKENS = {
    "signal": HoleKind.SIGNAL,
    "word": HoleKind.WORD,
    "sw": HoleKind.SIGNAL_OR_WORD,
    "signal/word": HoleKind.SIGNAL_OR_WORD,
    "level": HoleKind.LEVEL,
    "value": HoleKind.VALUE,
}
_ARITY = {"|->": 2, "==": 2, "!=": 2, "!": 1, "$stable": 1, "$rose": 1, "$fell": 1}
_NT = re.compile(r"^<([A-Za-z_][\w\-]*)>$")
_HOLE = re.compile(r"^<(signal/word|signal|word|sw|level|value)(?::([A-Za-z_]\w*))?>$")
_DELAY = re.compile(r"^##([1-9])$")


@dataclass(frozen=True)
class Symbol:
    """A leaf of an alternative: a hole, a level constant or a nonterminal."""

    kind: str  # "hole", "level", "nt"
    value: object
    line: int = 0
    column: int = 0


@dataclass(frozen=True)
class Op:
    token: str
    args: tuple


Item = Union[Symbol, Op]


@dataclass(frozen=True)
class Alternative:
    tree: Item
    text: str


@dataclass(frozen=True)
class Grammar:
    rules: dict
    top_rule: str

    def alternatives(self, name: str) -> list[Alternative]:
        return self.rules[name]


@dataclass(frozen=True)
class Template:
    """An enumerated template with the grammar choices that produced it."""

    node: Node
    derivation: tuple  # ((nonterminal, alternative index), ...) in DFS order


def _tokens(text: str, lineno: int, start: int):
    for m in re.finditer(r"\S+", text):
        yield m.group(), lineno, start + m.start() + 1


def parse_grammar(text: str) -> Grammar:
    raw_rules: list[tuple[str, int, int, list]] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = _strip_comment(raw)
        if not line.strip():
            continue
        stripped = line.lstrip()
        indent = len(line) - len(stripped)
        if stripped.startswith("| ") or stripped == "|":
            if not raw_rules:
                raise GrammarError("continuation line before any rule", lineno, indent + 1)
            raw_rules[-1][3].append(None)
            raw_rules[-1][3].extend(_tokens(stripped[1:], lineno, indent + 1))
            continue
        m = re.match(r"^(\s*)(<[^>]+>)\s*::=", line)
        if not m:
            raise GrammarError("expected '<name> ::= ...'", lineno, indent + 1)
        head = m.group(2)
        nt = _NT.match(head)
        if not nt or _HOLE.match(head):
            raise GrammarError(f"invalid rule name {head}", lineno, len(m.group(1)) + 1)
        raw_rules.append((nt.group(1), lineno, len(m.group(1)) + 1,
                          list(_tokens(line[m.end():], lineno, m.end()))))

    if not raw_rules:
        raise GrammarError("grammar has no rules")

    rules: dict[str, list[Alternative]] = {}
    for name, lineno, col, toks in raw_rules:
        if name in rules:
            raise GrammarError(f"duplicate rule <{name}>", lineno, col)
        alts: list[list] = [[]]
        for tok in toks:
            if tok is None or tok[0] == "|":
                alts.append([])
            else:
                alts[-1].append(tok)
        parsed = []
        for alt in alts:
            if not alt:
                raise GrammarError(f"empty alternative in <{name}>", lineno, col)
            parsed.append(Alternative(_parse_alternative(alt), " ".join(t[0] for t in alt)))
        rules[name] = parsed

    for name, lineno, col, _ in raw_rules:
        for alt in rules[name]:
            for sym in _symbols(alt.tree):
                if sym.kind == "nt" and sym.value not in rules:
                    raise GrammarError(f"undefined nonterminal <{sym.value}>", sym.line, sym.column)
    grammar = Grammar(rules, raw_rules[0][0])
    _check_acyclic(grammar)
    return grammar


def _strip_comment(raw: str) -> str:
    m = re.search(r"(^|\s)#(?!#)", raw)
    return raw[:m.start()] if m else raw


def load_grammar(path: Union[str, Path]) -> Grammar:
    return parse_grammar(Path(path).read_text(encoding="utf-8"))


def _leaf(tok) -> Symbol:
    text, line, col = tok
    m = _HOLE.match(text)
    if m:
        return Symbol("hole", Hole(_HOLE_TOKENS[m.group(1)], m.group(2)), line, col)
    if text in ("HIGH", "LOW"):
        return Symbol("level", HIGH if text == "HIGH" else LOW, line, col)
    m = _NT.match(text)
    if m:
        return Symbol("nt", m.group(1), line, col)
    raise GrammarError(f"unknown operator token {text!r}", line, col)


def _is_operator(text: str) -> bool:
    return text in _ARITY or text == "&&" or bool(_DELAY.match(text))


def _parse_alternative(toks: list) -> Item:
    pos = 0

    def parse(limit: int) -> Item:
        nonlocal pos
        text, line, col = toks[pos]
        pos += 1
        if not _is_operator(text):
            return _leaf((text, line, col))
        if text == "&&":
            args = []
            while pos < limit:
                args.append(parse(limit))
            if len(args) < 2:
                raise GrammarError("'&&' needs at least two operands", line, col)
            return Op(text, tuple(args))
        arity = 1 if _DELAY.match(text) else _ARITY[text]
        args = []
        for _ in range(arity):
            if pos >= limit:
                raise GrammarError(f"operator {text!r} expects {arity} operand(s)", line, col)
            args.append(parse(limit))
        return Op(text, tuple(args))

    tree = parse(len(toks))
    if pos != len(toks):
        text, line, col = toks[pos]
        raise GrammarError(f"unexpected token {text!r} after a complete alternative", line, col)
    return tree


def _symbols(item: Item):
    if isinstance(item, Symbol):
        yield item
    else:
        for arg in item.args:
            yield from _symbols(arg)


def _check_acyclic(g: Grammar) -> None:
    state: dict[str, int] = {}

    def visit(name: str, stack: list[str]) -> None:
        state[name] = 1
        for alt in g.rules[name]:
            for sym in _symbols(alt.tree):
                if sym.kind != "nt":
                    continue
                if state.get(sym.value) == 1:
                    cycle = stack[stack.index(sym.value):] + [sym.value]
                    raise GrammarError("recursive rules: " + " -> ".join(f"<{c}>" for c in cycle),
                                       sym.line, sym.column)
                if sym.value not in state:
                    visit(sym.value, stack + [sym.value])
        state[name] = 2

    for name in g.rules:
        if name not in state:
            visit(name, [name])


# ---------------------------------------------------------------------------


def count_sentences(g: Grammar, name: Optional[str] = None) -> int:
    """Number of sentences derivable from ``name`` (default: the top rule)."""
    memo: dict[str, int] = {}

    def count_item(item: Item) -> int:
        if isinstance(item, Symbol):
            return count_nt(item.value) if item.kind == "nt" else 1
        total = 1
        for arg in item.args:
            total *= count_item(arg)
        return total

    def count_nt(nt: str) -> int:
        if nt not in memo:
            memo[nt] = sum(count_item(alt.tree) for alt in g.rules[nt])
        return memo[nt]

    return count_nt(name or g.top_rule)


def _build(token: str, args: list[Node]) -> Node:
    if token == "|->":
        return Implic(args[0], args[1])
    if token == "&&":
        return And(args)
    if token == "==":
        return Eq(args[0], args[1])
    if token == "!=":
        return Neq(args[0], args[1])
    if token == "!":
        return Not(args[0])
    if token == "$stable":
        return Stable(args[0])
    if token == "$rose":
        return Rose(args[0])
    if token == "$fell":
        return Fell(args[0])
    return Delay(int(token[2:]), args[0])


def enumerate_derivations(g: Grammar, cap: int = DEFAULT_CAP) -> list[Template]:
    """All distinct templates of the top rule, in depth-first choice order."""
    total = count_sentences(g)
    if total > cap:
        raise TemplateCapExceeded(total, cap)

    memo: dict[str, list[tuple[Node, tuple]]] = {}

    def expand_item(item: Item) -> list[tuple[Node, tuple]]:
        if isinstance(item, Symbol):
            if item.kind == "nt":
                return expand_nt(item.value)
            return [(item.value, ())]
        options = [expand_item(arg) for arg in item.args]
        out = []
        for combo in itertools.product(*options):
            node = _build(item.token, [c[0] for c in combo])
            out.append((node, sum((c[1] for c in combo), ())))
        return out

    def expand_nt(nt: str) -> list[tuple[Node, tuple]]:
        if nt not in memo:
            out = []
            for i, alt in enumerate(g.rules[nt]):
                for node, path in expand_item(alt.tree):
                    out.append((node, ((nt, i),) + path))
            memo[nt] = out
        return memo[nt]

    seen: set = set()
    templates = []
    for node, path in expand_nt(g.top_rule):
        try:
            canon = canonicalize(node)
        except PropertyError as exc:
            choices = " ".join(f"<{nt}>#{i}" for nt, i in path)
            raise GrammarError(f"derivation {choices} yields an ill-formed template: {exc}") from None
        if canon in seen:
            continue
        seen.add(canon)
        templates.append(Template(canon, path))
    return templates


def enumerate_templates(g: Grammar, cap: int = DEFAULT_CAP) -> list[Node]:
    return [t.node for t in enumerate_derivations(g, cap)]
