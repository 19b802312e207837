"""Propositional formulas over signal-cycle variables.

Besides the usual connectives a formula may contain :class:`WordEq` atoms
that compare two word terms (a word signal at a cycle, or a word
constant).  They are lowered to plain bits by :mod:`svamine.domains` before
a formula reaches a SAT backend.

The constructors :func:`conj`, :func:`disj`, :func:`neg`, :func:`implies`
and :func:`iff` fold constants and flatten nested conjunctions and
disjunctions; build formulas through them rather than the raw classes.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Hashable, Iterable, Mapping, Union


@dataclass(frozen=True)
class Const:
    value: bool

    def __str__(self) -> str:
        return "true" if self.value else "false"


TRUE = Const(True)
FALSE = Const(False)


@dataclass(frozen=True)
class Var:
    key: Hashable

    def __str__(self) -> str:
        return var_name(self.key)


@dataclass(frozen=True)
class Not:
    arg: "Formula"

    def __str__(self) -> str:
        return f"¬{_wrap(self.arg)}"


@dataclass(frozen=True)
class And:
    args: tuple

    def __str__(self) -> str:
        return " ∧ ".join(_wrap(a) for a in self.args)


@dataclass(frozen=True)
class Or:
    args: tuple

    def __str__(self) -> str:
        return " ∨ ".join(_wrap(a) for a in self.args)


@dataclass(frozen=True)
class Implies:
    lhs: "Formula"
    rhs: "Formula"

    def __str__(self) -> str:
        return f"{_wrap(self.lhs)} → {_wrap(self.rhs)}"


@dataclass(frozen=True)
class Iff:
    lhs: "Formula"
    rhs: "Formula"

    def __str__(self) -> str:
        return f"{_wrap(self.lhs)} ↔ {_wrap(self.rhs)}"


@dataclass(frozen=True)
class CycleTerm:
    signal: str
    cycle: int

    def __str__(self) -> str:
        return f"{self.signal}[{self.cycle}]"


@dataclass(frozen=True)
class ConstTerm:
    signal: str
    value: Union[int, str]  # integer or opaque constant name

    def __str__(self) -> str:
        return str(self.value)


Term = Union[CycleTerm, ConstTerm]


@dataclass(frozen=True)
class WordEq:
    lhs: Term
    rhs: Term

    def __str__(self) -> str:
        return f"{self.lhs} = {self.rhs}"


Formula = Union[Const, Var, Not, And, Or, Implies, Iff, WordEq]


def var_name(key: Hashable) -> str:
    if isinstance(key, tuple) and len(key) == 2:
        return f"{key[0]}[{key[1]}]"
    if isinstance(key, tuple) and len(key) == 3:
        return f"{key[0]}[{key[1]}].b{key[2]}"
    return str(key)


def _wrap(f: Formula) -> str:
    if isinstance(f, (And, Or, Implies, Iff, WordEq)):
        return f"({f})"
    return str(f)


def bit(signal: str, cycle: int) -> Var:
    return Var((signal, cycle))


# ---------------------------------------------------------------------------
# Folding constructors


def neg(f: Formula) -> Formula:
    if f is TRUE or f == TRUE:
        return FALSE
    if f is FALSE or f == FALSE:
        return TRUE
    if isinstance(f, Not):
        return f.arg
    return Not(f)


def conj(*args: Formula) -> Formula:
    out = []
    for a in args:
        if isinstance(a, Const):
            if not a.value:
                return FALSE
            continue
        if isinstance(a, And):
            out.extend(a.args)
        else:
            out.append(a)
    if not out:
        return TRUE
    if len(out) == 1:
        return out[0]
    return And(tuple(out))


def disj(*args: Formula) -> Formula:
    out = []
    for a in args:
        if isinstance(a, Const):
            if a.value:
                return TRUE
            continue
        if isinstance(a, Or):
            out.extend(a.args)
        else:
            out.append(a)
    if not out:
        return FALSE
    if len(out) == 1:
        return out[0]
    return Or(tuple(out))


def implies(a: Formula, b: Formula) -> Formula:
    if isinstance(a, Const):
        return b if a.value else TRUE
    if isinstance(b, Const):
        return TRUE if b.value else neg(a)
    return Implies(a, b)


def iff(a: Formula, b: Formula) -> Formula:
    if isinstance(a, Const):
        return b if a.value else neg(b)
    if isinstance(b, Const):
        return a if b.value else neg(a)
    if a == b:
        return TRUE
    return Iff(a, b)


def word_eq(a: Term, b: Term) -> Formula:
    if a == b:
        return TRUE
    if isinstance(a, ConstTerm) and isinstance(b, ConstTerm):
        return TRUE if a.value == b.value else FALSE
    return WordEq(a, b)


def conjuncts(f: Formula) -> tuple:
    if isinstance(f, And):
        return f.args
    if f == TRUE:
        return ()
    return (f,)


# ---------------------------------------------------------------------------


def evaluate(f: Formula, env: Mapping) -> bool:
    """Truth value of ``f``.

    ``env`` maps variable keys to booleans and :class:`CycleTerm` objects to
    word values; constants evaluate to their own value.
    """
    if isinstance(f, Const):
        return f.value
    if isinstance(f, Var):
        return bool(env[f.key])
    if isinstance(f, Not):
        return not evaluate(f.arg, env)
    if isinstance(f, And):
        return all(evaluate(a, env) for a in f.args)
    if isinstance(f, Or):
        return any(evaluate(a, env) for a in f.args)
    if isinstance(f, Implies):
        return (not evaluate(f.lhs, env)) or evaluate(f.rhs, env)
    if isinstance(f, Iff):
        return evaluate(f.lhs, env) == evaluate(f.rhs, env)
    if isinstance(f, WordEq):
        return _term_value(f.lhs, env) == _term_value(f.rhs, env)
    raise TypeError(f"not a formula: {f!r}")


def _term_value(t: Term, env: Mapping):
    if isinstance(t, ConstTerm):
        return t.value
    return env[t]


def variables(f: Formula) -> set:
    """Keys of all boolean variables in ``f``."""
    out: set = set()
    stack = [f]
    while stack:
        g = stack.pop()
        if isinstance(g, Var):
            out.add(g.key)
        elif isinstance(g, Not):
            stack.append(g.arg)
        elif isinstance(g, (And, Or)):
            stack.extend(g.args)
        elif isinstance(g, (Implies, Iff)):
            stack.append(g.lhs)
            stack.append(g.rhs)
    return out


def terms(f: Formula) -> set:
    """All word terms mentioned by :class:`WordEq` atoms of ``f``."""
    out: set = set()
    stack = [f]
    while stack:
        g = stack.pop()
        if isinstance(g, WordEq):
            out.add(g.lhs)
            out.add(g.rhs)
        elif isinstance(g, Not):
            stack.append(g.arg)
        elif isinstance(g, (And, Or)):
            stack.extend(g.args)
        elif isinstance(g, (Implies, Iff)):
            stack.append(g.lhs)
            stack.append(g.rhs)
    return out


def substitute(f: Formula, fixed: Mapping) -> Formula:
    """Replace variables with known truth values and fold the result."""
    if isinstance(f, Var):
        value = fixed.get(f.key)
        if value is None:
            return f
        return TRUE if value else FALSE
    if isinstance(f, Const):
        return f
    if isinstance(f, Not):
        return neg(substitute(f.arg, fixed))
    if isinstance(f, And):
        out = []
        for a in f.args:
            a = substitute(a, fixed)
            if a is FALSE or a == FALSE:
                return FALSE
            out.append(a)
        return conj(*out)
    if isinstance(f, Or):
        out = []
        for a in f.args:
            a = substitute(a, fixed)
            if a is TRUE or a == TRUE:
                return TRUE
            out.append(a)
        return disj(*out)
    if isinstance(f, Implies):
        return implies(substitute(f.lhs, fixed), substitute(f.rhs, fixed))
    if isinstance(f, Iff):
        return iff(substitute(f.lhs, fixed), substitute(f.rhs, fixed))
    if isinstance(f, WordEq):
        return f
    raise TypeError(f"not a formula: {f!r}")


def equivalent(a: Formula, b: Formula, keys: Iterable = ()) -> bool:
    """Brute-force logical equivalence of two pure boolean formulas."""
    names = sorted(variables(a) | variables(b) | set(keys), key=repr)
    for bits in itertools.product((False, True), repeat=len(names)):
        env = dict(zip(names, bits))
        if evaluate(a, env) != evaluate(b, env):
            return False
    return True
