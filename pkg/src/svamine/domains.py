"""Bit-level encoding of word terms.

Word equalities are reduced to bit equivalences.  Word signals that are
compared with each other share a group; every group gets a code space:

* small-domain mode: when the group's term count ``|T|`` (all cycle terms
  plus distinct constants) fits the declared width, each distinct constant
  is pinned to its own code in ``0 .. m-1`` and terms use
  ``ceil(log2 |T|)`` bits.  Only equalities matter, so any model maps back
  to real values injectively.
* raw mode: otherwise the group is bit-blasted at its declared width with
  constants at their real values, which stays exact for narrow words.
  Opaque (name-only) constants get codes just above the integer range.

An opaque constant is a value only its own signal can take, so each term
is kept away from the codes of other signals' opaque constants and from
codes that decode to nothing (see :meth:`DomainPlan.constraints`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Union

from .logic import (FALSE, TRUE, And, Const, ConstTerm, CycleTerm, Formula, Iff, Implies, Not,
                    Or, Var, WordEq, conj, disj, iff, implies, neg)
from .signals import SignalInventory


@dataclass
class WordDomain:
    signals: tuple
    width: int
    mode: str  # "small" or "raw"
    nbits: int
    codes: dict = field(default_factory=dict)  # constant key -> code
    forbidden: dict = field(default_factory=dict)  # signal -> codes it may not take

    def term_bits(self, term) -> list[Formula]:
        if isinstance(term, ConstTerm):
            return self.code_bits(self.codes[term.value])
        return [Var((term.signal, term.cycle, i)) for i in range(self.nbits)]

    def code_bits(self, code: int) -> list[Formula]:
        return [TRUE if (code >> i) & 1 else FALSE for i in range(self.nbits)]

    def decode(self, codes: Iterable[int]) -> dict[int, Union[int, str]]:
        """Map every code in ``codes`` to a concrete value."""
        by_code = {code: key for key, code in self.codes.items()}
        if self.mode == "raw":
            return {c: by_code.get(c, c) for c in codes}
        taken = {k for k in self.codes if isinstance(k, int)}
        out: dict[int, Union[int, str]] = {}
        fresh = 0
        for code in sorted(set(codes)):
            if code in by_code:
                out[code] = by_code[code]
                continue
            while fresh in taken:
                fresh += 1
            out[code] = fresh
            taken.add(fresh)
        return out


def _const_order(key) -> tuple:
    return (0, key, "") if isinstance(key, int) else (1, 0, key)


class DomainPlan:
    """Code spaces for all word groups of one (diagram, formula) check."""

    def __init__(self, inv: SignalInventory, length: int, words: Iterable[str],
                 terms: Iterable = ()):
        parent: dict[str, str] = {}

        def find(x: str) -> str:
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        consts: dict[str, set] = {}
        for name in words:
            parent.setdefault(name, name)
        links = []
        for term in terms:
            if isinstance(term, tuple):
                a, b = term
                parent.setdefault(a.signal, a.signal)
                parent.setdefault(b.signal, b.signal)
                links.append((a.signal, b.signal))
            elif isinstance(term, ConstTerm):
                parent.setdefault(term.signal, term.signal)
                consts.setdefault(term.signal, set()).add(term.value)
            else:
                parent.setdefault(term.signal, term.signal)
        for a, b in links:
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[max(ra, rb)] = min(ra, rb)

        groups: dict[str, list[str]] = {}
        for name in parent:
            groups.setdefault(find(name), []).append(name)

        self.by_signal: dict[str, WordDomain] = {}
        for members in groups.values():
            members.sort(key=lambda n: inv.names.index(n))
            keys = set()
            for name in members:
                keys |= consts.get(name, set())
                for c in inv[name].constants:
                    keys.add(c.value if c.value is not None else c.name)
            width = min(inv[n].width for n in members)
            size = length * len(members) + len(keys)
            ordered = sorted(keys, key=_const_order)
            opaque = [k for k in ordered if isinstance(k, str)]
            if size <= (1 << width):
                nbits = max(1, math.ceil(math.log2(max(size, 1))))
                codes = {k: i for i, k in enumerate(ordered)}
                dom = WordDomain(tuple(members), width, "small", nbits, codes)
                unused: list = []
            else:
                # exact bit-blasting; opaque constants sit above the integer range
                top = (1 << width) + len(opaque)
                nbits = max(width, (top - 1).bit_length())
                codes = {k: k for k in ordered if isinstance(k, int)}
                codes.update({k: (1 << width) + j for j, k in enumerate(opaque)})
                dom = WordDomain(tuple(members), width, "raw", nbits, codes)
                unused = list(range(top, 1 << nbits))
            for name in members:
                own = {c.name for c in inv[name].constants if c.value is None}
                bad = [codes[k] for k in opaque if k not in own] + unused
                if bad:
                    dom.forbidden[name] = bad
                self.by_signal[name] = dom
        self.length = length

    def constraints(self) -> Formula:
        """Keep each word term away from codes its signal cannot take."""
        parts = []
        for dom in self.domains():
            for name, bad in dom.forbidden.items():
                for cyc in range(self.length):
                    term = dom.term_bits(CycleTerm(name, cyc))
                    for code in bad:
                        parts.append(disj(*(neg(iff(t, c))
                                            for t, c in zip(term, dom.code_bits(code)))))
        return conj(*parts)

    def __getitem__(self, signal: str) -> WordDomain:
        return self.by_signal[signal]

    def domains(self) -> list[WordDomain]:
        seen, out = set(), []
        for dom in self.by_signal.values():
            if id(dom) not in seen:
                seen.add(id(dom))
                out.append(dom)
        return out

    def lower(self, f: Formula) -> Formula:
        """Replace every :class:`WordEq` atom of ``f`` by bit equivalences."""
        if isinstance(f, WordEq):
            dom = self.by_signal[_signal_of(f.lhs)]
            return conj(*(iff(a, b) for a, b in zip(dom.term_bits(f.lhs),
                                                    dom.term_bits(f.rhs))))
        if isinstance(f, (Var, Const)):
            return f
        if isinstance(f, Not):
            return neg(self.lower(f.arg))
        if isinstance(f, And):
            return conj(*(self.lower(a) for a in f.args))
        if isinstance(f, Or):
            return disj(*(self.lower(a) for a in f.args))
        if isinstance(f, Implies):
            return implies(self.lower(f.lhs), self.lower(f.rhs))
        if isinstance(f, Iff):
            return iff(self.lower(f.lhs), self.lower(f.rhs))
        raise TypeError(f"not a formula: {f!r}")

    def word_value(self, signal: str, cycle: int, model: Mapping) -> int:
        dom = self.by_signal[signal]
        return sum(1 << i for i in range(dom.nbits) if model.get((signal, cycle, i), False))


def _signal_of(term) -> str:
    return term.signal


def word_atoms(f: Formula) -> list:
    """Links and constants mentioned by word atoms, as accepted by DomainPlan."""
    out = []
    stack = [f]
    while stack:
        g = stack.pop()
        if isinstance(g, WordEq):
            a, b = g.lhs, g.rhs
            if isinstance(a, CycleTerm) and isinstance(b, CycleTerm):
                if a.signal != b.signal:
                    out.append((a, b))
            else:
                out.append(b if isinstance(b, ConstTerm) else a)
        elif isinstance(g, Not):
            stack.append(g.arg)
        elif isinstance(g, (And, Or)):
            stack.extend(g.args)
        elif isinstance(g, (Implies, Iff)):
            stack.append(g.lhs)
            stack.append(g.rhs)
    return out


def _atom_key(atom) -> tuple:
    if isinstance(atom, tuple):
        return ("link", atom[0].signal, atom[1].signal)
    if isinstance(atom, ConstTerm):
        return ("const", atom.signal, atom.value)
    return ("term", atom.signal)


def plan_for(inv: SignalInventory, length: int, words: Iterable[str], atoms: Iterable,
             cache: Optional[dict] = None) -> DomainPlan:
    """A plan for ``atoms`` (see :func:`word_atoms`), memoised in ``cache``."""
    atoms = list(atoms)
    words = tuple(words)
    if cache is None:
        return DomainPlan(inv, length, words, atoms)
    key = (length, words, frozenset(_atom_key(a) for a in atoms))
    plan = cache.get(key)
    if plan is None:
        plan = cache[key] = DomainPlan(inv, length, words, atoms)
    return plan
