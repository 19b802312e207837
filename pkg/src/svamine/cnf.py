"""Tseitin conversion of boolean formulas to CNF, plus DIMACS output."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Hashable

from .logic import And, Const, Formula, Iff, Implies, Not, Or, Var, WordEq, var_name


@dataclass
class Cnf:
    nvars: int = 0
    clauses: list = field(default_factory=list)
    index: dict = field(default_factory=dict)  # variable key -> DIMACS index
    keys: list = field(default_factory=lambda: [None])  # DIMACS index -> key (None for aux)

    def copy(self) -> "Cnf":
        return Cnf(self.nvars, list(self.clauses), dict(self.index), list(self.keys))

    def var(self, key: Hashable) -> int:
        v = self.index.get(key)
        if v is None:
            v = self.index[key] = self.fresh(key)
        return v

    def fresh(self, key=None) -> int:
        self.nvars += 1
        self.keys.append(key)
        return self.nvars

    def add(self, clause) -> None:
        self.clauses.append(list(clause))

    # -- Tseitin -----------------------------------------------------------

    def literal(self, f: Formula, memo: dict) -> int:
        """A literal equivalent to ``f`` (auxiliary variables as needed)."""
        if isinstance(f, Var):
            return self.var(f.key)
        if isinstance(f, Not):
            return -self.literal(f.arg, memo)
        hit = memo.get(id(f))
        if hit is not None:
            return hit[0]
        if isinstance(f, Const):
            x = self.fresh()
            self.add([x] if f.value else [-x])
        elif isinstance(f, (And, Or)):
            args = [self.literal(a, memo) for a in f.args]
            x = self.fresh()
            if isinstance(f, Or):
                args = [-a for a in args]
                x = -x
            # x <-> AND(args)
            for a in args:
                self.add([-x, a])
            self.add([x] + [-a for a in args])
            if isinstance(f, Or):
                x = -x
        elif isinstance(f, Implies):
            a, b = self.literal(f.lhs, memo), self.literal(f.rhs, memo)
            x = self.fresh()
            self.add([-x, -a, b])
            self.add([x, a])
            self.add([x, -b])
        elif isinstance(f, Iff):
            a, b = self.literal(f.lhs, memo), self.literal(f.rhs, memo)
            x = self.fresh()
            self.add([-x, -a, b])
            self.add([-x, a, -b])
            self.add([x, a, b])
            self.add([x, -a, -b])
        elif isinstance(f, WordEq):
            raise TypeError("word equalities must be lowered before CNF conversion")
        else:
            raise TypeError(f"not a formula: {f!r}")
        memo[id(f)] = (x, f)  # keep f alive so its id stays unique
        return x

    def assert_formula(self, f: Formula, memo=None) -> None:
        """Add clauses forcing ``f`` true, without an auxiliary for the root."""
        memo = {} if memo is None else memo
        stack = [f]
        while stack:
            g = stack.pop()
            if isinstance(g, Const):
                if not g.value:
                    self.add([])
            elif isinstance(g, And):
                stack.extend(g.args)
            elif isinstance(g, Or):
                self.add(self.literal(a, memo) for a in g.args)
            elif isinstance(g, Implies):
                self.add([-self.literal(g.lhs, memo), self.literal(g.rhs, memo)])
            elif isinstance(g, Iff):
                a, b = self.literal(g.lhs, memo), self.literal(g.rhs, memo)
                self.add([-a, b])
                self.add([a, -b])
            elif isinstance(g, Not) and isinstance(g.arg, Or):
                stack.extend(Not(a) for a in g.arg.args)
            elif isinstance(g, Not) and isinstance(g.arg, Implies):
                stack.append(g.arg.lhs)
                stack.append(Not(g.arg.rhs))
            else:
                self.add([self.literal(g, memo)])

    # -- output ------------------------------------------------------------

    def to_dimacs(self) -> str:
        lines = [f"c {v} {var_name(k)}" for v, k in enumerate(self.keys) if k is not None]
        lines.append(f"p cnf {self.nvars} {len(self.clauses)}")
        lines.extend(" ".join(map(str, c + [0])) for c in self.clauses)
        return "\n".join(lines) + "\n"

    def name_map(self) -> dict[str, str]:
        return {str(v): var_name(k) for v, k in enumerate(self.keys) if k is not None}

    def name_map_json(self) -> str:
        return json.dumps(self.name_map(), indent=2) + "\n"


def to_cnf(f: Formula) -> Cnf:
    cnf = Cnf()
    cnf.assert_formula(f)
    return cnf
