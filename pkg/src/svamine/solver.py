"""A small CDCL SAT solver.

Two watched literals, first-UIP clause learning, activity-based branching
with phase saving, and Luby restarts.  Literals are non-zero ints in
DIMACS convention.
"""

from __future__ import annotations

from typing import Iterable, Optional


def luby(i: int) -> int:
    """The ``i``-th element (1-based) of the Luby sequence 1 1 2 1 1 2 4 ..."""
    k = 1
    while (1 << k) - 1 < i:
        k += 1
    while True:
        if i == (1 << k) - 1:
            return 1 << (k - 1)
        i -= (1 << (k - 1)) - 1
        k = 1
        while (1 << k) - 1 < i:
            k += 1


def _code(lit: int) -> int:
    return 2 * lit if lit > 0 else -2 * lit + 1


class Solver:
    restart_base = 64
    decay = 0.95

    def __init__(self, nvars: int, clauses: Iterable[Iterable[int]] = ()):
        self.n = nvars
        self.val = [0] * (nvars + 1)  # 1 true, -1 false, 0 unassigned
        self.level = [0] * (nvars + 1)
        self.reason: list = [None] * (nvars + 1)
        self.activity = [0.0] * (nvars + 1)
        self.phase = [False] * (nvars + 1)
        self.watches: list[list] = [[] for _ in range(2 * nvars + 2)]
        self.trail: list[int] = []
        self.limits: list[int] = []
        self.qhead = 0
        self.inc = 1.0
        self.ok = True
        self.conflicts = 0
        for c in clauses:
            self.add_clause(c)

    def _value(self, lit: int) -> int:
        v = self.val[lit if lit > 0 else -lit]
        return v if lit > 0 else -v

    def add_clause(self, lits: Iterable[int]) -> None:
        """Add a clause at decision level 0."""
        if not self.ok:
            return
        seen = set()
        out = []
        for lit in lits:
            if -lit in seen:
                return
            if lit in seen:
                continue
            seen.add(lit)
            v = self._value(lit)
            if v == 1:
                return
            if v == 0:
                out.append(lit)
        if not out:
            self.ok = False
        elif len(out) == 1:
            self._assign(out[0], None)
            if self._propagate() is not None:
                self.ok = False
        else:
            self.watches[_code(out[0])].append(out)
            self.watches[_code(out[1])].append(out)

    def _assign(self, lit: int, reason) -> None:
        v = lit if lit > 0 else -lit
        self.val[v] = 1 if lit > 0 else -1
        self.level[v] = len(self.limits)
        self.reason[v] = reason
        self.trail.append(lit)

    def _propagate(self):
        val, watches, trail = self.val, self.watches, self.trail
        while self.qhead < len(trail):
            false_lit = -trail[self.qhead]
            self.qhead += 1
            ws = watches[_code(false_lit)]
            i = j = 0
            n = len(ws)
            while i < n:
                c = ws[i]
                i += 1
                if c[0] == false_lit:
                    c[0], c[1] = c[1], c[0]
                first = c[0]
                fv = val[first] if first > 0 else -val[-first]
                if fv == 1:
                    ws[j] = c
                    j += 1
                    continue
                for k in range(2, len(c)):
                    lit = c[k]
                    lv = val[lit] if lit > 0 else -val[-lit]
                    if lv != -1:
                        c[1], c[k] = lit, false_lit
                        watches[_code(lit)].append(c)
                        break
                else:
                    ws[j] = c
                    j += 1
                    if fv == -1:
                        while i < n:
                            ws[j] = ws[i]
                            j += 1
                            i += 1
                        del ws[j:]
                        self.qhead = len(trail)
                        return c
                    self._assign(first, c)
            del ws[j:]
        return None

    def _bump(self, v: int) -> None:
        self.activity[v] += self.inc
        if self.activity[v] > 1e100:
            self.activity = [a * 1e-100 for a in self.activity]
            self.inc *= 1e-100

    def _analyze(self, confl: list) -> tuple[list[int], int]:
        seen = set()
        learnt = [0]
        level, reason, trail = self.level, self.reason, self.trail
        current = len(self.limits)
        pending = 0
        p = None
        idx = len(trail) - 1
        while True:
            for q in (confl if p is None else confl[1:]):
                v = q if q > 0 else -q
                if v not in seen and level[v] > 0:
                    seen.add(v)
                    self._bump(v)
                    if level[v] == current:
                        pending += 1
                    else:
                        learnt.append(q)
            while True:
                lit = trail[idx]
                idx -= 1
                if (lit if lit > 0 else -lit) in seen:
                    break
            p = lit
            v = p if p > 0 else -p
            seen.discard(v)
            pending -= 1
            if pending == 0:
                break
            confl = reason[v]
        learnt[0] = -p
        if len(learnt) == 1:
            return learnt, 0
        best = max(range(1, len(learnt)), key=lambda k: level[abs(learnt[k])])
        learnt[1], learnt[best] = learnt[best], learnt[1]
        return learnt, level[abs(learnt[1])]

    def _backtrack(self, lvl: int) -> None:
        if len(self.limits) <= lvl:
            return
        start = self.limits[lvl]
        for lit in self.trail[start:]:
            v = lit if lit > 0 else -lit
            self.phase[v] = lit > 0
            self.val[v] = 0
            self.reason[v] = None
        del self.trail[start:]
        del self.limits[lvl:]
        self.qhead = len(self.trail)

    def _pick(self) -> int:
        best, best_act = 0, -1.0
        val, act = self.val, self.activity
        for v in range(1, self.n + 1):
            if val[v] == 0 and act[v] > best_act:
                best, best_act = v, act[v]
        return best

    def solve(self) -> Optional[list[bool]]:
        """A model as ``model[v]`` for v in 1..n (index 0 unused), or None."""
        if not self.ok or self._propagate() is not None:
            self.ok = False
            return None
        restart = 1
        budget = luby(restart) * self.restart_base
        while True:
            confl = self._propagate()
            if confl is not None:
                self.conflicts += 1
                if not self.limits:
                    self.ok = False
                    return None
                learnt, back = self._analyze(confl)
                self._backtrack(back)
                if len(learnt) == 1:
                    self._assign(learnt[0], None)
                else:
                    self.watches[_code(learnt[0])].append(learnt)
                    self.watches[_code(learnt[1])].append(learnt)
                    self._assign(learnt[0], learnt)
                self.inc /= self.decay
                budget -= 1
                if budget <= 0:
                    restart += 1
                    budget = luby(restart) * self.restart_base
                    self._backtrack(0)
                continue
            v = self._pick()
            if v == 0:
                return [False] + [x == 1 for x in self.val[1:]]
            self.limits.append(len(self.trail))
            self._assign(v if self.phase[v] else -v, None)


def solve_clauses(nvars: int, clauses: Iterable[Iterable[int]]) -> Optional[list[bool]]:
    return Solver(nvars, clauses).solve()
