"""SAT backends and formula-level solving with unit preprocessing."""

from __future__ import annotations

import os
import shlex
import subprocess
import tempfile
from dataclasses import dataclass, field
from typing import Optional, Protocol

from .cnf import Cnf
from .logic import FALSE, TRUE, Formula, Not, Var, conjuncts, substitute
from .solver import Solver


class BackendError(RuntimeError):
    pass


class SatBackend(Protocol):
    name: str

    def solve_cnf(self, cnf: Cnf) -> Optional[list[bool]]:
        """Model indexed by DIMACS variable (index 0 unused), or None if UNSAT."""


class CdclBackend:
    name = "cdcl"

    def solve_cnf(self, cnf: Cnf) -> Optional[list[bool]]:
        return Solver(cnf.nvars, cnf.clauses).solve()


class DimacsCommandBackend:
    """Runs an external solver that reads DIMACS and prints ``s``/``v`` lines.

    ``command`` is a shell-style string; ``{}`` is replaced by the CNF path,
    or the path is appended when there is no placeholder.
    """

    name = "dimacs-command"

    def __init__(self, command: str, timeout: float = 60.0):
        self.command = command
        self.timeout = timeout

    def solve_cnf(self, cnf: Cnf) -> Optional[list[bool]]:
        fd, path = tempfile.mkstemp(suffix=".cnf")
        try:
            with os.fdopen(fd, "w") as fh:
                fh.write(cnf.to_dimacs())
            argv = shlex.split(self.command)
            argv = [a.replace("{}", path) for a in argv] if "{}" in self.command else argv + [path]
            try:
                proc = subprocess.run(argv, capture_output=True, text=True, timeout=self.timeout)
            except (OSError, subprocess.TimeoutExpired) as exc:
                raise BackendError(f"external solver failed: {exc}") from exc
        finally:
            os.unlink(path)
        return parse_solver_output(proc.stdout, cnf.nvars)


def parse_solver_output(text: str, nvars: int) -> Optional[list[bool]]:
    status = None
    model = [False] * (nvars + 1)
    for line in text.splitlines():
        if line.startswith("s "):
            status = line[2:].strip()
        elif line.startswith("v "):
            for tok in line[2:].split():
                lit = int(tok)
                if lit and abs(lit) <= nvars:
                    model[abs(lit)] = lit > 0
    if status == "UNSATISFIABLE":
        return None
    if status == "SATISFIABLE":
        return model
    raise BackendError(f"external solver gave no verdict (status {status!r})")


@dataclass
class Reduced:
    """A formula split into forced unit assignments and a residual."""

    fixed: dict = field(default_factory=dict)
    residual: Formula = TRUE

    @property
    def unsat(self) -> bool:
        return self.residual == FALSE


def reduce_units(f: Formula, fixed: Optional[dict] = None) -> Reduced:
    """Propagate top-level unit conjuncts to a fixpoint."""
    fixed = dict(fixed or {})
    if fixed:
        f = substitute(f, fixed)
    while True:
        units = {}
        for c in conjuncts(f):
            if isinstance(c, Var):
                key, value = c.key, True
            elif isinstance(c, Not) and isinstance(c.arg, Var):
                key, value = c.arg.key, False
            else:
                continue
            if units.get(key, value) != value:
                return Reduced(fixed, FALSE)
            units[key] = value
        if not units:
            return Reduced(fixed, f)
        fixed.update(units)
        f = substitute(f, units)
        if f == FALSE:
            return Reduced(fixed, FALSE)


@dataclass
class SatResult:
    sat: bool
    model: dict = field(default_factory=dict)  # variable key -> bool
    cnf: Optional[Cnf] = None


def solve_formula(f: Formula, backend: Optional[SatBackend] = None,
                  keep_cnf: bool = False) -> SatResult:
    """Decide a pure boolean formula; the model covers every variable of ``f``."""
    backend = backend or CdclBackend()
    red = reduce_units(f)
    if red.unsat:
        return SatResult(False, cnf=Cnf() if keep_cnf else None)
    if red.residual == TRUE and not keep_cnf:
        return SatResult(True, dict(red.fixed))
    cnf = Cnf()
    cnf.assert_formula(red.residual)
    return finish(cnf, red.fixed, backend, keep_cnf)


def finish(cnf: Cnf, fixed: dict, backend: SatBackend, keep_cnf: bool = False) -> SatResult:
    model = backend.solve_cnf(cnf)
    if model is None:
        return SatResult(False, cnf=cnf if keep_cnf else None)
    out = dict(fixed)
    for v, key in enumerate(cnf.keys):
        if key is not None:
            out[key] = model[v]
    return SatResult(True, out, cnf if keep_cnf else None)
