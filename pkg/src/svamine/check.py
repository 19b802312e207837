"""Checking candidate properties against timing diagrams.

A property holds on a diagram when the diagram's encoding together with
the negated property encoding is unsatisfiable.  Filtering chains the
diagrams: the survivors of one diagram are the candidates for the next, so
the result is the set of candidates that hold on every diagram.
"""

from __future__ import annotations

import enum
import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

from .backend import BackendError, CdclBackend, SatBackend, finish, reduce_units
from .cnf import Cnf
from .diagram import TimingDiagram, all_x, encode_diagram
from .domains import DomainPlan, plan_for, word_atoms
from .encode import localize, obligations
from .logic import FALSE, TRUE, conj, disj, neg, substitute
from .props import Implic, Node, signal_names, temporal_depth
from .render import render_sva
from .signals import SignalInventory

log = logging.getLogger(__name__)


class CheckError(RuntimeError):
    """Backend failure on a particular (property, diagram) pair."""


class Verdict(enum.Enum):
    HOLDS = "holds"
    VIOLATED = "violated"
    VACUOUS_SKIP = "vacuous-skip"


@dataclass
class DiagramVerdict:
    diagram: str
    verdict: Verdict
    witness: Optional[dict] = None  # signal -> per-cycle values


@dataclass
class CheckOutcome:
    index: int
    prop: Node
    status: str  # verified | violated | tautology | vacuous
    verdicts: list = field(default_factory=list)
    violated_by: Optional[str] = None

    @property
    def witness(self) -> Optional[dict]:
        for v in self.verdicts:
            if v.verdict is Verdict.VIOLATED:
                return v.witness
        return None


class _Context:
    """Per-diagram encodings, reused across every property checked on it."""

    def __init__(self, td: TimingDiagram):
        self.td = td
        self.inv = td.inventory
        self.phi = encode_diagram(td)
        self.atoms = word_atoms(self.phi)
        self.words = tuple(n for n in td.names if self.inv[n].is_word)
        self.plans: dict = {}
        self.bases: dict = {}

    def plan(self, *formulas) -> DomainPlan:
        atoms = list(self.atoms)
        for f in formulas:
            atoms.extend(word_atoms(f))
        return plan_for(self.inv, self.td.length, self.words, atoms, self.plans)

    def base(self, plan: DomainPlan):
        hit = self.bases.get(id(plan))
        if hit is None:
            red = reduce_units(conj(plan.lower(self.phi), plan.constraints()))
            cnf = Cnf()
            if not red.unsat:
                cnf.assert_formula(red.residual)
            hit = self.bases[id(plan)] = (red, cnf, plan)
        return hit[0], hit[1]

    def witness(self, model: dict, plan: DomainPlan) -> dict:
        out = {}
        td = self.td
        codes: dict = {}
        for name in td.names:
            if self.inv[name].is_word:
                seq = [plan.word_value(name, c, model) for c in range(td.length)]
                codes.setdefault(id(plan[name]), (plan[name], set()))[1].update(seq)
                out[name] = seq
            else:
                out[name] = [int(bool(model.get((name, c), False))) for c in range(td.length)]
        decoders = {k: dom.decode(cs) for k, (dom, cs) in codes.items()}
        for name in self.words:
            table = decoders[id(plan[name])]
            out[name] = [table[c] for c in out[name]]
        return out


class Checker:
    """Decides (property, diagram) pairs, caching per-diagram work."""

    def __init__(self, backend: Optional[SatBackend] = None, dump_dir=None):
        self.backend = backend or CdclBackend()
        self.dump_dir = Path(dump_dir) if dump_dir else None
        self._contexts: dict = {}
        self._all_x: dict = {}

    def all_x_for(self, prop: Node, inv: SignalInventory, depth_margin: int) -> TimingDiagram:
        key = (id(inv), tuple(signal_names(prop)), temporal_depth(prop), depth_margin)
        hit = self._all_x.get(key)
        if hit is None or hit[0] is not inv:
            hit = self._all_x[key] = (inv, tautology_diagram(prop, inv, depth_margin))
        return hit[1]

    def context(self, td: TimingDiagram) -> _Context:
        hit = self._contexts.get(id(td))
        if hit is None or hit[0] is not td:
            hit = self._contexts[id(td)] = (td, _Context(td))
        return hit[1]

    def _solve(self, ctx: _Context, plan: DomainPlan, goal, tag: Optional[str]):
        """Model of phi_td AND goal (goal already lowered), or None."""
        red, base = ctx.base(plan)
        goal = FALSE if red.unsat else substitute(goal, red.fixed)
        dumping = self.dump_dir is not None and tag is not None
        if goal == FALSE and not dumping:
            return None
        cnf = base.copy()
        cnf.assert_formula(goal)
        if dumping:
            self.dump_dir.mkdir(parents=True, exist_ok=True)
            stem = self.dump_dir / tag
            stem.with_suffix(".cnf").write_text(cnf.to_dimacs())
            stem.with_suffix(".map.json").write_text(cnf.name_map_json())
            if goal == FALSE:
                return None
        try:
            res = finish(cnf, red.fixed, self.backend)
        except BackendError as exc:
            raise CheckError(f"{tag or 'check'} on diagram {ctx.td.name!r}: {exc}") from exc
        return res.model if res.sat else None

    def check(self, prop: Node, td: TimingDiagram, tag: Optional[str] = None) -> DiagramVerdict:
        ctx = self.context(td)
        parts = [f for _, f in obligations(prop, td)]
        if not parts:
            # the diagram is too short for any obligation; nothing to refute
            return DiagramVerdict(td.name, Verdict.VACUOUS_SKIP)
        phi_p = conj(*parts)
        if phi_p == TRUE and self.dump_dir is None:
            return DiagramVerdict(td.name, Verdict.HOLDS)
        plan = ctx.plan(phi_p)
        model = self._solve(ctx, plan, neg(plan.lower(phi_p)), tag)
        if model is None:
            return DiagramVerdict(td.name, Verdict.HOLDS)
        return DiagramVerdict(td.name, Verdict.VIOLATED, ctx.witness(model, plan))

    def antecedent_satisfiable(self, prop: Implic, td: TimingDiagram) -> bool:
        """Some completion of ``td`` satisfies the antecedent at some cycle."""
        ctx = self.context(td)
        locs = [localize(prop.ante, c, td) for c in range(td.length)]
        locs = [f for f in locs if f is not None]
        if not locs:
            return False
        goal = disj(*locs)
        plan = ctx.plan(goal)
        return self._solve(ctx, plan, plan.lower(goal), None) is not None


def check_on_diagram(prop: Node, td: TimingDiagram,
                     backend: Optional[SatBackend] = None) -> DiagramVerdict:
    return Checker(backend).check(prop, td)


def tautology_diagram(prop: Node, inv: SignalInventory, depth_margin: int = 2) -> TimingDiagram:
    """All-X diagram over the property's signals, one span plus a margin long."""
    length = temporal_depth(prop) + depth_margin
    return all_x(inv, max(1, length), name=f"all-X[{length}]", signals=signal_names(prop))


def is_tautology(prop: Node, inv: SignalInventory, depth_margin: int = 2,
                 checker: Optional[Checker] = None) -> bool:
    checker = checker or Checker()
    td = checker.all_x_for(prop, inv, depth_margin)
    return checker.check(prop, td).verdict is not Verdict.VIOLATED


def remove_tautologies(cands: Sequence[Node], inv: SignalInventory, depth_margin: int = 2,
                       checker: Optional[Checker] = None) -> list[Node]:
    """Drop candidates that hold on an unconstrained diagram."""
    checker = checker or Checker()
    return [p for p in cands if not is_tautology(p, inv, depth_margin, checker)]


def is_vacuous(prop: Node, diagrams: Sequence[TimingDiagram],
               checker: Optional[Checker] = None) -> bool:
    if not isinstance(prop, Implic):
        return False
    checker = checker or Checker()
    return not any(checker.antecedent_satisfiable(prop, td) for td in diagrams)


def remove_vacuous(cands: Sequence[Node], diagrams: Sequence[TimingDiagram],
                   checker: Optional[Checker] = None) -> list[Node]:
    """Drop implications whose antecedent no diagram completion ever satisfies."""
    checker = checker or Checker()
    return [p for p in cands if not is_vacuous(p, diagrams, checker)]


# ---------------------------------------------------------------------------
# Chained filtering, optionally across worker processes

_worker: dict = {}


def _init_worker(cands, diagrams, backend, dump_dir):
    _worker.update(cands=cands, diagrams=diagrams, checker=Checker(backend, dump_dir))


def _check_chunk(d_index: int, indices: list[int]) -> list[tuple[int, DiagramVerdict]]:
    cands, td, checker = _worker["cands"], _worker["diagrams"][d_index], _worker["checker"]
    return [(i, checker.check(cands[i], td, _tag(i, d_index, td))) for i in indices]


def _tag(i: int, d_index: int, td: TimingDiagram) -> str:
    return f"p{i:05d}_d{d_index:02d}_{td.name}"


@dataclass
class FilterResult:
    verified: list  # properties holding on every diagram, in input order
    outcomes: list  # CheckOutcome per input property

    @property
    def verified_indices(self) -> list[int]:
        return [o.index for o in self.outcomes if o.status == "verified"]


def filter_candidates(cands: Sequence[Node], diagrams: Sequence[TimingDiagram], jobs: int = 1,
                      backend: Optional[SatBackend] = None, dump_dir=None,
                      chunk_size: int = 256) -> FilterResult:
    """Keep the candidates that hold on every diagram.

    Diagrams are processed in order and only survivors move on; an outcome
    records the first diagram that rejected a candidate and its witness.
    The verified set does not depend on ``jobs`` or on candidate order.
    """
    if not diagrams:
        raise ValueError("at least one timing diagram is required")
    cands = list(cands)
    outcomes = [CheckOutcome(i, p, "verified") for i, p in enumerate(cands)]
    alive = list(range(len(cands)))
    jobs = max(1, jobs or 1)
    pool = None
    try:
        if jobs > 1 and len(cands) > chunk_size:
            pool = ProcessPoolExecutor(jobs, initializer=_init_worker,
                                       initargs=(cands, list(diagrams), backend, dump_dir))
        else:
            _init_worker(cands, list(diagrams), backend, dump_dir)
        for d_index, td in enumerate(diagrams):
            chunks = [alive[k:k + chunk_size] for k in range(0, len(alive), chunk_size)]
            if pool is not None:
                results = pool.map(_check_chunk, [d_index] * len(chunks), chunks)
            else:
                results = (_check_chunk(d_index, c) for c in chunks)
            survivors = []
            for chunk in results:
                for i, verdict in chunk:
                    outcomes[i].verdicts.append(verdict)
                    if verdict.verdict is not Verdict.VIOLATED:
                        survivors.append(i)
                    else:
                        outcomes[i].status = "violated"
                        outcomes[i].violated_by = td.name
            alive = survivors
            log.info("diagram %s: %d of %d candidates remain", td.name, len(alive), len(cands))
    finally:
        if pool is not None:
            pool.shutdown()
        _worker.clear()
    verified = [cands[i] for i in alive]
    return FilterResult(verified, outcomes)


def default_jobs() -> int:
    return max(1, os.cpu_count() or 1)


def describe(outcome: CheckOutcome) -> str:
    text = render_sva(outcome.prop)
    if outcome.status == "violated":
        return f"{text}  -- violated on {outcome.violated_by}"
    return f"{text}  -- {outcome.status}"
