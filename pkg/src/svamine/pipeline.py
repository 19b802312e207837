"""End-to-end run: grammar to templates to candidates to checked and extracted sets."""

from __future__ import annotations

import hashlib
import json
import logging
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from . import __version__
from .check import Checker, filter_candidates, is_tautology, is_vacuous
from .diagram import DiagramError, load_diagram
from .encode import MissingSignalError
from .grammar import DEFAULT_CAP, GrammarError, enumerate_derivations, load_grammar
from .instantiate import generate_with_origin
from .llm import HttpChatClient, LlmClient, LlmError, MockLlmClient, filter_properties
from .render import render_nl, render_sva
from .serialize import dump_properties, write_text
from .signals import SignalsError, load_signals

log = logging.getLogger(__name__)

SCHEMA_VERSION = 1

EXIT_OK = 0
EXIT_UNEXPECTED = 1
EXIT_USAGE = 2
EXIT_INPUT = 3
EXIT_CHECK = 4
EXIT_LLM = 5


class StageError(RuntimeError):
    def __init__(self, stage: str, message: str, code: int):
        super().__init__(f"{stage}: {message}")
        self.stage = stage
        self.code = code


@dataclass
class RunConfig:
    grammar: str
    signals: str
    diagrams: list
    out: str
    text: Optional[str] = None
    jobs: int = 1
    llm_endpoint: Optional[str] = None
    llm_model: Optional[str] = None
    llm_runs: int = 3
    llm_params: dict = field(default_factory=dict)
    mock_fixtures: Optional[str] = None
    mock_seed: Optional[int] = None
    max_templates: int = DEFAULT_CAP
    tautology_margin: int = 2
    dump_cnf: bool = False
    block_size: int = 100
    token_budget: Optional[int] = None
    max_in_flight: int = 4
    clock: str = "clk"

    def validate(self) -> None:
        if not self.diagrams:
            raise StageError("config", "at least one diagram is required", EXIT_USAGE)
        if self.llm_runs < 1:
            raise StageError("config", "--llm-runs must be at least 1", EXIT_USAGE)
        paths = [self.grammar, self.signals, *self.diagrams]
        paths += [p for p in (self.text, self.mock_fixtures) if p]
        for p in paths:
            if not Path(p).is_file():
                raise StageError("config", f"no such file: {p}", EXIT_INPUT)
        if self.text and not (self.mock_fixtures or self.mock_seed is not None
                              or self.llm_endpoint):
            raise StageError("config", "a description needs --llm-endpoint or --mock-fixtures",
                             EXIT_USAGE)
        if self.llm_endpoint and not self.llm_model:
            raise StageError("config", "--llm-endpoint needs --llm-model", EXIT_USAGE)


@dataclass
class CheckReport:
    counts: dict
    properties: list
    llm: Optional[dict]
    config: dict
    fingerprint: dict
    timings: dict = field(default_factory=dict)
    status: str = "ok"
    error: Optional[dict] = None

    def to_json(self) -> str:
        doc = {
            "schema_version": SCHEMA_VERSION,
            "tool": {"name": "svamine", "version": __version__},
            "status": self.status,
            "error": self.error,
            "config": self.config,
            "inputs": self.fingerprint,
            "counts": self.counts,
            "llm": self.llm,
            "properties": self.properties,
        }
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def _digest(path: str) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def make_client(cfg: RunConfig) -> LlmClient:
    if cfg.mock_fixtures or cfg.mock_seed is not None:
        if cfg.mock_fixtures:
            return MockLlmClient.from_file(cfg.mock_fixtures, seed=cfg.mock_seed)
        return MockLlmClient({}, seed=cfg.mock_seed)
    return HttpChatClient(cfg.llm_endpoint, cfg.llm_model, params=cfg.llm_params)


def run_pipeline(cfg: RunConfig, client: Optional[LlmClient] = None) -> CheckReport:
    """Run every stage, writing artifacts to ``cfg.out`` as they become available.

    Raises :class:`StageError` on failure after writing a report that
    records the failing stage.
    """
    cfg.validate()
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    timings: dict = {}
    counts = {k: None for k in ("templates", "candidates", "after_tautology", "after_vacuity",
                                "checked", "extracted", "final")}
    config = {
        "grammar": cfg.grammar, "signals": cfg.signals, "diagrams": list(cfg.diagrams),
        "text": cfg.text, "llm_endpoint": cfg.llm_endpoint, "llm_model": cfg.llm_model,
        "llm_runs": cfg.llm_runs, "llm_params": cfg.llm_params,
        "mock_fixtures": cfg.mock_fixtures, "mock_seed": cfg.mock_seed,
        "max_templates": cfg.max_templates, "tautology_margin": cfg.tautology_margin,
        "block_size": cfg.block_size, "token_budget": cfg.token_budget, "clock": cfg.clock,
    }
    inputs = [cfg.grammar, cfg.signals, *cfg.diagrams] + ([cfg.text] if cfg.text else [])
    fingerprint = {p: _digest(p) for p in inputs}
    entries: list = []
    report = CheckReport(counts, entries, None, config, fingerprint, timings)

    starts: dict = {}

    def stage(name):
        starts[name] = time.perf_counter()

    def done(name):
        timings[name] = round(time.perf_counter() - starts[name], 6)

    current = "inputs"
    try:
        stage(current)
        try:
            grammar = load_grammar(cfg.grammar)
            inv = load_signals(cfg.signals)
            diagrams = [load_diagram(p, inv) for p in cfg.diagrams]
            description = Path(cfg.text).read_text(encoding="utf-8") if cfg.text else None
        except (GrammarError, SignalsError, DiagramError, OSError, UnicodeDecodeError) as exc:
            raise StageError(current, str(exc), EXIT_INPUT) from exc
        names = [td.name for td in diagrams]
        if len(set(names)) != len(names):
            raise StageError(current, f"diagram names are not unique: {names}", EXIT_INPUT)
        done(current)

        current = "templates"
        stage(current)
        try:
            templates = enumerate_derivations(grammar, cfg.max_templates)
        except GrammarError as exc:
            raise StageError(current, str(exc), EXIT_INPUT) from exc
        counts["templates"] = len(templates)
        write_text(out / "templates.txt",
                   "".join(render_sva(t.node, template=True) + "\n" for t in templates))
        done(current)

        current = "generate"
        stage(current)
        cands = generate_with_origin([t.node for t in templates], inv)
        counts["candidates"] = len(cands)
        for i, c in enumerate(cands):
            t = templates[c.template]
            entries.append({
                "id": i,
                "sva": render_sva(c.node),
                "nl": render_nl(c.node),
                "template": c.template,
                "template_sva": render_sva(t.node, template=True),
                "derivation": [{"rule": nt, "alternative": alt} for nt, alt in t.derivation],
                "status": None,
                "selected": None,
            })
        done(current)

        current = "check"
        stage(current)
        checker = Checker()
        try:
            pool = []
            for i, c in enumerate(cands):
                if is_tautology(c.node, inv, cfg.tautology_margin, checker):
                    entries[i]["status"] = "tautology"
                else:
                    pool.append(i)
            counts["after_tautology"] = len(pool)
            kept = []
            for i in pool:
                if is_vacuous(cands[i].node, diagrams, checker):
                    entries[i]["status"] = "vacuous"
                else:
                    kept.append(i)
            counts["after_vacuity"] = len(kept)
            result = filter_candidates([cands[i].node for i in kept], diagrams, jobs=cfg.jobs,
                                       dump_dir=(out / "cnf") if cfg.dump_cnf else None)
        except (MissingSignalError, RuntimeError) as exc:
            raise StageError(current, str(exc), EXIT_CHECK) from exc
        checked = []
        for i, outcome in zip(kept, result.outcomes):
            e = entries[i]
            e["status"] = outcome.status
            e["checked_against"] = [v.diagram for v in outcome.verdicts]
            if outcome.status == "violated":
                e["violated_by"] = outcome.violated_by
                e["witness"] = outcome.witness
            else:
                checked.append(i)
        counts["checked"] = len(checked)
        checked_nodes = [cands[i].node for i in checked]
        write_text(out / "checked.json",
                   dump_properties(checked_nodes, [{"id": i} for i in checked]))
        write_text(out / "checked.sva", "".join(render_sva(n) + "\n" for n in checked_nodes))
        done(current)

        final = checked
        if description is None:
            report.llm = {"status": "skipped"}
        else:
            current = "llm"
            stage(current)
            if not checked:
                report.llm = {"status": "skipped", "reason": "checked set is empty"}
                counts["extracted"] = 0
                final = []
            else:
                try:
                    ext = filter_properties(
                        checked_nodes, description, client or make_client(cfg),
                        runs=cfg.llm_runs, block_size=cfg.block_size,
                        token_budget=cfg.token_budget, max_in_flight=cfg.max_in_flight,
                        params=cfg.llm_params)
                except LlmError as exc:
                    raise StageError(current, str(exc), EXIT_LLM) from exc
                write_text(out / "transcripts" / "llm.json",
                           json.dumps(ext.transcripts, indent=2, sort_keys=True) + "\n")
                final = [checked[n - 1] for n in ext.union]
                chosen = set(final)
                for n, i in enumerate(checked, 1):
                    entries[i]["selected"] = i in chosen
                    entries[i]["selected_in_runs"] = [r for r, s in enumerate(ext.runs) if n in s]
                counts["extracted"] = len(final)
                report.llm = {
                    "status": "done",
                    "runs": ext.runs,
                    "union": ext.union,
                    "hallucinations": ext.hallucinations,
                    "failed_runs": ext.failed_runs,
                    "params": ext.params,
                }
            done(current)
        counts["final"] = len(final)
        final_nodes = [cands[i].node for i in final]
        write_text(out / "properties.sva", "".join(
            render_sva(n, wrap=cfg.clock) + "\n" for n in final_nodes))
        write_text(out / "properties.txt", "".join(render_nl(n) + "\n" for n in final_nodes))
        write_text(out / "properties.json", dump_properties(
            final_nodes, [{"id": i} for i in final]))
    except StageError as exc:
        report.status = "error"
        report.error = {"stage": exc.stage, "message": str(exc)}
        raise
    finally:
        write_text(out / "report.json", report.to_json())
        write_text(out / "timings.json", json.dumps(
            {"jobs": cfg.jobs, "seconds": timings}, indent=2, sort_keys=True) + "\n")
    return report

