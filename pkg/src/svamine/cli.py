"""Command-line interface.

``svamine run`` executes the whole flow; the other subcommands run one
stage each on files, which helps when refining a grammar.

Exit codes: 0 success, 1 unexpected failure, 2 usage error, 3 input parse
error, 4 check-stage failure, 5 LLM-stage failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import __version__
from .check import CheckError, Checker, filter_candidates, remove_tautologies, remove_vacuous
from .diagram import DiagramError, load_diagram
from .encode import MissingSignalError
from .grammar import DEFAULT_CAP, GrammarError, enumerate_derivations, load_grammar
from .instantiate import generate_with_origin
from .llm import LlmError, filter_properties
from .pipeline import (EXIT_CHECK, EXIT_INPUT, EXIT_LLM, EXIT_UNEXPECTED, EXIT_USAGE, RunConfig,
                       StageError, make_client, run_pipeline)
from .props import PropertyError
from .render import render_nl, render_sva
from .serialize import SerializeError, dump_properties, load_properties_json, write_text
from .signals import SignalsError, load_signals
from .sva_parser import SvaSyntaxError, parse_sva

log = logging.getLogger("svamine")

INPUT_ERRORS = (GrammarError, SignalsError, DiagramError, SerializeError, SvaSyntaxError,
                PropertyError, OSError, UnicodeDecodeError)


class UsageError(Exception):
    pass


def read_properties(path: str, inv=None) -> list:
    """Properties from our JSON format or from SVA text, one per line."""
    text = Path(path).read_text(encoding="utf-8")
    if text.lstrip().startswith("{"):
        return load_properties_json(text)[0]
    props = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith(("//", "#")):
            continue
        try:
            props.append(parse_sva(line, inv))
        except SvaSyntaxError as exc:
            raise SvaSyntaxError(f"{path}:{lineno}: {exc}", exc.position) from None
    return props


def format_properties(props: Sequence, fmt: str, template: bool = False) -> str:
    if fmt == "json":
        return dump_properties(props)
    if fmt == "nl":
        return "".join(render_nl(p) + "\n" for p in props)
    return "".join(render_sva(p, template=template) + "\n" for p in props)


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        write_text(out, text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------


def cmd_run(args) -> int:
    if not args.grammar or not args.signals or not args.diagrams or not args.out:
        raise UsageError("run needs --grammar, --signals, --diagrams and --out")
    cfg = RunConfig(
        grammar=args.grammar, signals=args.signals, diagrams=args.diagrams, out=args.out,
        text=args.text, jobs=args.jobs, llm_endpoint=args.llm_endpoint,
        llm_model=args.llm_model, llm_runs=args.llm_runs, mock_fixtures=args.mock_fixtures,
        mock_seed=args.mock_seed, max_templates=args.max_templates,
        tautology_margin=args.tautology_margin, dump_cnf=bool(args.dump_cnf),
        block_size=args.block_size, token_budget=args.token_budget, clock=args.clock)
    report = run_pipeline(cfg)
    c = report.counts
    print(f"templates {c['templates']}, candidates {c['candidates']}, "
          f"after tautology {c['after_tautology']}, after vacuity {c['after_vacuity']}, "
          f"checked {c['checked']}, extracted {c['extracted']}, final {c['final']}")
    print(f"outputs written to {args.out}")
    return 0


def cmd_templates(args) -> int:
    _need(args, "grammar")
    templates = enumerate_derivations(load_grammar(args.grammar), args.max_templates)
    _emit(format_properties([t.node for t in templates], args.format or "sva", template=True),
          args.out)
    return 0


def cmd_generate(args) -> int:
    _need(args, "grammar", "signals")
    inv = load_signals(args.signals)
    templates = enumerate_derivations(load_grammar(args.grammar), args.max_templates)
    cands = generate_with_origin([t.node for t in templates], inv)
    fmt = args.format or "json"
    if fmt == "json":
        extra = [{"template": c.template} for c in cands]
        _emit(dump_properties([c.node for c in cands], extra), args.out)
    else:
        _emit(format_properties([c.node for c in cands], fmt), args.out)
    return 0


def cmd_check(args) -> int:
    _need(args, "properties", "signals", "diagrams")
    inv = load_signals(args.signals)
    props = read_properties(args.properties, inv)
    diagrams = [load_diagram(p, inv) for p in args.diagrams]
    checker = Checker()
    if not args.no_prepass:
        props = remove_tautologies(props, inv, args.tautology_margin, checker)
        props = remove_vacuous(props, diagrams, checker)
    dump = args.dump_cnf if args.dump_cnf else None
    result = filter_candidates(props, diagrams, jobs=args.jobs, dump_dir=dump)
    for o in result.outcomes:
        if o.status == "violated":
            log.info("rejected %s on %s, witness %s", render_sva(o.prop), o.violated_by,
                     json.dumps(o.witness, sort_keys=True))
    _emit(format_properties(result.verified, args.format or "json"), args.out)
    return 0


def cmd_filter(args) -> int:
    _need(args, "properties", "text")
    inv = load_signals(args.signals) if args.signals else None
    props = read_properties(args.properties, inv)
    description = Path(args.text).read_text(encoding="utf-8")
    if not (args.mock_fixtures or args.mock_seed is not None or args.llm_endpoint):
        raise UsageError("filter needs --llm-endpoint or --mock-fixtures")
    if args.llm_endpoint and not args.llm_model:
        raise UsageError("--llm-endpoint needs --llm-model")
    cfg = RunConfig(grammar="", signals="", diagrams=[], out="",
                    llm_endpoint=args.llm_endpoint, llm_model=args.llm_model,
                    mock_fixtures=args.mock_fixtures, mock_seed=args.mock_seed)
    ext = filter_properties(props, description, make_client(cfg), runs=args.llm_runs,
                            block_size=args.block_size, token_budget=args.token_budget)
    for h in ext.hallucinations:
        log.warning("dropped hallucinated selection %r (run %d)", h["item"], h["run"])
    if args.transcripts:
        write_text(args.transcripts, json.dumps(ext.transcripts, indent=2, sort_keys=True) + "\n")
    _emit(format_properties(ext.selected(props), args.format or "json"), args.out)
    return 0


def cmd_render(args) -> int:
    _need(args, "properties")
    inv = load_signals(args.signals) if args.signals else None
    props = read_properties(args.properties, inv)
    _emit(format_properties(props, args.format or "sva"), args.out)
    return 0


def _need(args, *names) -> None:
    missing = [f"--{n.replace('_', '-')}" for n in names if not getattr(args, n)]
    if missing:
        raise UsageError(f"{args.command} needs {', '.join(missing)}")


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--grammar", help="template grammar file")
    common.add_argument("--signals", help="signal declaration file")
    common.add_argument("--diagrams", nargs="+", action="extend", metavar="FILE",
                        help="timing diagram files (repeatable)")
    common.add_argument("--properties", help="property file (JSON or one SVA per line)")
    common.add_argument("--text", help="natural-language description file")
    common.add_argument("--out", help="output directory (run) or file (other commands)")
    common.add_argument("--jobs", type=int, default=1, help="worker processes for checking")
    common.add_argument("--llm-endpoint", help="chat-completion URL")
    common.add_argument("--llm-model", help="model name sent to the endpoint")
    common.add_argument("--llm-runs", type=int, default=3, help="repeated prompts to union")
    common.add_argument("--mock-fixtures", help="JSON fixtures for the scripted LLM client")
    common.add_argument("--mock-seed", type=int, help="seed for made-up mock replies")
    common.add_argument("--max-templates", type=int, default=DEFAULT_CAP,
                        help="refuse grammars with more sentences than this")
    common.add_argument("--tautology-margin", type=int, default=2,
                        help="extra all-X cycles beyond a property's span")
    common.add_argument("--block-size", type=int, default=100,
                        help="properties per LLM prompt")
    common.add_argument("--token-budget", type=int, help="approximate prompt token limit")
    common.add_argument("--format", choices=("sva", "nl", "json"), help="listing format")
    common.add_argument("--clock", default="clk", help="clock used in emitted assertions")
    common.add_argument("-v", "--verbose", action="count", default=0)

    parser = argparse.ArgumentParser(prog="svamine", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=f"svamine {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("run", parents=[common], help="full flow")
    p.add_argument("--dump-cnf", action="store_true", help="write DIMACS per check under OUT/cnf")
    sub.add_parser("templates", parents=[common], help="list grammar templates")
    sub.add_parser("generate", parents=[common], help="instantiate templates")
    p = sub.add_parser("check", parents=[common], help="check properties on diagrams")
    p.add_argument("--dump-cnf", nargs="?", const="cnf", metavar="DIR",
                   help="write DIMACS per check (default directory: cnf)")
    p.add_argument("--no-prepass", action="store_true",
                   help="skip tautology and vacuity removal")
    p = sub.add_parser("filter", parents=[common], help="LLM selection against a description")
    p.add_argument("--transcripts", help="write prompts and replies to this JSON file")
    sub.add_parser("render", parents=[common], help="print properties as SVA, English or JSON")
    return parser


COMMANDS = {"run": cmd_run, "templates": cmd_templates, "generate": cmd_generate,
            "check": cmd_check, "filter": cmd_filter, "render": cmd_render}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    level = logging.WARNING - 10 * min(args.verbose, 2)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"svamine: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except StageError as exc:
        print(f"svamine: error in stage {exc}", file=sys.stderr)
        return exc.code
    except INPUT_ERRORS as exc:
        print(f"svamine: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (CheckError, MissingSignalError) as exc:
        print(f"svamine: check error: {exc}", file=sys.stderr)
        return EXIT_CHECK
    except LlmError as exc:
        print(f"svamine: LLM error: {exc}", file=sys.stderr)
        return EXIT_LLM
    except Exception as exc:  # pragma: no cover - last resort
        log.exception("unexpected failure")
        print(f"svamine: unexpected error: {exc}", file=sys.stderr)
        return EXIT_UNEXPECTED
