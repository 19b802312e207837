"""Mining SystemVerilog assertions from grammars, timing diagrams and prose."""

__version__ = "0.1.0"

from .check import (CheckOutcome, Checker, DiagramVerdict, FilterResult, Verdict,  # noqa: E402
                    check_on_diagram, filter_candidates, remove_tautologies, remove_vacuous)
from .diagram import TimingDiagram, encode_diagram, load_diagram, parse_diagram  # noqa: E402
from .encode import encode_property, localize  # noqa: E402
from .grammar import enumerate_templates, load_grammar, parse_grammar  # noqa: E402
from .instantiate import generate_candidates  # noqa: E402
from .llm import (ExtractionResult, HttpChatClient, MockLlmClient, build_prompt,  # noqa: E402
                  filter_properties, parse_response)
from .render import render_nl, render_sva  # noqa: E402
from .signals import SignalInventory, load_signals, parse_signals  # noqa: E402
from .sva_parser import parse_sva  # noqa: E402

__all__ = [
    "CheckOutcome", "Checker", "DiagramVerdict", "ExtractionResult", "FilterResult",
    "HttpChatClient", "MockLlmClient", "SignalInventory", "TimingDiagram", "Verdict",
    "build_prompt", "check_on_diagram", "encode_diagram", "encode_property",
    "enumerate_templates", "filter_candidates", "filter_properties", "generate_candidates",
    "load_diagram", "load_grammar", "load_signals", "localize", "parse_diagram",
    "parse_grammar", "parse_response", "parse_signals", "parse_sva", "remove_tautologies",
    "remove_vacuous", "render_nl", "render_sva",
]
