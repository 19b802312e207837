"""Mine the stability rule of a VALID/READY handshake, one stage at a time.

Run from the repository root::

    python3 demos/handshake_walkthrough.py

The LLM stage replays demos/data/handshake_mock.json, so no model endpoint
is needed.
"""

import logging
from pathlib import Path

from svamine import (MockLlmClient, enumerate_templates, filter_candidates, filter_properties,
                     generate_candidates, load_diagram, load_grammar, load_signals,
                     remove_tautologies, remove_vacuous, render_nl, render_sva)

DATA = Path(__file__).parent / "data"


def show_witness(witness: dict) -> None:
    for name, values in witness.items():
        print(f"      {name:<6}", " ".join(str(v) for v in values))


def main() -> None:
    logging.basicConfig(format="%(levelname)s: %(message)s")
    inv = load_signals(DATA / "handshake.signals")
    grammar = load_grammar(DATA / "handshake.bnf")
    diagrams = [load_diagram(DATA / f"{n}.td", inv)
                for n in ("transfer", "valid_before_ready", "ready_before_valid")]

    templates = enumerate_templates(grammar)
    print(f"{len(templates)} templates:")
    for t in templates:
        print("   ", render_sva(t, template=True))

    cands = generate_candidates(templates, inv)
    print(f"\n{len(cands)} candidates after filling holes with {', '.join(inv.names)}")

    cands = remove_vacuous(remove_tautologies(cands, inv), diagrams)
    print(f"{len(cands)} remain after dropping tautologies and vacuous rules")

    result = filter_candidates(cands, diagrams)
    print(f"\n{len(result.verified)} hold on every diagram:")
    for p in result.verified:
        print("   ", render_sva(p))

    rejected = [o for o in result.outcomes if o.status == "violated"]
    print(f"\n{len(rejected)} were rejected; the first two, with a violating completion:")
    for o in rejected[:2]:
        print(f"    {render_sva(o.prop)}  (on {o.violated_by})")
        show_witness(o.witness)

    text = (DATA / "handshake.txt").read_text()
    client = MockLlmClient.from_file(DATA / "handshake_mock.json")
    picked = filter_properties(result.verified, text, client, runs=3)
    print("\nreplies per run:", picked.runs, " dropped:", picked.hallucinations)
    for i in picked.union:
        prop = result.verified[i - 1]
        print(f"\nfinal: {render_sva(prop, wrap='clk')}")
        print(f"       {render_nl(prop)}")


if __name__ == "__main__":
    main()
