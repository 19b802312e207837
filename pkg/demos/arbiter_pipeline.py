"""Run the whole flow on a request/grant arbiter.

    python3 demos/arbiter_pipeline.py [OUT_DIR]

The grammar mixes edge triggers, two-cycle delays and word comparisons
against a named constant.  The language stage uses the seeded mock client,
which makes up replies reproducibly, so the final list shows how the stage
behaves rather than what a real model would pick.
"""

import json
import sys
import tempfile
from pathlib import Path

from svamine import (check_on_diagram, load_diagram, load_signals, parse_diagram, parse_sva,
                     render_sva)
from svamine.pipeline import RunConfig, run_pipeline

DATA = Path(__file__).parent / "data"
DIAGRAMS = [DATA / "single_grant.td", DATA / "back_to_back.td"]


def main(out: Path) -> None:
    config = RunConfig(grammar=str(DATA / "arbiter.bnf"), signals=str(DATA / "arbiter.signals"),
                       diagrams=[str(p) for p in DIAGRAMS], out=str(out),
                       text=str(DATA / "arbiter.txt"), mock_seed=7)
    report = run_pipeline(config)
    for stage, n in report.counts.items():
        print(f"{stage:>16}: {n}")

    doc = json.loads((out / "report.json").read_text())
    vacuous = [e["sva"] for e in doc["properties"] if e["status"] == "vacuous"]
    print(f"\nvacuous, e.g. {vacuous[0]}")
    print("\nfinal selection:")
    print((out / "properties.sva").read_text().rstrip() or "    (none)")

    # Symbolic labels say nothing about the value itself, so a label may
    # still equal IDLE.  Pinning ADDR explicitly fixes that.
    inv = load_signals(DATA / "arbiter.signals")
    prop = parse_sva("$rose(REQ) |-> ADDR != IDLE", inv)
    labelled = load_diagram(DIAGRAMS[0], inv)
    verdict = check_on_diagram(prop, labelled)
    print(f"\n{render_sva(prop)} on {labelled.name}: {verdict.verdict.value}")
    print("    witness ADDR:", verdict.witness["ADDR"])
    pinned = DIAGRAMS[0].read_text().replace("A1, A1", "8'h40, 8'h40")
    verdict = check_on_diagram(prop, parse_diagram(pinned, inv))
    print(f"    with ADDR pinned to 8'h40: {verdict.verdict.value}")


if __name__ == "__main__":
    if len(sys.argv) > 1:
        main(Path(sys.argv[1]))
    else:
        with tempfile.TemporaryDirectory() as tmp:
            main(Path(tmp))
