import contextlib
import random
import time
from pathlib import Path

import pytest

from svamine.diagram import TimingDiagram, Explicit, Symbolic, X, parse_diagram
from svamine.grammar import parse_grammar
from svamine.props import (HIGH, LOW, And, Delay, Eq, Fell, Implic, Neq, Not, Rose, SigRef,
                           Stable, WordConst)
from svamine.signals import Signal, SignalInventory, WordConstant, parse_signals

DATA = Path(__file__).resolve().parent.parent / "demos" / "data"

HANDSHAKE_GRAMMAR = (DATA / "handshake.bnf").read_text()

HANDSHAKE_SIGNALS = "VALID: signal\nREADY: signal\nDATA: word[8]\n"

TRANSFER = """\
name: transfer
VALID = [0, 0, 1, 1, 0]
READY = [0, 0, 1, 1, 0]
DATA  = [X, X, V1, V1, X]
"""

VALID_BEFORE_READY = """\
name: valid_before_ready
VALID = [0, 1, 1, 1, 0]
READY = [0, 0, 0, 1, 0]
DATA  = [X, V1, V1, V1, X]
"""

READY_BEFORE_VALID = """\
name: ready_before_valid
VALID = [0, 0, 0, 1, 0]
READY = [0, 1, 1, 1, 0]
DATA  = [X, X, X, V1, X]
"""

CORRECT = "(VALID && !READY) |-> ##1 $stable(DATA)"
INCORRECT = "(VALID && !READY) |-> $stable(DATA)"


@pytest.fixture
def inv():
    return parse_signals(HANDSHAKE_SIGNALS)


@pytest.fixture
def grammar():
    return parse_grammar(HANDSHAKE_GRAMMAR)


@pytest.fixture
def transfer(inv):
    return parse_diagram(TRANSFER, inv)


@pytest.fixture
def vbr(inv):
    return parse_diagram(VALID_BEFORE_READY, inv)


@pytest.fixture
def rbv(inv):
    return parse_diagram(READY_BEFORE_VALID, inv)


# ---------------------------------------------------------------------------
# Random small instances for oracle comparisons


def random_inventory(rng: random.Random, max_signals: int = 4,
                     opaque_rate: float = 0.15) -> SignalInventory:
    sigs = []
    for i in range(rng.randint(1, max_signals)):
        if rng.random() < 0.6:
            sigs.append(Signal(f"B{i}", "signal", 1))
        else:
            width = 2  # four values keeps brute-force enumeration exact and cheap
            consts = ()
            if rng.random() < 0.5:
                values = rng.sample(range(1 << width), rng.randint(1, 1 << width))
                consts = tuple(WordConstant(f"K{i}_{v}", v) for v in sorted(values))
            if rng.random() < opaque_rate:
                consts += (WordConstant(f"OP{i}"),)
            sigs.append(Signal(f"W{i}", "word", width, None, consts))
    return SignalInventory(tuple(sigs))


def random_diagram(rng: random.Random, inv: SignalInventory, max_len: int = 6,
                   name: str = "rand") -> TimingDiagram:
    length = rng.randint(1, max_len)
    labels = ["L1", "L2"]
    rows = []
    for sig in inv:
        cells = []
        for _ in range(length):
            r = rng.random()
            if r < 0.35:
                cells.append(X)
            elif r < 0.55:
                cells.append(Symbolic(rng.choice(labels)))
            elif sig.is_word:
                if sig.constants and rng.random() < 0.4:
                    cells.append(Explicit(rng.choice(sig.constants).name))
                else:
                    cells.append(Explicit(rng.randrange(1 << sig.width)))
            else:
                cells.append(Explicit(rng.randint(0, 1)))
        rows.append((sig.name, tuple(cells)))
    return TimingDiagram(name, inv, tuple(rows))


def _random_atom(rng, inv):
    sig = rng.choice(list(inv))
    ref = SigRef(sig.name)
    pick = rng.random()
    if pick < 0.2:
        return Stable(ref)
    if not sig.is_word:
        if pick < 0.35:
            return rng.choice([Rose, Fell])(ref)
        return rng.choice([Eq, Neq])(ref, rng.choice([HIGH, LOW]))
    others = [s for s in inv if s.is_word and s.width == sig.width and s.name != sig.name]
    if others and pick < 0.45:
        return rng.choice([Eq, Neq])(ref, SigRef(rng.choice(others).name))
    if sig.constants and pick < 0.7:
        c = rng.choice(sig.constants)
        token = c.name if c.value is None else rng.choice([c.name, c.value])
        return rng.choice([Eq, Neq])(ref, WordConst(token))
    return rng.choice([Eq, Neq])(ref, WordConst(rng.randrange(1 << sig.width)))


def random_expr(rng, inv, depth: int = 2):
    if depth <= 0 or rng.random() < 0.35:
        return _random_atom(rng, inv)
    pick = rng.random()
    if pick < 0.35:
        return And([random_expr(rng, inv, depth - 1) for _ in range(rng.randint(2, 3))])
    if pick < 0.55:
        return Not(random_expr(rng, inv, depth - 1))
    return Delay(rng.randint(1, 3), random_expr(rng, inv, depth - 1))


def random_property(rng, inv, depth: int = 2):
    if rng.random() < 0.7:
        return Implic(random_expr(rng, inv, depth), random_expr(rng, inv, depth))
    return random_expr(rng, inv, depth)


def env_of(trace, inv):
    """Variable environment for logic.evaluate from a concrete trace."""
    from svamine.logic import CycleTerm
    env = {}
    for name, seq in trace.items():
        for c, v in enumerate(seq):
            if inv[name].is_word:
                env[CycleTerm(name, c)] = v
            else:
                env[(name, c)] = bool(v)
    return env


# ---------------------------------------------------------------------------
# Acceptance bookkeeping: one pass/fail line per criterion in the summary

ACCEPTANCE: dict = {}


@contextlib.contextmanager
def criterion(number: int, title: str):
    start = time.perf_counter()
    try:
        yield
    except BaseException:
        ACCEPTANCE[number] = (title, "FAIL", time.perf_counter() - start)
        print(f"criterion {number} ({title}): FAIL")
        raise
    ACCEPTANCE[number] = (title, "PASS", time.perf_counter() - start)
    print(f"criterion {number} ({title}): PASS")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        title, status, secs = ACCEPTANCE[number]
        terminalreporter.write_line(f"criterion {number} {title}: {status} ({secs:.2f} s)")
