import dataclasses
import random

import pytest
from conftest import CORRECT, INCORRECT, random_inventory, random_property

from svamine.props import (HIGH, LOW, And, Delay, Eq, Fell, Implic, Neq, Not, Rose, SigRef,
                           Stable, WordConst, canonicalize)
from svamine.render import render_nl, render_sva
from svamine.sva_parser import SvaSyntaxError, UnsupportedConstruct, parse_sva

V, R, D = SigRef("VALID"), SigRef("READY"), SigRef("DATA")


def stability(v, r, s):
    return Implic(And([Eq(V, v), Eq(R, r)]), Delay(1, Stable(SigRef(s))))


@pytest.mark.parametrize("node, text", [
    (stability(HIGH, LOW, "DATA"),
     "If VALID is HIGH and READY is LOW, then DATA remains stable in the next cycle."),
    (stability(LOW, HIGH, "DATA"),
     "If VALID is LOW and READY is HIGH, then DATA remains stable in the next cycle."),
    (stability(LOW, HIGH, "READY"),
     "If VALID is LOW and READY is HIGH, then READY remains stable in the next cycle."),
    (Implic(Eq(V, HIGH), Eq(V, HIGH)), "If VALID is HIGH, then VALID is HIGH."),
])
def test_nl_golden(node, text):
    assert render_nl(node) == text


def test_nl_other_forms():
    assert render_nl(Delay(2, Eq(D, WordConst(5)))) == "DATA is 5 in 2 cycles"
    assert render_nl(Neq(D, SigRef("ADDR"))) == "DATA is not equal to ADDR"
    assert render_nl(Rose(V)) == "VALID rises"
    assert render_nl(Not(Stable(D))) == "DATA changes from the previous cycle"
    assert render_nl(Delay(1, And([Eq(V, HIGH), Eq(R, LOW)]))) == \
        "in the next cycle, VALID is HIGH and READY is LOW"


def test_sva_forms():
    assert render_sva(stability(HIGH, LOW, "DATA")) == CORRECT
    assert render_sva(Implic(And([Eq(V, HIGH), Eq(R, LOW)]), Stable(D))) == INCORRECT
    assert render_sva(Eq(D, WordConst(3))) == "DATA == 3"
    assert render_sva(Implic(Eq(V, HIGH), Eq(R, HIGH))) == "(VALID) |-> (READY)"
    assert render_sva(Delay(1, Eq(D, SigRef("ADDR")))) == "##1 (DATA == ADDR)"
    assert render_sva(stability(HIGH, LOW, "DATA"), wrap="clk") == \
        f"assert property (@(posedge clk) {CORRECT});"


def test_parse_handshake_rule(inv):
    assert parse_sva(CORRECT, inv) == stability(HIGH, LOW, "DATA")
    assert parse_sva(f"assert property (@(posedge clk) {CORRECT});", inv) == \
        stability(HIGH, LOW, "DATA")
    assert parse_sva("VALID == 1 && READY == 0 |-> ##1 $stable(DATA)", inv) == \
        stability(HIGH, LOW, "DATA")


def test_parse_constants():
    from svamine.signals import parse_signals
    inv = parse_signals("S: signal\nW: word[4] constants=IDLE=2,BUSY")
    assert parse_sva("W == IDLE", inv) == Eq(SigRef("W"), WordConst("IDLE"))
    assert parse_sva("W == 2", inv) == Eq(SigRef("W"), WordConst("IDLE"))
    assert parse_sva("W != 4'h3", inv) == Neq(SigRef("W"), WordConst(3))
    assert parse_sva("$fell(S) |-> ##2 !S", inv) == \
        Implic(Fell(SigRef("S")), Delay(2, Eq(SigRef("S"), LOW)))


@pytest.mark.parametrize("text", [
    "VALID |=> READY", "VALID ##[1:3] READY", "VALID || READY", "$past(VALID)",
    "VALID throughout READY", "DATA[3:0] == 1",
])
def test_unsupported(text):
    with pytest.raises(UnsupportedConstruct):
        parse_sva(text)


@pytest.mark.parametrize("text", [
    "(VALID |-> READY) |-> READY", "VALID &&", "(VALID", "VALID READY", "##0 VALID",
    "assert VALID;",
])
def test_syntax_errors(text):
    with pytest.raises(SvaSyntaxError):
        parse_sva(text)


def _named(node, inv, signal=None):
    """Replace integer constants that match a declared constant by its name."""
    if isinstance(node, WordConst):
        const = inv.find_constant(signal, node.value) if signal else None
        return WordConst(const.name) if const is not None else node
    if not dataclasses.is_dataclass(node):
        return node
    if isinstance(node, (Eq, Neq)):
        sig = node.lhs.name if isinstance(node.lhs, SigRef) else None
        return type(node)(_named(node.lhs, inv), _named(node.rhs, inv, sig))
    changes = {}
    for f in dataclasses.fields(node):
        value = getattr(node, f.name)
        if isinstance(value, tuple):
            changes[f.name] = tuple(_named(v, inv) for v in value)
        elif dataclasses.is_dataclass(value):
            changes[f.name] = _named(value, inv)
    return dataclasses.replace(node, **changes)


def test_render_parse_round_trip():
    rng = random.Random(5)
    for _ in range(300):
        inv = random_inventory(rng)
        prop = canonicalize(random_property(rng, inv), inv)
        # literals matching a declared constant come back under its name
        assert parse_sva(render_sva(prop), inv) == canonicalize(_named(prop, inv), inv)
