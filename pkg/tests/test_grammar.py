import itertools
import math

import pytest
from conftest import HANDSHAKE_GRAMMAR

from svamine.grammar import (GrammarError, TemplateCapExceeded, count_sentences,
                             enumerate_derivations, enumerate_templates, parse_grammar)
from svamine.instantiate import generate_candidates, generate_with_origin
from svamine.props import (HIGH, LOW, And, Delay, Eq, Hole, HoleKind, Implic, SigRef, Stable,
                           canonicalize, is_ground)
from svamine.render import render_nl, render_sva
from svamine.signals import check_types, parse_signals

ASSIGN = Eq(Hole(HoleKind.SIGNAL), Hole(HoleKind.LEVEL))


def test_handshake_grammar_has_four_templates(grammar):
    templates = enumerate_templates(grammar)
    assert count_sentences(grammar) == 4
    assert len(templates) == 4
    expected = Implic(And([ASSIGN, ASSIGN]), Delay(1, Stable(Hole(HoleKind.SIGNAL_OR_WORD))))
    assert canonicalize(expected) in templates
    assert render_nl(canonicalize(expected)) == \
        "If [signal] is [level] and [signal] is [level], then [signal/word] remains stable " \
        "in the next cycle."


def test_derivations_record_choices(grammar):
    derivs = enumerate_derivations(grammar)
    first = derivs[0].derivation
    assert first[0] == ("implic", 0)
    assert {nt for nt, _ in first} == {"implic", "conj", "assign", "delay"}
    assert len({d.derivation for d in derivs}) == 4


def test_comments_blank_lines_and_continuations():
    g = parse_grammar("""
        # header comment
        <top> ::= |-> <a> <b>   # trailing comment

        <a>   ::= == <signal> <level>
              | != <signal> <level>
        <b>   ::= ##2 $rose <signal>
    """)
    assert g.top_rule == "top"
    assert len(g.alternatives("a")) == 2
    nodes = enumerate_templates(g)
    assert len(nodes) == 2
    assert all(isinstance(n.cons, Delay) and n.cons.cycles == 2 for n in nodes)


def test_subtype_tags():
    g = parse_grammar("<t> ::= |-> == <signal:ctrl> <level> ##1 $stable <word:bus>")
    [t] = enumerate_templates(g)
    assert t.ante.lhs.tag == "ctrl"
    inv = parse_signals("A: signal subtype=ctrl\nB: signal\nD: word[4] subtype=bus\nE: word[4]")
    cands = generate_candidates([t], inv)
    assert {render_sva(c) for c in cands} == {
        "(A) |-> ##1 $stable(D)", "(!A) |-> ##1 $stable(D)"}


@pytest.mark.parametrize("text, match", [
    ("", "no rules"),
    ("<a> ::= == <signal> <level>\n<a> ::= == <signal> <level>", "duplicate"),
    ("<a> ::= == <b> <level>", "undefined"),
    ("<a> ::= <b>\n<b> ::= <a>", "recursive"),
    ("<a> ::= && <signal>", "two operands"),
    ("<a> ::= == <signal>", "expects 2"),
    ("<a> ::= == <signal> <level> <level>", "unexpected token"),
    ("   | == <signal> <level>", "continuation"),
    ("a ::= == <signal> <level>", "expected|invalid"),
    ("<a> ::= ##0 <signal>", "unknown operator"),
    ("<a> ::= |-> |-> == <signal> <level> == <signal> <level> == <signal> <level>",
     "ill-formed"),
])
def test_grammar_errors(text, match):
    with pytest.raises(GrammarError, match=match):
        enumerate_templates(parse_grammar(text))


def test_error_positions():
    with pytest.raises(GrammarError) as info:
        parse_grammar("<a> ::= == <signal> <level>\n<b> ::= == <nope> <level>")
    assert info.value.line == 2


def test_cap():
    rules = ["<t> ::= && <x> <x> <x> <x> <x> <x>",
             "<x> ::= " + " | ".join(f"##{k} == <signal> <level>" for k in range(1, 10))]
    g = parse_grammar("\n".join(rules))
    assert count_sentences(g) == 9 ** 6
    with pytest.raises(TemplateCapExceeded) as info:
        enumerate_templates(g, cap=1000)
    assert info.value.count == 9 ** 6


def test_stability_template_instantiates_to_twelve(inv):
    template = canonicalize(Implic(And([ASSIGN, ASSIGN]),
                                   Delay(1, Stable(Hole(HoleKind.SIGNAL_OR_WORD)))))
    cands = generate_candidates([template], inv)
    assert len(cands) == 12
    assert len(set(cands)) == 12
    for c in cands:
        assert is_ground(c)
        check_types(c, inv)
    want = Implic(And([Eq(SigRef("VALID"), HIGH), Eq(SigRef("READY"), LOW)]),
                  Delay(1, Stable(SigRef("DATA"))))
    assert want in cands


def test_handshake_candidates_match_combinatorics(grammar, inv):
    # 2-conj antecedents over the two bit signals: one unordered pair, 2x2 levels.
    # Consequents: ##1 assign (2 signals x 2 levels) or ##1 $stable (3 signals).
    # 3-conj templates need three distinct bit signals and contribute nothing.
    cands = generate_with_origin(enumerate_templates(grammar), inv)
    assert len(cands) == 4 * (4 + 3)


def _expected_count(nbits, nwords):
    """Closed-form count for "A && B |-> ##1 $stable(S)" with distinct-signal conjuncts."""
    ante = math.comb(nbits, 2) * 4
    return ante * (nbits + nwords)


@pytest.mark.parametrize("nbits, nwords", [(2, 1), (3, 0), (4, 2), (5, 3)])
def test_combinatorial_oracle(nbits, nwords):
    lines = [f"B{i}: signal" for i in range(nbits)] + [f"W{i}: word[4]" for i in range(nwords)]
    inv = parse_signals("\n".join(lines))
    template = canonicalize(Implic(And([ASSIGN, ASSIGN]),
                                   Delay(1, Stable(Hole(HoleKind.SIGNAL_OR_WORD)))))
    cands = generate_candidates([template], inv)
    assert len(cands) == _expected_count(nbits, nwords)
    # brute force: every assignment of the five holes, filtered and deduplicated by hand
    bits = [f"B{i}" for i in range(nbits)]
    brute = set()
    for s1, s2 in itertools.product(bits, repeat=2):
        if s1 == s2:
            continue
        for l1, l2 in itertools.product([HIGH, LOW], repeat=2):
            for s in inv.names:
                node = Implic(And([Eq(SigRef(s1), l1), Eq(SigRef(s2), l2)]),
                              Delay(1, Stable(SigRef(s))))
                brute.add(canonicalize(node, inv))
    assert brute == set(cands)


def test_word_holes_respect_width():
    inv = parse_signals("A: word[4] constants=IDLE,BUSY=3\nB: word[4]\nC: word[8]")
    g = parse_grammar("<t> ::= |-> == <word> <value> ##1 == <word> <word>")
    cands = generate_candidates(enumerate_templates(g), inv)
    texts = {render_sva(c) for c in cands}
    assert texts == {"(A == IDLE) |-> ##1 (A == B)", "(A == BUSY) |-> ##1 (A == B)"}


def test_template_without_instances_warns(caplog):
    inv = parse_signals("A: signal")
    g = parse_grammar("<t> ::= |-> == <word> <value> ##1 $rose <signal>")
    assert generate_candidates(enumerate_templates(g), inv) == []
    assert "no candidates" in caplog.text


def test_handshake_grammar_is_loadable():
    assert "##1" in HANDSHAKE_GRAMMAR
    g = parse_grammar(HANDSHAKE_GRAMMAR)
    assert sorted(g.rules) == ["assign", "conj", "delay", "implic", "stable"]
