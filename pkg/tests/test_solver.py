import itertools
import random
import sys
import textwrap

import pytest

from svamine.backend import (BackendError, CdclBackend, DimacsCommandBackend,
                             parse_solver_output, reduce_units, solve_formula)
from svamine.cnf import Cnf, to_cnf
from svamine.domains import DomainPlan, plan_for, word_atoms
from svamine.logic import (FALSE, TRUE, ConstTerm, CycleTerm, bit, conj, disj, evaluate, iff,
                           implies, neg, variables, word_eq)
from svamine.signals import parse_signals
from svamine.solver import Solver, luby, solve_clauses


def test_luby_sequence():
    assert [luby(i) for i in range(1, 16)] == [1, 1, 2, 1, 1, 2, 4, 1, 1, 2, 1, 1, 2, 4, 8]


def _brute_sat(nvars, clauses):
    for bits in itertools.product((False, True), repeat=nvars):
        if all(any(bits[abs(l) - 1] == (l > 0) for l in c) for c in clauses):
            return True
    return False


def _satisfies(model, clauses):
    return all(any(model[abs(l)] == (l > 0) for l in c) for c in clauses)


def test_cdcl_against_brute_force():
    rng = random.Random(0)
    for _ in range(600):
        n = rng.randint(1, 10)
        m = rng.randint(1, 5 * n)
        clauses = [[rng.choice([-1, 1]) * rng.randint(1, n) for _ in range(rng.randint(1, 3))]
                   for _ in range(m)]
        model = solve_clauses(n, clauses)
        assert (model is not None) == _brute_sat(n, clauses)
        if model is not None:
            assert _satisfies(model, clauses)


def test_pigeonhole_is_unsat():
    # 5 pigeons, 4 holes
    p, h = 5, 4
    var = lambda i, j: i * h + j + 1
    clauses = [[var(i, j) for j in range(h)] for i in range(p)]
    for j in range(h):
        for a, b in itertools.combinations(range(p), 2):
            clauses.append([-var(a, j), -var(b, j)])
    assert Solver(p * h, clauses).solve() is None


def test_empty_clause_and_trivial_cases():
    assert solve_clauses(2, [[]]) is None
    assert solve_clauses(0, []) == [False]
    assert solve_clauses(1, [[1], [-1]]) is None


def _random_formula(rng, keys, depth=3):
    if depth == 0 or rng.random() < 0.3:
        v = bit(*rng.choice(keys))
        return v if rng.random() < 0.5 else neg(v)
    op = rng.choice([conj, disj, implies, iff, "not"])
    if op == "not":
        return neg(_random_formula(rng, keys, depth - 1))
    return op(_random_formula(rng, keys, depth - 1), _random_formula(rng, keys, depth - 1))


def test_tseitin_and_reduction_preserve_satisfiability():
    rng = random.Random(1)
    keys = [("a", i) for i in range(5)]
    for _ in range(400):
        f = _random_formula(rng, keys)
        names = sorted(variables(f))
        truth = any(evaluate(f, dict(zip(names, bits)))
                    for bits in itertools.product((False, True), repeat=len(names)))
        res = solve_formula(f)
        assert res.sat == truth
        if res.sat:
            env = {k: res.model.get(k, False) for k in names}
            assert evaluate(f, env)
        cnf = to_cnf(f) if f not in (TRUE, FALSE) else None
        if cnf is not None:
            assert (solve_clauses(cnf.nvars, cnf.clauses) is not None) == truth


def test_reduce_units():
    a, b, c = bit("a", 0), bit("b", 0), bit("c", 0)
    red = reduce_units(conj(a, implies(a, b), disj(neg(b), c)))
    assert red.fixed == {("a", 0): True, ("b", 0): True, ("c", 0): True}
    assert red.residual == TRUE
    assert reduce_units(conj(a, implies(a, neg(a)))).unsat


def test_dimacs_output_and_name_map():
    cnf = Cnf()
    cnf.assert_formula(conj(bit("VALID", 0), disj(neg(bit("READY", 1)), bit("VALID", 2))))
    text = cnf.to_dimacs()
    assert "c 3 VALID[0]" in text
    assert f"p cnf {cnf.nvars} {len(cnf.clauses)}" in text
    assert all(line.endswith(" 0") for line in text.splitlines() if line[0] not in "cp")
    assert cnf.name_map() == {"1": "READY[1]", "2": "VALID[2]", "3": "VALID[0]"}


def test_parse_solver_output():
    assert parse_solver_output("c hi\ns SATISFIABLE\nv 1 -2\nv 3 0\n", 3) == \
        [False, True, False, True]
    assert parse_solver_output("s UNSATISFIABLE\n", 3) is None
    with pytest.raises(BackendError):
        parse_solver_output("garbage\n", 3)


@pytest.fixture
def solver_script(tmp_path):
    script = tmp_path / "mini_solver.py"
    script.write_text(textwrap.dedent("""
        import sys
        from svamine.solver import solve_clauses
        nvars, clauses = 0, []
        for line in open(sys.argv[1]):
            if line.startswith("p cnf"):
                nvars = int(line.split()[2])
            elif line.strip() and line[0] not in "cp":
                clauses.append([int(t) for t in line.split()[:-1]])
        model = solve_clauses(nvars, clauses)
        if model is None:
            print("s UNSATISFIABLE")
        else:
            print("s SATISFIABLE")
            print("v " + " ".join(str(v if model[v] else -v) for v in range(1, nvars + 1)) + " 0")
    """))
    return script


def test_external_backend_matches_builtin(solver_script):
    ext = DimacsCommandBackend(f"{sys.executable} {solver_script} {{}}")
    rng = random.Random(4)
    keys = [("a", i) for i in range(4)]
    for _ in range(15):
        f = _random_formula(rng, keys)
        assert solve_formula(f, ext).sat == solve_formula(f, CdclBackend()).sat


def test_external_backend_failure(tmp_path):
    with pytest.raises(BackendError):
        DimacsCommandBackend(str(tmp_path / "missing-solver")).solve_cnf(to_cnf(bit("a", 0)))


# --- word domains ----------------------------------------------------------


def test_small_mode_for_few_terms():
    inv = parse_signals("D: word[8] constants=IDLE=3,OPQ")
    plan = DomainPlan(inv, 2, ["D"], [ConstTerm("D", 3)])
    dom = plan["D"]
    # 2 cycle terms + 2 constants fit in 2 bits
    assert dom.mode == "small" and dom.nbits == 2
    assert len(set(dom.codes.values())) == 2
    assert dom.codes == {3: 0, "OPQ": 1}
    # unpinned codes decode to fresh values distinct from the numeric constants
    assert dom.decode([0, 1, 2, 3]) == {0: 3, 1: "OPQ", 2: 0, 3: 1}


def test_raw_mode_for_narrow_words():
    inv = parse_signals("D: word[2] constants=OPQ\nE: word[2] constants=OPE")
    f = word_eq(CycleTerm("D", 0), CycleTerm("E", 0))
    plan = plan_for(inv, 3, ["D", "E"], word_atoms(f))
    dom = plan["D"]
    assert dom is plan["E"]
    assert dom.mode == "raw" and dom.width == 2
    assert dom.codes == {"OPE": 4, "OPQ": 5}
    # each signal avoids the other's opaque code and the unused code space
    assert 4 in dom.forbidden["D"] and 5 in dom.forbidden["E"]
    assert 6 in dom.forbidden["D"] and 7 in dom.forbidden["E"]


def test_lowering_is_exact_for_narrow_words():
    """Lowered satisfiability equals satisfiability over the real value range."""
    inv = parse_signals("D: word[2] constants=K=1,OPQ\nE: word[2]")
    rng = random.Random(9)
    terms = [CycleTerm("D", c) for c in range(3)] + [CycleTerm("E", c) for c in range(3)]
    consts = {"D": [ConstTerm("D", 1), ConstTerm("D", "OPQ"), ConstTerm("D", 2)],
              "E": [ConstTerm("E", 0), ConstTerm("E", 3)]}
    universe = {"D": [0, 1, 2, 3, "OPQ"], "E": [0, 1, 2, 3]}
    for _ in range(150):
        atoms = []
        for _ in range(rng.randint(1, 5)):
            a = rng.choice(terms)
            if rng.random() < 0.5:
                b = rng.choice(terms)
            else:
                b = rng.choice(consts[a.signal])
            e = word_eq(a, b)
            atoms.append(e if rng.random() < 0.5 else neg(e))
        f = conj(*atoms)
        plan = plan_for(inv, 3, ["D", "E"], word_atoms(f))
        lowered = conj(plan.lower(f), plan.constraints())
        got = solve_formula(lowered).sat
        want = any(evaluate(f, dict(zip(terms, vals)))
                   for vals in itertools.product(*(universe[t.signal] for t in terms)))
        assert got == want, f
