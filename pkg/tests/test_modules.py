import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from modex.modules import (AllDifferentModule, BoundedILAModule, ClausalModule, UnboundedVariable,
                           parse_clauses, parse_constraint, parse_ila, rules_from_text)
from modex.modules.ila import scan_rows, solve_rows
from modex.reasons import Advice, GroundClause
from modex.structures import (Domain, GroundLiteral, PartialStructure, Structure, Truth, Vocabulary,
                              empty_expansion, evaluate, lit)


def partial(domain, vocab, known=(), instance=None):
    inst = instance or Structure(Domain(domain), Vocabulary(), {})
    b = empty_expansion(inst, vocab)
    for text in known:
        b = b.extend(lit(text))
    return b


# ---------------------------------------------------------------- clausal

def test_clausal_rejects_double_colour(k3):
    _, oracles, inst = k3
    col = oracles["COL"]
    b = partial(None, Vocabulary.of(R=1, B=1, G=1), ["R(a)", "B(a)"], inst)
    v = col.accept(b)
    assert not v.accepted and v.reason == GroundClause([lit("-R(a)"), lit("-B(a)")])


def test_empty_clause_set_accepts():
    m = ClausalModule(Vocabulary.of(P=1), [])
    assert m.accept(partial([0], Vocabulary.of(P=1), ["P(0)"])).accepted


def test_clausal_unit_advice():
    m = ClausalModule(Vocabulary.of(x=0, y=0), [GroundClause([lit("x"), lit("y")])])
    b = partial([0], Vocabulary.of(x=0, y=0), ["-x"])
    assert m.advices(b) == [Advice([lit("-x")], [lit("y")])]
    assert m.advices(partial([0], Vocabulary.of(x=0, y=0))) == []


def test_k3_third_colour_forced(k3):
    _, oracles, inst = k3
    b = partial(None, Vocabulary.of(R=1, B=1, G=1), ["-R(a)", "-G(a)"], inst)
    posts = [a.post for a in oracles["COL"].advices(b)]
    assert GroundClause([lit("B(a)")]) in posts


def test_k3_total_colourings_accepted(k3):
    _, oracles, inst = k3
    col = oracles["COL"]
    accepted = 0
    for cols in itertools.product("RGB", repeat=3):
        rels = {c: {(v,) for v, cv in zip("abc", cols) if cv == c} for c in "RGB"}
        s = inst.expand(Vocabulary.of(R=1, G=1, B=1), rels)
        b = PartialStructure.from_structure(s, "RGB")
        accepted += col.accept(b).accepted
    assert accepted == 6


def test_clause_schema_guard_and_errors():
    m = parse_clauses("vocab E/2\nE(?x,?y) : ?x != ?y\n", Domain([1, 2, 3]))
    assert len(m.clauses) == 6
    with pytest.raises(ValueError):
        parse_clauses("vocab P/1\nP(9)\n", Domain([1]))
    with pytest.raises(ValueError):
        parse_clauses("vocab P\n", Domain([1]))


# ---------------------------------------------------------------- all-different

def timetable():
    return AllDifferentModule("At", [1, 2, 3], [1, 2, 3])


def test_alldiff_pairwise_reason():
    m = timetable()
    b = partial([1, 2, 3], m.vocabulary, ["At(1,2)", "At(3,2)"])
    v = m.accept(b)
    assert not v.accepted and v.reason == GroundClause([lit("-At(1,2)"), lit("-At(3,2)")])


def test_alldiff_injective_total_accepted():
    m = timetable()
    s = Structure(Domain([1, 2, 3]), m.vocabulary, {"At": {(1, 2), (2, 3), (3, 1)}})
    assert m.member(s) and m.accept(PartialStructure.from_structure(s, ["At"])).accepted


def test_alldiff_matches_brute_force_on_timetable():
    m = timetable()
    dom = Domain([1, 2, 3])
    atoms = dom.tuples(2)
    members = 0
    for bits in itertools.product([False, True], repeat=9):
        s = Structure(dom, m.vocabulary, {"At": {t for t, v in zip(atoms, bits) if v}})
        assert m.member(s) == m.accept(PartialStructure.from_structure(s, ["At"])).accepted
        members += m.member(s)
    assert members == 6


def test_alldiff_key_without_values():
    m = timetable()
    b = partial([1, 2, 3], m.vocabulary, ["-At(1,1)", "-At(1,2)", "-At(1,3)"])
    assert m.accept(b).reason == GroundClause([lit("At(1,1)"), lit("At(1,2)"), lit("At(1,3)")])


# ---------------------------------------------------------------- integer linear arithmetic

def ila(text):
    return parse_ila(text)


def test_ila_empty_box_conflict():
    m = ila("var x 0 5\natom a : x <= 1\natom b : x >= 2\n")
    b = partial([0], m.vocabulary, ["a", "b"])
    v = m.accept(b)
    assert not v.accepted and v.reason == GroundClause([lit("-a"), lit("-b")])


def test_ila_feasible_sum():
    m = ila("var x 0 5\nvar y 0 5\natom s : x + y <= 3\natom a : x >= 1\natom b : y >= 1\n")
    assert m.accept(partial([0], m.vocabulary, ["s", "a", "b"])).accepted
    rows = m._rows([lit("s"), lit("a"), lit("b")])
    assert scan_rows(rows, m.box) is not None


def test_ila_totals_exact_against_scan():
    m = ila("var x 0 3\nvar y 0 3\natom a : 2*x + 3*y <= 7\natom b : x - y = 1\natom c : x != 2\n"
            "atom d : 1/2*x + y > 2\n")
    dom = Domain([0])
    for bits in itertools.product([False, True], repeat=4):
        lits = [GroundLiteral(n, (), v) for n, v in zip("abcd", bits)]
        s = Structure(dom, m.vocabulary, {n: {()} if v else set() for n, v in zip("abcd", bits)})
        expected = scan_rows(m._rows(lits), m.box) is not None
        assert m.member(s) == expected
        assert m.accept(PartialStructure.from_structure(s, "abcd")).accepted == expected


def test_ila_bound_dominance_advice():
    m = ila("var x 0 5\natom big : x >= 3\natom a : x >= 1\n")
    advs = m.advices(partial([0], m.vocabulary, ["big"]))
    assert advs == [Advice([lit("big")], [lit("a")])]
    assert m.advices(partial([0], m.vocabulary)) == []


def test_ila_interval_advice():
    m = ila("var x 0 5\nvar y 0 5\natom s : x + y <= 2\natom hi : x >= 2\natom b : y <= 0\n")
    advs = m.advices(partial([0], m.vocabulary, ["s", "hi"]))
    assert Advice([lit("s"), lit("hi")], [lit("b")]) in advs


def test_ila_requires_ranges():
    with pytest.raises(UnboundedVariable):
        ila("atom a : x <= 1\n")
    with pytest.raises(UnboundedVariable):
        BoundedILAModule({"x": (0, None)}, {})


def test_constraint_parsing():
    c = parse_constraint("2*x + 3*y <= 7")
    assert dict(c.coefs) == {"x": 2, "y": 3} and c.op == "<=" and c.rhs == 7
    c = parse_constraint("x + -0.5*y >= 1/3")  # scales to integers
    assert c.rhs == Fraction(1, 3)
    rows = c.rows(True)
    assert all(isinstance(a, int) for _, a in rows[0].coefs)


def test_ila_catalogue_relations(data_dir):
    from conftest import load_demo
    flat, oracles, inst = load_demo("smt.mx", "smt.inst")
    ilp = oracles["ILP"]
    assert ilp._conflict_ok == {"p": True, "q": False, "r": False}
    assert ilp._prop_ok == {"p": True, "q": True, "r": False}


@settings(max_examples=60, deadline=None)
@given(st.lists(st.tuples(st.integers(-3, 3), st.integers(-3, 3), st.sampled_from(["<=", ">=", "=", "!="]),
                          st.integers(-4, 8)), min_size=1, max_size=4))
def test_branch_and_bound_agrees_with_scan(cons):
    box = {"x": (0, 4), "y": (0, 4)}
    rows = []
    for a, b, op, rhs in cons:
        if a == b == 0:
            continue
        rows += parse_constraint(f"{a}*x + {b}*y {op} {rhs}").rows(True)
    assert (solve_rows(rows, box) is None) == (scan_rows(rows, box) is None)


# ---------------------------------------------------------------- rules

TC = "input S\noutput T\nvocab E/2\nT(X,Y) <- E(X,Y).\nT(X,Z) <- S(X,Y), E(Y,Z).\n"


def test_rules_declare_properties():
    m = rules_from_text(TC)
    assert m.properties.sense("S", "T") == ("monotone", ("E",))
    anti = rules_from_text("input S\noutput R\nvocab P/1\nR(X) <- P(X), not S(X).\n")
    assert anti.properties.sense("S", "R")[0] == "anti-monotone"


def test_rules_reject_negated_defined_relation():
    with pytest.raises(ValueError):
        rules_from_text("R(X) <- P(X).\nQ(X) <- not R(X).\n")


def test_rules_operator_is_closure():
    m = rules_from_text(TC)
    dom = Domain("abc")
    s = Structure(dom, m.vocabulary, {"E": {("a", "b"), ("b", "c")}, "S": {("a", "b")}})
    assert m.operator_eval(s) == {("a", "b"), ("b", "c"), ("a", "c")}


def test_rules_reasons_and_advices():
    m = rules_from_text(TC)
    inst = Structure(Domain("abc"), Vocabulary.of(E=2), {"E": {("a", "b"), ("b", "c")}})
    b = empty_expansion(inst, Vocabulary.of(S=2, T=2)).extend(lit("S(a,b)")).extend(lit("-T(a,c)"))
    v = m.accept(b)
    assert not v.accepted and v.reason == GroundClause([lit("T(a,c)"), lit("-S(a,b)"), lit("-E(b,c)")])
    b = empty_expansion(inst, Vocabulary.of(S=2, T=2)).extend(lit("T(c,a)"))
    v = m.accept(b)
    assert not v.accepted and evaluate(b, v.reason) is Truth.FALSIFIED
    advs = m.advices(empty_expansion(inst, Vocabulary.of(S=2, T=2)))
    assert Advice([lit("E(a,b)")], [lit("T(a,b)")]) in advs


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_rule_operator_monotone(seed):
    rng = random.Random(seed)
    preds = ["S", "P", "E"]
    rules = []
    for _ in range(rng.randint(1, 4)):
        body = [f"{rng.choice(preds)}(X,Y)" if False else rng.choice(["S(X)", "P(X)", "E(X,Y)", "S(Y)", "R(Y)"])
                for _ in range(rng.randint(1, 3))]
        rules.append(f"R(X) <- {', '.join(body)}.")
    m = rules_from_text("input S\noutput R\nvocab S/1 P/1 E/2\n" + "\n".join(rules) + "\n")
    dom = Domain([0, 1, 2])
    base = {"P": {(x,) for x in dom if rng.random() < 0.5},
            "E": {(x, y) for x in dom for y in dom if rng.random() < 0.4}}
    s1 = {(x,) for x in dom if rng.random() < 0.4}
    s2 = s1 | {(x,) for x in dom if rng.random() < 0.4}
    out = [m.operator_eval(Structure(dom, m.vocabulary, {**base, "S": s})) for s in (s1, s2)]
    assert out[0] <= out[1]
