import itertools

from hypothesis import given, settings, strategies as st

from modex.reasons import (Advice, GroundClause, advice_holds, advice_to_clause, check_advice_valid,
                           format_reason, parse_reason)
from modex.structures import Domain, GroundLiteral, Structure, Vocabulary, empty_expansion, lit
from modex.verifier import enumerate_witnesses


def test_advice_to_clause_examples():
    assert advice_to_clause(Advice([lit("P(0)")], [lit("Q(0)")])) == GroundClause([lit("-P(0)"), lit("Q(0)")])
    post = GroundClause([lit("Q(0)"), lit("Q(1)")])
    assert advice_to_clause(Advice([], post)) == post
    c = advice_to_clause(Advice([lit("P(0)"), lit("P(1)")], post))
    assert len(c) == 4


def test_advice_clause_equivalence_over_all_assignments():
    a = Advice([lit("P(0)"), lit("P(1)")], [lit("Q(0)"), lit("Q(1)")])
    c = a.to_clause()
    dom = Domain([0, 1])
    voc = Vocabulary.of(P=1, Q=1)
    atoms = [("P", (0,)), ("P", (1,)), ("Q", (0,)), ("Q", (1,))]
    for bits in itertools.product([False, True], repeat=4):
        rels = {"P": set(), "Q": set()}
        for (n, t), v in zip(atoms, bits):
            if v:
                rels[n].add(t)
        s = Structure(dom, voc, rels)
        assert advice_holds(a, s) == c.satisfied_by(s)


def test_clause_canonical_and_tautology():
    c = GroundClause([lit("Q(1)"), lit("P(0)"), lit("Q(1)")])
    assert len(c) == 2 and str(c) == "P(0) Q(1)"
    assert GroundClause([lit("P(0)"), lit("-P(0)")]).tautological
    assert GroundClause.parse(str(c)) == c
    assert str(GroundClause()) == "[]" and GroundClause.parse("[]") == GroundClause()


def test_reason_line_round_trip():
    c = GroundClause([lit("-R(a)"), lit("B(a)")])
    assert parse_reason(format_reason("COL", c)) == ("COL", c)


def test_check_advice_validity(k3):
    flat, oracles, inst = k3
    col = oracles["COL"]
    totals = enumerate_witnesses(flat, oracles, inst)
    b = empty_expansion(inst, Vocabulary.of(R=1, B=1, G=1))
    b = b.extend(lit("-R(a)")).extend(lit("-B(a)"))
    advs = col.advices(b)
    forcing = [a for a in advs if a.post == GroundClause([lit("G(a)")])]
    assert forcing and all(check_advice_valid(a, b, totals) for a in advs)
    # post already satisfied
    assert not check_advice_valid(Advice([lit("-R(a)")], [lit("-B(a)")]), b, totals)
    # pre not satisfied
    assert not check_advice_valid(Advice([lit("R(b)")], [lit("G(a)")]), b, totals)


literal = st.builds(GroundLiteral, st.sampled_from("PQ"), st.tuples(st.integers(0, 1)), st.booleans())


@settings(max_examples=100, deadline=None)
@given(st.lists(st.lists(literal, min_size=1, max_size=3), max_size=4), st.lists(literal, min_size=1, max_size=3))
def test_clause_language_is_monotone(base, extra):
    """Adding a clause never admits a structure the smaller set excluded."""
    dom, voc = Domain([0, 1]), Vocabulary.of(P=1, Q=1)
    S = [GroundClause(c) for c in base]
    c = GroundClause(extra)
    for bits in itertools.product([False, True], repeat=4):
        rels = {"P": {(i,) for i in range(2) if bits[i]}, "Q": {(i,) for i in range(2) if bits[2 + i]}}
        s = Structure(dom, voc, rels)
        if all(x.satisfied_by(s) for x in S + [c]):
            assert all(x.satisfied_by(s) for x in S)
