import pytest

from modex.modules import rules_from_text
from modex.oracle import ACCEPT, Oracle
from modex.propagation import (ModuleProperties, NonMonotoneObserved, negative_fixpoint, positive_fixpoint,
                               propagate_feedback)
from modex.reasons import GroundClause
from modex.structures import Domain, Structure, Vocabulary, empty_expansion, lit

TC = "input S\noutput T\nvocab E/2\nT(X,Y) <- E(X,Y).\nT(X,Z) <- S(X,Y), E(Y,Z).\n"


class FunctionModule(Oracle):
    """Operator given by a Python function of the S relation."""

    def __init__(self, fn, sense, name="fn"):
        self.name = name
        self.fn = fn
        self.vocabulary = Vocabulary.of(S=1, R=1)
        self.properties = ModuleProperties(totality=[("S",)], monotonicity=[(("S",), (), ("R",), sense)])

    def accept(self, b):
        return ACCEPT

    def operator_eval(self, inputs):
        return frozenset(self.fn(inputs["S"], inputs.domain))


def unary(domain, known=()):
    b = empty_expansion(Structure(Domain(domain), Vocabulary(), {}), Vocabulary.of(S=1, R=1))
    for text in known:
        b = b.extend(lit(text))
    return b


def tc_partial(known=()):
    m = rules_from_text(TC)
    inst = Structure(Domain("abc"), Vocabulary.of(E=2), {"E": {("a", "b"), ("b", "c")}})
    b = empty_expansion(inst, Vocabulary.of(S=2, T=2))
    for text in known:
        b = b.extend(lit(text))
    return m, b


def test_positive_chain_transitive_closure():
    m, b = tc_partial()
    chain = positive_fixpoint(m, ("S", "T"), b)
    assert chain.lower_limit == {("a", "b"), ("b", "c"), ("a", "c")}
    assert all(x <= y for x, y in zip(chain.lower, chain.lower[1:]))


def test_identity_operator_stops_at_start():
    m = FunctionModule(lambda s, d: s, "monotone")
    b = unary([0, 1, 2], ["S(1)"])
    chain = positive_fixpoint(m, ("S", "R"), b)
    assert chain.lower_limit == {(1,)} and len(chain.lower) == 1


def test_closed_start_has_length_one():
    m, b = tc_partial(["S(a,b)", "S(b,c)", "S(a,c)"])
    assert len(positive_fixpoint(m, ("S", "T"), b).lower) == 1


def test_non_monotone_operator_is_caught():
    # image shrinks as the input grows
    m = FunctionModule(lambda s, d: {(x,) for x in d if (x,) not in s}, "monotone")
    with pytest.raises(NonMonotoneObserved):
        positive_fixpoint(m, ("S", "R"), unary([0, 1]))


def test_negative_chain_complement():
    m = FunctionModule(lambda s, d: {(x,) for x in d if (x,) not in s}, "anti-monotone")
    chain = negative_fixpoint(m, ("S", "R"), unary([0, 1, 2]))
    assert chain.lower_limit == frozenset() and chain.upper_limit == {(0,), (1,), (2,)}
    assert not chain.crossed


def test_negative_chain_fully_known():
    m = FunctionModule(lambda s, d: {(x,) for x in d if (x,) not in s}, "anti-monotone")
    b = unary([0, 1], ["S(0)", "-S(1)"])
    chain = negative_fixpoint(m, ("S", "R"), b)
    # the complement operator has no fixpoint: the pair crosses and a refutation is emitted
    assert chain.crossed
    chain.guards = [lit("S(0)"), lit("-S(1)")]
    assert chain.clauses() == [GroundClause([lit("-S(0)"), lit("S(1)")])]
    ident = FunctionModule(lambda s, d: set(s), "anti-monotone")  # constant on fully known S
    chain = negative_fixpoint(ident, ("S", "R"), b)
    assert chain.lower_limit == chain.upper_limit == {(0,)}


def test_negative_chain_constant_operator():
    const = {(1,), (2,)}
    m = FunctionModule(lambda s, d: const, "anti-monotone")
    chain = negative_fixpoint(m, ("S", "R"), unary([0, 1, 2]))
    assert chain.lower_limit == chain.upper_limit == const


def test_propagate_positive_closure_adds_one_unit():
    m, b = tc_partial(["S(a,b)", "S(b,c)"])
    chain = positive_fixpoint(m, ("S", "T"), b)
    chain.guards = [lit("S(a,b)"), lit("S(b,c)")]
    added = []
    assert propagate_feedback(added.append, [chain]) == 1
    assert added == [GroundClause([lit("-S(a,b)"), lit("-S(b,c)"), lit("S(a,c)")])]


def test_propagate_nothing_new():
    m = FunctionModule(lambda s, d: s, "anti-monotone")
    chain = negative_fixpoint(m, ("S", "R"), unary([0, 1], ["S(0)", "-S(1)"]))
    assert propagate_feedback(lambda c: None, [chain]) == 0


def test_propagate_negative_unit():
    m = FunctionModule(lambda s, d: {(0,)}, "anti-monotone")
    chain = negative_fixpoint(m, ("S", "R"), unary([0, 1]))
    added = []
    assert propagate_feedback(added.append, [chain]) == 2
    assert GroundClause([lit("-S(1)")]) in added and GroundClause([lit("S(0)")]) in added


def test_properties_validation():
    with pytest.raises(ValueError):
        ModuleProperties(monotonicity=[(("S",), (), ("R",), "sideways")])
    props = ModuleProperties(totality=[("S", "E")], monotonicity=[(("S",), ("E",), ("R",), "monotone")])
    assert props.is_total_on(["S"]) and not props.is_total_on(["S", "Z"])
    with pytest.raises(ValueError):
        props.check(Vocabulary.of(S=1, R=1))
