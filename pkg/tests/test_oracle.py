from modex.modules import ClausalModule
from modex.oracle import ACCEPT, EnumerationTooLarge, Oracle, certify_oracle, reject, total_expansions
from modex.reasons import GroundClause
from modex.structures import Domain, Structure, Vocabulary, lit

import pytest


class AcceptAll(Oracle):
    name = "yes"

    def __init__(self, inner):
        self.inner = inner
        self.vocabulary = inner.vocabulary

    def accept(self, b):
        return ACCEPT

    def member(self, s):
        return self.inner.member(s)


class RejectEmpty(Oracle):
    name = "grumpy"

    def __init__(self, inner):
        self.inner = inner
        self.vocabulary = inner.vocabulary

    def accept(self, b):
        if not b.literals():
            return reject([])
        return self.inner.accept(b)

    def member(self, s):
        return self.inner.member(s)


def test_colouring_certifies_clean(k3):
    _, oracles, inst = k3
    report = certify_oracle(oracles["COL"], inst, max_probes=500)
    assert report.ok, report.summary()
    assert report.members == 6 and report.totals == 512


def test_accept_everything_violates_a(k3):
    _, oracles, inst = k3
    report = certify_oracle(AcceptAll(oracles["COL"]), inst, max_probes=10)
    assert {v.kind for v in report.violations} == {"a"}


def test_rejecting_empty_expansion_violates_c(k3):
    _, oracles, inst = k3
    report = certify_oracle(RejectEmpty(oracles["COL"]), inst, max_probes=300, seed=1)
    assert "c" in {v.kind for v in report.violations}


def test_bad_reason_violates_d():
    class CutsMembers(Oracle):
        name = "cut"
        vocabulary = Vocabulary.of(P=0)

        def accept(self, b):
            return reject([lit("-P")]) if b.value(("P", ())) else ACCEPT

        def member(self, s):
            return True

    report = certify_oracle(CutsMembers(), Structure(Domain([0]), Vocabulary(), {}), max_probes=5)
    assert "d" in {v.kind for v in report.violations}


def test_enumeration_guard():
    inst = Structure(Domain(range(5)), Vocabulary(), {})
    with pytest.raises(EnumerationTooLarge):
        next(total_expansions(inst, Vocabulary.of(E=2), cap=1 << 20))
