"""Oracle contract for modules and a brute-force certifier for it."""

from __future__ import annotations

import itertools
import random
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Iterable

from .reasons import Advice, GroundClause, advice_holds
from .structures import (GroundLiteral, PartialStructure, Structure, Truth, Vocabulary, evaluate,
                         iter_atoms)

DEFAULT_ADVICE_BUDGET = 64


class EnumerationTooLarge(RuntimeError):
    pass


class MisbehavingOracle(RuntimeError):
    pass


@dataclass(frozen=True)
class Verdict:
    accepted: bool
    reason: GroundClause | None = None

    def __bool__(self):
        return self.accepted


ACCEPT = Verdict(True)


def reject(reason: GroundClause | Iterable[GroundLiteral]) -> Verdict:
    if not isinstance(reason, GroundClause):
        reason = GroundClause(reason)
    return Verdict(False, reason)


class Oracle(ABC):
    """A module exposed through accept/advise calls.

    Subclasses see only partial structures over their own ``vocabulary``.
    ``member`` decides membership of a total structure directly from the
    module's definition; certification compares it against ``accept``.
    """

    name: str = "module"
    vocabulary: Vocabulary
    properties = None

    @abstractmethod
    def accept(self, b: PartialStructure) -> Verdict:
        ...

    def advices(self, b: PartialStructure, budget: int = DEFAULT_ADVICE_BUDGET) -> list[Advice]:
        return []

    def member(self, s: Structure) -> bool:
        b = PartialStructure.from_structure(s)
        return self.accept(b).accepted

    def operator_eval(self, inputs: Structure) -> frozenset:
        raise NotImplementedError(f"{type(self).__name__} is not an operator module")


# ---------------------------------------------------------------- certification

@dataclass
class Violation:
    kind: str
    detail: str

    def __str__(self):
        return f"[{self.kind}] {self.detail}"


VIOLATION_KINDS = {
    "a": "total accepted but not a member",
    "b": "member total rejected",
    "c": "good partial rejected",
    "d": "reason not falsified by the rejected structure or violated by an accepted total",
    "e": "invalid advice",
}


@dataclass
class CertificationReport:
    module: str
    totals: int = 0
    members: int = 0
    probes: int = 0
    good_probes: int = 0
    rejections: int = 0
    advices: int = 0
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def summary(self) -> str:
        head = (f"certify {self.module}: totals={self.totals} members={self.members} "
                f"probes={self.probes} good={self.good_probes} rejections={self.rejections} "
                f"advices={self.advices} violations={len(self.violations)}")
        return "\n".join([head] + [f"  {v}" for v in self.violations[:20]])


def _clause_holds(c, true_atoms: frozenset) -> bool:
    return any((l.atom in true_atoms) == l.positive for l in c)


def total_expansions(instance: Structure, vocabulary: Vocabulary, cap: int = 1 << 20):
    """All total structures over ``vocabulary`` agreeing with ``instance`` on shared symbols.

    Yields ``(structure, true_atoms)`` pairs in a fixed order.
    """
    fixed = [n for n in vocabulary if n in instance.vocabulary]
    free = vocabulary.without(fixed)
    atoms = list(iter_atoms(instance.domain, free))
    if 2 ** len(atoms) > cap:
        raise EnumerationTooLarge(f"{len(atoms)} free atoms exceed the enumeration cap {cap}")
    base = {n: instance[n] for n in fixed}
    base_atoms = frozenset((n, t) for n in fixed for t in instance[n])
    for bits in itertools.product((False, True), repeat=len(atoms)):
        rels = {n: set() for n in free}
        true_atoms = set(base_atoms)
        for (n, t), v in zip(atoms, bits):
            if v:
                rels[n].add(t)
                true_atoms.add((n, t))
        rels.update(base)
        yield Structure(instance.domain, vocabulary, rels), frozenset(true_atoms)


def certify_oracle(oracle: Oracle, instance: Structure, max_probes: int = 1000, seed: int = 0,
                   members=None, cap: int = 1 << 20, check_advices: bool = True) -> CertificationReport:
    """Check ``oracle`` against the module's own structure set on one instance.

    Totals are checked exhaustively; ``max_probes`` random partial structures
    are sampled. ``members`` may supply a membership predicate other than
    ``oracle.member``.
    """
    member = members or oracle.member
    voc = oracle.vocabulary
    fixed = [n for n in voc if n in instance.vocabulary]
    free = voc.without(fixed)
    report = CertificationReport(getattr(oracle, "name", type(oracle).__name__))

    totals = list(total_expansions(instance, voc, cap))
    report.totals = len(totals)
    member_sets, accepted_sets = [], []
    rejected_totals = []
    for s, true_atoms in totals:
        b = PartialStructure.from_structure(s, free)
        is_member = member(s)
        verdict = oracle.accept(b)
        if is_member:
            member_sets.append(true_atoms)
        if verdict.accepted:
            accepted_sets.append(true_atoms)
            if not is_member:
                report.violations.append(Violation("a", f"accepted non-member {s}"))
        else:
            report.rejections += 1
            rejected_totals.append((b, verdict.reason))
            if is_member:
                report.violations.append(Violation("b", f"rejected member {s}"))
        if check_advices:
            for adv in oracle.advices(b):
                report.advices += 1
                report.violations.append(Violation("e", f"advice {adv} on a total structure"))
    report.members = len(member_sets)

    # Validity of a clause against every accepted or member total depends only
    # on the clause, so each distinct reason or advice is checked once.
    all_good = list(dict.fromkeys(accepted_sets + member_sets))
    memo: dict = {}

    def holds_everywhere(clause, sets) -> bool:
        key = (clause, sets is member_sets)
        if key not in memo:
            lits = clause.to_clause() if isinstance(clause, Advice) else clause
            memo[key] = all(_clause_holds(lits, t) for t in sets)
        return memo[key]

    def check_reason(b, reason):
        if reason is None or evaluate(b, reason) is not Truth.FALSIFIED:
            report.violations.append(Violation("d", f"reason {reason} not falsified by {b}"))
            return
        if not holds_everywhere(reason, all_good):
            report.violations.append(Violation("d", f"reason {reason} cuts an accepted total"))

    for b, reason in rejected_totals:
        check_reason(b, reason)

    rng = random.Random(seed)
    free_atoms = list(iter_atoms(instance.domain, free))
    all_sets = [t for _, t in totals]
    member_bits = [sum(1 << i for i, a in enumerate(free_atoms) if a in m) for m in member_sets]
    for _ in range(max_probes):
        if member_sets and rng.random() < 0.5:
            base = rng.choice(member_sets)
        else:
            base = rng.choice(all_sets)
        keep = rng.random()
        pos, neg = {}, {}
        mask = value = 0
        for i, atom in enumerate(free_atoms):
            if rng.random() < keep:
                v = atom in base
                (pos if v else neg).setdefault(atom[0], set()).add(atom[1])
                mask |= 1 << i
                value |= v << i
        b = PartialStructure(instance.domain, voc, {n: instance[n] for n in fixed}, pos, neg, free.keys())
        report.probes += 1
        good = any(m & mask == value for m in member_bits)
        report.good_probes += good
        verdict = oracle.accept(b)
        if not verdict.accepted:
            report.rejections += 1
            if good:
                report.violations.append(Violation("c", f"rejected good partial {b}"))
            check_reason(b, verdict.reason)
        if check_advices:
            for adv in oracle.advices(b):
                report.advices += 1
                if not all(b.literal_value(l) is True for l in adv.pre) or \
                        evaluate(b, adv.post) is not Truth.UNKNOWN:
                    report.violations.append(Violation("e", f"advice {adv} malformed for {b}"))
                elif not holds_everywhere(adv, member_sets):
                    report.violations.append(Violation("e", f"advice {adv} violated by a member"))
    return report


__all__ = ["ACCEPT", "Oracle", "Verdict", "reject", "certify_oracle", "CertificationReport",
           "Violation", "EnumerationTooLarge", "MisbehavingOracle", "total_expansions",
           "advice_holds", "DEFAULT_ADVICE_BUDGET"]
