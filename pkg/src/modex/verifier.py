"""Brute-force ground truth: enumerate every total expansion and test membership.

By default membership is decided by each module's ``member`` method, which
reads the module's definition directly rather than going through its
acceptance procedure. Passing ``semantics="oracle"`` uses the oracles'
``accept`` on totals instead.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Mapping

from .algebra import FlatSystem, accepts_total
from .oracle import EnumerationTooLarge
from .structures import Structure, iter_atoms

DEFAULT_CAP = 1 << 22


def enumerate_witnesses(flat: FlatSystem, oracles: Mapping[str, object], instance: Structure,
                        cap: int = DEFAULT_CAP, semantics: str = "member") -> list[Structure]:
    """All totals over the search vocabulary that expand ``instance`` and belong to the system."""
    flat = flat.with_instance(instance.vocabulary)
    eps = flat.expansion_vocab
    atoms = list(iter_atoms(instance.domain, eps))
    if 2 ** len(atoms) > cap:
        raise EnumerationTooLarge(f"{2 ** len(atoms)} totals exceed the cap {cap}")
    if semantics not in ("member", "oracle"):
        raise ValueError(f"unknown semantics {semantics!r}")
    base = {n: instance[n] for n in instance.vocabulary}
    out = []
    for bits in itertools.product((False, True), repeat=len(atoms)):
        rels = {n: set() for n in eps}
        for (n, t), v in zip(atoms, bits):
            if v:
                rels[n].add(t)
        rels.update(base)
        s = Structure(instance.domain, flat.search_vocab, rels)
        if semantics == "oracle":
            ok = accepts_total(flat, oracles, s)
        else:
            ok = all(oracles[m.name].member(flat.restrict_total(s, m)) for m in flat.modules)
        if ok:
            out.append(s)
    return out


def project(flat: FlatSystem, witnesses) -> list[Structure]:
    """Distinct restrictions to the output vocabulary, first-seen order."""
    seen = {}
    for w in witnesses:
        seen.setdefault(w.restrict(flat.output_vocab), None)
    return list(seen)


def enumerate_solutions(flat: FlatSystem, oracles: Mapping[str, object], instance: Structure,
                        cap: int = DEFAULT_CAP, semantics: str = "member") -> list[Structure]:
    """The system's solutions for ``instance``, projected to the output vocabulary."""
    return project(flat, enumerate_witnesses(flat, oracles, instance, cap, semantics))


@dataclass
class CrossCheckReport:
    agree: bool
    witness_ok: bool
    engine_status: str
    solutions: int
    problems: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.agree and self.witness_ok

    def __str__(self):
        head = f"engine={self.engine_status} solutions={self.solutions} " \
               f"{'agree' if self.ok else 'DISAGREE'}"
        return "\n".join([head] + [f"  {p}" for p in self.problems])


def cross_check(outcome, witnesses) -> CrossCheckReport:
    """Compare an engine outcome with a brute-force list of (unprojected) witnesses."""
    witnesses = list(witnesses)
    problems = []
    found = outcome.status == "model"
    agree = found == bool(witnesses) or outcome.status == "resource-out"
    if outcome.status == "resource-out":
        problems.append(f"engine ran out of {outcome.kind}")
        agree = False
    elif not agree:
        problems.append("engine found a model but enumeration is empty" if found
                        else "engine reported UNSAT but solutions exist")
    witness_ok = True
    if found and outcome.witness not in witnesses:
        witness_ok = False
        problems.append("engine witness is not among the enumerated solutions")
    return CrossCheckReport(agree, witness_ok, outcome.status, len(witnesses), problems)
