"""Fixpoint propagation along feedback wires of operator modules.

A module that is total on its inputs and (anti-)monotone in the fed-back
relation lets us bound that relation from below (and above) without
search. Each bound is only valid under the current partial structure, so
propagated literals are added as clauses guarded by the literals they
depend on.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable

from .reasons import GroundClause
from .structures import GroundLiteral, PartialStructure, Structure


class NonMonotoneObserved(RuntimeError):
    """An operator declared (anti-)monotone was caught violating the declaration."""


@dataclass(frozen=True)
class ModuleProperties:
    """Totality and monotonicity declarations of a module.

    ``totality`` lists symbol sets the module is total on. Each
    ``monotonicity`` entry is ``(S, tau, R, sense)`` with ``S``, ``tau``
    and ``R`` tuples of symbol names and ``sense`` either ``"monotone"``
    or ``"anti-monotone"``.
    """

    totality: tuple = ()
    monotonicity: tuple = ()

    def __init__(self, totality: Iterable = (), monotonicity: Iterable = ()):
        object.__setattr__(self, "totality", tuple(tuple(t) for t in totality))
        mono = []
        for s, tau, r, sense in monotonicity:
            if sense not in ("monotone", "anti-monotone"):
                raise ValueError(f"unknown monotonicity sense {sense!r}")
            mono.append((tuple(s), tuple(tau), tuple(r), sense))
        object.__setattr__(self, "monotonicity", tuple(mono))

    def is_total_on(self, names: Iterable[str]) -> bool:
        want = set(names)
        return any(want <= set(t) for t in self.totality)

    def sense(self, s: str, r: str):
        """``(sense, tau)`` for a declaration with input ``s`` and output ``r``, or None."""
        for ss, tau, rr, sense in self.monotonicity:
            if ss == (s,) and rr == (r,):
                return sense, tau
        return None

    def check(self, vocabulary) -> None:
        for t in self.totality:
            missing = set(t) - set(vocabulary)
            if missing:
                raise ValueError(f"totality declared over unknown symbols {sorted(missing)}")
        for s, tau, r, _ in self.monotonicity:
            for name in (*s, *tau, *r):
                if name not in vocabulary:
                    raise ValueError(f"monotonicity declared over unknown symbol {name}")
            if len(s) == len(r) == 1 and vocabulary.arity(s[0]) != vocabulary.arity(r[0]):
                raise ValueError(f"{s[0]} and {r[0]} differ in arity")


@dataclass
class FeedbackChain:
    """Record of one fixpoint computation.

    ``lower`` holds the sequence L_0, L_1, ... and ``upper`` the sequence
    U_0, U_1, ... (negative kind only). ``crossed`` is set when some L_i
    escapes U_i, which proves that no member extends the current structure.
    """

    kind: str
    module: str
    symbol: str
    lower: list = field(default_factory=list)
    upper: list = field(default_factory=list)
    crossed: bool = False
    guards: list = field(default_factory=list)
    known_pos: frozenset = frozenset()
    known_neg: frozenset = frozenset()
    universe: frozenset = frozenset()

    @property
    def lower_limit(self) -> frozenset:
        return self.lower[-1]

    @property
    def upper_limit(self) -> frozenset:
        return self.upper[-1] if self.upper else self.universe

    def lengths(self) -> tuple[int, int]:
        return len(self.lower), len(self.upper)

    def describe(self) -> str:
        lows = ",".join(str(len(x)) for x in self.lower)
        text = f"{self.module}\t{self.symbol}\t{self.kind}\tL={lows}"
        if self.kind == "negative":
            text += "\tU=" + ",".join(str(len(x)) for x in self.upper)
        if self.crossed:
            text += "\tcrossed"
        return text

    def clauses(self) -> list[GroundClause]:
        """Guarded clauses expressing the propagated literals (or the refutation)."""
        neg_guards = [-g for g in self.guards]
        if self.crossed:
            return [GroundClause(neg_guards)]
        out = []
        for t in sorted(self.lower_limit - self.known_pos, key=str):
            out.append(GroundClause(neg_guards + [GroundLiteral(self.symbol, t, True)]))
        if self.kind == "negative":
            for t in sorted(self.universe - self.upper_limit - self.known_neg, key=str):
                out.append(GroundClause(neg_guards + [GroundLiteral(self.symbol, t, False)]))
        return out


def _known(b: PartialStructure, name: str) -> tuple[frozenset, frozenset]:
    universe = frozenset(b.domain.tuples(b.vocabulary.arity(name)))
    if name in b.partial_vocab:
        return b.pos[name], b.neg[name]
    return b.total[name], universe - b.total[name]


def _tau_known(b: PartialStructure, tau: Iterable[str]) -> bool:
    for name in tau:
        if name in b.partial_vocab:
            pos, neg = _known(b, name)
            if len(pos) + len(neg) != len(b.domain) ** b.vocabulary.arity(name):
                return False
    return True


def _apply(module, b: PartialStructure, tau, s: str, value: frozenset) -> frozenset:
    rels = {}
    for name in b.vocabulary:
        if name in tau:
            rels[name] = _known(b, name)[0]
        else:
            rels[name] = frozenset()
    rels[s] = value
    return frozenset(module.operator_eval(Structure(b.domain, b.vocabulary, rels)))


def positive_fixpoint(module, fb: tuple[str, str], b: PartialStructure, tau=None) -> FeedbackChain:
    """Lower bound on the fed-back relation of a monotone operator module.

    ``fb = (S, R)`` names the input and output symbols in the module's
    vocabulary; ``b`` is over that vocabulary. The chain starts at the
    known-true tuples and grows by ``L_{i+1} = L_i | op(L_i)``.
    """
    s, r = fb
    if tau is None:
        tau = _declared_tau(module, s, r)
    universe = frozenset(b.domain.tuples(b.vocabulary.arity(s)))
    pos, neg = _known(b, s)
    chain = FeedbackChain("positive", module.name, s, [pos], [], False, [], pos, neg, universe)
    prev_image = None
    current = pos
    while True:
        image = _apply(module, b, tau, s, current)
        if prev_image is not None and not prev_image <= image:
            raise NonMonotoneObserved(f"{module.name}: operator image shrank along a growing chain")
        prev_image = image
        nxt = current | image
        if nxt == current:
            break
        chain.lower.append(nxt)
        current = nxt
        if len(chain.lower) > len(universe) + 1:
            raise NonMonotoneObserved(f"{module.name}: chain exceeded its length bound")
    return chain


def negative_fixpoint(module, fb: tuple[str, str], b: PartialStructure, tau=None) -> FeedbackChain:
    """Lower and upper bounds for an anti-monotone operator module.

    ``L_0`` is the known-true set and ``U_0`` the complement of the
    known-false set. Then ``L_{i+1} = L_i | op(U_i)`` and
    ``U_{i+1} = U_i & op(L_i)``; iteration stops when both stabilize or
    when the lower bound escapes the upper one.
    """
    s, r = fb
    if tau is None:
        tau = _declared_tau(module, s, r)
    universe = frozenset(b.domain.tuples(b.vocabulary.arity(s)))
    pos, neg = _known(b, s)
    low, up = pos, universe - neg
    chain = FeedbackChain("negative", module.name, s, [low], [up], False, [], pos, neg, universe)
    if not low <= up:
        chain.crossed = True
        return chain
    while True:
        img_up = _apply(module, b, tau, s, up)
        img_low = _apply(module, b, tau, s, low)
        if not img_up <= img_low:
            raise NonMonotoneObserved(f"{module.name}: image of the larger set is not contained "
                                      "in the image of the smaller one")
        new_low, new_up = low | img_up, up & img_low
        if new_low == low and new_up == up:
            break
        if new_low != low:
            chain.lower.append(new_low)
        if new_up != up:
            chain.upper.append(new_up)
        low, up = new_low, new_up
        if not low <= up:
            chain.crossed = True
            break
        if len(chain.lower) + len(chain.upper) > 2 * (len(universe) + 1):
            raise NonMonotoneObserved(f"{module.name}: chains exceeded their length bound")
    return chain


def _declared_tau(module, s, r):
    props = module.properties
    found = props.sense(s, r) if props is not None else None
    if found is None:
        raise ValueError(f"{module.name}: no monotonicity declared from {s} to {r}")
    return found[1]


def applicable(module, s: str, r: str, b: PartialStructure):
    """``(sense, tau)`` when a feedback from ``r`` to ``s`` can be propagated under ``b``."""
    props = getattr(module, "properties", None)
    if props is None:
        return None
    found = props.sense(s, r)
    if found is None:
        return None
    sense, tau = found
    if not props.is_total_on((*tau, s)):
        return None
    if not _tau_known(b, tau):
        return None
    return sense, tau


def feedback_chains(flat, oracles, b: PartialStructure) -> list[FeedbackChain]:
    """Chains for every applicable feedback site of a flattened system under ``b``.

    ``b`` is over the flat search vocabulary; guards and literals of the
    returned chains use flat symbol names.
    """
    out = []
    for site in flat.feedbacks:
        module = flat.module(site.module)
        oracle = oracles[site.module]
        local = flat.restrict(b, module)
        for s, r in ((site.right, site.left), (site.left, site.right)):
            found = applicable(oracle, s, r, local)
            if found is None:
                continue
            sense, tau = found
            if sense == "monotone":
                chain = positive_fixpoint(oracle, (s, r), local, tau)
            else:
                chain = negative_fixpoint(oracle, (s, r), local, tau)
            mapping = module.mapping
            chain.symbol = mapping[s]
            guards = [GroundLiteral(chain.symbol, t, True) for t in sorted(chain.known_pos, key=str)]
            if sense == "anti-monotone":
                guards += [GroundLiteral(chain.symbol, t, False) for t in sorted(chain.known_neg, key=str)]
            for name in tau:
                flat_name = mapping[name]
                if flat_name in b.partial_vocab:
                    pos, neg = _known(b, flat_name)
                    guards += [GroundLiteral(flat_name, t, True) for t in sorted(pos, key=str)]
                    guards += [GroundLiteral(flat_name, t, False) for t in sorted(neg, key=str)]
            chain.guards = guards
            out.append(chain)
            break
    return out


def propagate_feedback(add_clause: Callable[[GroundClause], None], chains: Iterable[FeedbackChain]) -> int:
    """Hand every chain's guarded clauses to ``add_clause``; return how many were added."""
    count = 0
    for chain in chains:
        for c in chain.clauses():
            add_clause(c)
            count += 1
    return count
