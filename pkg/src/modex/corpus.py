"""Deterministic generator of small random modular systems.

Each system has at most four domain elements, at most three modules and at
most one feedback, and few enough free atoms that brute-force enumeration
stays cheap. Used by the test suite and the corpus demo.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from .algebra import Compose, Feedback, Intersect, Primitive, Project, flatten, to_text, visible_vocab
from .modules import AllDifferentModule, BoundedILAModule, ClausalModule, MonotoneRuleModule
from .modules.ila import LinearConstraint
from .modules.rules import parse_rules
from .reasons import GroundClause
from .structures import Domain, GroundLiteral, Structure, Symbol, Vocabulary, iter_atoms


@dataclass
class MicroSystem:
    name: str
    expr: object
    oracles: dict
    instance: Structure

    def flat(self):
        return flatten(self.expr, {n: o.vocabulary for n, o in self.oracles.items()})

    @property
    def text(self) -> str:
        return to_text(self.expr)

    def free_atoms(self) -> int:
        flat = self.flat().with_instance(self.instance.vocabulary)
        return sum(1 for _ in iter_atoms(self.instance.domain, flat.expansion_vocab))


def _clausal(rng, domain, name, edges: bool) -> ClausalModule:
    syms = [Symbol("P", 1), Symbol("Q", 1)]
    if edges:
        syms.append(Symbol("E", 2))
    atoms = [("P", (x,)) for x in domain] + [("Q", (x,)) for x in domain]
    clauses = []
    for _ in range(rng.randint(1, 5)):
        width = rng.randint(1, 3)
        lits = [GroundLiteral(*rng.choice(atoms), rng.random() < 0.5) for _ in range(width)]
        if edges and rng.random() < 0.4:
            x, y = rng.choice(domain.elements), rng.choice(domain.elements)
            lits.append(GroundLiteral("E", (x, y), rng.random() < 0.5))
        clauses.append(GroundClause(lits))
    return ClausalModule(Vocabulary(syms), clauses, name)


def _ila(rng, domain, name) -> BoundedILAModule:
    variables = {"x": (0, rng.randint(1, 3)), "y": (0, rng.randint(1, 3))}
    atoms = {}
    for e in domain:
        a, b = rng.randint(-2, 2), rng.randint(-2, 2)
        if a == b == 0:
            a = 1
        op = rng.choice(["<=", ">=", "="])
        rhs = rng.randint(-1, 4)
        coefs = tuple((v, Fraction(c)) for v, c in (("x", a), ("y", b)) if c)
        atoms[("P", (e,))] = LinearConstraint(coefs, op, Fraction(rhs), f"{a}*x + {b}*y {op} {rhs}")
    return BoundedILAModule(variables, atoms, name=name)


def _alldiff(rng, domain, name) -> AllDifferentModule:
    elems = list(domain)
    keys = rng.sample(elems, rng.randint(1, len(elems)))
    return AllDifferentModule("G", sorted(keys, key=domain.index), elems, name)


_RULES = {
    "reach": "input S\noutput R\nvocab E/2 P/1\nR(X) <- P(X).\nR(Y) <- S(X), E(X,Y).\n",
    "guarded": "input S\noutput R\nvocab E/2 P/1\nR(Y) <- S(X), E(X,Y), P(Y).\nR(X) <- Q(X).\nvocab Q/1\n",
    "anti": "input S\noutput R\nvocab E/2 P/1\nR(Y) <- P(Y), not S(X), E(X,Y).\n",
    "anti-self": "input S\noutput R\nvocab P/1\nR(X) <- P(X), not S(X).\n",
}


def _rules(rng, name) -> MonotoneRuleModule:
    kind = rng.choice(sorted(_RULES))
    rules, d = parse_rules(_RULES[kind])
    return MonotoneRuleModule(rules, Vocabulary(d["vocab"]), d["input"], d["output"], name)


def _combine(rng, parts, vocabularies):
    expr = parts[0]
    for p in parts[1:]:
        expr = (Intersect if rng.random() < 0.5 else Compose)(expr, p)
    if rng.random() < 0.3:
        names = sorted(visible_vocab(expr, vocabularies))
        keep = rng.sample(names, rng.randint(1, len(names)))
        expr = Project(tuple(sorted(keep)), expr)
    return expr


def micro_system(seed: int, max_free_atoms: int = 12) -> MicroSystem:
    """The system for ``seed``; retries internally until the atom budget fits."""
    rng = random.Random(seed)
    while True:
        n = rng.choice([2, 2, 3, 3, 4])
        domain = Domain(range(n))
        edges = {(x, y) for x in domain for y in domain if rng.random() < 0.35}
        instance = Structure(domain, Vocabulary.of(E=2), {"E": edges})
        count = rng.randint(1, 3)
        kinds = [rng.choice(["clausal", "clausal", "ila", "alldiff", "rules"]) for _ in range(count)]
        if kinds.count("rules") > 1:
            continue
        oracles, parts = {}, []
        for i, kind in enumerate(kinds):
            name = f"{kind[:2].upper()}{i}"
            if kind == "clausal":
                o = _clausal(rng, domain, name, edges=rng.random() < 0.5)
            elif kind == "ila":
                o = _ila(rng, domain, name)
            elif kind == "alldiff":
                o = _alldiff(rng, domain, name)
            else:
                o = _rules(rng, name)
            oracles[name] = o
            part = Primitive(name)
            if kind == "rules":
                part = Feedback(part, "R", "S")
            parts.append(part)
        expr = _combine(rng, parts, {k: o.vocabulary for k, o in oracles.items()})
        sigma = [s for s in instance.vocabulary if any(s in o.vocabulary for o in oracles.values())]
        system = MicroSystem(f"micro-{seed}", expr, oracles, instance.restrict(sigma))
        try:
            if system.free_atoms() <= max_free_atoms:
                return system
        except ValueError:
            continue


def micro_corpus(count: int = 60, start: int = 0) -> list[MicroSystem]:
    return [micro_system(seed) for seed in range(start, start + count)]


_REACH = "input S\noutput R\nvocab E/2 src/1\nR(X) <- src(X).\nR(Y) <- S(X), E(X,Y).\n"
_CLOSURE = "input S\noutput T\nvocab E/2\nT(X,Y) <- E(X,Y).\nT(X,Z) <- S(X,Y), E(Y,Z).\n"


def closure_system(seed: int) -> MicroSystem:
    """Monotone rules with positive feedback, intersected with a few random side clauses.

    Every fourth seed gives the binary transitive closure on 4 nodes; the
    rest give unary reachability on 4 to 6 nodes.
    """
    rng = random.Random(seed)
    binary = seed % 4 == 3
    n = 4 if binary else rng.randint(4, 6)
    domain = Domain(range(n))
    edges = {(x, y) for x in domain for y in domain if x != y and rng.random() < 0.3}
    rels = {"E": edges}
    if binary:
        rules, d = parse_rules(_CLOSURE)
        out = "T"
        atoms = [("T", (x, y)) for x in domain for y in domain]
    else:
        rules, d = parse_rules(_REACH)
        out = "R"
        rels["src"] = {(rng.choice(domain.elements),)}
        atoms = [("R", (x,)) for x in domain]
    closure = MonotoneRuleModule(rules, Vocabulary(d["vocab"]), d["input"], d["output"], "CL")
    side = [GroundClause(GroundLiteral(*rng.choice(atoms), rng.random() < 0.3)
                         for _ in range(rng.randint(1, 2))) for _ in range(rng.randint(1, 3))]
    guard = ClausalModule(Vocabulary([Symbol(out, 2 if binary else 1)]), side, "SIDE")
    expr = Intersect(Feedback(Primitive("CL"), out, "S"), Primitive("SIDE"))
    instance = Structure(domain, closure.vocabulary.restrict(rels), rels)
    return MicroSystem(f"closure-{seed}", expr, {"CL": closure, "SIDE": guard}, instance)


def closure_family(count: int = 30, start: int = 0) -> list[MicroSystem]:
    return [closure_system(seed) for seed in range(start, start + count)]
