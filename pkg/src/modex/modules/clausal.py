"""Ground clausal module, with a schema loader that grounds ``?x`` variables."""

from __future__ import annotations

import itertools
import re
from pathlib import Path
from typing import Iterable

from ..oracle import ACCEPT, DEFAULT_ADVICE_BUDGET, Oracle, Verdict, reject
from ..reasons import Advice, GroundClause, _split_literals
from ..structures import Domain, GroundLiteral, PartialStructure, Structure, Symbol, Vocabulary, _coerce


class ClausalModule(Oracle):
    """Set of ground clauses; a total structure is a member iff it satisfies all of them."""

    def __init__(self, vocabulary: Vocabulary, clauses: Iterable[GroundClause], name: str = "clausal"):
        self.name = name
        self.vocabulary = vocabulary
        uniq = {}
        for c in clauses:
            if not isinstance(c, GroundClause):
                c = GroundClause(c)
            for l in c:
                if l.symbol not in vocabulary:
                    raise ValueError(f"{name}: literal {l} outside the module vocabulary")
                if len(l.args) != vocabulary.arity(l.symbol):
                    raise ValueError(f"{name}: literal {l} has wrong arity")
            if not c.tautological:
                uniq.setdefault(c, None)
        self.clauses = list(uniq)

    def accept(self, b: PartialStructure) -> Verdict:
        for c in self.clauses:
            falsified = True
            for l in c:
                v = b.literal_value(l)
                if v is not False:
                    falsified = False
                    break
            if falsified:
                return reject(c)
        return ACCEPT

    def member(self, s: Structure) -> bool:
        return all(c.satisfied_by(s) for c in self.clauses)

    def advices(self, b: PartialStructure, budget: int = DEFAULT_ADVICE_BUDGET) -> list[Advice]:
        out = []
        for c in self.clauses:
            unknown = None
            false_lits = []
            for l in c:
                v = b.literal_value(l)
                if v is True:
                    break
                if v is None:
                    if unknown is not None:
                        break
                    unknown = l
                else:
                    false_lits.append(l)
            else:
                if unknown is not None:
                    out.append(Advice([-l for l in false_lits], [unknown]))
                    if len(out) >= budget:
                        break
        return out


_VAR_RE = re.compile(r"\?[A-Za-z_]\w*")


def _ground_literal(token: str, env: dict) -> GroundLiteral:
    for var, val in env.items():
        token = re.sub(re.escape(var) + r"(?!\w)", str(val), token)
    return GroundLiteral.parse(token)


def parse_clauses(text: str, domain: Domain, name: str = "clausal") -> ClausalModule:
    """Parse the symbolic-CNF format.

    ``vocab R/1 E/2 ...`` declares the module vocabulary (may repeat).
    Every other non-empty line is a clause of space-separated literals;
    ``-`` negates. Tokens ``?x`` are variables ranging over the domain,
    and an optional trailing ``: ?x != ?y, ...`` restricts the grounding.
    """
    symbols = []
    schemas = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("vocab"):
            for tok in line.split()[1:]:
                sym, _, ar = tok.partition("/")
                if not ar:
                    raise ValueError(f"line {lineno}: vocabulary entries are NAME/ARITY")
                symbols.append(Symbol(sym, int(ar)))
            continue
        body, _, guard = line.partition(":")
        tokens = _split_literals(body)
        guards = []
        for g in filter(None, (x.strip() for x in guard.split(","))):
            m = re.fullmatch(r"(\S+)\s*(!=|=)\s*(\S+)", g)
            if not m:
                raise ValueError(f"line {lineno}: bad guard {g!r}")
            guards.append(m.groups())
        schemas.append((lineno, tokens, guards))
    voc = Vocabulary(symbols)
    clauses = []
    for lineno, tokens, guards in schemas:
        variables = sorted(set(_VAR_RE.findall(" ".join(tokens))))
        for values in itertools.product(domain.elements, repeat=len(variables)):
            env = dict(zip(variables, values))

            def val(t):
                return env[t] if t.startswith("?") else _coerce(t)

            if not all((val(a) == val(b)) == (op == "=") for a, op, b in guards):
                continue
            try:
                clauses.append(GroundClause(_ground_literal(t, env) for t in tokens))
            except ValueError as exc:
                raise ValueError(f"line {lineno}: {exc}") from None
    for c in clauses:
        for l in c:
            for a in l.args:
                if a not in domain:
                    raise ValueError(f"{name}: element {a!r} of {l} not in domain")
    return ClausalModule(voc, clauses, name)


def load_clausal(path, domain: Domain, name: str = "clausal") -> ClausalModule:
    return parse_clauses(Path(path).read_text(), domain, name)
