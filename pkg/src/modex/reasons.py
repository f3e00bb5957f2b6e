"""Ground clauses: the shared language of reasons and advices."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .structures import GroundLiteral, PartialStructure, Structure, Truth, evaluate


@dataclass(frozen=True)
class GroundClause:
    """A disjunction of ground literals, duplicates removed, order canonical."""

    literals: tuple

    def __init__(self, literals: Iterable[GroundLiteral] = ()):
        uniq = sorted(set(literals), key=GroundLiteral.sort_key)
        object.__setattr__(self, "literals", tuple(uniq))

    def __iter__(self):
        return iter(self.literals)

    def __len__(self):
        return len(self.literals)

    @property
    def tautological(self) -> bool:
        lits = set(self.literals)
        return any(-l in lits for l in lits)

    def rename(self, mapping) -> "GroundClause":
        """Rename symbols through ``mapping`` (dict or callable)."""
        f = mapping if callable(mapping) else (lambda s: mapping.get(s, s))
        return GroundClause(GroundLiteral(f(l.symbol), l.args, l.positive) for l in self.literals)

    def satisfied_by(self, structure: Structure) -> bool:
        return any(structure.holds(l.atom) == l.positive for l in self.literals)

    def __str__(self):
        return " ".join(str(l) for l in self.literals) if self.literals else "[]"

    @classmethod
    def parse(cls, text: str) -> "GroundClause":
        text = text.strip()
        if text in ("", "[]"):
            return cls()
        return cls(GroundLiteral.parse(t) for t in _split_literals(text))


def _split_literals(text: str) -> list[str]:
    out, depth, cur = [], 0, []
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch.isspace() and depth == 0:
            if cur:
                out.append("".join(cur))
                cur = []
            continue
        cur.append(ch)
    if cur:
        out.append("".join(cur))
    return [t for t in out if t not in ("|", "v", "∨")]


def clause(*literals) -> GroundClause:
    """Shorthand: ``clause("R(a)", "-B(a)")``."""
    return GroundClause(l if isinstance(l, GroundLiteral) else GroundLiteral.parse(l) for l in literals)


@dataclass(frozen=True)
class Advice:
    """Implication ``pre`` (conjunction) -> ``post`` (clause)."""

    pre: tuple
    post: GroundClause

    def __init__(self, pre: Iterable[GroundLiteral], post):
        object.__setattr__(self, "pre", tuple(sorted(set(pre), key=GroundLiteral.sort_key)))
        if not isinstance(post, GroundClause):
            post = GroundClause(post)
        object.__setattr__(self, "post", post)

    def to_clause(self) -> GroundClause:
        return advice_to_clause(self)

    def rename(self, mapping) -> "Advice":
        f = mapping if callable(mapping) else (lambda s: mapping.get(s, s))
        return Advice((GroundLiteral(f(l.symbol), l.args, l.positive) for l in self.pre),
                      self.post.rename(f))

    def __str__(self):
        pre = " ".join(str(l) for l in self.pre)
        return f"{pre} -> {self.post}" if pre else f"-> {self.post}"


@dataclass(frozen=True)
class Reason:
    clause: GroundClause
    origin: str = ""

    def __str__(self):
        return format_reason(self.origin, self.clause)


def advice_to_clause(advice: Advice) -> GroundClause:
    return GroundClause([-l for l in advice.pre] + list(advice.post.literals))


def advice_holds(advice: Advice, structure: Structure) -> bool:
    if not all(structure.holds(l.atom) == l.positive for l in advice.pre):
        return True
    return advice.post.satisfied_by(structure)


def check_advice_valid(advice: Advice, b: PartialStructure, totals: Iterable[Structure]) -> bool:
    """All three conditions for an advice wrt ``b`` and the module's totals."""
    if not all(b.literal_value(l) is True for l in advice.pre):
        return False
    if evaluate(b, advice.post) is not Truth.UNKNOWN:
        return False
    return all(advice_holds(advice, t) for t in totals)


def format_reason(module: str, c: GroundClause) -> str:
    return f"{module} : {c}"


def parse_reason(text: str) -> tuple[str, GroundClause]:
    """Inverse of :func:`format_reason` (the text after the ``reason`` keyword)."""
    module, _, rest = text.partition(" : ")
    return module.strip(), GroundClause.parse(rest)
