"""Finite domains, vocabularies, total and three-valued partial structures."""

from __future__ import annotations

import enum
import itertools
import re
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping


class VocabularyClash(ValueError):
    pass


class Contradiction(ValueError):
    pass


class IncomparableStructures(ValueError):
    pass


class Truth(enum.Enum):
    SATISFIED = "satisfied"
    FALSIFIED = "falsified"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class Domain:
    elements: tuple

    def __init__(self, elements: Iterable):
        elements = tuple(elements)
        if not elements:
            raise ValueError("domain must be non-empty")
        if len(set(elements)) != len(elements):
            raise ValueError("domain elements must be distinct")
        object.__setattr__(self, "elements", elements)
        object.__setattr__(self, "_index", {e: i for i, e in enumerate(elements)})

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __contains__(self, item):
        return item in self._index

    def index(self, element) -> int:
        return self._index[element]

    def key(self, tup: tuple) -> tuple:
        """Sort key ordering tuples lexicographically by element index."""
        return tuple(self._index[e] for e in tup)

    def tuples(self, arity: int) -> list[tuple]:
        return list(itertools.product(self.elements, repeat=arity))


@dataclass(frozen=True, order=True)
class Symbol:
    name: str
    arity: int
    kind: str = "relation"

    def __post_init__(self):
        if self.arity < 0:
            raise ValueError(f"negative arity for {self.name}")
        if self.kind not in ("relation", "function"):
            raise ValueError(f"unknown symbol kind {self.kind!r}")

    def __str__(self):
        return f"{self.name}/{self.arity}"


class Vocabulary(Mapping):
    """Immutable name -> Symbol map."""

    def __init__(self, symbols: Iterable[Symbol] = ()):
        table: dict[str, Symbol] = {}
        for s in symbols:
            if s.name in table and table[s.name] != s:
                raise VocabularyClash(f"symbol {s.name} declared twice with different signatures")
            table[s.name] = s
        self._table = dict(sorted(table.items()))

    @classmethod
    def of(cls, **arities: int) -> "Vocabulary":
        return cls(Symbol(n, a) for n, a in arities.items())

    def __getitem__(self, name):
        return self._table[name]

    def __iter__(self):
        return iter(self._table)

    def __len__(self):
        return len(self._table)

    def __hash__(self):
        return hash(tuple(self._table.values()))

    def __eq__(self, other):
        if isinstance(other, Vocabulary):
            return self._table == other._table
        return NotImplemented

    def __repr__(self):
        return "Vocabulary(" + ", ".join(str(s) for s in self._table.values()) + ")"

    def symbols(self) -> list[Symbol]:
        return list(self._table.values())

    def arity(self, name: str) -> int:
        return self._table[name].arity

    def union(self, other: "Vocabulary") -> "Vocabulary":
        return Vocabulary(itertools.chain(self.symbols(), other.symbols()))

    def restrict(self, names: Iterable[str]) -> "Vocabulary":
        names = set(names)
        return Vocabulary(s for s in self.symbols() if s.name in names)

    def without(self, names: Iterable[str]) -> "Vocabulary":
        names = set(names)
        return Vocabulary(s for s in self.symbols() if s.name not in names)


_LIT_RE = re.compile(r"^\s*(-|~|¬)?\s*([A-Za-z_][\w'~#]*)\s*(?:\((.*)\))?\s*$")


def _coerce(token: str):
    token = token.strip()
    if re.fullmatch(r"-?\d+", token):
        return int(token)
    return token


@dataclass(frozen=True)
class GroundLiteral:
    symbol: str
    args: tuple
    positive: bool = True

    @property
    def atom(self) -> tuple:
        return (self.symbol, self.args)

    def __neg__(self) -> "GroundLiteral":
        return GroundLiteral(self.symbol, self.args, not self.positive)

    def __str__(self):
        body = self.symbol
        if self.args:
            body += "(" + ",".join(str(a) for a in self.args) + ")"
        return body if self.positive else "-" + body

    def sort_key(self):
        return (self.symbol, tuple(str(a) for a in self.args), not self.positive)

    @classmethod
    def parse(cls, text: str) -> "GroundLiteral":
        m = _LIT_RE.match(text)
        if not m:
            raise ValueError(f"cannot parse literal {text!r}")
        neg, name, args = m.groups()
        tup = tuple(_coerce(a) for a in args.split(",")) if args and args.strip() else ()
        return cls(name, tup, neg is None)


def lit(text: str) -> GroundLiteral:
    return GroundLiteral.parse(text)


class Structure:
    """A total structure: every symbol interpreted by a set of tuples."""

    def __init__(self, domain: Domain, vocabulary: Vocabulary, relations: Mapping[str, Iterable[tuple]]):
        self.domain = domain
        self.vocabulary = vocabulary
        rels = {}
        for name in vocabulary:
            tuples = frozenset(tuple(t) for t in relations.get(name, ()))
            n = vocabulary.arity(name)
            for t in tuples:
                if len(t) != n or any(e not in domain for e in t):
                    raise ValueError(f"bad tuple {t} for {name}/{n}")
            rels[name] = tuples
        extra = set(relations) - set(vocabulary)
        if extra:
            raise VocabularyClash(f"relations outside vocabulary: {sorted(extra)}")
        self.relations = rels

    def __getitem__(self, name) -> frozenset:
        return self.relations[name]

    def holds(self, atom: tuple) -> bool:
        return atom[1] in self.relations[atom[0]]

    def restrict(self, names: Iterable[str]) -> "Structure":
        voc = self.vocabulary.restrict(names)
        return Structure(self.domain, voc, {n: self.relations[n] for n in voc})

    def expand(self, vocabulary: Vocabulary, relations: Mapping[str, Iterable[tuple]]) -> "Structure":
        clash = set(vocabulary) & set(self.vocabulary)
        if clash:
            raise VocabularyClash(f"expansion overlaps structure: {sorted(clash)}")
        rels = dict(self.relations)
        rels.update(relations)
        return Structure(self.domain, self.vocabulary.union(vocabulary), rels)

    def _key(self):
        return (self.domain.elements, tuple(self.vocabulary.symbols()),
                tuple((n, frozenset(v)) for n, v in self.relations.items()))

    def __eq__(self, other):
        return isinstance(other, Structure) and self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def sorted_tuples(self, name: str) -> list[tuple]:
        return sorted(self.relations[name], key=self.domain.key)

    def __repr__(self):
        parts = []
        for n in self.vocabulary:
            parts.append(f"{n}={self.sorted_tuples(n)}")
        return "Structure(" + ", ".join(parts) + ")"


class PartialStructure:
    """Structure whose partial-vocabulary symbols are three-valued.

    Symbols outside ``partial_vocab`` are interpreted totally (``total``);
    each partial symbol R carries disjoint sets ``pos[R]`` (R+) and ``neg[R]`` (R-).
    Values are never mutated; :meth:`extend` returns a fresh object.
    """

    __slots__ = ("domain", "vocabulary", "partial_vocab", "total", "pos", "neg")

    def __init__(self, domain: Domain, vocabulary: Vocabulary, total: Mapping[str, Iterable[tuple]],
                 pos: Mapping[str, Iterable[tuple]] | None = None,
                 neg: Mapping[str, Iterable[tuple]] | None = None,
                 partial_vocab: Iterable[str] | None = None):
        pos = pos or {}
        neg = neg or {}
        if partial_vocab is None:
            partial_vocab = set(vocabulary) - set(total)
        partial_vocab = frozenset(partial_vocab)
        if not partial_vocab <= set(vocabulary):
            raise VocabularyClash("partial vocabulary must be a subset of the vocabulary")
        self.domain = domain
        self.vocabulary = vocabulary
        self.partial_vocab = partial_vocab
        self.total = {n: frozenset(total.get(n, ())) for n in vocabulary if n not in partial_vocab}
        self.pos = {n: frozenset(pos.get(n, ())) for n in sorted(partial_vocab)}
        self.neg = {n: frozenset(neg.get(n, ())) for n in sorted(partial_vocab)}
        for n in partial_vocab:
            if self.pos[n] & self.neg[n]:
                raise Contradiction(f"{n}: tuples both true and false: {sorted(self.pos[n] & self.neg[n], key=str)}")

    @classmethod
    def from_structure(cls, structure: Structure, partial_vocab: Iterable[str] = ()) -> "PartialStructure":
        """View a total structure as a partial one with the given symbols three-valued but fully known."""
        partial_vocab = frozenset(partial_vocab)
        total = {n: structure[n] for n in structure.vocabulary if n not in partial_vocab}
        pos, neg = {}, {}
        for n in partial_vocab:
            universe = frozenset(structure.domain.tuples(structure.vocabulary.arity(n)))
            pos[n] = structure[n]
            neg[n] = universe - structure[n]
        return cls(structure.domain, structure.vocabulary, total, pos, neg, partial_vocab)

    def value(self, atom: tuple):
        """True/False, or None when the atom is unknown."""
        name, tup = atom
        if name in self.partial_vocab:
            if tup in self.pos[name]:
                return True
            if tup in self.neg[name]:
                return False
            return None
        return tup in self.total[name]

    def literal_value(self, literal: GroundLiteral):
        v = self.value(literal.atom)
        if v is None:
            return None
        return v == literal.positive

    def extend(self, literal: GroundLiteral) -> "PartialStructure":
        name, tup = literal.atom
        if name not in self.partial_vocab:
            raise VocabularyClash(f"{name} is not in the partial vocabulary")
        current = self.value(literal.atom)
        if current is not None:
            if current == literal.positive:
                return self
            raise Contradiction(f"{literal} contradicts the structure")
        pos = dict(self.pos)
        neg = dict(self.neg)
        if literal.positive:
            pos[name] = pos[name] | {tup}
        else:
            neg[name] = neg[name] | {tup}
        return PartialStructure(self.domain, self.vocabulary, self.total, pos, neg, self.partial_vocab)

    def extend_all(self, literals: Iterable[GroundLiteral]) -> "PartialStructure":
        b = self
        for l in literals:
            b = b.extend(l)
        return b

    def is_total(self) -> bool:
        for n in self.partial_vocab:
            size = len(self.domain) ** self.vocabulary.arity(n)
            if len(self.pos[n]) + len(self.neg[n]) != size:
                return False
        return True

    def unknown_atoms(self) -> list[tuple]:
        out = []
        for n in sorted(self.partial_vocab):
            for t in self.domain.tuples(self.vocabulary.arity(n)):
                if t not in self.pos[n] and t not in self.neg[n]:
                    out.append((n, t))
        return out

    def literals(self) -> list[GroundLiteral]:
        """Known literals of the partial vocabulary, in deterministic order."""
        out = []
        for n in sorted(self.partial_vocab):
            for t in sorted(self.pos[n], key=self.domain.key):
                out.append(GroundLiteral(n, t, True))
            for t in sorted(self.neg[n], key=self.domain.key):
                out.append(GroundLiteral(n, t, False))
        return out

    def to_structure(self) -> Structure:
        if not self.is_total():
            raise ValueError("partial structure is not total")
        rels = dict(self.total)
        rels.update(self.pos)
        return Structure(self.domain, self.vocabulary, rels)

    def _key(self):
        return (self.domain.elements, tuple(self.vocabulary.symbols()), self.partial_vocab,
                tuple(sorted(self.total.items())), tuple(sorted(self.pos.items())),
                tuple(sorted(self.neg.items())))

    def __eq__(self, other):
        return isinstance(other, PartialStructure) and self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __repr__(self):
        known = " ".join(str(l) for l in self.literals())
        return f"PartialStructure({known or 'empty'})"


def empty_expansion(instance: Structure, expansion: Vocabulary) -> PartialStructure:
    clash = set(instance.vocabulary) & set(expansion)
    if clash:
        raise VocabularyClash(f"instance and expansion vocabularies overlap: {sorted(clash)}")
    voc = instance.vocabulary.union(expansion)
    return PartialStructure(instance.domain, voc, instance.relations, partial_vocab=set(expansion))


def extends(b2: PartialStructure, b1: PartialStructure) -> bool:
    """True iff ``b2`` has at least the information of ``b1``."""
    if b1.domain != b2.domain or b1.vocabulary != b2.vocabulary:
        raise IncomparableStructures("different domain or vocabulary")
    for n in b1.vocabulary:
        if n in b1.partial_vocab:
            pos1, neg1 = b1.pos[n], b1.neg[n]
        else:
            pos1 = b1.total[n]
            neg1 = None
        if n in b2.partial_vocab:
            pos2, neg2 = b2.pos[n], b2.neg[n]
        else:
            pos2 = b2.total[n]
            neg2 = None
        if neg1 is None and neg2 is None:
            if pos1 != pos2:
                return False
            continue
        if neg1 is None:
            # b1 total on n, b2 partial: b2 must be fully known and agree
            universe = frozenset(b1.domain.tuples(b1.vocabulary.arity(n)))
            if pos2 != pos1 or neg2 != universe - pos1:
                return False
            continue
        if not pos1 <= pos2:
            return False
        if neg2 is None:
            if pos2 & neg1:
                return False
        elif not neg1 <= neg2:
            return False
    return True


def evaluate(b: PartialStructure, clause) -> Truth:
    """Three-valued evaluation of a ground clause (any iterable of literals)."""
    unknown = False
    for l in clause:
        v = b.literal_value(l)
        if v is True:
            return Truth.SATISFIED
        if v is None:
            unknown = True
    return Truth.UNKNOWN if unknown else Truth.FALSIFIED


def iter_atoms(domain: Domain, vocabulary: Vocabulary) -> Iterator[tuple]:
    for s in vocabulary.symbols():
        for t in domain.tuples(s.arity):
            yield (s.name, t)


def parse_instance(text: str) -> Structure:
    """Read the line-based instance format.

    ``domain e1 e2 ...`` first, then ``rel R a b`` per tuple. ``decl R n``
    declares a (possibly empty) relation of arity n. ``#`` starts a comment.
    """
    domain = None
    arities: dict[str, int] = {}
    tuples: dict[str, set] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, *rest = line.split()
        if head == "domain":
            if domain is not None:
                raise ValueError(f"line {lineno}: domain given twice")
            domain = Domain(_coerce(t) for t in rest)
        elif head == "decl":
            if len(rest) != 2:
                raise ValueError(f"line {lineno}: expected 'decl NAME ARITY'")
            name, n = rest[0], int(rest[1])
            if arities.setdefault(name, n) != n:
                raise ValueError(f"line {lineno}: arity mismatch for {name}")
            tuples.setdefault(name, set())
        elif head == "rel":
            if not rest:
                raise ValueError(f"line {lineno}: 'rel' needs a relation name")
            name, args = rest[0], tuple(_coerce(a) for a in rest[1:])
            if arities.setdefault(name, len(args)) != len(args):
                raise ValueError(f"line {lineno}: arity mismatch for {name}")
            if domain is None:
                raise ValueError(f"line {lineno}: 'rel' before 'domain'")
            for a in args:
                if a not in domain:
                    raise ValueError(f"line {lineno}: {a!r} not in domain")
            tuples.setdefault(name, set()).add(args)
        else:
            raise ValueError(f"line {lineno}: unknown directive {head!r}")
    if domain is None:
        raise ValueError("instance has no domain line")
    voc = Vocabulary(Symbol(n, a) for n, a in arities.items())
    return Structure(domain, voc, tuples)


def format_structure(structure: Structure, names: Iterable[str] | None = None) -> str:
    names = list(structure.vocabulary) if names is None else list(names)
    lines = ["domain " + " ".join(str(e) for e in structure.domain)]
    for n in names:
        lines.append(f"decl {n} {structure.vocabulary.arity(n)}")
    for n in names:
        for t in structure.sorted_tuples(n):
            lines.append(" ".join(["rel", n, *map(str, t)]))
    return "\n".join(lines) + "\n"
