"""All-different over the graph of an assignment ``graph(key, value)``."""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

from ..oracle import ACCEPT, DEFAULT_ADVICE_BUDGET, Oracle, Verdict, reject
from ..reasons import Advice
from ..structures import GroundLiteral, PartialStructure, Structure, Symbol, Vocabulary, _coerce


class AllDifferentModule(Oracle):
    """Members: ``graph`` is a total injective function from ``keys`` into ``values``.

    Tuples outside keys x values must be false.
    """

    def __init__(self, graph: str, keys: Sequence, values: Sequence, name: str = "alldiff"):
        self.name = name
        self.graph = graph
        self.keys = list(keys)
        self.values = list(values)
        self.vocabulary = Vocabulary([Symbol(graph, 2)])

    def _lit(self, k, v, positive=True):
        return GroundLiteral(self.graph, (k, v), positive)

    def member(self, s: Structure) -> bool:
        rel = s[self.graph]
        keys, values = set(self.keys), set(self.values)
        if any(k not in keys or v not in values for k, v in rel):
            return False
        image = {}
        for k, v in rel:
            if k in image:
                return False
            image[k] = v
        if len(image) != len(keys):
            return False
        return len(set(image.values())) == len(image)

    def accept(self, b: PartialStructure) -> Verdict:
        pos = b.pos.get(self.graph, frozenset()) if self.graph in b.partial_vocab else b.total[self.graph]
        keys, values = set(self.keys), set(self.values)
        for k, v in sorted(pos, key=str):
            if k not in keys or v not in values:
                return reject([self._lit(k, v, False)])
        by_key, by_value = {}, {}
        for k, v in sorted(pos, key=str):
            if k in by_key:
                return reject([self._lit(k, by_key[k], False), self._lit(k, v, False)])
            by_key[k] = v
            if v in by_value:
                return reject([self._lit(by_value[v], v, False), self._lit(k, v, False)])
            by_value[v] = k
        for k in self.keys:
            if all(b.value((self.graph, (k, v))) is False for v in self.values):
                return reject([self._lit(k, v) for v in self.values])
        return ACCEPT

    def advices(self, b: PartialStructure, budget: int = DEFAULT_ADVICE_BUDGET) -> list[Advice]:
        out = []
        g = self.graph
        for k in self.keys:
            for v in self.values:
                if b.value((g, (k, v))) is not True:
                    continue
                fact = self._lit(k, v)
                for k2 in self.keys:
                    if k2 != k and b.value((g, (k2, v))) is None:
                        out.append(Advice([fact], [self._lit(k2, v, False)]))
                for v2 in self.values:
                    if v2 != v and b.value((g, (k, v2))) is None:
                        out.append(Advice([fact], [self._lit(k, v2, False)]))
        for k in self.keys:
            vals = [(v, b.value((g, (k, v)))) for v in self.values]
            unknown = [v for v, x in vals if x is None]
            if len(unknown) == 1 and all(x is False for v, x in vals if v != unknown[0]):
                out.append(Advice([self._lit(k, v, False) for v, x in vals if x is False],
                                  [self._lit(k, unknown[0])]))
        seen = []
        for a in out:
            if a not in seen:
                seen.append(a)
        return seen[:budget]


def parse_alldiff(text: str, name: str = "alldiff") -> AllDifferentModule:
    """``graph R`` / ``keys k1 k2 ...`` / ``values v1 v2 ...`` lines."""
    fields = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, *rest = line.split()
        if head not in ("graph", "keys", "values"):
            raise ValueError(f"line {lineno}: unknown directive {head!r}")
        fields[head] = [_coerce(t) for t in rest]
    missing = {"graph", "keys", "values"} - set(fields)
    if missing:
        raise ValueError(f"alldiff file lacks {sorted(missing)}")
    if len(fields["graph"]) != 1:
        raise ValueError("'graph' takes exactly one relation name")
    return AllDifferentModule(str(fields["graph"][0]), fields["keys"], fields["values"], name)


def load_alldiff(path, name: str = "alldiff") -> AllDifferentModule:
    return parse_alldiff(Path(path).read_text(), name)
