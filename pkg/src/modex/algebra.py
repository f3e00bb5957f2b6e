"""Modular-system expressions and their flattening into module constraints.

Grammar (``|>`` is composition, ``&`` intersection, ``[A=B]`` feedback)::

    file   := decl* "system" ID ":=" expr
    decl   := "module" ID KIND STRING
    expr   := inter
    inter  := comp ("&" comp)*
    comp   := post ("|>" post)*
    post   := atom ("[" ID "=" ID "]")*
    atom   := "project" "{" [ID ("," ID)*] "}" "(" expr ")" | "(" expr ")" | ID
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Mapping

from .structures import PartialStructure, Structure, Symbol, Vocabulary, VocabularyClash


class SystemSyntaxError(ValueError):
    def __init__(self, message, line=0, column=0):
        super().__init__(f"{line}:{column}: {message}")
        self.line = line
        self.column = column


class UnknownModule(KeyError):
    pass


class ArityClash(ValueError):
    pass


# ---------------------------------------------------------------- AST

@dataclass(frozen=True)
class Primitive:
    module: str


@dataclass(frozen=True)
class Project:
    symbols: tuple
    child: object


@dataclass(frozen=True)
class Compose:
    left: object
    right: object


@dataclass(frozen=True)
class Intersect:
    left: object
    right: object


@dataclass(frozen=True)
class Feedback:
    child: object
    left: str
    right: str


def to_text(node) -> str:
    if isinstance(node, Primitive):
        return node.module
    if isinstance(node, Project):
        return "project {" + ",".join(node.symbols) + "} (" + to_text(node.child) + ")"
    if isinstance(node, Compose):
        return f"({to_text(node.left)} |> {to_text(node.right)})"
    if isinstance(node, Intersect):
        return f"({to_text(node.left)} & {to_text(node.right)})"
    if isinstance(node, Feedback):
        return f"{to_text(node.child)}[{node.left}={node.right}]"
    raise TypeError(node)


def primitives(node) -> list[str]:
    if isinstance(node, Primitive):
        return [node.module]
    if isinstance(node, (Project, Feedback)):
        return primitives(node.child)
    return primitives(node.left) + primitives(node.right)


# ---------------------------------------------------------------- parsing

_TOKEN_RE = re.compile(r"""
    (?P<ws>[ \t\r]+|\#[^\n]*)
  | (?P<nl>\n)
  | (?P<string>"[^"\n]*")
  | (?P<op>:=|\|>|[{}()\[\]=,&])
  | (?P<id>[A-Za-z_][\w']*)
""", re.VERBOSE)


@dataclass
class Token:
    kind: str
    text: str
    line: int
    column: int


def tokenize(text: str) -> list[Token]:
    out, pos, line, line_start = [], 0, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise SystemSyntaxError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        if kind == "nl":
            line += 1
            line_start = m.end()
        elif kind != "ws":
            out.append(Token(kind, m.group(), line, pos - line_start + 1))
        pos = m.end()
    out.append(Token("eof", "", line, pos - line_start + 1))
    return out


@dataclass
class ModuleDecl:
    name: str
    kind: str
    path: str


@dataclass
class SystemFile:
    name: str
    expr: object
    modules: list = field(default_factory=list)


class _Parser:
    def __init__(self, text):
        self.toks = tokenize(text)
        self.i = 0

    @property
    def cur(self) -> Token:
        return self.toks[self.i]

    def error(self, msg, tok=None):
        tok = tok or self.cur
        raise SystemSyntaxError(msg, tok.line, tok.column)

    def take(self, text=None, kind=None) -> Token:
        tok = self.cur
        if (text is not None and tok.text != text) or (kind is not None and tok.kind != kind):
            want = text or kind
            self.error(f"expected {want!r}, found {tok.text or 'end of input'!r}")
        self.i += 1
        return tok

    def at(self, text) -> bool:
        return self.cur.text == text and self.cur.kind in ("op", "id")

    def expr(self):
        node = self.comp()
        while self.at("&"):
            self.take("&")
            node = Intersect(node, self.comp())
        return node

    def comp(self):
        node = self.post()
        while self.at("|>"):
            self.take("|>")
            node = Compose(node, self.post())
        return node

    def post(self):
        node = self.atom()
        while self.at("["):
            self.take("[")
            a = self.take(kind="id").text
            self.take("=")
            b = self.take(kind="id").text
            self.take("]")
            node = Feedback(node, a, b)
        return node

    def atom(self):
        if self.at("project"):
            self.take("project")
            self.take("{")
            syms = []
            if not self.at("}"):
                syms.append(self.take(kind="id").text)
                while self.at(","):
                    self.take(",")
                    syms.append(self.take(kind="id").text)
            self.take("}")
            self.take("(")
            child = self.expr()
            self.take(")")
            return Project(tuple(syms), child)
        if self.at("("):
            self.take("(")
            node = self.expr()
            self.take(")")
            return node
        tok = self.cur
        if tok.kind != "id" or tok.text in ("project", "module", "system"):
            self.error(f"expected a module name, found {tok.text or 'end of input'!r}")
        self.i += 1
        return Primitive(tok.text)


def _check_modules(node, vocabularies):
    if vocabularies is None:
        return
    for name in primitives(node):
        if name not in vocabularies:
            raise UnknownModule(f"unknown module {name!r}")
    visible_vocab(node, vocabularies)


def parse_system(text: str, vocabularies: Mapping[str, Vocabulary] | None = None):
    """Parse a bare system expression into an AST.

    With ``vocabularies`` also checks that module names are known and
    that feedback symbols have matching arities.
    """
    p = _Parser(text)
    node = p.expr()
    if p.cur.kind != "eof":
        p.error(f"unexpected {p.cur.text!r} after expression")
    _check_modules(node, vocabularies)
    return node


def parse_system_file(text: str) -> SystemFile:
    p = _Parser(text)
    decls = []
    while p.at("module"):
        p.take("module")
        name = p.take(kind="id").text
        kind = p.take(kind="id")
        if kind.text not in ("clausal", "alldiff", "ila", "rules"):
            p.error(f"unknown module kind {kind.text!r}", kind)
        path = p.take(kind="string").text[1:-1]
        decls.append(ModuleDecl(name, kind.text, path))
    p.take("system")
    name = p.take(kind="id").text
    p.take(":=")
    node = p.expr()
    if p.cur.kind != "eof":
        p.error(f"unexpected {p.cur.text!r} after system definition")
    known = {d.name for d in decls}
    for m in primitives(node):
        if m not in known:
            raise UnknownModule(f"system uses undeclared module {m!r}")
    return SystemFile(name, node, decls)


def visible_vocab(node, vocabularies: Mapping[str, Vocabulary]) -> Vocabulary:
    """Vocabulary of the structures a (sub)system denotes."""
    if isinstance(node, Primitive):
        if node.module not in vocabularies:
            raise UnknownModule(f"unknown module {node.module!r}")
        return vocabularies[node.module]
    if isinstance(node, Project):
        child = visible_vocab(node.child, vocabularies)
        missing = set(node.symbols) - set(child)
        if missing:
            raise VocabularyClash(f"projection onto symbols not in the subsystem: {sorted(missing)}")
        return child.restrict(node.symbols)
    if isinstance(node, Feedback):
        child = visible_vocab(node.child, vocabularies)
        for s in (node.left, node.right):
            if s not in child:
                raise VocabularyClash(f"feedback symbol {s} not in the subsystem")
        if child.arity(node.left) != child.arity(node.right):
            raise ArityClash(f"feedback [{node.left}={node.right}] joins symbols of different arity")
        return child
    left = visible_vocab(node.left, vocabularies)
    right = visible_vocab(node.right, vocabularies)
    try:
        return left.union(right)
    except VocabularyClash as exc:
        raise ArityClash(str(exc)) from None


# ---------------------------------------------------------------- flattening

@dataclass(frozen=True)
class FlatModule:
    name: str
    vocabulary: Vocabulary  # module-local symbol names
    rename: tuple           # ((local, flat canonical), ...)

    @property
    def mapping(self) -> dict:
        return dict(self.rename)


@dataclass
class FeedbackSite:
    """A feedback node whose child is a single module (candidate for propagation)."""
    module: str
    left: str    # module-local names
    right: str
    symbol: str  # canonical flat symbol of the alias class


@dataclass
class FlatSystem:
    modules: list
    alias: dict            # flat symbol -> canonical symbol
    search_vocab: Vocabulary
    output_vocab: Vocabulary
    feedbacks: list = field(default_factory=list)
    instance_vocab: Vocabulary = field(default_factory=Vocabulary)

    @property
    def expansion_vocab(self) -> Vocabulary:
        return self.search_vocab.without(self.instance_vocab)

    def module(self, name) -> FlatModule:
        for m in self.modules:
            if m.name == name:
                return m
        raise KeyError(name)

    def with_instance(self, instance_vocab: Vocabulary) -> "FlatSystem":
        for s in instance_vocab.symbols():
            if s.name not in self.search_vocab:
                raise VocabularyClash(f"instance symbol {s.name} does not occur in the system")
            if self.search_vocab[s.name] != s:
                raise ArityClash(f"instance symbol {s} disagrees with the system's {self.search_vocab[s.name]}")
        return FlatSystem(self.modules, self.alias, self.search_vocab, self.output_vocab,
                          self.feedbacks, instance_vocab)

    def restrict(self, b: PartialStructure, module: FlatModule) -> PartialStructure:
        """The structure ``b`` (over flat symbols) seen through the module's local names."""
        total, pos, neg, partial = {}, {}, {}, set()
        for local, flat in module.rename:
            if flat in b.partial_vocab:
                partial.add(local)
                pos[local] = b.pos[flat]
                neg[local] = b.neg[flat]
            else:
                total[local] = b.total[flat]
        return PartialStructure(b.domain, module.vocabulary, total, pos, neg, partial)

    def restrict_total(self, s: Structure, module: FlatModule) -> Structure:
        return Structure(s.domain, module.vocabulary, {local: s[flat] for local, flat in module.rename})


class _UnionFind:
    def __init__(self):
        self.parent = {}

    def find(self, x):
        self.parent.setdefault(x, x)
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[rb] = ra


@dataclass
class _Sub:
    mods: list       # [(module name, {local: flat})]
    visible: dict    # visible name -> flat name
    internal: set    # flat names hidden by projections
    feedbacks: list  # [(module name or None, flat a, flat b, local a, local b)]

    def all_flat(self) -> set:
        return set(self.visible.values()) | self.internal


def flatten(node, vocabularies: Mapping[str, Vocabulary]) -> FlatSystem:
    """Flatten an expression into module constraints over one shared vocabulary.

    Projected-out symbols stay in the search vocabulary (renamed apart when
    they would collide with a symbol elsewhere); feedback merges its two
    symbols into one alias class; composition and intersection both conjoin
    the memberships of their children.
    """
    root_voc = visible_vocab(node, vocabularies)
    counter = [0]
    arity: dict[str, int] = {}

    def fresh(name):
        counter[0] += 1
        return f"{name}~{counter[0]}"

    def rename_sub(sub: _Sub, names: set) -> _Sub:
        table = {n: fresh(n) for n in sorted(names)}
        for old, new in table.items():
            arity[new] = arity[old]
        f = lambda x: table.get(x, x)
        return _Sub([(m, {l: f(v) for l, v in mp.items()}) for m, mp in sub.mods],
                    {k: f(v) for k, v in sub.visible.items()},
                    {f(x) for x in sub.internal},
                    [(m, f(a), f(b), la, lb) for m, a, b, la, lb in sub.feedbacks])

    def walk(n) -> _Sub:
        if isinstance(n, Primitive):
            voc = vocabularies[n.module]
            for s in voc.symbols():
                arity.setdefault(s.name, s.arity)
            return _Sub([(n.module, {s: s for s in voc})], {s: s for s in voc}, set(), [])
        if isinstance(n, Project):
            sub = walk(n.child)
            hidden = {v for k, v in sub.visible.items() if k not in n.symbols}
            return _Sub(sub.mods, {k: v for k, v in sub.visible.items() if k in n.symbols},
                        sub.internal | hidden, sub.feedbacks)
        if isinstance(n, Feedback):
            sub = walk(n.child)
            single = sub.mods[0][0] if len(sub.mods) == 1 else None
            fb = (single, sub.visible[n.left], sub.visible[n.right], n.left, n.right)
            return _Sub(sub.mods, sub.visible, sub.internal, sub.feedbacks + [fb])
        left, right = walk(n.left), walk(n.right)
        clash_l = left.internal & right.all_flat()
        if clash_l:
            left = rename_sub(left, clash_l)
        clash_r = right.internal & left.all_flat()
        if clash_r:
            right = rename_sub(right, clash_r)
        visible = dict(left.visible)
        for k, v in right.visible.items():
            if k in visible and visible[k] != v:
                raise VocabularyClash(f"symbol {k} bound differently on both sides")
            visible[k] = v
        return _Sub(left.mods + right.mods, visible, left.internal | right.internal,
                    left.feedbacks + right.feedbacks)

    sub = walk(node)
    uf = _UnionFind()
    for _, a, b, _, _ in sub.feedbacks:
        if arity[a] != arity[b]:
            raise ArityClash(f"feedback joins {a}/{arity[a]} and {b}/{arity[b]}")
        uf.union(a, b)
    flat_names = sorted({v for _, mp in sub.mods for v in mp.values()})
    alias = {x: uf.find(x) for x in flat_names}
    search = Vocabulary(Symbol(alias[x], arity[x]) for x in flat_names)
    output = Vocabulary(Symbol(alias[sub.visible[s]], arity[sub.visible[s]]) for s in root_voc)
    modules = []
    seen = set()
    for name, mp in sub.mods:
        if name in seen:
            raise VocabularyClash(f"module {name} used more than once; declare it twice under two names")
        seen.add(name)
        modules.append(FlatModule(name, vocabularies[name],
                                  tuple(sorted((l, alias[v]) for l, v in mp.items()))))
    feedbacks = [FeedbackSite(m, la, lb, alias[a]) for m, a, b, la, lb in sub.feedbacks if m is not None]
    return FlatSystem(modules, alias, search, output, feedbacks)


def accepts_total(flat: FlatSystem, oracles: Mapping[str, object], s: Structure) -> bool:
    """Every module's oracle accepts its restriction of the total structure ``s``."""
    for m in flat.modules:
        b = flat.restrict(PartialStructure.from_structure(s, flat.expansion_vocab), m)
        if not oracles[m.name].accept(b).accepted:
            return False
    return True


def output_names(flat: FlatSystem) -> list[str]:
    return list(flat.output_vocab)
