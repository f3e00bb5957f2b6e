"""Rule module: definite rules whose least model is the module's operator.

Body literals over input relations may be negated (``not S(x)``); relations
defined by rule heads may only occur positively. The operator is therefore
monotone in an input that occurs only positively and anti-monotone in one
that occurs only negatively.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping

from ..oracle import ACCEPT, DEFAULT_ADVICE_BUDGET, Oracle, Verdict, reject
from ..reasons import Advice
from ..structures import GroundLiteral, PartialStructure, Structure, Symbol, Vocabulary, _coerce


@dataclass(frozen=True)
class Atom:
    pred: str
    args: tuple  # variables are strings starting with an upper-case letter or '?'

    def ground(self, env) -> tuple:
        return (self.pred, tuple(env.get(a, a) if _is_var(a) else a for a in self.args))


def _is_var(a) -> bool:
    return isinstance(a, str) and (a[:1].isupper() or a.startswith("?"))


@dataclass(frozen=True)
class Rule:
    head: Atom
    body: tuple  # ((Atom, positive), ...)

    def variables(self) -> list:
        seen = []
        for a in (self.head, *(b for b, _ in self.body)):
            for x in a.args:
                if _is_var(x) and x not in seen:
                    seen.append(x)
        return seen


_ATOM_RE = re.compile(r"\s*(not\s+)?([A-Za-z_][\w']*)\s*(?:\(([^)]*)\))?\s*")


def _parse_atom(text: str) -> tuple[Atom, bool]:
    m = _ATOM_RE.fullmatch(text)
    if not m:
        raise ValueError(f"cannot parse atom {text!r}")
    neg, pred, args = m.groups()
    tup = tuple(_coerce(a) for a in args.split(",")) if args and args.strip() else ()
    return Atom(pred, tup), neg is None


def _split_body(text: str) -> list[str]:
    parts, depth, cur = [], 0, ""
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == "," and depth == 0:
            parts.append(cur)
            cur = ""
        else:
            cur += ch
    if cur.strip():
        parts.append(cur)
    return parts


def parse_rules(text: str) -> tuple[list[Rule], dict]:
    """Parse ``head <- b1, not b2.`` lines plus ``input S`` / ``output R`` / ``vocab P/1`` directives."""
    rules, directives = [], {"input": None, "output": None, "vocab": []}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head_word = line.split()[0]
        if head_word in ("input", "output"):
            directives[head_word] = line.split()[1]
            continue
        if head_word == "vocab":
            for tok in line.split()[1:]:
                s, _, ar = tok.partition("/")
                directives["vocab"].append(Symbol(s, int(ar)))
            continue
        if not line.endswith("."):
            raise ValueError(f"line {lineno}: rule must end with '.'")
        line = line[:-1]
        head, arrow, body = line.partition("<-")
        h, hpos = _parse_atom(head)
        if not hpos:
            raise ValueError(f"line {lineno}: negated head")
        lits = tuple(_parse_atom(b) for b in _split_body(body)) if arrow else ()
        # variables not bound by the body range over the whole domain
        rules.append(Rule(h, lits))
    return rules, directives


class MonotoneRuleModule(Oracle):
    """Rules read as an operator from input relations to defined relations.

    A total structure is a member iff every defined relation equals its
    value in the least model computed from the structure's inputs.
    ``input``/``output`` name the feedback pair used by propagation.
    """

    def __init__(self, rules: Iterable[Rule], vocabulary: Vocabulary, input: str | None = None,
                 output: str | None = None, name: str = "rules"):
        self.name = name
        self.rules = list(rules)
        self.defined = sorted({r.head.pred for r in self.rules})
        arities = {}
        for r in self.rules:
            for a in (r.head, *(b for b, _ in r.body)):
                if arities.setdefault(a.pred, len(a.args)) != len(a.args):
                    raise ValueError(f"{name}: inconsistent arity for {a.pred}")
        syms = [Symbol(p, n) for p, n in arities.items()]
        self.vocabulary = Vocabulary(syms).union(vocabulary)
        for r in self.rules:
            for a, pos in r.body:
                if a.pred in self.defined and not pos:
                    raise ValueError(f"{name}: defined relation {a.pred} used under negation")
        self.inputs = sorted(set(self.vocabulary) - set(self.defined))
        self.input = input
        self.output = output
        if output is not None and output not in self.defined:
            raise ValueError(f"{name}: output {output} is not defined by any rule")
        if input is not None and input not in self.inputs:
            raise ValueError(f"{name}: input {input} is defined by a rule or unknown")
        self.properties = self._derive_properties()
        self._ground_cache = {}

    def _derive_properties(self):
        from ..propagation import ModuleProperties
        if self.input is None or self.output is None:
            return None
        signs = {pos for r in self.rules for a, pos in r.body if a.pred == self.input}
        tau = [n for n in self.vocabulary if n not in (self.input, self.output)]
        sense = None
        if signs <= {True}:
            sense = "monotone"
        elif signs == {False}:
            sense = "anti-monotone"
        return ModuleProperties(
            totality=[tuple(sorted(set(self.inputs)))],
            monotonicity=[((self.input,), tuple(sorted(set(tau) - set(self.defined))), (self.output,), sense)]
            if sense else [])

    # grounding -----------------------------------------------------------
    def ground_rules(self, domain) -> list:
        key = domain.elements
        if key not in self._ground_cache:
            out = []
            for r in self.rules:
                vs = r.variables()
                for values in itertools.product(domain.elements, repeat=len(vs)):
                    env = dict(zip(vs, values))
                    out.append((r.head.ground(env), tuple((a.ground(env), pos) for a, pos in r.body)))
            self._ground_cache[key] = out
        return self._ground_cache[key]

    def least_model(self, domain, satisfied, track=False):
        """Least model given ``satisfied(atom, positive) -> bool`` for input literals.

        With ``track`` returns also a first derivation for each derived atom.
        """
        derived: dict = {}
        support: dict = {}
        ground = self.ground_rules(domain)
        changed = True
        while changed:
            changed = False
            for head, body in ground:
                if head in derived:
                    continue
                ok = True
                for atom, pos in body:
                    if atom[0] in self.defined:
                        if atom not in derived:
                            ok = False
                            break
                    elif not satisfied(atom, pos):
                        ok = False
                        break
                if ok:
                    derived[head] = True
                    if track:
                        support[head] = body
                    changed = True
        return (set(derived), support) if track else set(derived)

    def operator_eval(self, inputs: Structure) -> frozenset:
        """Tuples of the output relation in the least model over ``inputs``."""
        model = self.least_model(inputs.domain, lambda a, pos: inputs.holds(a) == pos)
        return frozenset(t for p, t in model if p == self.output)

    def _leaves(self, atom, support) -> set:
        """Input literals used by the recorded derivation of ``atom``."""
        out, stack, seen = set(), [atom], set()
        while stack:
            a = stack.pop()
            if a in seen:
                continue
            seen.add(a)
            for b, pos in support[a]:
                if b[0] in self.defined:
                    stack.append(b)
                else:
                    out.add(GroundLiteral(b[0], b[1], pos))
        return out

    # oracle --------------------------------------------------------------
    def _bounds(self, b: PartialStructure):
        low, support = self.least_model(b.domain, lambda a, pos: b.value(a) is pos, track=True)
        high = self.least_model(b.domain, lambda a, pos: b.value(a) is not (not pos))
        return low, support, high

    def _blocking(self, b: PartialStructure, target) -> list[GroundLiteral]:
        """Input literals false in ``b``, at least one of which holds whenever ``target`` is derived."""
        blockers = set()
        for head, body in self.ground_rules(b.domain):
            for atom, pos in body:
                if atom[0] not in self.defined and b.value(atom) is (not pos):
                    blockers.add(GroundLiteral(atom[0], atom[1], pos))
        core = sorted(blockers, key=GroundLiteral.sort_key)
        i = 0
        while i < len(core):
            trial = core[:i] + core[i + 1:]
            blocked = set(trial)
            reach = self.least_model(
                b.domain, lambda a, pos: GroundLiteral(a[0], a[1], pos) not in blocked)
            if target not in reach:
                core = trial
            else:
                i += 1
        return core

    def accept(self, b: PartialStructure) -> Verdict:
        low, support, high = self._bounds(b)
        for atom in sorted(low, key=str):
            if b.value(atom) is False:
                return reject([GroundLiteral(*atom)] + [-l for l in self._leaves(atom, support)])
        for p in self.defined:
            for t in sorted(b.pos[p] if p in b.partial_vocab else b.total[p], key=str):
                if (p, t) not in high:
                    return reject([GroundLiteral(p, t, False)] + self._blocking(b, (p, t)))
        return ACCEPT

    def member(self, s: Structure) -> bool:
        model = self.least_model(s.domain, lambda a, pos: s.holds(a) == pos)
        return all(frozenset(t for q, t in model if q == p) == s[p] for p in self.defined)

    def advices(self, b: PartialStructure, budget: int = DEFAULT_ADVICE_BUDGET) -> list[Advice]:
        low, support, high = self._bounds(b)
        out = []
        for atom in sorted(low, key=str):
            if b.value(atom) is None:
                out.append(Advice(self._leaves(atom, support), [GroundLiteral(*atom)]))
                if len(out) >= budget:
                    return out
        for p in self.defined:
            for t in b.domain.tuples(self.vocabulary.arity(p)):
                if (p, t) not in high and b.value((p, t)) is None:
                    pre = [-l for l in self._blocking(b, (p, t))]
                    out.append(Advice(pre, [GroundLiteral(p, t, False)]))
                    if len(out) >= budget:
                        return out
        return out


def load_rules(path, name: str = "rules") -> MonotoneRuleModule:
    return rules_from_text(Path(path).read_text(), name)


def rules_from_text(text: str, name: str = "rules") -> MonotoneRuleModule:
    rules, d = parse_rules(text)
    return MonotoneRuleModule(rules, Vocabulary(d["vocab"]), d["input"], d["output"], name)
