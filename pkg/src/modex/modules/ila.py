"""Bounded integer linear arithmetic as a theory module.

Theory atoms (ground atoms of the module vocabulary) are mapped to linear
constraints over integer variables with finite ranges. Atoms of the form
``x <= k`` play the role of order-encoding atoms: bound propagation turns
them into short advices, and a branch ``x <= k | x >= k+1`` is one clause.
Feasibility is decided exactly with integer arithmetic by bound propagation
plus domain splitting; no floating point is involved.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from fractions import Fraction
from math import ceil, floor, lcm
from pathlib import Path
from typing import Iterable, Mapping

from ..oracle import ACCEPT, DEFAULT_ADVICE_BUDGET, Oracle, Verdict, reject
from ..reasons import Advice, _split_literals
from ..structures import GroundLiteral, PartialStructure, Structure, Symbol, Vocabulary, _coerce


class UnboundedVariable(ValueError):
    pass


_OPS = ("<=", ">=", "!=", "<", ">", "=")


@dataclass(frozen=True)
class Row:
    """``sum(coef * var) <kind> rhs`` with integer coefficients; kind in LE, EQ, NE."""

    coefs: tuple  # ((var, int), ...) sorted by var
    kind: str
    rhs: int

    def negate(self) -> "Row":
        if self.kind == "LE":
            return Row(tuple((v, -a) for v, a in self.coefs), "LE", -self.rhs - 1)
        return Row(self.coefs, "NE" if self.kind == "EQ" else "EQ", self.rhs)

    def holds(self, point: Mapping[str, int]) -> bool:
        s = sum(a * point[v] for v, a in self.coefs)
        if self.kind == "LE":
            return s <= self.rhs
        if self.kind == "EQ":
            return s == self.rhs
        return s != self.rhs


@dataclass(frozen=True)
class LinearConstraint:
    coefs: tuple  # ((var, Fraction), ...)
    op: str
    rhs: Fraction
    text: str = ""

    def rows(self, positive: bool = True) -> list[Row]:
        """Integer rows equivalent (over the integers) to the constraint or its negation."""
        scale = lcm(*(c.denominator for _, c in self.coefs), self.rhs.denominator) if self.coefs else 1
        coefs = tuple((v, int(c * scale)) for v, c in self.coefs)
        rhs = self.rhs * scale
        neg = tuple((v, -a) for v, a in coefs)
        op = self.op
        if not positive:
            op = {"<=": ">", ">=": "<", "<": ">=", ">": "<=", "=": "!=", "!=": "="}[op]
        if op == "<=":
            return [Row(coefs, "LE", floor(rhs))]
        if op == "<":
            return [Row(coefs, "LE", ceil(rhs) - 1)]
        if op == ">=":
            return [Row(neg, "LE", floor(-rhs))]
        if op == ">":
            return [Row(neg, "LE", ceil(-rhs) - 1)]
        if rhs.denominator != 1:
            # integer combination can never hit a fractional value
            return [Row((), "LE", -1)] if op == "=" else []
        return [Row(coefs, "EQ" if op == "=" else "NE", int(rhs))]

    def __str__(self):
        return self.text or f"{self.coefs} {self.op} {self.rhs}"


_TERM_RE = re.compile(r"\s*([+-])?\s*((?:\d+(?:\.\d+)?(?:/\d+)?)?)\s*\*?\s*([A-Za-z_]\w*)?\s*")


def _parse_side(text: str) -> tuple[dict, Fraction]:
    coefs: dict[str, Fraction] = {}
    const = Fraction(0)
    pos = 0
    text = text.strip()
    if not text:
        raise ValueError("empty side in linear constraint")
    # fold doubled signs such as "x + -2*y"
    text = re.sub(r"([+-])\s*([+-])", lambda m: "+" if m.group(1) == m.group(2) else "-", text)
    first = True
    while pos < len(text):
        m = _TERM_RE.match(text, pos)
        if not m or m.end() == pos:
            raise ValueError(f"cannot parse linear term at {text[pos:]!r}")
        sign, num, var = m.groups()
        if not first and sign is None:
            raise ValueError(f"missing operator before {text[pos:]!r}")
        if not num and not var:
            raise ValueError(f"dangling sign in {text!r}")
        value = Fraction(num) if num else Fraction(1)
        if sign == "-":
            value = -value
        if var:
            coefs[var] = coefs.get(var, Fraction(0)) + value
        else:
            const += value
        pos = m.end()
        first = False
    return coefs, const


def parse_constraint(text: str) -> LinearConstraint:
    """Parse e.g. ``2*x + 3*y <= 7`` or ``x - 1/2 y > -1``."""
    for op in _OPS:
        if op in text:
            left, right = text.split(op, 1)
            break
    else:
        raise ValueError(f"no comparison operator in {text!r}")
    lc, lk = _parse_side(left)
    rc, rk = _parse_side(right)
    coefs = dict(lc)
    for v, c in rc.items():
        coefs[v] = coefs.get(v, Fraction(0)) - c
    coefs = tuple(sorted((v, c) for v, c in coefs.items() if c != 0))
    return LinearConstraint(coefs, op, rk - lk, text.strip())


# ---------------------------------------------------------------- exact feasibility

def _propagate(rows: list[Row], box: dict) -> dict | None:
    """Tighten integer bounds to a fixpoint; ``None`` if some domain empties."""
    box = dict(box)
    changed = True
    while changed:
        changed = False
        for row in rows:
            if row.kind == "NE":
                free = [(v, a) for v, a in row.coefs if box[v][0] != box[v][1]]
                fixed = sum(a * box[v][0] for v, a in row.coefs if box[v][0] == box[v][1])
                if not free:
                    if fixed == row.rhs:
                        return None
                elif len(free) == 1:
                    v, a = free[0]
                    if (row.rhs - fixed) % a == 0:
                        bad = (row.rhs - fixed) // a
                        lo, hi = box[v]
                        if bad == lo:
                            box[v] = (lo + 1, hi)
                            changed = True
                        elif bad == hi:
                            box[v] = (lo, hi - 1)
                            changed = True
                        if box[v][0] > box[v][1]:
                            return None
                continue
            sides = [row.coefs] if row.kind == "LE" else [row.coefs, tuple((v, -a) for v, a in row.coefs)]
            rhss = [row.rhs] if row.kind == "LE" else [row.rhs, -row.rhs]
            for coefs, rhs in zip(sides, rhss):
                mins = {v: a * (box[v][0] if a > 0 else box[v][1]) for v, a in coefs}
                total_min = sum(mins.values())
                if total_min > rhs:
                    return None
                for v, a in coefs:
                    slack = rhs - (total_min - mins[v])
                    lo, hi = box[v]
                    if a > 0:
                        nhi = slack // a
                        if nhi < hi:
                            box[v] = (lo, nhi)
                            changed = True
                    else:
                        nlo = -((slack) // (-a))
                        if nlo > lo:
                            box[v] = (nlo, hi)
                            changed = True
                    if box[v][0] > box[v][1]:
                        return None
    return box


def solve_rows(rows: list[Row], box: Mapping[str, tuple]) -> dict | None:
    """Return an integer point in ``box`` satisfying all rows, or ``None``."""
    stack = [dict(box)]
    while stack:
        cur = _propagate(rows, stack.pop())
        if cur is None:
            continue
        open_vars = [v for v in sorted(cur) if cur[v][0] != cur[v][1]]
        if not open_vars:
            point = {v: lo for v, (lo, _) in cur.items()}
            if all(r.holds(point) for r in rows):
                return point
            continue
        v = min(open_vars, key=lambda x: (cur[x][1] - cur[x][0], x))
        lo, hi = cur[v]
        mid = (lo + hi) // 2
        upper = dict(cur)
        upper[v] = (mid + 1, hi)
        lower = dict(cur)
        lower[v] = (lo, mid)
        stack.append(upper)
        stack.append(lower)
    return None


def scan_rows(rows: list[Row], box: Mapping[str, tuple]) -> dict | None:
    """Exhaustive integer-point scan; the independent check for :func:`solve_rows`."""
    names = sorted(box)
    for values in itertools.product(*(range(box[v][0], box[v][1] + 1) for v in names)):
        point = dict(zip(names, values))
        if all(r.holds(point) for r in rows):
            return point
    return None


# ---------------------------------------------------------------- the module

class BoundedILAModule(Oracle):
    """Theory module for integer linear arithmetic over boxed variables.

    ``atoms`` maps ground atoms ``(symbol, args)`` to constraints. Optional
    ``conflicts=(symbol, {id: literals})`` and ``propagations=(symbol, {id: (lit, pre)})``
    expose recorded infeasible literal sets and theory propagations as
    unary output relations over their ids.
    """

    def __init__(self, variables: Mapping[str, tuple], atoms: Mapping[tuple, LinearConstraint],
                 vocabulary: Vocabulary | None = None, conflicts=None, propagations=None,
                 minimize: bool = True, name: str = "ila", scan_limit: int = 200_000):
        self.name = name
        self.box = {}
        for v, rng in variables.items():
            if rng is None or len(rng) != 2 or rng[0] is None or rng[1] is None:
                raise UnboundedVariable(f"variable {v} needs a finite range")
            lo, hi = int(rng[0]), int(rng[1])
            if lo > hi:
                raise ValueError(f"empty range for {v}")
            self.box[v] = (lo, hi)
        self.atoms = dict(sorted(atoms.items(), key=lambda kv: (kv[0][0], tuple(map(str, kv[0][1])))))
        for atom, c in self.atoms.items():
            for v, _ in c.coefs:
                if v not in self.box:
                    raise UnboundedVariable(f"variable {v} in {c} has no declared range")
        symbols = [Symbol(a[0], len(a[1])) for a in self.atoms]
        self.conflicts = conflicts
        self.propagations = propagations
        if conflicts:
            symbols.append(Symbol(conflicts[0], 1))
        if propagations:
            symbols.append(Symbol(propagations[0], 1))
        voc = Vocabulary(symbols)
        self.vocabulary = voc.union(vocabulary) if vocabulary is not None else voc
        self.minimize = minimize
        self.scan_limit = scan_limit
        self._cache: dict = {}
        if conflicts:
            self._conflict_ok = {cid: not self._feasible(lits) for cid, lits in conflicts[1].items()}
        if propagations:
            self._prop_ok = {pid: not self._feasible(list(pre) + [-l]) for pid, (l, pre) in propagations[1].items()}

    # literal sets -> rows
    def _rows(self, literals: Iterable[GroundLiteral]) -> list[Row]:
        rows = []
        for l in literals:
            rows.extend(self.atoms[l.atom].rows(l.positive))
        return rows

    def _feasible(self, literals) -> bool:
        key = frozenset(literals)
        if key not in self._cache:
            self._cache[key] = solve_rows(self._rows(key), self.box) is not None
        return self._cache[key]

    def asserted(self, b: PartialStructure) -> list[GroundLiteral]:
        out = []
        for atom in self.atoms:
            v = b.value(atom)
            if v is not None:
                out.append(GroundLiteral(atom[0], atom[1], v))
        return out

    def conflict_subset(self, literals: list[GroundLiteral]) -> list[GroundLiteral]:
        """Deletion-based shrinking of an infeasible literal set."""
        core = list(literals)
        if not self.minimize:
            return core
        i = 0
        while i < len(core):
            trial = core[:i] + core[i + 1:]
            if not self._feasible(trial):
                core = trial
            else:
                i += 1
        return core

    def accept(self, b: PartialStructure) -> Verdict:
        lits = self.asserted(b)
        if not self._feasible(lits):
            return reject([-l for l in self.conflict_subset(lits)])
        verdict = self._check_catalogue(b)
        return verdict if verdict is not None else ACCEPT

    def _check_catalogue(self, b: PartialStructure):
        for entry, ok, kind in ((self.conflicts, getattr(self, "_conflict_ok", {}), "conflict"),
                                (self.propagations, getattr(self, "_prop_ok", {}), "propagation")):
            if not entry:
                continue
            sym, table = entry
            for x in b.domain:
                if b.value((sym, (x,))) is not True:
                    continue
                head = GroundLiteral(sym, (x,))
                if x not in table or not ok[x]:
                    return reject([-head])
                required = table[x] if kind == "conflict" else table[x][1]
                for l in required:
                    if b.literal_value(l) is False:
                        return reject([-head, l])
        return None

    def member(self, s: Structure) -> bool:
        lits = [GroundLiteral(a[0], a[1], s.holds(a)) for a in self.atoms]
        rows = self._rows(lits)
        size = 1
        for lo, hi in self.box.values():
            size *= hi - lo + 1
        check = scan_rows if size <= self.scan_limit else solve_rows
        if check(rows, self.box) is None:
            return False
        true_lits = set(lits)
        if self.conflicts:
            sym, table = self.conflicts
            for (x,) in s[sym]:
                if x not in table or not set(table[x]) <= true_lits:
                    return False
                if check(self._rows(table[x]), self.box) is not None:
                    return False
        if self.propagations:
            sym, table = self.propagations
            for (x,) in s[sym]:
                if x not in table:
                    return False
                l, pre = table[x]
                if not set(pre) <= true_lits:
                    return False
                if check(self._rows(list(pre) + [-l]), self.box) is not None:
                    return False
        return True

    def bounds(self, literals) -> dict | None:
        return _propagate(self._rows(literals), self.box)

    def _implied(self, literals) -> dict:
        """Atoms whose value is fixed by interval reasoning over ``literals``."""
        box = self.bounds(literals)
        if box is None:
            return {}
        out = {}
        for atom, c in self.atoms.items():
            for positive in (True, False):
                if all(_row_entailed(r, box) for r in c.rows(positive)):
                    out[atom] = positive
                    break
        return out

    def advices(self, b: PartialStructure, budget: int = DEFAULT_ADVICE_BUDGET) -> list[Advice]:
        lits = self.asserted(b)
        if not lits or self.bounds(lits) is None:
            return []
        out = []
        for atom, value in self._implied(lits).items():
            if b.value(atom) is not None:
                continue
            target = GroundLiteral(atom[0], atom[1], value)
            just = list(lits)
            i = 0
            while i < len(just):
                trial = just[:i] + just[i + 1:]
                if self._implied(trial).get(atom) is value:
                    just = trial
                else:
                    i += 1
            out.append(Advice(just, [target]))
            if len(out) >= budget:
                break
        return out


def _row_entailed(row: Row, box: Mapping[str, tuple]) -> bool:
    lo = sum(a * (box[v][0] if a > 0 else box[v][1]) for v, a in row.coefs)
    hi = sum(a * (box[v][1] if a > 0 else box[v][0]) for v, a in row.coefs)
    if row.kind == "LE":
        return hi <= row.rhs
    if row.kind == "EQ":
        return lo == hi == row.rhs
    return row.rhs < lo or row.rhs > hi


def parse_ila(text: str, name: str = "ila") -> BoundedILAModule:
    """Read the constraint format.

    ::

        var x 0 5
        atom a : 2*x + 3*y <= 7
        atom L(p) : x >= 2
        vocab M/1                      # extra symbols carried by the module
        conflicts R                    # optional recorded-conflict relation
        conflict c1 : L(p) -L(q)
        propagations A                 # optional theory-propagation relation
        propagation a1 : L(q) <- L(p)
    """
    variables, atoms, extra = {}, {}, []
    conflict_sym = prop_sym = None
    conflicts, props = {}, {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, _, rest = line.partition(" ")
        try:
            if head == "var":
                parts = rest.split()
                if len(parts) != 3:
                    raise UnboundedVariable("expected 'var NAME LO HI'")
                variables[parts[0]] = (int(parts[1]), int(parts[2]))
            elif head == "atom":
                lhs, _, expr = rest.partition(":")
                atoms[GroundLiteral.parse(lhs).atom] = parse_constraint(expr)
            elif head == "vocab":
                for tok in rest.split():
                    s, _, ar = tok.partition("/")
                    extra.append(Symbol(s, int(ar)))
            elif head == "conflicts":
                conflict_sym = rest.strip()
            elif head == "propagations":
                prop_sym = rest.strip()
            elif head == "conflict":
                cid, _, body = rest.partition(":")
                conflicts[_coerce(cid)] = [GroundLiteral.parse(t) for t in _split_literals(body)]
            elif head == "propagation":
                pid, _, body = rest.partition(":")
                post, _, pre = body.partition("<-")
                props[_coerce(pid)] = (GroundLiteral.parse(post),
                                       tuple(GroundLiteral.parse(t) for t in _split_literals(pre)))
            else:
                raise ValueError(f"unknown directive {head!r}")
        except (ValueError, IndexError) as exc:
            raise type(exc)(f"line {lineno}: {exc}") from None
    if conflicts and conflict_sym is None:
        raise ValueError("'conflict' entries need a 'conflicts SYMBOL' line")
    if props and prop_sym is None:
        raise ValueError("'propagation' entries need a 'propagations SYMBOL' line")
    for l in [l for ls in conflicts.values() for l in ls] + \
             [l for p, pre in props.values() for l in (p, *pre)]:
        if l.atom not in atoms:
            raise ValueError(f"{l} is not a declared theory atom")
    return BoundedILAModule(variables, atoms, Vocabulary(extra),
                            (conflict_sym, conflicts) if conflict_sym else None,
                            (prop_sym, props) if prop_sym else None, name=name)


def load_ila(path, name: str = "ila") -> BoundedILAModule:
    return parse_ila(Path(path).read_text(), name)
