"""An incremental conflict-driven solver that reports partial assignments.

Clauses may be added at any time, including clauses falsified by the current
trail. Every reported state is propagation-closed and falsifies no clause.
Successive reports obey the progress contract: a later state either
properly extends an earlier one, or no state from then on extends it.

The contract shapes backjumping. When a conflict is learned, every
reported state that does not falsify the learned clause is kept on the
trail, so the solver backs up no further than the deepest such state.
"""

from __future__ import annotations

import random
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .reasons import GroundClause
from .structures import GroundLiteral


class UnknownAtom(KeyError):
    pass


@dataclass(frozen=True)
class SolverConfig:
    report_mode: str = "after_each_decision"   # or "only_total"
    heuristic: str = "lowest"                  # "lowest", "lowest-negative" or "random"
    seed: int = 0
    restart: int | None = None                 # luby unit in conflicts; None disables restarts

    def __post_init__(self):
        if self.report_mode not in ("after_each_decision", "only_total"):
            raise ValueError(f"unknown report mode {self.report_mode!r}")
        if self.heuristic not in ("lowest", "lowest-negative", "random"):
            raise ValueError(f"unknown heuristic {self.heuristic!r}")


@dataclass(frozen=True)
class SolverState:
    sat: bool
    assignment: tuple = ()   # ((atom, value), ...) in trail order

    @property
    def literals(self) -> frozenset:
        return frozenset(GroundLiteral(a[0], a[1], v) for a, v in self.assignment)


UNSAT = SolverState(False)


def luby(i: int) -> int:
    """The i-th element (1-based) of the Luby sequence 1 1 2 1 1 2 4 ..."""
    k = 1
    while (1 << k) - 1 < i:
        k += 1
    while True:
        if i == (1 << k) - 1:
            return 1 << (k - 1)
        i -= (1 << (k - 1)) - 1
        k = 1
        while (1 << k) - 1 < i:
            k += 1


@dataclass
class _Report:
    level: int
    length: int
    literals: frozenset


class OnlineSolver:
    """CDCL search over a fixed atom universe.

    ``fixed`` gives truth values of atoms outside the universe (the
    instance); literals over them are simplified away when clauses arrive.
    """

    def __init__(self, atoms: Iterable[tuple], fixed: Mapping[tuple, bool] | None = None,
                 config: SolverConfig | None = None):
        self.config = config or SolverConfig()
        self.atoms = list(atoms)
        self.index = {a: i + 1 for i, a in enumerate(self.atoms)}
        if len(self.index) != len(self.atoms):
            raise ValueError("duplicate atoms in the universe")
        self.fixed = dict(fixed or {})
        n = len(self.atoms)
        self.value: list = [None] * (n + 1)
        self.level = [0] * (n + 1)
        self.reason: list = [None] * (n + 1)
        self.position = [0] * (n + 1)
        self.trail: list[int] = []
        self.trail_lim: list[int] = []
        self.clauses: list[list[int]] = []
        self.occurs = defaultdict(list)
        self.qhead = 0
        self.unsat = False
        self.reports: list[_Report] = []
        self.stats = {"decisions": 0, "conflicts": 0, "learned": 0, "added": 0, "restarts": 0}
        self.rng = random.Random(self.config.seed)
        self._restart_index = 1
        self._conflicts_since_restart = 0

    # ------------------------------------------------------------ encoding
    def _encode(self, lit: GroundLiteral):
        """Integer literal, or True/False for literals fixed by the instance."""
        atom = lit.atom
        if atom in self.index:
            v = self.index[atom]
            return v if lit.positive else -v
        if atom in self.fixed:
            return self.fixed[atom] == lit.positive
        raise UnknownAtom(f"atom {lit.atom[0]}{lit.atom[1]} is not in the solver's universe")

    def decode(self, x: int) -> GroundLiteral:
        a = self.atoms[abs(x) - 1]
        return GroundLiteral(a[0], a[1], x > 0)

    def _lit_value(self, x: int):
        v = self.value[abs(x)]
        if v is None:
            return None
        return v if x > 0 else not v

    @property
    def decision_level(self) -> int:
        return len(self.trail_lim)

    # ------------------------------------------------------------ trail
    def _assign(self, x: int, reason):
        v = abs(x)
        self.value[v] = x > 0
        self.level[v] = self.decision_level
        self.reason[v] = reason
        self.position[v] = len(self.trail)
        self.trail.append(x)

    def _backtrack(self, level: int):
        if level >= self.decision_level:
            return
        cut = self.trail_lim[level]
        for x in self.trail[cut:]:
            v = abs(x)
            self.value[v] = None
            self.reason[v] = None
        del self.trail[cut:]
        del self.trail_lim[level:]
        self.qhead = 0  # rescan: clauses added while deeper may be unit now
        self.reports = [r for r in self.reports if r.level <= level]

    # ------------------------------------------------------------ clauses
    def add_clause(self, clause: GroundClause | Iterable[GroundLiteral]) -> None:
        """Store a clause permanently; repair the trail if it is falsified."""
        lits = []
        for l in clause:
            x = self._encode(l)
            if x is True:
                return
            if x is False:
                continue
            if -x in lits:
                return
            if x not in lits:
                lits.append(x)
        self.stats["added"] += 1
        if self.unsat:
            return
        self._store(lits)
        idx = len(self.clauses) - 1
        values = [self._lit_value(x) for x in lits]
        if any(v is True for v in values):
            return
        unknown = [x for x, v in zip(lits, values) if v is None]
        if not unknown:
            self._resolve_conflict(list(lits))
        elif len(unknown) == 1:
            self._assign(unknown[0], idx)

    def _store(self, lits: list[int]) -> int:
        self.clauses.append(lits)
        idx = len(self.clauses) - 1
        for x in lits:
            self.occurs[x].append(idx)
        return idx

    def _propagate(self):
        """Unit propagation; returns a falsified clause index or None."""
        if self.qhead == 0:
            # full scan after backtracking
            for idx in range(len(self.clauses)):
                status = self._unit_status(idx)
                if status is False:
                    return idx
        while self.qhead < len(self.trail):
            x = self.trail[self.qhead]
            self.qhead += 1
            for idx in self.occurs[-x]:
                status = self._unit_status(idx)
                if status is False:
                    return idx
        return None

    def _unit_status(self, idx):
        """Assign the clause's last literal if it is unit; False if falsified."""
        unknown = None
        for x in self.clauses[idx]:
            v = self._lit_value(x)
            if v is True:
                return True
            if v is None:
                if unknown is not None:
                    return None
                unknown = x
        if unknown is None:
            return False
        self._assign(unknown, idx)
        return True

    # ------------------------------------------------------------ conflicts
    def _resolve_conflict(self, lits: list[int]):
        """Handle a clause (as integer literals) falsified by the trail."""
        while True:
            lits = [x for x in lits if self.level[abs(x)] > 0]
            if not lits:
                self.unsat = True
                return
            top = max(self.level[abs(x)] for x in lits)
            self._backtrack(top)
            result = self._analyze(lits, top)
            if result[0] == "lower":
                lits = result[1]
                self._store(lits)
                self.stats["learned"] += 1
                continue
            _, learned, uip, back = result
            idx = self._store(learned)
            self.stats["learned"] += 1
            kept = [r.level for r in self.reports if r.level < top]
            target = max([back] + kept)
            self._backtrack(target)
            self._assign(uip, idx)
            self.stats["conflicts"] += 1
            self._conflicts_since_restart += 1
            return

    def _analyze(self, conflict: list[int], d: int):
        """Learn a clause from a conflict whose deepest literals are at level ``d``.

        The asserting literal is chosen no later on the trail than the first
        state reported at level ``d``, so every such state falsifies the
        learned clause.
        """
        limit = min((r.length for r in self.reports if r.level == d), default=len(self.trail))
        seen = set()
        learned = []
        pending = 0
        clause = conflict
        skip = None
        i = len(self.trail) - 1
        while True:
            for x in clause:
                v = abs(x)
                if v == skip or v in seen or self.level[v] == 0:
                    continue
                seen.add(v)
                if self.level[v] == d:
                    pending += 1
                else:
                    learned.append(x)
            if pending == 0:
                return ("lower", learned)
            while abs(self.trail[i]) not in seen:
                i -= 1
            p = self.trail[i]
            v = abs(p)
            i -= 1
            pending -= 1
            if pending == 0 and self.position[v] < limit:
                back = max((self.level[abs(x)] for x in learned), default=0)
                return ("learn", [-p] + learned, -p, back)
            skip = v
            clause = self.clauses[self.reason[v]]

    # ------------------------------------------------------------ decisions
    def _decide(self) -> bool:
        free = [v for v in range(1, len(self.atoms) + 1) if self.value[v] is None]
        if not free:
            return False
        h = self.config.heuristic
        if h == "random":
            v = self.rng.choice(free)
            x = v if self.rng.random() < 0.5 else -v
        else:
            v = free[0]
            x = v if h == "lowest" else -v
        self.trail_lim.append(len(self.trail))
        self._assign(x, None)
        self.stats["decisions"] += 1
        return True

    def _maybe_restart(self):
        unit = self.config.restart
        if not unit or self._conflicts_since_restart < unit * luby(self._restart_index):
            return
        self._restart_index += 1
        self._conflicts_since_restart = 0
        self.stats["restarts"] += 1
        self._backtrack(max((r.level for r in self.reports), default=0))

    def is_total(self) -> bool:
        return all(v is not None for v in self.value[1:])

    # ------------------------------------------------------------ reporting
    def state(self) -> SolverState:
        """Propagate, resolve conflicts and decide as needed, then report."""
        while not self.unsat:
            confl = self._propagate()
            if confl is not None:
                self._resolve_conflict(list(self.clauses[confl]))
                continue
            self._maybe_restart()
            if self.config.report_mode == "only_total":
                if self._decide():
                    continue
            else:
                last = self.reports[-1] if self.reports else None
                if last is not None and last.literals == frozenset(self.trail) and not self.is_total():
                    self._decide()
                    continue
            current = frozenset(self.trail)
            if not self.reports or self.reports[-1].literals != current:
                self.reports.append(_Report(self.decision_level, len(self.trail), current))
            return SolverState(True, tuple((self.atoms[abs(x) - 1], x > 0) for x in self.trail))
        return UNSAT

    def dump_cnf(self) -> str:
        """DIMACS text of the universe and the clause set, with symbolic names in comments."""
        lines = [f"c var {i} {self.decode(i)}" for i in range(1, len(self.atoms) + 1)]
        clauses = list(self.clauses)
        if self.unsat:
            clauses.append([])
        lines.append(f"p cnf {len(self.atoms)} {len(clauses)}")
        lines += [" ".join(map(str, c + [0])) for c in clauses]
        return "\n".join(lines) + "\n"


def check_progress_contract(states: list) -> list[tuple[int, int]]:
    """Pairs ``(i, j)`` violating the progress contract over a sequence of literal sets.

    For i < j, ``states[j]`` must properly extend ``states[i]`` unless no
    state from ``j`` on extends ``states[i]``.
    """
    bad = []
    n = len(states)
    for i in range(n):
        si = states[i]
        j = i + 1
        while j < n and states[j] > si:
            j += 1
        if j < n and any(states[k] >= si for k in range(j, n)):
            bad.append((i, j))
    return bad
