"""The lazy model-expansion loop: a search engine driven by module oracles.

Each round reads the solver's state, collects advices from every module,
then asks the modules in registration order whether they accept. The
first rejection's reason becomes a new clause. A total state accepted by
every module is the answer.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Mapping

from .algebra import FlatSystem
from .oracle import MisbehavingOracle
from .propagation import feedback_chains, propagate_feedback
from .reasons import GroundClause, format_reason
from .solver import OnlineSolver, SolverConfig
from .structures import (GroundLiteral, PartialStructure, Structure, Truth, VocabularyClash, evaluate,
                         iter_atoms)


@dataclass(frozen=True)
class EngineConfig:
    report_mode: str = "after_each_decision"
    heuristic: str = "lowest"
    seed: int = 0
    restart: int | None = None
    propagate: bool = False
    collect_all: bool = False
    advice_budget: int = 64
    max_iterations: int = 10 ** 6
    time_limit: float | None = None

    def solver_config(self) -> SolverConfig:
        return SolverConfig(self.report_mode, self.heuristic, self.seed, self.restart)


@dataclass
class SolveOutcome:
    status: str                       # "model", "unsat" or "resource-out"
    model: Structure | None = None    # over the output vocabulary
    witness: Structure | None = None  # over the full search vocabulary
    kind: str | None = None           # budget that ran out
    iterations: int = 0
    trace: list = field(default_factory=list)
    states: list = field(default_factory=list)      # literal sets of reported states
    reasons: list = field(default_factory=list)     # (module, flat clause)
    advices: list = field(default_factory=list)     # (module, flat clause)
    propagated: list = field(default_factory=list)  # flat clauses from feedback chains
    chains: list = field(default_factory=list)
    solver: OnlineSolver | None = None

    @property
    def sat(self) -> bool:
        return self.status == "model"


def _rename_literal(l: GroundLiteral, mapping: Mapping[str, str], module: str) -> GroundLiteral:
    if l.symbol not in mapping:
        raise MisbehavingOracle(f"{module} used symbol {l.symbol} outside its vocabulary")
    return GroundLiteral(mapping[l.symbol], l.args, l.positive)


def _fmt(lits) -> str:
    return " ".join(str(l) for l in sorted(lits, key=GroundLiteral.sort_key))


class Engine:
    """One run of the lazy loop; ``solve`` wraps construction and :meth:`run`."""

    def __init__(self, flat: FlatSystem, oracles: Mapping[str, object], instance: Structure,
                 config: EngineConfig | None = None):
        self.config = config or EngineConfig()
        missing = [m.name for m in flat.modules if m.name not in oracles]
        if missing:
            raise KeyError(f"no oracle registered for {missing}")
        sigma = instance.vocabulary
        self.flat = flat.with_instance(sigma)
        self.oracles = oracles
        self.instance = instance
        self.domain = instance.domain
        self.epsilon = self.flat.expansion_vocab
        atoms = list(iter_atoms(self.domain, self.epsilon))
        fixed = {(n, t): t in instance[n] for n in sigma for t in self.domain.tuples(sigma.arity(n))}
        self.solver = OnlineSolver(atoms, fixed, self.config.solver_config())
        self._seen_advice: set = set()
        self.outcome = SolveOutcome("resource-out", solver=self.solver)

    def _log(self, event: str, payload: str = ""):
        self.outcome.trace.append(f"{event}\t{payload}" if payload else event)

    def partial(self, assignment) -> PartialStructure:
        pos = {n: set() for n in self.epsilon}
        neg = {n: set() for n in self.epsilon}
        for (n, t), v in assignment:
            (pos if v else neg)[n].add(t)
        total = {n: self.instance[n] for n in self.instance.vocabulary}
        return PartialStructure(self.domain, self.flat.search_vocab, total, pos, neg, set(self.epsilon))

    def _add_advices(self, b: PartialStructure) -> int:
        added = 0
        for m in self.flat.modules:
            local = self.flat.restrict(b, m)
            oracle = self.oracles[m.name]
            for adv in oracle.advices(local, self.config.advice_budget):
                if not all(local.literal_value(l) is True for l in adv.pre) or \
                        evaluate(local, adv.post) is not Truth.UNKNOWN:
                    raise MisbehavingOracle(f"{m.name} returned malformed advice {adv}")
                mapping = m.mapping
                clause = GroundClause(_rename_literal(l, mapping, m.name) for l in adv.to_clause())
                if clause in self._seen_advice:
                    continue
                self._seen_advice.add(clause)
                self.outcome.advices.append((m.name, clause))
                self._log("advice", format_reason(m.name, clause))
                self.solver.add_clause(clause)
                added += 1
        return added

    def _check_modules(self, b: PartialStructure) -> bool:
        rejected = False
        for m in self.flat.modules:
            local = self.flat.restrict(b, m)
            verdict = self.oracles[m.name].accept(local)
            if verdict.accepted:
                continue
            reason = verdict.reason
            if reason is None or evaluate(local, reason) is not Truth.FALSIFIED:
                raise MisbehavingOracle(f"{m.name} rejected with reason {reason} not falsified by the state")
            clause = GroundClause(_rename_literal(l, m.mapping, m.name) for l in reason)
            self.outcome.reasons.append((m.name, clause))
            self._log("reason", format_reason(m.name, clause))
            self.solver.add_clause(clause)
            rejected = True
            if not self.config.collect_all:
                break
        return rejected

    def _propagate(self, b: PartialStructure) -> int:
        chains = feedback_chains(self.flat, self.oracles, b)
        for ch in chains:
            self._log("chain", ch.describe())
            self.outcome.chains.append(ch)
        clauses = []
        count = propagate_feedback(clauses.append, chains)
        for c in clauses:
            self.outcome.propagated.append(c)
            self._log("propagate", " ".join(str(l) for l in c) or "[]")
            self.solver.add_clause(c)
        return count

    def run(self) -> SolveOutcome:
        out = self.outcome
        cfg = self.config
        start = time.monotonic()
        while True:
            if out.iterations >= cfg.max_iterations:
                return self._finish("resource-out", kind="iterations")
            if cfg.time_limit is not None and time.monotonic() - start > cfg.time_limit:
                return self._finish("resource-out", kind="time")
            out.iterations += 1
            st = self.solver.state()
            if not st.sat:
                return self._finish("unsat")
            b = self.partial(st.assignment)
            lits = st.literals
            out.states.append(lits)
            self._log("state", f"{out.iterations}\t{_fmt(lits)}")
            self._add_advices(b)
            if self._check_modules(b):
                continue
            if b.is_total():
                witness = b.to_structure()
                out.witness = witness
                out.model = witness.restrict(self.flat.output_vocab)
                return self._finish("model")
            if cfg.propagate:
                self._propagate(b)

    def _finish(self, status: str, kind: str | None = None) -> SolveOutcome:
        self.outcome.status = status
        self.outcome.kind = kind
        self._log(status, kind or "")
        return self.outcome


def solve(flat: FlatSystem, oracles: Mapping[str, object], instance: Structure,
          config: EngineConfig | None = None) -> SolveOutcome:
    """Search for a member of ``flat`` expanding ``instance``."""
    return Engine(flat, oracles, instance, config).run()


__all__ = ["EngineConfig", "SolveOutcome", "Engine", "solve", "VocabularyClash"]
