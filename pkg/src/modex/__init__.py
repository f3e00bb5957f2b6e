"""Model expansion for modular systems with lazy, oracle-driven search."""

from .algebra import (Compose, Feedback, FlatSystem, Intersect, Primitive, Project, SystemSyntaxError,
                      accepts_total, flatten, parse_system, parse_system_file)
from .engine import EngineConfig, SolveOutcome, solve
from .oracle import ACCEPT, CertificationReport, Oracle, Verdict, certify_oracle, reject
from .propagation import (FeedbackChain, ModuleProperties, NonMonotoneObserved, negative_fixpoint,
                          positive_fixpoint, propagate_feedback)
from .reasons import Advice, GroundClause, Reason, advice_to_clause, check_advice_valid, clause
from .solver import OnlineSolver, SolverConfig, SolverState, check_progress_contract
from .structures import (Contradiction, Domain, GroundLiteral, IncomparableStructures, PartialStructure,
                         Structure, Symbol, Truth, Vocabulary, VocabularyClash, empty_expansion, evaluate,
                         extends, lit, parse_instance)
from .verifier import cross_check, enumerate_solutions, enumerate_witnesses

__version__ = "0.1.0"
