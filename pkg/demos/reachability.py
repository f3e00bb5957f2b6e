"""Propagation along a positive feedback wire.

REACH computes the nodes reachable from a source: R(X) from src(X), and
R(Y) from S(X) and E(X,Y), where S is R fed back. AVOID forbids R(d). On
the instance with edge c->d the system is unsatisfiable. Without
propagation the engine discovers that by trial; with propagation the
least fixpoint of the rule operator forces R(d) at once.

The second half runs the transitive-closure family and compares
iteration counts.
"""

from pathlib import Path

from modex.cli import load_system
from modex.corpus import closure_family
from modex.engine import EngineConfig, solve

DATA = Path(__file__).resolve().parent / "data"


def main():
    flat, oracles, inst = load_system(DATA / "reach.mx", DATA / "reach_unsat.inst")
    for propagate in (False, True):
        out = solve(flat, oracles, inst, EngineConfig(propagate=propagate))
        print(f"propagate={propagate}: {out.status} in {out.iterations} iterations")
        for line in out.trace:
            if line.startswith(("chain", "propagate")):
                print("  " + line.replace("\t", "  "))

    print("\nclosure family (iterations without / with propagation):")
    wins = ties = 0
    for ms in closure_family(16):
        flat = ms.flat()
        a = solve(flat, ms.oracles, ms.instance)
        b = solve(flat, ms.oracles, ms.instance, EngineConfig(propagate=True))
        wins += b.iterations < a.iterations
        ties += b.iterations == a.iterations
        print(f"  {ms.name:11} {len(ms.instance.domain)} nodes  {a.status:6} {a.iterations:3} / {b.iterations:3}"
              f"  ({len(b.propagated)} propagated clauses)")
    print(f"fewer iterations on {wins}, equal on {ties}, of 16")


if __name__ == "__main__":
    main()
