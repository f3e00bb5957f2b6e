"""Graph colouring as model expansion.

The instance is a graph (relation E). The expansion symbols R, G and B are
unknown colour classes. A clausal module says every vertex gets exactly one
colour and adjacent vertices differ. The engine finds a colouring of the
triangle, the brute-force verifier lists all six, and adding a clique
module on the complete graph on four vertices makes the system
unsatisfiable.
"""

from pathlib import Path

from modex.cli import load_system
from modex.engine import solve
from modex.structures import format_structure
from modex.verifier import enumerate_solutions

DATA = Path(__file__).resolve().parent / "data"


def main():
    flat, oracles, inst = load_system(DATA / "k3.mx", DATA / "k3.inst")
    print("Triangle K3, one clausal module COL.")
    out = solve(flat, oracles, inst)
    print(f"engine: {out.status} after {out.iterations} iterations, "
          f"{len(out.reasons)} reasons and {len(out.advices)} advices")
    print(format_structure(out.model.restrict(["R", "G", "B"])), end="")
    sols = enumerate_solutions(flat, oracles, inst)
    print(f"brute force: {len(sols)} colourings; the engine's is among them: {out.model in sols}\n")

    flat, oracles, inst = load_system(DATA / "k4clique.mx", DATA / "k4.inst")
    print("Complete graph K4 with COL & CLQ.")
    out = solve(flat, oracles, inst)
    print(f"engine: {out.status} after {out.iterations} iterations")
    print("first reasons the solver learned from COL:")
    for module, clause in out.reasons[:3]:
        print(f"  {module}: {clause}")


if __name__ == "__main__":
    main()
