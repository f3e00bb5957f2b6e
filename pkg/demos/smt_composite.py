"""A lazy SMT solver assembled from two modules.

SAT is a clausal module over the Boolean skeleton L. ILP is a bounded
integer-arithmetic module whose atoms L'(p), L'(q), L'(r) stand for linear
constraints over x, y and z. Composing them and wiring L back into L'
gives a system whose solutions are the Boolean assignments that the
arithmetic can realise. The ILP module also exposes R (recorded conflicts)
and A (recorded theory propagations); every solution must have R empty.
"""

from pathlib import Path

from modex.cli import load_system
from modex.engine import solve
from modex.structures import format_structure
from modex.verifier import enumerate_witnesses

DATA = Path(__file__).resolve().parent / "data"


def main():
    flat, oracles, inst = load_system(DATA / "smt.mx", DATA / "smt.inst")
    print("modules in registration order:", [m.name for m in flat.modules])
    print("aliases:", {k: v for k, v in flat.alias.items() if k != v})
    print("output vocabulary:", list(flat.output_vocab), "\n")

    out = solve(flat, oracles, inst)
    print("trace of the run:")
    for line in out.trace:
        print("  " + line.replace("\t", "  "))
    print("\nsolution (projected):")
    print(format_structure(out.model), end="")

    witnesses = enumerate_witnesses(flat, oracles, inst)
    print(f"\nall {len(witnesses)} witnesses have R empty:", all(not w["R"] for w in witnesses))
    print("L in each witness:", [sorted(x for (x,) in w["L"]) for w in witnesses])


if __name__ == "__main__":
    main()
