"""Flattening an ILP branch-and-cut architecture with two feedback loops.

Two constraint modules ILPc and ILPp are intersected, composed with a
branching module LPB, and then two wires close the loop: L=L' carries the
branching literals back, R=R' carries the recorded cuts. Flattening turns
each wire into an alias so the solver sees one variable per wire.
"""

from modex.algebra import flatten, parse_system, to_text
from modex.structures import Vocabulary

EXPR = "project {F,L} (((ILPc & ILPp) |> LPB)[L=L'][R=R'])"


def main():
    ast = parse_system(EXPR)
    print("parsed:", ast)
    print("printed back:", to_text(ast))
    vocabularies = {
        "ILPc": Vocabulary.of(F=1, R=1, **{"L'": 1}),
        "ILPp": Vocabulary.of(F=1, R=1, **{"L'": 1}),
        "LPB": Vocabulary.of(F=1, L=1, **{"R'": 1}),
    }
    flat = flatten(ast, vocabularies)
    print("\nflat modules and their symbol maps:")
    for m in flat.modules:
        print(f"  {m.name}: {m.mapping}")
    # both wires cross module boundaries, so no single module can run a fixpoint on them
    print("feedback sites inside one module:", flat.feedbacks)
    print("search vocabulary:", list(flat.search_vocab))
    print("output vocabulary:", list(flat.output_vocab))


if __name__ == "__main__":
    main()
