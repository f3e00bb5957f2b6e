"""Constraint answer set programming as an algebraic expression.

A constraint module CP and an answer-set module ASP are composed and the
ASP's choice of theory literals L is fed back into CP's input L'. Only the
parse and flatten stages are shown; neither module kind is built in.
"""

from modex.algebra import SystemSyntaxError, flatten, parse_system, to_text
from modex.structures import Vocabulary

EXPR = "project {F,M,L} ((CP |> ASP)[L=L'])"


def main():
    ast = parse_system(EXPR)
    print("parsed:", ast)
    assert parse_system(to_text(ast)) == ast
    flat = flatten(ast, {"CP": Vocabulary.of(F=1, **{"L'": 1}), "ASP": Vocabulary.of(F=1, M=1, L=1)})
    print("aliases:", {k: v for k, v in flat.alias.items() if k != v})
    print("output vocabulary:", list(flat.output_vocab))

    print("\nsyntax errors carry a position:")
    for bad in ["(CP |> ASP)[L=]", "project {F (CP)"]:
        try:
            parse_system(bad)
        except SystemSyntaxError as exc:
            print(f"  {bad!r}: {exc}")


if __name__ == "__main__":
    main()
