"""Builtin modules and a loader keyed by module kind."""

from .alldiff import AllDifferentModule, load_alldiff, parse_alldiff
from .clausal import ClausalModule, load_clausal, parse_clauses
from .ila import BoundedILAModule, LinearConstraint, UnboundedVariable, load_ila, parse_constraint, parse_ila
from .rules import MonotoneRuleModule, load_rules, parse_rules, rules_from_text

KINDS = ("clausal", "alldiff", "ila", "rules")


def load_module(kind: str, path, name: str, domain):
    """Build the module of ``kind`` from its parameter file."""
    if kind == "clausal":
        return load_clausal(path, domain, name)
    if kind == "alldiff":
        return load_alldiff(path, name)
    if kind == "ila":
        return load_ila(path, name)
    if kind == "rules":
        return load_rules(path, name)
    raise ValueError(f"unknown module kind {kind!r}")


__all__ = ["AllDifferentModule", "BoundedILAModule", "ClausalModule", "MonotoneRuleModule",
           "LinearConstraint", "UnboundedVariable", "KINDS", "load_module", "load_alldiff", "load_clausal",
           "load_ila", "load_rules", "parse_alldiff", "parse_clauses", "parse_constraint", "parse_ila",
           "parse_rules", "rules_from_text"]
