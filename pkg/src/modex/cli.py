"""``modex`` command line: solve, verify and certify modular systems.

Exit codes: 0 model found (or certification clean), 20 unsatisfiable,
30 resource limit hit, 10 usage or input error, 1 certification violations.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .algebra import ArityClash, SystemSyntaxError, UnknownModule, flatten, parse_system_file
from .engine import EngineConfig, solve
from .modules import load_module
from .oracle import EnumerationTooLarge, MisbehavingOracle, certify_oracle
from .structures import Structure, VocabularyClash, format_structure, parse_instance
from .verifier import DEFAULT_CAP, enumerate_solutions

EXIT_MODEL, EXIT_USAGE, EXIT_UNSAT, EXIT_RESOURCE, EXIT_VIOLATION = 0, 10, 20, 30, 1


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def load_system(system_path, instance_path):
    """Parse the system and instance files and build every declared module."""
    system_path = Path(system_path)
    sysfile = parse_system_file(system_path.read_text())
    instance = parse_instance(Path(instance_path).read_text())
    oracles = {}
    for decl in sysfile.modules:
        path = Path(decl.path)
        if not path.is_absolute():
            path = system_path.parent / path
        oracles[decl.name] = load_module(decl.kind, path, decl.name, instance.domain)
    flat = flatten(sysfile.expr, {n: o.vocabulary for n, o in oracles.items()})
    return flat, oracles, instance


def _instance_view(flat, instance: Structure) -> Structure:
    """Instance restricted to symbols the system knows about."""
    names = [n for n in instance.vocabulary if n in flat.search_vocab]
    return instance.restrict(names)


def _output(structure: Structure) -> str:
    return format_structure(structure)


def cmd_solve(args) -> int:
    flat, oracles, instance = load_system(args.system, args.instance)
    instance = _instance_view(flat, instance)
    cfg = EngineConfig(report_mode="only_total" if args.report_mode == "total" else "after_each_decision",
                       heuristic=args.heuristic, seed=args.seed, restart=args.restart,
                       propagate=args.propagate, collect_all=args.collect_all,
                       advice_budget=args.advice_budget, max_iterations=args.max_iterations,
                       time_limit=args.time_limit)
    outcome = solve(flat, oracles, instance, cfg)
    if args.trace:
        Path(args.trace).write_text("\n".join(outcome.trace) + "\n")
    if args.dump_cnf:
        Path(args.dump_cnf).write_text(outcome.solver.dump_cnf())
    if outcome.status == "model":
        sys.stdout.write("MODEL\n" + _output(outcome.model))
        return EXIT_MODEL
    if outcome.status == "unsat":
        print("UNSAT")
        return EXIT_UNSAT
    print(f"RESOURCE-OUT {outcome.kind}")
    return EXIT_RESOURCE


def cmd_verify(args) -> int:
    flat, oracles, instance = load_system(args.system, args.instance)
    instance = _instance_view(flat, instance)
    sols = enumerate_solutions(flat, oracles, instance, cap=args.cap)
    print(f"SOLUTIONS {len(sols)}")
    for i, s in enumerate(sols, 1):
        sys.stdout.write(f"# solution {i}\n" + _output(s))
    return EXIT_MODEL if sols else EXIT_UNSAT


def cmd_certify(args) -> int:
    flat, oracles, instance = load_system(args.system, args.instance)
    if args.module not in oracles:
        raise UsageError(f"no module named {args.module!r}; declared: {', '.join(oracles)}")
    oracle = oracles[args.module]
    inst = instance.restrict([n for n in instance.vocabulary if n in oracle.vocabulary])
    report = certify_oracle(oracle, inst, max_probes=args.probes, seed=args.seed)
    print(report.summary())
    return EXIT_MODEL if report.ok else EXIT_VIOLATION


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="modex", description="Model expansion for modular systems.")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    s = sub.add_parser("solve", help="search for one model")
    s.add_argument("system")
    s.add_argument("--instance", required=True)
    s.add_argument("--trace")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--propagate", action="store_true", help="propagate along feedback wires")
    s.add_argument("--report-mode", choices=["after-decision", "total"], default="after-decision")
    s.add_argument("--heuristic", choices=["lowest", "lowest-negative", "random"], default="lowest")
    s.add_argument("--restart", type=int, default=None, metavar="UNIT", help="luby restarts")
    s.add_argument("--collect-all", action="store_true", help="add every rejecting module's reason")
    s.add_argument("--advice-budget", type=int, default=64)
    s.add_argument("--max-iterations", type=int, default=10 ** 6)
    s.add_argument("--time-limit", type=float, default=None)
    s.add_argument("--dump-cnf")
    s.set_defaults(func=cmd_solve)

    v = sub.add_parser("verify", help="enumerate all solutions by brute force")
    v.add_argument("system")
    v.add_argument("--instance", required=True)
    v.add_argument("--cap", type=int, default=DEFAULT_CAP)
    v.set_defaults(func=cmd_verify)

    c = sub.add_parser("certify", help="check one module's oracle against its definition")
    c.add_argument("system")
    c.add_argument("--instance", required=True)
    c.add_argument("--module", required=True)
    c.add_argument("--probes", type=int, default=1000)
    c.add_argument("--seed", type=int, default=0)
    c.set_defaults(func=cmd_certify)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if not getattr(args, "func", None):
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except (OSError, ValueError, KeyError, SystemSyntaxError, UnknownModule, ArityClash,
            VocabularyClash, EnumerationTooLarge, UsageError) as exc:
        print(f"modex: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except MisbehavingOracle as exc:
        print(f"modex: misbehaving oracle: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
