"""Cross-check the engine against brute force on the random micro corpus.

Each system is small enough to enumerate. For every one the engine's verdict
must match the enumeration, its witness must be an enumerated solution, and
no clause it learned may exclude a solution.
"""

import sys
import time

from modex.corpus import micro_corpus
from modex.engine import EngineConfig, solve
from modex.solver import check_progress_contract
from modex.verifier import cross_check, enumerate_witnesses


def main(count=60):
    start = time.perf_counter()
    failures = 0
    for ms in micro_corpus(count):
        flat = ms.flat()
        witnesses = enumerate_witnesses(flat, ms.oracles, ms.instance)
        row = [f"{ms.name:9}", f"{len(witnesses):3} sols"]
        for propagate in (False, True):
            out = solve(flat, ms.oracles, ms.instance, EngineConfig(propagate=propagate))
            report = cross_check(out, witnesses)
            learned = [c for _, c in out.reasons + out.advices] + out.propagated
            sound = all(c.satisfied_by(w) for c in learned for w in witnesses)
            ok = report.ok and sound and not check_progress_contract(out.states)
            failures += not ok
            row.append(f"{out.status:6} {out.iterations:3}it {'ok' if ok else 'FAIL'}")
        print("  ".join(row) + "  " + ms.text)
    print(f"\n{count} systems, {failures} failures, {time.perf_counter() - start:.1f}s")
    return failures


if __name__ == "__main__":
    sys.exit(1 if main(int(sys.argv[1]) if len(sys.argv) > 1 else 60) else 0)
