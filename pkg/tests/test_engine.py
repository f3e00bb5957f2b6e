import pytest

from conftest import load_demo
from modex.algebra import Primitive, flatten
from modex.engine import EngineConfig, solve
from modex.modules import ClausalModule
from modex.oracle import ACCEPT, MisbehavingOracle, Oracle, reject
from modex.reasons import GroundClause
from modex.solver import check_progress_contract
from modex.structures import Domain, Structure, Vocabulary, lit
from modex.verifier import enumerate_witnesses


def test_k3_model_is_a_proper_colouring(k3):
    flat, oracles, inst = k3
    out = solve(flat, oracles, inst)
    assert out.status == "model"
    assert out.witness in enumerate_witnesses(flat, oracles, inst)
    assert out.model.restrict(["E"]) == inst


def test_k4_clique_unsat():
    flat, oracles, inst = load_demo("k4clique.mx", "k4.inst")
    assert solve(flat, oracles, inst).status == "unsat"


def test_accept_all_returns_first_total():
    m = ClausalModule(Vocabulary.of(P=1), [], "ANY")
    flat = flatten(Primitive("ANY"), {"ANY": m.vocabulary})
    inst = Structure(Domain([0, 1]), Vocabulary(), {})
    out = solve(flat, {"ANY": m}, inst)
    assert out.status == "model" and out.model["P"] == {(0,), (1,)}


class Liar(Oracle):
    name = "LIAR"
    vocabulary = Vocabulary.of(P=1)

    def accept(self, b):
        return reject([lit("P(0)")]) if b.value(("P", (0,))) is not False else ACCEPT


def test_misbehaving_oracle_aborts():
    flat = flatten(Primitive("LIAR"), {"LIAR": Liar.vocabulary})
    with pytest.raises(MisbehavingOracle):
        solve(flat, {"LIAR": Liar()}, Structure(Domain([0]), Vocabulary(), {}))


def test_iteration_budget(k3):
    flat, oracles, inst = k3
    out = solve(flat, oracles, inst, EngineConfig(max_iterations=1))
    assert out.status == "resource-out" and out.kind == "iterations"
    assert out.trace[-1] == "resource-out\titerations"


@pytest.mark.parametrize("cfg", [EngineConfig(report_mode="only_total"), EngineConfig(collect_all=True),
                                 EngineConfig(heuristic="random", seed=5), EngineConfig(restart=1),
                                 EngineConfig(advice_budget=0)])
def test_configurations_agree_with_brute_force(cfg):
    for system, inst_file in [("k3.mx", "k3.inst"), ("k4clique.mx", "k4.inst"), ("smt.mx", "smt.inst"),
                              ("timetable.mx", "timetable.inst"), ("reach.mx", "reach_unsat.inst")]:
        flat, oracles, inst = load_demo(system, inst_file)
        out = solve(flat, oracles, inst, cfg)
        witnesses = enumerate_witnesses(flat, oracles, inst)
        assert out.sat == bool(witnesses), system
        if out.sat:
            assert out.witness in witnesses
        assert check_progress_contract(out.states) == []


def test_trace_lines(k3):
    flat, oracles, inst = k3
    out = solve(flat, oracles, inst)
    events = [line.split("\t")[0] for line in out.trace]
    assert events[0] == "state" and events[-1] == "model"
    assert set(events) <= {"state", "advice", "reason", "model"}
    reason_lines = [l for l in out.trace if l.startswith("reason\t")]
    assert all(" : " in l for l in reason_lines)


def test_no_total_proposed_twice(k3):
    flat, oracles, inst = load_demo("k4clique.mx", "k4.inst")
    out = solve(flat, oracles, inst, EngineConfig(report_mode="only_total"))
    assert len(set(out.states)) == len(out.states)
    assert out.iterations <= 2 ** 12
