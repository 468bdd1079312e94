import itertools
import random

import pytest

from monoineq.errors import InputError, ResourceExhausted
from monoineq.model import GE, LE, Status, eval_monomial_atom
from monoineq.normal_form import check_normal, instance_from_linear_set
from monoineq.oracle import check_witness, oracle_alpha_search
from monoineq.reductions import (
    GATE_FIELDS,
    ONE,
    Circuit,
    circuit_eval,
    circuit_satisfiable,
    cqc_brute,
    decode_inputs,
    enumerate_circuits,
    nand_to_less,
    nand_to_more,
    parse_values,
    random_circuit,
    subsetsum_dp,
    subsetsum_to_cqc,
)
from monoineq.solver import decide_solved

ONE_GATE = Circuit(("a", "b"), (("g", "a", "b"),), "g")
# t = nand(nand(a, a), a) is constantly 1, so nand(t, t) is constantly 0
CONST_ZERO = Circuit(("a",), (("na", "a", "a"), ("t", "na", "a"), ("out", "t", "t")), "out")


def decide(inst):
    return decide_solved(inst.linear_set, inst.atoms, alpha_bound_hint=inst.alpha_bound,
                         hint_complete=inst.alpha_bound_complete)


class TestCircuit:
    def test_eval(self):
        # frozen truth table of a single NAND gate
        assert [circuit_eval(ONE_GATE, u) for u in itertools.product((0, 1), repeat=2)] == [1, 1, 1, 0]
        ident = Circuit(("a",), (), "a")
        assert circuit_eval(ident, (1,)) == 1 and circuit_eval(ident, (0,)) == 0
        assert [circuit_eval(CONST_ZERO, (a,)) for a in (0, 1)] == [0, 0]

    def test_validation(self):
        with pytest.raises(InputError):
            Circuit(("a",), (("g", "g", "a"),), "g")
        with pytest.raises(InputError):
            Circuit(("a", "a"), (), "a")
        with pytest.raises(InputError):
            Circuit(("a",), (("a", "a", "a"),), "a")
        with pytest.raises(InputError):
            Circuit(("a",), (), "b")
        with pytest.raises(InputError):
            circuit_eval(ONE_GATE, (1,))

    def test_satisfiable(self):
        assert circuit_satisfiable(ONE_GATE)
        assert not circuit_satisfiable(CONST_ZERO)


class TestGadgets:
    @pytest.mark.parametrize("build", [nand_to_more, nand_to_less])
    def test_examples(self, build):
        sat = decide(build(ONE_GATE))
        assert sat.is_sat
        unsat = decide(build(CONST_ZERO))
        assert unsat.status is Status.UNSAT

    @pytest.mark.parametrize("build", [nand_to_more, nand_to_less])
    def test_layout(self, build):
        inst = build(ONE_GATE)
        assert inst.alpha_bound == 1 and inst.alpha_bound_complete
        assert inst.var_names == ("a", "b") + tuple(f"g.{f}" for f in GATE_FIELDS) + (ONE,)
        L = inst.linear_set
        # one step per input, four per gate
        assert L.K == 2 + 4
        # block diagonal: a gate's steps touch only the gate's own coordinates
        gate_cols = {i for i, n in enumerate(inst.var_names) if n.startswith("g.")}
        for step in L.steps[2:]:
            assert {i for i, v in enumerate(step) if v} <= gate_cols
        relations = {a.relation for a in inst.atoms}
        assert relations == ({GE} if build is nand_to_more else {LE})

    @pytest.mark.parametrize("build", [nand_to_more, nand_to_less])
    def test_instances_are_not_normal(self, build):
        inst = build(ONE_GATE)
        assert check_normal(instance_from_linear_set(inst.linear_set, inst.atoms))

    @pytest.mark.parametrize("build", [nand_to_more, nand_to_less])
    def test_solutions_are_boolean_and_decode(self, build):
        inst = build(ONE_GATE)
        for alpha in itertools.product((0, 1, 2), repeat=inst.linear_set.K):
            x = inst.linear_set.point(alpha)
            if all(eval_monomial_atom(a, x) for a in inst.atoms):
                assert set(alpha) <= {0, 1}
                assert circuit_eval(ONE_GATE, decode_inputs(ONE_GATE, inst, x)) == 1

    @pytest.mark.parametrize("build", [nand_to_more, nand_to_less])
    def test_witness_decodes_to_satisfying_input(self, build):
        c = Circuit(("p", "q", "r"), (("n1", "p", "q"), ("n2", "n1", "r"), ("n3", "n2", "n2")), "n3")
        inst = build(c)
        v = decide(inst)
        assert v.is_sat == circuit_satisfiable(c)
        assert check_witness((inst.linear_set, inst.atoms), v.witness)
        assert circuit_eval(c, decode_inputs(c, inst, v.witness.x_values)) == 1

    def test_small_corpus(self):
        corpus = enumerate_circuits(2, 3)
        assert len({(c.gates, c.output) for c in corpus}) == len(corpus)
        for c in corpus:
            truth = circuit_satisfiable(c)
            assert decide(nand_to_more(c)).is_sat == truth
            assert decide(nand_to_less(c)).is_sat == truth

    @pytest.mark.parametrize("seed", range(5))
    def test_random_circuits_against_oracle(self, seed):
        c = random_circuit(random.Random(seed), 2, 2)
        for build in (nand_to_more, nand_to_less):
            inst = build(c)
            found = oracle_alpha_search(inst.linear_set, inst.atoms, 1)
            assert (found is not None) == circuit_satisfiable(c)


def test_enumerate_circuits_shape():
    corpus = enumerate_circuits(1, 2)
    assert [c.output for c in corpus[:1]] == ["i0"]
    assert all(len(c.gates) <= 2 for c in corpus)
    # every gate feeds the output
    for c in corpus:
        used = {c.output}
        for out, a, b in reversed(c.gates):
            if out in used:
                used |= {a, b}
        assert all(g[0] in used for g in c.gates)


class TestSubsetSum:
    def test_eq1_examples(self):
        inst = subsetsum_to_cqc([3, 5, -8])
        assert inst.lhs((1, 1, 1)) == 0
        assert inst.holds((0, 0, 0))
        assert inst.lhs((1, 0, 0)) == 9

    def test_brute(self):
        assert cqc_brute(subsetsum_to_cqc([3, 5, -8]), nonempty=True).is_sat
        assert not cqc_brute(subsetsum_to_cqc([1, 2]), nonempty=True).is_sat
        assert not cqc_brute(subsetsum_to_cqc([]), nonempty=True).is_sat
        assert cqc_brute(subsetsum_to_cqc([1, 2])).is_sat
        empty = cqc_brute(subsetsum_to_cqc([]))
        assert empty.is_sat and empty.certificate_note == "empty assignment"
        with pytest.raises(ResourceExhausted):
            cqc_brute(subsetsum_to_cqc([1] * 25))

    def test_brute_uses_instance_flag(self):
        assert not cqc_brute(subsetsum_to_cqc([1, 2], nonempty=True)).is_sat

    def test_dp(self):
        assert subsetsum_dp([3, 5, -8], nonempty=True)
        assert not subsetsum_dp([1, 2], nonempty=True)
        assert subsetsum_dp([0], nonempty=True)
        assert subsetsum_dp([1, 2])
        with pytest.raises(InputError):
            subsetsum_dp([10 ** 7])

    def test_polynomial_text(self):
        text = subsetsum_to_cqc([3, -1], nonempty=True).polynomial()
        assert text == "(x1^2 - x1) + (x2^2 - x2) + (3*x1 + -1*x2)^2 <= 0 and x1 + x2 >= 1"

    @pytest.mark.parametrize("seed", range(30))
    def test_dp_agrees_with_brute(self, seed):
        rng = random.Random(seed)
        values = [rng.randint(-9, 9) for _ in range(rng.randint(0, 8))]
        inst = subsetsum_to_cqc(values)
        assert cqc_brute(inst, nonempty=True).is_sat == subsetsum_dp(values, nonempty=True)
        assert inst.holds((0,) * len(values))

    def test_off_cube_points_fail(self):
        inst = subsetsum_to_cqc([3, 5, -8])
        for x in itertools.product(range(3), repeat=3):
            if max(x) > 1:
                assert inst.lhs(x) > 0

    def test_parse_values(self):
        assert parse_values("3,5,-8") == [3, 5, -8]
        assert parse_values(" ") == []
        with pytest.raises(InputError):
            parse_values("1,,2")
