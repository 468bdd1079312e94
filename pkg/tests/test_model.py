import pytest
from hypothesis import given, strategies as st

from monoineq.errors import InputError
from monoineq.model import (
    EQ,
    GE,
    LE,
    ConstraintSystem,
    Direction,
    LinearAtom,
    LinearSet,
    MonomialAtom,
    NatVec,
    SemilinearSet,
    SolveStats,
    Status,
    Verdict,
    Witness,
    caratheodory_bound,
    direction_of,
    drop_redundant_steps,
    eval_linear_atom,
    eval_monomial_atom,
)


class TestNatVec:
    def test_rejects_negative_and_empty(self):
        with pytest.raises(InputError):
            NatVec((1, -1))
        with pytest.raises(InputError):
            NatVec(())

    def test_big_integers_survive(self):
        v = NatVec((2 ** 300, 0))
        assert v[0] == 2 ** 300
        assert v.norm1() == 2 ** 300

    @given(st.lists(st.integers(0, 10 ** 30), min_size=1, max_size=6))
    def test_norm_sandwich(self, coords):
        v = NatVec(coords)
        assert v.norm_inf() <= v.norm1() <= v.dim * v.norm_inf()


class TestAtoms:
    def test_linear_examples(self):
        assert eval_linear_atom(LinearAtom.of({0: 1, 1: 1}, LE, 3), (1, 2))
        assert eval_linear_atom(LinearAtom.of({0: 2, 1: -1}, EQ, 0), (2, 4))
        assert not eval_linear_atom(LinearAtom.of({0: 1}, GE, 1), (0,))

    def test_linear_index_out_of_range(self):
        with pytest.raises(InputError):
            eval_linear_atom(LinearAtom.of({3: 1}, LE, 0), (1, 2))

    def test_coefficients_are_canonical(self):
        a = LinearAtom(((1, 2), (0, 1), (1, -2)), LE, 4)
        assert a.coefficients == ((0, 1),)
        assert a == LinearAtom.of({0: 1}, LE, 4)

    def test_ground_atom(self):
        a = LinearAtom.of({0: 0}, LE, -1)
        assert a.is_ground()
        assert not eval_linear_atom(a, (5,))

    def test_monomial_examples(self):
        assert eval_monomial_atom(MonomialAtom(0, LE, 1, 2), (4, 2))
        assert not eval_monomial_atom(MonomialAtom(0, LE, 1, 2), (10, 3))
        assert eval_monomial_atom(MonomialAtom(0, GE, 1, 0), (1, 0))

    def test_monomial_rejects_equality_and_negative_exponent(self):
        with pytest.raises(InputError):
            MonomialAtom(0, EQ, 1, 2)
        with pytest.raises(InputError):
            MonomialAtom(0, LE, 1, -1)

    def test_monomial_exact_for_huge_values(self):
        x = (2 ** 4096, 2 ** 2048)
        assert eval_monomial_atom(MonomialAtom(0, LE, 1, 2), x)
        assert not eval_monomial_atom(MonomialAtom(0, LE, 1, 2), (x[0] + 1, x[1]))


class TestSystem:
    def test_direction_examples(self):
        le = MonomialAtom(0, LE, 1, 2)
        ge = MonomialAtom(2, GE, 3, 3)
        assert direction_of(ConstraintSystem(2, (), (le,))) == Direction.PURE_LE
        assert direction_of(ConstraintSystem(4, (), (le, ge))) == Direction.MIXED
        assert direction_of(ConstraintSystem(2, (), (MonomialAtom(0, LE, 1, 1),))) == Direction.LINEAR_ONLY
        assert ConstraintSystem(4, (), (ge,)).direction == Direction.PURE_GE

    def test_low_exponents_do_not_count_as_mixed(self):
        s = ConstraintSystem(2, (), (MonomialAtom(0, LE, 1, 2), MonomialAtom(1, GE, 0, 1)))
        assert s.direction == Direction.PURE_LE

    def test_index_validation(self):
        with pytest.raises(InputError):
            ConstraintSystem(1, (LinearAtom.of({1: 1}, LE, 0),))
        with pytest.raises(InputError):
            ConstraintSystem(1, (), (MonomialAtom(0, LE, 2, 2),))
        with pytest.raises(InputError):
            ConstraintSystem(0)

    def test_names(self):
        assert ConstraintSystem(2).names == ("x1", "x2")
        with pytest.raises(InputError):
            ConstraintSystem(2, var_names=("a", "a"))

    def test_satisfied_by(self):
        s = ConstraintSystem(2, (LinearAtom.of({1: 1}, EQ, 4),), (MonomialAtom(0, LE, 1, 2),))
        assert s.satisfied_by((16, 4))
        assert not s.satisfied_by((17, 4))


class TestLinearSet:
    def test_point(self):
        L = LinearSet(NatVec((1, 0)), (NatVec((1, 2)),))
        assert L.point((2,)) == (3, 4)
        assert L.point((0,)) == L.base

    def test_rejects_zero_and_multiple_steps(self):
        with pytest.raises(InputError):
            LinearSet(NatVec((0, 0)), (NatVec((0, 0)),))
        with pytest.raises(InputError):
            LinearSet(NatVec((0, 0)), (NatVec((1, 2)), NatVec((2, 4))))
        with pytest.raises(InputError):
            LinearSet(NatVec((0,)), (NatVec((1, 1)),))

    def test_dependent_non_multiples_are_kept(self):
        kept = drop_redundant_steps([(2, 2), (1, 1), (2, 4), (3, 6), (0, 0), (2, 3)])
        assert kept == [(1, 1), (2, 4), (3, 6), (2, 3)]

    def test_max_coeff_includes_base(self):
        assert LinearSet(NatVec((7, 0)), (NatVec((1, 2)),)).max_coeff() == 7

    def test_semilinear_stats(self):
        S = SemilinearSet((LinearSet(NatVec((0, 3)), (NatVec((1, 2)),)),), 2)
        st_ = S.stats
        assert (st_.max_generator_coeff, st_.max_inf_norm) == (3, 2)
        assert st_.caratheodory_bound == caratheodory_bound(2, 2) == 16
        assert SemilinearSet((), 2).is_empty()


def test_verdict_and_stats():
    v = Verdict(Status.SAT, Witness((1, 2), (0,)))
    assert v.is_sat and v.witness.x_values == (1, 2)
    assert not Verdict.unsat().is_sat
    merged = SolveStats(3, 1, 2, 5).merge(SolveStats(1, 4, 1, 2))
    assert merged == SolveStats(3, 4, 3, 5)
    with pytest.raises(InputError):
        Witness((1,), (-1,))
