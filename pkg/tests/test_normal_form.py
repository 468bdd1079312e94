import itertools
import random

import pytest

from monoineq.errors import InputError
from monoineq.model import EQ, GE, LE, ConstraintSystem, LinearAtom, LinearSet, MonomialAtom, NatVec
from monoineq.model import eval_linear_atom
from monoineq.normal_form import (
    candidate_orders,
    check_normal,
    compute_profile,
    first_row_zero,
    instance_from_linear_set,
    normalize,
)
from monoineq.semilinear import points_in_box

from gen import random_linear_system


def test_candidate_orders():
    assert list(candidate_orders(ConstraintSystem(1))) == [(0,)]
    assert list(candidate_orders(ConstraintSystem(3))) == list(itertools.permutations(range(3)))


def test_candidate_orders_prunes_forced_order():
    s = ConstraintSystem(2, (LinearAtom.of({0: 1}, EQ, 2), LinearAtom.of({1: 1}, EQ, 5)))
    assert list(candidate_orders(s)) == [(0, 1)]
    s = ConstraintSystem(2, (LinearAtom.of({0: -2}, LE, -7), LinearAtom.of({1: 3}, LE, 9)))
    assert list(candidate_orders(s)) == [(1, 0)]


def test_normalize_example():
    # x is variable 0, y is variable 1; the order puts y first
    s = ConstraintSystem(2, (LinearAtom.of({1: 1, 0: -1}, LE, 0),), (MonomialAtom(1, LE, 0, 2),), ("x", "y"))
    (inst,) = normalize(s, (1, 0))
    assert inst.component == LinearSet(NatVec((0, 0)), (NatVec((1, 1)), NatVec((0, 1))))
    assert inst.atoms == (MonomialAtom(0, LE, 1, 2),)
    assert inst.permutation == (1, 0)
    points = points_in_box(inst.component, 6)
    assert points == {(u, v) for u in range(7) for v in range(7) if u <= v}


def test_normalize_single_variable():
    (inst,) = normalize(ConstraintSystem(1, (LinearAtom.of({0: 1}, GE, 2),)), (0,))
    assert inst.component == LinearSet(NatVec((2,)), (NatVec((1,)),))
    assert inst.m == 2


def test_normalize_inconsistent():
    s = ConstraintSystem(1, (LinearAtom.of({0: 1}, EQ, 1), LinearAtom.of({0: 1}, EQ, 2)))
    assert normalize(s, (0,)) == []


def test_normalize_rejects_bad_order():
    s = ConstraintSystem(2, (), (MonomialAtom(0, LE, 1, 2),))
    with pytest.raises(InputError):
        normalize(s, (0, 0))
    with pytest.raises(InputError):
        normalize(s, (0,))


def test_normalize_projects_unordered_variables():
    s = ConstraintSystem(3, (LinearAtom.of({0: 1, 2: 1}, EQ, 3),), (MonomialAtom(0, LE, 1, 2),))
    for inst in normalize(s, (1, 0)):
        assert inst.component.dim == 2
        assert inst.full.dim == 3
        assert inst.full.K == inst.component.K
        for alpha in itertools.product(range(3), repeat=inst.K):
            x = inst.full.point(alpha)
            y = inst.component.point(alpha)
            assert x[0] + x[2] == 3
            assert y == (x[1], x[0])


def test_check_normal_hand_built():
    steps_out_of_order = LinearSet(NatVec((0, 0)), (NatVec((0, 1)), NatVec((1, 2))))
    assert check_normal(instance_from_linear_set(steps_out_of_order, ())) == ["lex-order"]
    assert check_normal(instance_from_linear_set(LinearSet(NatVec((2, 1))), ())) == ["base-sorted"]
    unsorted_step = LinearSet(NatVec((0, 0)), (NatVec((1, 0)),))
    assert check_normal(instance_from_linear_set(unsorted_step, ())) == ["steps-sorted"]


def test_profile_conventions():
    steps = [(1, 1, 2), (0, 1, 1), (0, 0, 1)]
    prof = compute_profile(steps, 3)
    assert prof.j_star == (1, 2, 3)
    assert prof.supp == (frozenset({0}), frozenset({0, 1}), frozenset({0, 1, 2}))
    assert prof.i_star == (0, 1, 2)
    assert prof.null_set == (frozenset(), frozenset({0}), frozenset({0, 1}))


def test_first_row_zero_is_informational():
    L = LinearSet(NatVec((0, 0)), (NatVec((1, 1)), NatVec((0, 1))))
    inst = instance_from_linear_set(L, ())
    assert not first_row_zero(inst)
    assert check_normal(inst) == []


def _chain_ok(y):
    return all(a <= b for a, b in zip(y, y[1:]))


@pytest.mark.parametrize("seed", range(30))
def test_every_emitted_instance_is_normal_and_sound(seed):
    system = random_linear_system(random.Random(2000 + seed))
    n = system.num_vars
    for sigma in itertools.permutations(range(n)):
        new_of = {old: new for new, old in enumerate(sigma)}
        renamed = [a.renamed(new_of) for a in system.linear]
        for inst in normalize(system, sigma):
            assert check_normal(inst) == []
            for alpha in itertools.product(range(5), repeat=inst.K):
                if sum(alpha) > 4:
                    continue
                y = inst.component.point(alpha)
                assert _chain_ok(y)
                assert all(eval_linear_atom(a, y) for a in renamed)


@pytest.mark.parametrize("seed", range(30))
def test_orders_cover_the_solution_set(seed):
    system = random_linear_system(random.Random(3000 + seed))
    n = system.num_vars
    bound = 4
    covered = set()
    for sigma in itertools.permutations(range(n)):
        for inst in normalize(system, sigma):
            covered |= points_in_box(inst.full, bound)
    expected = {x for x in itertools.product(range(bound + 1), repeat=n) if system.satisfied_by(x)}
    assert covered == expected
