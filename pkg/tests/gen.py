"""Seeded instance generators shared by the unit and acceptance tests."""

from __future__ import annotations

import itertools
import random

from monoineq.model import EQ, GE, LE, ConstraintSystem, LinearAtom, LinearSet, MonomialAtom, NatVec
from monoineq.model import drop_redundant_steps
from monoineq.normal_form import check_normal, instance_from_linear_set
from monoineq.qfbapa import (
    And,
    Card,
    Compl,
    Dvd,
    Empty,
    Inter,
    IntLe,
    IntEq,
    IntLit,
    IntVar,
    Maxc,
    Not,
    Or,
    Plus,
    Scale,
    SetEq,
    SetVar,
    Subset,
    Union_,
    Univ,
    make_formula,
)


def random_linear_system(rng: random.Random) -> ConstraintSystem:
    """n <= 4, coefficients in [-2, 2], constants in [0, 4], at most 3 atoms."""
    n = rng.randint(1, 4)
    atoms = []
    for _ in range(rng.randint(0, 3)):
        coefs = {v: rng.randint(-2, 2) for v in range(n)}
        atoms.append(LinearAtom.of(coefs, rng.choice((LE, EQ, GE)), rng.randint(0, 4)))
    return ConstraintSystem(n, tuple(atoms))


def linear_corpus(seed: int = 20240601, size: int = 300) -> list[ConstraintSystem]:
    rng = random.Random(seed)
    return [random_linear_system(rng) for _ in range(size)]


def random_sorted_vec(rng: random.Random, n: int, m: int, allow_zero: bool = True) -> tuple[int, ...]:
    while True:
        v = tuple(sorted(rng.randint(0, m) for _ in range(n)))
        if allow_zero or any(v):
            return v


def random_normal_set(rng: random.Random, n: int, K: int, m: int) -> LinearSet:
    """Sorted base, sorted steps in strictly descending lex order, max entry <= m."""
    steps = {random_sorted_vec(rng, n, m, allow_zero=False) for _ in range(K)}
    kept = drop_redundant_steps(sorted(steps, reverse=True))
    return LinearSet(NatVec(random_sorted_vec(rng, n, m)), tuple(NatVec(s) for s in kept))


def random_le_instance(rng: random.Random):
    """Normal-form instance with n <= 5, K <= 3, m <= 3, <= 3 LE atoms, exponents 2 or 3."""
    while True:
        n = rng.randint(1, 5)
        L = random_normal_set(rng, n, rng.randint(0, 3), rng.randint(1, 3))
        atoms = tuple(MonomialAtom(rng.randrange(n), LE, rng.randrange(n), rng.choice((2, 3)))
                      for _ in range(rng.randint(1, 3)))
        inst = instance_from_linear_set(L, atoms)
        if not check_normal(inst) and L.max_coeff() <= 3:
            return inst


def b_class_ge_instance(rng: random.Random):
    """Normal-form GE instance whose atoms x_k >= x_j^n (j < k) all have |supp(j)| = |supp(k)|."""
    while True:
        n = rng.randint(2, 5)
        L = random_normal_set(rng, n, rng.randint(1, 3), rng.randint(1, 3))
        inst = instance_from_linear_set(L, ())
        js = inst.profile.j_star
        pairs = [(j, k) for j in range(n) for k in range(j + 1, n) if js[j] == js[k]]
        if not pairs or check_normal(inst):
            continue
        chosen = [rng.choice(pairs) for _ in range(rng.randint(1, 3))]
        atoms = tuple(MonomialAtom(k, GE, j, rng.choice((2, 3))) for j, k in chosen)
        return instance_from_linear_set(L, atoms)


def b_empty_ge_instance(rng: random.Random):
    """Normal-form GE instance where every atom has |supp(j)| < |supp(k)|."""
    while True:
        n = rng.randint(2, 5)
        L = random_normal_set(rng, n, rng.randint(1, 3), rng.randint(1, 3))
        inst = instance_from_linear_set(L, ())
        js = inst.profile.j_star
        pairs = [(j, k) for j in range(n) for k in range(j + 1, n) if js[j] < js[k]]
        if not pairs or check_normal(inst):
            continue
        chosen = [rng.choice(pairs) for _ in range(rng.randint(1, 3))]
        atoms = tuple(MonomialAtom(k, GE, j, rng.choice((2, 3))) for j, k in chosen)
        return instance_from_linear_set(L, atoms)


def chain_system(n: int, start: int = 2) -> ConstraintSystem:
    """x1 = start and x_{i+1} >= x_i^2."""
    mono = tuple(MonomialAtom(i + 1, GE, i, 2) for i in range(n - 1))
    return ConstraintSystem(n, (LinearAtom.of({0: 1}, EQ, start),), mono)


# --- set formulas --------------------------------------------------------------

SET_NAMES = ("A", "B")


def _rand_set(rng, names, depth):
    if depth == 0 or rng.random() < 0.4:
        return rng.choice([SetVar(n) for n in names] + [Empty(), Univ()])
    kind = rng.choice(("union", "inter", "compl"))
    if kind == "compl":
        return Compl(_rand_set(rng, names, depth - 1))
    args = tuple(_rand_set(rng, names, depth - 1) for _ in range(2))
    return Union_(args) if kind == "union" else Inter(args)


def _rand_term(rng, names, ints, depth):
    if depth == 0 or rng.random() < 0.4:
        opts = [Card(_rand_set(rng, names, 1)), IntLit(rng.randint(0, 4)), Maxc()]
        opts += [IntVar(v) for v in ints]
        return rng.choice(opts)
    if rng.random() < 0.5:
        return Plus(tuple(_rand_term(rng, names, ints, depth - 1) for _ in range(2)))
    return Scale(rng.choice((-2, -1, 2, 3)), _rand_term(rng, names, ints, depth - 1))


def _rand_atom(rng, names, ints):
    kind = rng.choice(("seteq", "subset", "inteq", "le", "le", "dvd"))
    if kind == "seteq":
        return SetEq(_rand_set(rng, names, 2), _rand_set(rng, names, 2))
    if kind == "subset":
        return Subset(_rand_set(rng, names, 2), _rand_set(rng, names, 2))
    if kind == "dvd":
        return Dvd(rng.choice((0, 2, 3, -2)), _rand_term(rng, names, ints, 1))
    left, right = _rand_term(rng, names, ints, 2), _rand_term(rng, names, ints, 2)
    return IntEq(left, right) if kind == "inteq" else IntLe(left, right)


def _rand_formula(rng, names, ints, depth):
    if depth == 0 or rng.random() < 0.35:
        return _rand_atom(rng, names, ints)
    kind = rng.choice(("and", "or", "not"))
    if kind == "not":
        return Not(_rand_formula(rng, names, ints, depth - 1))
    args = tuple(_rand_formula(rng, names, ints, depth - 1) for _ in range(rng.randint(2, 3)))
    return And(args) if kind == "and" else Or(args)


def random_bounded_formula(rng: random.Random):
    """Image-free formula over at most two sets, with the universe and integers capped at 5."""
    names = SET_NAMES[:rng.randint(1, 2)]
    ints = ("k",) if rng.random() < 0.3 else ()
    body = _rand_formula(rng, names, ints, 3)
    caps = [IntLe(Maxc(), IntLit(5))] + [IntLe(IntVar(v), IntLit(5)) for v in ints]
    return make_formula(And((body, *caps)))


def finite_models(f, max_universe: int = 5):
    """Every (universe, sets, ints) with |universe| <= max_universe and integers in [0, 5]."""
    for size in range(max_universe + 1):
        universe = frozenset(range(size))
        subsets = [frozenset(c) for r in range(size + 1) for c in itertools.combinations(range(size), r)]
        for choice in itertools.product(subsets, repeat=len(f.set_vars)):
            sets = dict(zip(f.set_vars, choice))
            for ivals in itertools.product(range(6), repeat=len(f.int_vars)):
                yield universe, sets, dict(zip(f.int_vars, ivals))
