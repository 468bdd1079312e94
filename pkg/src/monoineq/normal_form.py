"""Ordered, staircase-shaped linear sets for the monomial decision procedures.

For a chosen variable order the linear part is conjoined with the chain
``y_0 <= y_1 <= ... <= y_{r-1}`` and decomposed. Every point of each
component then has sorted coordinates, so bases and steps are sorted too, and
sorting the steps lex-descending makes their zero entries form a staircase
in the top-right corner of the step matrix (rows are coordinates, columns
are steps).

Indices are 0-based throughout: ``j_star[j]`` is the first step column whose
entry in row ``j`` is zero (``K`` if there is none), so the row support is
``range(j_star[j])`` and ``|supp(j)| = j_star[j]``. ``i_star[i]`` is the
number of leading zero rows of step ``i``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterator, Optional, Sequence

from .errors import InputError, InternalConsistencyError
from .model import (
    EQ,
    GE,
    LE,
    ConstraintSystem,
    LinearAtom,
    LinearSet,
    MonomialAtom,
    NatVec,
)
from .semilinear import DEFAULT_LIMITS, EngineLimits, base_subsumed, generators
from .model import drop_redundant_steps


@dataclass(frozen=True)
class StaircaseProfile:
    j_star: tuple[int, ...]
    i_star: tuple[int, ...]
    supp: tuple[frozenset, ...]
    null_set: tuple[frozenset, ...]


def compute_profile(steps: Sequence[Sequence[int]], dim: int) -> StaircaseProfile:
    K = len(steps)
    cols = list(zip(*steps)) if K else [()] * dim
    supp = tuple(frozenset(i for i, v in enumerate(col) if v) for col in cols)
    null = tuple(frozenset(j for j, v in enumerate(s) if not v) for s in steps)
    j_star = tuple(next((i for i, v in enumerate(col) if not v), K) for col in cols)
    i_star = tuple(max(z) + 1 if z else 0 for z in null)
    return StaircaseProfile(j_star, i_star, supp, null)


@dataclass(frozen=True)
class NormalFormInstance:
    """One ordered component together with the renamed monomial atoms.

    ``permutation[p]`` is the original index of ordered variable ``p``.
    ``lift`` generates the same points with the same coefficients but over
    all original variables (in original indexing), which is how witnesses
    for variables that were projected away are recovered.
    ``source`` is the renamed system (without chain atoms) this instance
    came from, and ``order`` its full renaming; both are None for instances
    built directly from a linear set.
    """

    permutation: tuple[int, ...]
    component: LinearSet
    atoms: tuple[MonomialAtom, ...]
    m: int
    profile: StaircaseProfile
    component_index: int = 0
    lift: Optional[LinearSet] = None
    source: Optional[ConstraintSystem] = None
    order: Optional[tuple[int, ...]] = None

    @property
    def K(self) -> int:
        return self.component.K

    @property
    def full(self) -> LinearSet:
        return self.lift if self.lift is not None else self.component


def instance_from_linear_set(L: LinearSet, atoms: Sequence[MonomialAtom],
                             permutation: Optional[Sequence[int]] = None,
                             component_index: int = 0) -> NormalFormInstance:
    """Wrap an explicitly given linear set; no ordering is checked here."""
    for a in atoms:
        if max(a.lhs_var, a.rhs_var) >= L.dim:
            raise InputError("monomial atom index out of range for the linear set")
    perm = tuple(permutation) if permutation is not None else tuple(range(L.dim))
    return NormalFormInstance(perm, L, tuple(atoms), L.max_coeff(),
                              compute_profile(L.steps, L.dim), component_index)


def _single_var_bounds(system: ConstraintSystem) -> tuple[list[int], list[float]]:
    lower = [0] * system.num_vars
    upper: list[float] = [math.inf] * system.num_vars
    for atom in system.linear:
        if len(atom.coefficients) != 1:
            continue
        (v, c), = atom.coefficients
        k = atom.constant
        # c*v rel k; dividing by a negative c flips the relation
        lo = hi = None
        if atom.relation == EQ:
            if k % c == 0:
                lo = hi = k // c
        elif (atom.relation == LE) == (c > 0):
            hi = k // c  # floor
        else:
            lo = -((-k) // c)  # ceil
        if lo is not None:
            lower[v] = max(lower[v], lo)
        if hi is not None:
            upper[v] = min(upper[v], hi)
    return lower, upper


def candidate_orders(system: ConstraintSystem,
                     variables: Optional[Sequence[int]] = None) -> Iterator[tuple[int, ...]]:
    """Permutations of ``variables`` (default: all) in lexicographic order.

    An order is skipped when single-variable atoms already force some
    variable strictly above another one that it would precede.
    """
    vars_ = sorted(range(system.num_vars) if variables is None else set(variables))
    lower, upper = _single_var_bounds(system)
    for perm in itertools.permutations(vars_):
        ok = True
        for p, u in enumerate(perm):
            for v in perm[p + 1:]:
                if lower[u] > upper[v]:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            yield perm


def _chain_substitute(atom: LinearAtom, r: int) -> LinearAtom:
    """Rewrite in gap variables ``z`` with ``y_p = z_0 + ... + z_p`` for p < r."""
    coef = dict(atom.coefficients)
    out = {v: c for v, c in coef.items() if v >= r}
    running = 0
    for q in range(r - 1, -1, -1):
        running += coef.get(q, 0)
        if running:
            out[q] = running
    return LinearAtom.of(out, atom.relation, atom.constant)


def _prefix_sums(z: Sequence[int], r: int) -> tuple[int, ...]:
    y = list(z)
    for p in range(1, r):
        y[p] += y[p - 1]
    return tuple(y)


def _to_original(v: Sequence[int], order: Sequence[int]) -> NatVec:
    out = [0] * len(order)
    for p, orig in enumerate(order):
        out[orig] = v[p]
    return NatVec(out)


def normalize(system: ConstraintSystem, sigma: Sequence[int],
              limits: EngineLimits = DEFAULT_LIMITS) -> list[NormalFormInstance]:
    """Order the variables of ``sigma`` ascending and decompose.

    ``sigma`` lists original variable indices from smallest to largest
    value; it must be a permutation of all variables or of a subset that
    contains every variable of a monomial atom. Variables outside ``sigma``
    are projected away (they survive in each instance's ``lift``).
    """
    n = system.num_vars
    sigma = tuple(sigma)
    if not sigma or len(set(sigma)) != len(sigma) or any(not 0 <= v < n for v in sigma):
        raise InputError(f"{sigma} is not a permutation of a subset of range({n})")
    mono_vars = {v for a in system.monomial for v in a.variables}
    if not mono_vars <= set(sigma):
        raise InputError("the ordered variables must include every monomial-atom variable")
    order = sigma + tuple(v for v in range(n) if v not in sigma)
    new_of = {old: new for new, old in enumerate(order)}
    names = tuple(system.names[v] for v in order)
    renamed = ConstraintSystem(n, tuple(a.renamed(new_of) for a in system.linear),
                               tuple(a.renamed(new_of) for a in system.monomial), names)
    return normalize_ordered(renamed, len(sigma), order, limits)


def normalize_ordered(osys: ConstraintSystem, r: int, order: Sequence[int],
                      limits: EngineLimits = DEFAULT_LIMITS) -> list[NormalFormInstance]:
    """Normalize a system already renamed so that positions 0..r-1 are ordered.

    The chain atoms are not added as rows: the system is rewritten in the
    gap variables of the chain, which is the same as adding one slack per
    chain atom and yields exactly the same minimal generators.
    """
    n = osys.num_vars
    order = tuple(order)
    atoms = [_chain_substitute(a, r) for a in osys.linear]
    raw_bases, raw_steps = generators(atoms, n, limits)
    bases = [_prefix_sums(b, r) for b in raw_bases]
    steps = [_prefix_sums(s, r) for s in raw_steps]

    # (projection onto the ordered coordinates, full vector)
    step_pairs = sorted(((s[:r], s) for s in steps if any(s[:r])),
                        key=lambda p: (tuple(-c for c in p[0]), p[1]))
    rep: dict[tuple[int, ...], tuple[int, ...]] = {}
    for proj, full in step_pairs:
        rep.setdefault(proj, full)
    kept_steps = drop_redundant_steps(rep)
    base_rep: dict[tuple[int, ...], tuple[int, ...]] = {}
    for b in sorted(bases, key=lambda b: (b[:r], b)):
        base_rep.setdefault(b[:r], b)
    projs = list(base_rep)
    kept_bases = [b for b in projs
                  if not any(o != b and base_subsumed(b, o, kept_steps) for o in projs)]

    step_vecs = tuple(NatVec(s) for s in kept_steps)
    lift_steps = tuple(_to_original(rep[s], order) for s in kept_steps)
    out = []
    for idx, b in enumerate(kept_bases):
        component = LinearSet(NatVec(b), step_vecs)
        inst = NormalFormInstance(
            permutation=order[:r],
            component=component,
            atoms=osys.monomial,
            m=component.max_coeff(),
            profile=compute_profile(step_vecs, r),
            component_index=idx,
            lift=LinearSet(_to_original(base_rep[b], order), lift_steps),
            source=osys,
            order=order,
        )
        bad = check_normal(inst)
        if bad:
            raise InternalConsistencyError(f"normal form violated ({', '.join(bad)}) for order {order[:r]}")
        out.append(inst)
    return out


def _sorted(v: Sequence[int]) -> bool:
    return all(a <= b for a, b in zip(v, v[1:]))


def check_normal(instance: NormalFormInstance) -> list[str]:
    """Names of violated structural properties; empty means well-formed.

    The staircase checks only run once sortedness and lex order hold, since
    they are consequences of those two.
    """
    L = instance.component
    bad = []
    if not _sorted(L.base):
        bad.append("base-sorted")
    if not all(_sorted(s) for s in L.steps):
        bad.append("steps-sorted")
    if not all(tuple(s) > tuple(t) for s, t in zip(L.steps, L.steps[1:])):
        bad.append("lex-order")
    if instance.m != L.max_coeff():
        bad.append("m-mismatch")
    if instance.profile != compute_profile(L.steps, L.dim):
        bad.append("profile-mismatch")
    if bad:
        return bad
    prof = instance.profile
    K = L.K
    if any(prof.supp[j] != frozenset(range(prof.j_star[j])) for j in range(L.dim)) \
            or not _sorted(prof.j_star):
        bad.append("staircase-rows")
    if any(prof.null_set[i] != frozenset(range(prof.i_star[i])) for i in range(K)) \
            or not _sorted(prof.i_star):
        bad.append("staircase-columns")
    return bad


def first_row_zero(instance: NormalFormInstance) -> bool:
    """Whether every step has a zero first coordinate. Reported, never enforced."""
    return all(s[0] == 0 for s in instance.component.steps)
