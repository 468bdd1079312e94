"""Decision procedures for linear atoms conjoined with monomial inequalities.

``x >= y^n`` systems (convex side) are decided by guessing a bounded prefix
of step coefficients and extending it greedily; minimal witnesses can be
doubly exponential, so the extension may be returned as a recipe instead of
numbers. ``x <= y^n`` systems (non-convex side) have a small model: if a
solution exists, one exists with every coefficient at most ``m + 1``.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from typing import Iterator, Optional, Sequence

from .errors import BoundIncomplete, InputError, InternalConsistencyError
from .model import (
    EQ,
    GE,
    LE,
    ConstraintSystem,
    Direction,
    LinearAtom,
    LinearSet,
    MonomialAtom,
    SolveStats,
    Status,
    Verdict,
    Witness,
    caratheodory_bound,
    direction_of,
    eval_monomial_atom,
)
from .normal_form import (
    NormalFormInstance,
    candidate_orders,
    check_normal,
    instance_from_linear_set,
    normalize,
    normalize_ordered,
)
from .oracle import check_witness
from .semilinear import DEFAULT_LIMITS, EngineLimits, decompose

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class SolverConfig:
    witness_bit_cap: int = 4096
    alpha_cap_override: Optional[int] = None
    oracle_fallback_bound: int = 8

    def __post_init__(self):
        if self.witness_bit_cap <= 0 or self.oracle_fallback_bound < 0:
            raise InputError("solver caps must be positive")
        if self.alpha_cap_override is not None and self.alpha_cap_override < 0:
            raise InputError("alpha cap must be non-negative")


DEFAULT_CONFIG = SolverConfig()


class WitnessTooLarge(Exception):
    """Raised inside the witness extension when numbers pass the bit cap."""

    def __init__(self, recipe: str):
        super().__init__(recipe)
        self.recipe = recipe


@dataclass(frozen=True)
class MoreState:
    """The bounded part of the convex procedure for one instance.

    ``B`` holds the atoms whose two sides have the same row support, ``l``
    the longest such support. Only the first ``l`` coefficients need
    guessing, each in ``[0, m]``.
    """

    B: tuple[MonomialAtom, ...]
    l: int
    prefix: tuple[int, ...] = ()


def fold_small_exponents(system: ConstraintSystem) -> ConstraintSystem:
    """Turn exponent-1 atoms into ``x rel y`` and exponent-0 atoms into ``x rel 1``."""
    linear = list(system.linear)
    mono = []
    for a in system.monomial:
        if a.exponent >= 2:
            mono.append(a)
        elif a.exponent == 1:
            linear.append(LinearAtom(((a.lhs_var, 1), (a.rhs_var, -1)), a.relation, 0))
        else:
            linear.append(LinearAtom(((a.lhs_var, 1),), a.relation, 1))
    return ConstraintSystem(system.num_vars, tuple(linear), tuple(mono), system.var_names)


def _instance_stats(inst: NormalFormInstance) -> SolveStats:
    M = max((s.norm_inf() for s in inst.component.steps), default=0)
    return SolveStats(inst.m, inst.K, 1, caratheodory_bound(inst.component.dim, M))


def _witness(inst: NormalFormInstance, alpha: Sequence[int], names=None) -> Witness:
    return Witness(inst.full.point(alpha), tuple(alpha), inst.component_index,
                   inst.permutation, names=names)


def _require_normal(inst: NormalFormInstance) -> None:
    bad = check_normal(inst)
    if bad:
        raise InputError(f"instance is not in normal form: {', '.join(bad)}")


def preprocess_reflexive(instance: NormalFormInstance,
                         limits: EngineLimits = DEFAULT_LIMITS) -> list[NormalFormInstance]:
    """Resolve ``x_k >= x_j^n`` atoms with ``j >= k`` in the variable order.

    The order gives ``x_j >= x_k``, so ``x_j >= x_k >= x_j^n >= x_j`` and both
    variables equal 0 or both equal 1. Each such atom is replaced by the two
    alternatives and the ordered system is normalized again per branch; the
    returned list covers every component of the ordered system, not only the
    instance's own.
    """
    reflexive = [a for a in instance.atoms if a.relation == GE and a.exponent >= 2
                 and a.rhs_var >= a.lhs_var]
    if not reflexive:
        return [instance]
    if instance.source is None:
        raise InputError("reflexive atoms need an instance produced by normalize")
    rest = tuple(a for a in instance.atoms if a not in reflexive)
    r = len(instance.permutation)
    src = instance.source
    out: list[NormalFormInstance] = []
    for values in itertools.product((0, 1), repeat=len(reflexive)):
        eqs = []
        for atom, v in zip(reflexive, values):
            eqs.append(LinearAtom(((atom.lhs_var, 1),), EQ, v))
            eqs.append(LinearAtom(((atom.rhs_var, 1),), EQ, v))
        branch = ConstraintSystem(src.num_vars, src.linear + tuple(eqs), rest, src.var_names)
        out.extend(normalize_ordered(branch, r, instance.order, limits))
    return out


def more_state(instance: NormalFormInstance) -> MoreState:
    js = instance.profile.j_star
    B = tuple(a for a in instance.atoms if js[a.rhs_var] == js[a.lhs_var])
    return MoreState(B, max((js[a.rhs_var] for a in B), default=0))


def _point_prefix(inst: NormalFormInstance, alpha: Sequence[int]) -> list[int]:
    x = list(inst.component.base)
    for a, step in zip(alpha, inst.component.steps):
        if a:
            for c, b in enumerate(step):
                x[c] += a * b
    return x


def decide_more(instance: NormalFormInstance, config: SolverConfig = DEFAULT_CONFIG) -> Verdict:
    """Decide ``x_k >= x_j^n`` atoms (all with j < k) over one normal-form component."""
    for a in instance.atoms:
        if a.relation != GE or a.exponent < 2 or a.rhs_var >= a.lhs_var:
            raise InputError(f"decide_more needs x_k >= x_j^n atoms with j < k, got {a}")
    _require_normal(instance)
    stats = _instance_stats(instance)
    state = more_state(instance)
    js = instance.profile.j_star
    cap = instance.m if config.alpha_cap_override is None else config.alpha_cap_override
    prefix = None
    if not state.B:
        prefix = ()
    else:
        determined = [a for a in instance.atoms if js[a.lhs_var] <= state.l]
        for guess in itertools.product(range(cap + 1), repeat=state.l):
            x = _point_prefix(instance, guess)
            if all(eval_monomial_atom(a, x) for a in determined):
                prefix = guess
                break
    if prefix is None:
        if cap < instance.m:
            raise BoundIncomplete(f"alpha cap {cap} is below m = {instance.m}")
        return Verdict.unsat(stats)
    try:
        w = extend_witness_more(instance, prefix, config.witness_bit_cap)
    except WitnessTooLarge as exc:
        return Verdict(Status.SAT, None, exc.recipe, stats)
    return Verdict(Status.SAT, w, None, stats)


def _ceil_div(a: int, b: int) -> int:
    return -((-a) // b)


def extend_witness_more(instance: NormalFormInstance, prefix: Sequence[int],
                        bit_cap: Optional[int] = None) -> Witness:
    """Complete an accepted prefix to a full coefficient vector.

    The atoms not settled by the prefix are taken in ``(j, k)`` order. Each
    gets the column ``c = max(|supp(j)|, l)``: the first step not yet fixed
    that leaves ``x_j`` alone while raising ``x_k``. Columns are assigned in
    increasing order and never revised; skipped columns stay 0. Raises
    ``WitnessTooLarge`` (carrying a recipe) when a value passes ``bit_cap``.
    """
    js = instance.profile.j_star
    steps = instance.component.steps
    K = instance.K
    l = len(prefix)
    alpha: list[Optional[int]] = list(prefix) + [None] * (K - l)
    x = _point_prefix(instance, prefix)
    todo = sorted((a for a in instance.atoms if js[a.lhs_var] > l),
                  key=lambda a: (a.rhs_var, a.lhs_var))
    groups: dict[int, list[MonomialAtom]] = {}
    for a in todo:
        groups.setdefault(max(js[a.rhs_var], l), []).append(a)
    recipe = [f"prefix alpha[0:{l}] = {list(prefix)}"]
    for c in sorted(groups):
        pairs = ", ".join(f"(x{a.rhs_var}^{a.exponent} <= x{a.lhs_var})" for a in groups[c])
        recipe.append(f"alpha[{c}] = max over {pairs} of ceil((x_j^n - x_k) / step[{c}][k]), "
                      f"evaluated with all earlier columns fixed")
    too_large = WitnessTooLarge(_recipe_text(recipe, K))
    for c in sorted(groups):
        for t in range(l, c):
            if alpha[t] is None:
                alpha[t] = 0
        value = 0
        for a in groups[c]:
            base = x[a.rhs_var]
            if bit_cap is not None and base.bit_length() * a.exponent > bit_cap + 1:
                raise too_large
            need = base ** a.exponent - x[a.lhs_var]
            if need > 0:
                value = max(value, _ceil_div(need, steps[c][a.lhs_var]))
        alpha[c] = value
        if value:
            for row, b in enumerate(steps[c]):
                x[row] += value * b
        if bit_cap is not None and any(v.bit_length() > bit_cap for v in x):
            raise too_large
    full = [a if a is not None else 0 for a in alpha]
    w = _witness(instance, full)
    if bit_cap is not None and any(v.bit_length() > bit_cap for v in w.x_values):
        raise too_large
    return w


def _recipe_text(lines: list[str], K: int) -> str:
    return ("witness exceeds the bit cap; symbolic extension: "
            + "; ".join(lines) + f"; columns without a rule (of {K}) are 0")


def _lex_points(inst: NormalFormInstance, bound: int) -> Iterator[tuple[tuple[int, ...], list[int]]]:
    """Odometer over ``[0, bound]^K`` in lexicographic order with incremental points."""
    K = inst.K
    steps = inst.component.steps
    alpha = [0] * K
    x = list(inst.component.base)
    while True:
        yield tuple(alpha), x
        i = K - 1
        while i >= 0 and alpha[i] == bound:
            if bound:
                for row, b in enumerate(steps[i]):
                    x[row] -= bound * b
            alpha[i] = 0
            i -= 1
        if i < 0:
            return
        alpha[i] += 1
        for row, b in enumerate(steps[i]):
            x[row] += b


def decide_less(instance: NormalFormInstance, config: SolverConfig = DEFAULT_CONFIG) -> Verdict:
    """Decide ``x_j <= x_k^n`` atoms over one normal-form component.

    Complete with coefficients in ``[0, m + 1]``: in any solution, let ``l``
    be the first coefficient above ``m + 1``; capping it at ``m + 1`` and
    zeroing every later one keeps all atoms true.
    """
    for a in instance.atoms:
        if a.relation != LE or a.exponent < 2:
            raise InputError(f"decide_less needs x_j <= x_k^n atoms with n >= 2, got {a}")
    _require_normal(instance)
    stats = _instance_stats(instance)
    cap = instance.m + 1 if config.alpha_cap_override is None else config.alpha_cap_override
    atoms = instance.atoms
    for alpha, x in _lex_points(instance, cap):
        if all(x[a.lhs_var] <= x[a.rhs_var] ** a.exponent for a in atoms):
            return Verdict(Status.SAT, _witness(instance, alpha), None, stats)
    if cap < instance.m + 1:
        raise BoundIncomplete(f"alpha cap {cap} is below m + 1 = {instance.m + 1}")
    return Verdict.unsat(stats)


def bounded_alpha_search(L: LinearSet, atoms: Sequence[MonomialAtom],
                         bound: int) -> Optional[tuple[int, ...]]:
    """Lexicographically first alpha in ``[0, bound]^K`` satisfying the atoms.

    Same answer as plain enumeration, but subtrees are cut when interval
    bounds on the coordinates already falsify an atom.
    """
    K = L.K
    dim = L.dim
    steps = [tuple(s) for s in L.steps]
    suffix = [[0] * dim for _ in range(K + 1)]
    for i in range(K - 1, -1, -1):
        suffix[i] = [suffix[i + 1][c] + steps[i][c] for c in range(dim)]
    x = list(L.base)
    alpha = [0] * K

    # moving from column i-1 to i changes values and room only on the
    # support of step i-1, so only atoms touching it need a recheck
    touching = [tuple(atoms)] + [
        tuple(a for a in atoms if steps[i][a.lhs_var] or steps[i][a.rhs_var]) for i in range(K)]

    def possible(i: int) -> bool:
        room = suffix[i]
        for a in touching[i]:
            n = a.exponent
            if a.relation == LE:
                if x[a.lhs_var] > (x[a.rhs_var] + bound * room[a.rhs_var]) ** n:
                    return False
            elif x[a.lhs_var] + bound * room[a.lhs_var] < x[a.rhs_var] ** n:
                return False
        return True

    def walk(i: int) -> bool:
        if not possible(i):
            return False
        if i == K:
            return True
        step = steps[i]
        for v in range(bound + 1):
            alpha[i] = v
            if v:
                for c, b in enumerate(step):
                    x[c] += b
            if walk(i + 1):
                return True
        if bound:
            for c, b in enumerate(step):
                x[c] -= bound * b
        alpha[i] = 0
        return False

    return tuple(alpha) if walk(0) else None


def _single_ge(L: LinearSet, atom: MonomialAtom, config: SolverConfig) -> Verdict:
    """One ``x_k >= x_j^n`` atom, n >= 2, over an arbitrary linear set.

    A step raising ``x_k`` but not ``x_j`` settles it. Otherwise every step
    touching ``x_k`` also touches ``x_j``; with ``T`` the sum of coefficients
    on steps touching ``x_j`` we get ``x_j >= T`` and ``x_k <= m (1 + T)``,
    and ``T >= m + 1`` would give ``x_j^n >= (m + 1) T > x_k``. So searching
    those coefficients in ``[0, m]`` (others 0) is complete.
    """
    k, j, n = atom.lhs_var, atom.rhs_var, atom.exponent
    K = L.K
    m = L.max_coeff()
    stats = SolveStats(m, K, 1, 0)
    raise_k = [i for i in range(K) if L.steps[i][k] and not L.steps[i][j]]
    if raise_k:
        c = raise_k[0]
        alpha = [0] * K
        need = L.base[j] ** n - L.base[k]
        if need > 0:
            alpha[c] = _ceil_div(need, L.steps[c][k])
        w = Witness(L.point(alpha), tuple(alpha), 0)
        if any(v.bit_length() > config.witness_bit_cap for v in w.x_values):
            return Verdict(Status.SAT, None,
                           f"witness exceeds the bit cap; raise step {c} by ceil((x_j^n - x_k)/step[{c}][k])",
                           stats)
        return Verdict(Status.SAT, w, None, stats)
    cols = [i for i in range(K) if L.steps[i][j]]
    for vals in itertools.product(range(m + 1), repeat=len(cols)):
        alpha = [0] * K
        for i, v in zip(cols, vals):
            alpha[i] = v
        x = L.point(alpha)
        if eval_monomial_atom(atom, x):
            return Verdict(Status.SAT, Witness(x, tuple(alpha), 0), None, stats)
    return Verdict.unsat(stats)


def decide_solved(L: LinearSet, atoms: Sequence[MonomialAtom], direction: Optional[Direction] = None,
                  config: SolverConfig = DEFAULT_CONFIG, alpha_bound_hint: Optional[int] = None,
                  hint_complete: bool = False) -> Verdict:
    """Decide monomial atoms over an explicitly given linear set.

    Normal-form inputs go to the exact procedures. A lone ``>=`` atom is
    decided exactly by a ball search. Anything else is searched up to the
    hint (or the fallback bound); an empty search is UNSAT only when the
    hint is declared complete, and ``BoundIncomplete`` otherwise.
    """
    atoms = tuple(atoms)
    rels = {a.relation for a in atoms if a.exponent >= 2}
    if len(rels) > 1:
        raise InputError("mixing x <= y^n and x >= y^n atoms makes satisfiability undecidable")
    actual = {frozenset(): Direction.LINEAR_ONLY, frozenset({LE}): Direction.PURE_LE,
              frozenset({GE}): Direction.PURE_GE}[frozenset(rels)]
    if direction is None:
        direction = actual
    elif actual != Direction.LINEAR_ONLY and direction != actual:
        raise InputError(f"atoms are {actual.value}, not {direction.value}")
    m = L.max_coeff()
    if not atoms:
        return Verdict(Status.SAT, Witness(L.base, (0,) * L.K, 0), None, SolveStats(m, L.K, 1, 0))
    inst = instance_from_linear_set(L, atoms)
    high = all(a.exponent >= 2 for a in atoms)
    if high and not check_normal(inst):
        if direction == Direction.PURE_LE:
            return decide_less(inst, config)
        if all(a.rhs_var < a.lhs_var for a in atoms):
            return decide_more(inst, config)
    if direction == Direction.PURE_GE and len(atoms) == 1 and high:
        return _single_ge(L, atoms[0], config)
    bound = alpha_bound_hint if alpha_bound_hint is not None else config.oracle_fallback_bound
    stats = SolveStats(m, L.K, 1, 0)
    alpha = bounded_alpha_search(L, atoms, bound)
    if alpha is not None:
        return Verdict(Status.SAT, Witness(L.point(alpha), alpha, 0), None, stats)
    if alpha_bound_hint is not None and hint_complete:
        return Verdict.unsat(stats)
    raise BoundIncomplete(f"no solution with every alpha <= {bound}; this bound does not rule one out")


def _verified(verdict: Verdict, system: ConstraintSystem) -> Verdict:
    w = verdict.witness
    if w is not None and not check_witness(system, w):
        raise InternalConsistencyError(f"solver produced an invalid witness {tuple(w.x_values)}")
    return verdict


def solve(system: ConstraintSystem, limits: EngineLimits = DEFAULT_LIMITS,
          config: SolverConfig = DEFAULT_CONFIG) -> Verdict:
    """Decide ``L and Q`` end to end.

    Only the variables of monomial atoms are ordered; the rest are projected
    away and recovered through each instance's lift. Branches are tried in a
    fixed order and the first SAT wins.
    """
    folded = fold_small_exponents(system)
    direction = direction_of(folded)
    if direction == Direction.MIXED:
        raise InputError("system mixes x <= y^n and x >= y^n atoms; that fragment is undecidable "
                         "(it expresses Hilbert's tenth problem)")
    names = system.names
    if direction == Direction.LINEAR_ONLY:
        S = decompose(folded.linear, folded.num_vars, limits)
        st = S.stats
        stats = SolveStats(st.max_generator_coeff, max((c.K for c in S.components), default=0),
                           len(S.components), st.caratheodory_bound)
        if S.is_empty():
            return Verdict.unsat(stats)
        first = S.components[0]
        w = Witness(first.base, (0,) * first.K, 0, names=names)
        return _verified(Verdict(Status.SAT, w, None, stats), system)

    active = sorted({v for a in folded.monomial for v in a.variables})
    stats = SolveStats()
    for sigma in candidate_orders(folded, active):
        instances = normalize(folded, sigma, limits)
        if not instances:
            continue
        if direction == Direction.PURE_GE:
            # every instance of one order shares the atoms, and the branches
            # re-normalize the whole ordered system, so expand only once
            candidates = preprocess_reflexive(instances[0], limits)
            if len(candidates) == 1 and candidates[0] is instances[0]:
                candidates = instances
        else:
            candidates = instances
        for inst in candidates:
            decide = decide_more if direction == Direction.PURE_GE else decide_less
            verdict = decide(inst, config)
            stats = stats.merge(verdict.stats)
            if verdict.is_sat:
                log.debug("sat under order %s, component %d", inst.permutation, inst.component_index)
                w = verdict.witness
                if w is not None:
                    w = Witness(w.x_values, w.alpha_values, w.component_index, w.permutation, names=names)
                return _verified(Verdict(Status.SAT, w, verdict.certificate_note, stats), system)
    return Verdict.unsat(stats)
