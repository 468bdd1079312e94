"""Generator representations of the solution sets of linear atoms over N^n.

The solution set of ``A x = b`` over the naturals is the union, over the
componentwise-minimal solutions ``a`` of ``A x = b``, of ``a + int_cone(H)``
where ``H`` is the set of minimal nonzero solutions of ``A x = 0``. Both sets
are found at once by running the Contejean-Devie completion on the
homogenised system ``A x - b t = 0`` with ``t`` restricted to ``{0, 1}``.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .errors import InputError, ResourceExhausted
from .model import (
    EQ,
    GE,
    LE,
    LinearAtom,
    LinearSet,
    NatVec,
    SemilinearSet,
    compare,
    drop_redundant_steps,
)


@dataclass(frozen=True)
class EngineLimits:
    max_coord: int = 10_000
    max_generators: int = 10_000
    max_nodes: int = 10_000_000

    def __post_init__(self):
        if min(self.max_coord, self.max_generators, self.max_nodes) <= 0:
            raise InputError("engine limits must be positive")


DEFAULT_LIMITS = EngineLimits()


def to_equalities(atoms: Sequence[LinearAtom], n: int) -> tuple[list[list[int]], list[int], int]:
    """Rewrite atoms as ``A x = b``; every inequality gets its own slack column.

    Slack columns follow the ``n`` problem columns, in atom order.
    """
    slack_count = sum(1 for a in atoms if a.relation != EQ)
    width = n + slack_count
    A: list[list[int]] = []
    b: list[int] = []
    slack = n
    for atom in atoms:
        row = [0] * width
        for var, coef in atom.coefficients:
            if var >= n:
                raise InputError(f"atom references variable {var} >= {n}")
            row[var] = coef
        if atom.relation == LE:
            row[slack] = 1
            slack += 1
        elif atom.relation == GE:
            row[slack] = -1
            slack += 1
        A.append(row)
        b.append(atom.constant)
    return A, b, slack_count


def minimal_solutions(
    A: Sequence[Sequence[int]],
    b: Sequence[int],
    limits: EngineLimits = DEFAULT_LIMITS,
    num_cols: Optional[int] = None,
) -> tuple[list[NatVec], list[NatVec]]:
    """Minimal solutions of ``A x = b`` (bases) and of ``A x = 0`` (steps) over N.

    ``num_cols`` is required when ``A`` has no rows. Both lists come back in
    lexicographic order. Raises ``ResourceExhausted`` when a limit is hit;
    that never means the system is unsatisfiable.
    """
    if num_cols is None:
        if not A:
            raise InputError("num_cols is required for a system without rows")
        num_cols = len(A[0])
    if len(A) != len(b):
        raise InputError("A and b have different row counts")
    if any(len(row) != num_cols for row in A):
        raise InputError("ragged matrix")
    q = num_cols
    rows = len(A)
    # column q is the homogenising variable t, with coefficient -b
    cols = [tuple(A[r][j] for r in range(rows)) for j in range(q)]
    cols.append(tuple(-v for v in b))
    width = q + 1

    found: list[tuple[int, ...]] = []
    frontier: dict[tuple[int, ...], tuple[int, ...]] = {}
    for j in range(width):
        e = [0] * width
        e[j] = 1
        frontier[tuple(e)] = cols[j]
    nodes = 0

    while frontier:
        nodes += len(frontier)
        if nodes > limits.max_nodes:
            raise ResourceExhausted(f"minimal-solution search exceeded {limits.max_nodes} nodes")
        pending = []
        for x, ax in frontier.items():
            if any(ax):
                pending.append((x, ax))
            else:
                found.append(x)
        if len(found) > limits.max_generators:
            raise ResourceExhausted(f"more than {limits.max_generators} minimal solutions")
        nxt: dict[tuple[int, ...], tuple[int, ...]] = {}
        for x, ax in pending:
            for j in range(width):
                col = cols[j]
                if j == q and x[q]:
                    continue
                if sum(u * v for u, v in zip(ax, col)) >= 0:
                    continue
                y = list(x)
                y[j] += 1
                if y[j] > limits.max_coord:
                    raise ResourceExhausted(f"generator coordinate exceeds {limits.max_coord}")
                y = tuple(y)
                if y in nxt:
                    continue
                if any(all(mi <= yi for mi, yi in zip(m, y)) for m in found):
                    continue
                nxt[y] = tuple(u + v for u, v in zip(ax, col))
        frontier = nxt

    bases = sorted(x[:q] for x in found if x[q] == 1)
    steps = sorted(x[:q] for x in found if x[q] == 0)
    return [NatVec(v) for v in bases], [NatVec(v) for v in steps]


def _tightest(atoms: Sequence[LinearAtom]) -> list[LinearAtom]:
    """Keep one inequality per left-hand side; looser copies only add slack boxes."""
    best: dict[tuple, LinearAtom] = {}
    order: list[tuple] = []
    for a in atoms:
        key = (a.coefficients, a.relation) if a.relation != EQ else (a.coefficients, EQ, a.constant)
        old = best.get(key)
        if old is None:
            order.append(key)
            best[key] = a
        elif (a.relation == LE and a.constant < old.constant) or (a.relation == GE and a.constant > old.constant):
            best[key] = a
    return [best[k] for k in order]


def generators(atoms: Sequence[LinearAtom], n: int,
               limits: EngineLimits = DEFAULT_LIMITS) -> tuple[list[tuple[int, ...]], list[tuple[int, ...]]]:
    """Raw bases and steps over the n problem coordinates (slacks projected away).

    Ground atoms are settled up front: true ones are dropped, a false one
    makes the set empty (no bases, steps of the unconstrained cone kept).
    """
    if any(a.is_ground() and not compare(0, a.relation, a.constant) for a in atoms):
        return [], [tuple(1 if i == j else 0 for i in range(n)) for j in range(n)]
    atoms = _tightest([a for a in atoms if not a.is_ground()])
    A, b, slacks = to_equalities(atoms, n)
    bases, steps = minimal_solutions(A, b, limits, num_cols=n + slacks)
    return [tuple(v[:n]) for v in bases], [tuple(v[:n]) for v in steps]


def member(L: LinearSet, x: Sequence[int]) -> Optional[tuple[int, ...]]:
    """Lexicographically least alpha with ``x = base + sum(alpha_i step_i)``, or None."""
    if len(x) != L.dim:
        raise InputError(f"point has dimension {len(x)}, set has {L.dim}")
    rest = tuple(xi - ai for xi, ai in zip(x, L.base))
    if any(r < 0 for r in rest):
        return None
    steps = [tuple(s) for s in L.steps]
    K = len(steps)
    # covered[i][c]: some step with index >= i is positive at coordinate c
    covered = [[False] * L.dim for _ in range(K + 1)]
    for i in range(K - 1, -1, -1):
        covered[i] = [covered[i + 1][c] or steps[i][c] > 0 for c in range(L.dim)]

    @functools.lru_cache(maxsize=None)
    def search(i: int, r: tuple[int, ...]) -> Optional[tuple[int, ...]]:
        if not any(r):
            return (0,) * (K - i)
        if i == K or any(rc and not covered[i][c] for c, rc in enumerate(r)):
            return None
        step = steps[i]
        top = min(r[c] // s for c, s in enumerate(step) if s)
        for a in range(top + 1):
            tail = search(i + 1, tuple(rc - a * s for rc, s in zip(r, step)))
            if tail is not None:
                return (a,) + tail
        return None

    return search(0, rest)


def points_in_box(L: LinearSet, bound: int) -> set[tuple[int, ...]]:
    """All points of L with every coordinate <= bound."""
    start = tuple(L.base)
    if max(start) > bound:
        return set()
    seen = {start}
    todo = [start]
    steps = [tuple(s) for s in L.steps]
    while todo:
        p = todo.pop()
        for s in steps:
            q = tuple(u + v for u, v in zip(p, s))
            if q not in seen and max(q) <= bound:
                seen.add(q)
                todo.append(q)
    return seen


def base_subsumed(base: Sequence[int], other: Sequence[int], steps: Sequence[Sequence[int]]) -> bool:
    """True if ``base`` lies in ``other + int_cone(steps)``."""
    if any(b < o for b, o in zip(base, other)):
        return False
    return member(LinearSet(NatVec(other), tuple(NatVec(s) for s in steps)), base) is not None


def assemble(bases: Iterable[Sequence[int]], steps: Iterable[Sequence[int]], n: int) -> SemilinearSet:
    """Canonical SemilinearSet from raw generators sharing one step set.

    Steps: zero vectors, duplicates and exact multiples removed, sorted
    lex-descending. Bases: deduplicated, those already covered by another
    component dropped, sorted lex-ascending.
    """
    kept_steps = drop_redundant_steps(sorted((tuple(s) for s in steps), reverse=True))
    unique = sorted(set(tuple(b) for b in bases))
    kept = [b for b in unique
            if not any(o != b and base_subsumed(b, o, kept_steps) for o in unique)]
    step_vecs = tuple(NatVec(s) for s in kept_steps)
    return SemilinearSet(tuple(LinearSet(NatVec(b), step_vecs) for b in kept), n)


def decompose(atoms: Sequence[LinearAtom], n: int,
              limits: EngineLimits = DEFAULT_LIMITS) -> SemilinearSet:
    """Semilinear representation of ``{x in N^n : all atoms hold}``.

    An inconsistent conjunction yields a set with zero components.
    """
    bases, steps = generators(atoms, n, limits)
    return assemble(bases, steps, n)
