"""Brute-force ground truth.

Nothing here is clever on purpose: plain lexicographic enumeration and exact
re-evaluation. A ``None`` result means "nothing inside the box", never UNSAT;
callers must justify the box before reading it as UNSAT.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional, Sequence, Union

from .errors import InputError
from .model import (
    ConstraintSystem,
    LinearSet,
    MonomialAtom,
    Witness,
    eval_monomial_atom,
)
from .normal_form import NormalFormInstance
from .semilinear import member


@dataclass(frozen=True)
class OracleBound:
    x_bound: int = 8
    alpha_bound: int = 8

    def __post_init__(self):
        if self.x_bound < 0 or self.alpha_bound < 0:
            raise InputError("oracle bounds must be non-negative")


def oracle_x_search(system: ConstraintSystem, bound: Union[int, OracleBound]) -> Optional[Witness]:
    """First point of ``[0, bound]^n`` (lexicographic) satisfying every atom."""
    b = bound.x_bound if isinstance(bound, OracleBound) else bound
    for x in itertools.product(range(b + 1), repeat=system.num_vars):
        if system.satisfied_by(x):
            return Witness(x, names=system.names)
    return None


def oracle_alpha_search(L: LinearSet, atoms: Sequence[MonomialAtom],
                        bound: Union[int, OracleBound]) -> Optional[Witness]:
    """First alpha of ``[0, bound]^K`` whose point satisfies every atom."""
    b = bound.alpha_bound if isinstance(bound, OracleBound) else bound
    for alpha in itertools.product(range(b + 1), repeat=L.K):
        x = L.point(alpha)
        if all(eval_monomial_atom(a, x) for a in atoms):
            return Witness(x, alpha)
    return None


def check_witness(target, w: Witness) -> bool:
    """Re-evaluate every atom at the witness with exact arithmetic.

    ``target`` is a ConstraintSystem, a NormalFormInstance, or a pair
    ``(LinearSet, atoms)``. When the witness carries coefficients and the
    target has generators, ``x == base + sum(alpha_i step_i)`` is checked too.
    """
    x = w.x_values
    if isinstance(target, ConstraintSystem):
        if len(x) != target.num_vars:
            raise InputError(f"witness has {len(x)} values, system has {target.num_vars} variables")
        return target.satisfied_by(x)
    if isinstance(target, NormalFormInstance):
        full = target.full
        if len(x) != full.dim:
            raise InputError(f"witness has {len(x)} values, instance has dimension {full.dim}")
        if w.alpha_values is not None:
            if len(w.alpha_values) != target.K or full.point(w.alpha_values) != x:
                return False
            y = target.component.point(w.alpha_values)
        else:
            y = tuple(x[v] for v in target.permutation)
        if tuple(y) != tuple(x[v] for v in target.permutation):
            return False
        return all(eval_monomial_atom(a, y) for a in target.atoms)
    L, atoms = target
    if len(x) != L.dim:
        raise InputError(f"witness has {len(x)} values, linear set has dimension {L.dim}")
    if w.alpha_values is not None:
        if len(w.alpha_values) != L.K or L.point(w.alpha_values) != x:
            return False
    elif member(L, x) is None:
        return False
    return all(eval_monomial_atom(a, x) for a in atoms)
