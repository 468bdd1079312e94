"""Domain types: vectors over the naturals, atoms, systems, (semi)linear sets, verdicts.

Every value here is immutable. Arithmetic is done on Python ints, so nothing
overflows no matter how large a witness grows.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence

from .errors import InputError

LE = "<="
EQ = "="
GE = ">="
LINEAR_RELATIONS = (LE, EQ, GE)
MONOMIAL_RELATIONS = (LE, GE)


class NatVec(tuple):
    """A point of N^n: a tuple of non-negative ints with dimension >= 1."""

    __slots__ = ()

    def __new__(cls, coords: Iterable[int] = ()):
        coords = tuple(coords)
        if not coords:
            raise InputError("NatVec needs dimension >= 1")
        if all(type(c) is int for c in coords) and min(coords) >= 0:
            return super().__new__(cls, coords)
        for c in coords:
            if not isinstance(c, int) or isinstance(c, bool):
                raise InputError(f"NatVec coordinate {c!r} is not an int")
            if c < 0:
                raise InputError(f"NatVec coordinate {c} is negative")
        return super().__new__(cls, coords)

    @property
    def dim(self) -> int:
        return len(self)

    def norm1(self) -> int:
        return sum(self)

    def norm_inf(self) -> int:
        return max(self)

    def is_zero(self) -> bool:
        return not any(self)

    def __repr__(self) -> str:
        return f"NatVec({tuple(self)!r})"


def _check_relation(rel: str, allowed: Sequence[str]) -> None:
    if rel not in allowed:
        raise InputError(f"relation {rel!r} not in {allowed}")


def compare(lhs: int, rel: str, rhs: int) -> bool:
    if rel == LE:
        return lhs <= rhs
    if rel == GE:
        return lhs >= rhs
    return lhs == rhs


@dataclass(frozen=True)
class LinearAtom:
    """``sum(coef * x[var]) rel constant``.

    ``coefficients`` is stored as a sorted tuple of ``(var, coef)`` pairs with
    zero coefficients removed, so two atoms describing the same constraint
    compare equal.
    """

    coefficients: tuple[tuple[int, int], ...]
    relation: str
    constant: int

    def __post_init__(self):
        _check_relation(self.relation, LINEAR_RELATIONS)
        merged: dict[int, int] = {}
        for var, coef in self.coefficients:
            if var < 0:
                raise InputError(f"negative variable index {var}")
            merged[var] = merged.get(var, 0) + coef
        canon = tuple(sorted((v, c) for v, c in merged.items() if c != 0))
        object.__setattr__(self, "coefficients", canon)

    @classmethod
    def of(cls, coefficients: Mapping[int, int], relation: str, constant: int) -> "LinearAtom":
        return cls(tuple(coefficients.items()), relation, constant)

    @property
    def variables(self) -> tuple[int, ...]:
        return tuple(v for v, _ in self.coefficients)

    def is_ground(self) -> bool:
        return not self.coefficients

    def lhs_value(self, x: Sequence[int]) -> int:
        return sum(c * x[v] for v, c in self.coefficients)

    def renamed(self, mapping: Mapping[int, int]) -> "LinearAtom":
        return LinearAtom(tuple((mapping[v], c) for v, c in self.coefficients),
                          self.relation, self.constant)


@dataclass(frozen=True)
class MonomialAtom:
    """``x[lhs_var] relation x[rhs_var] ** exponent``."""

    lhs_var: int
    relation: str
    rhs_var: int
    exponent: int

    def __post_init__(self):
        _check_relation(self.relation, MONOMIAL_RELATIONS)
        if self.lhs_var < 0 or self.rhs_var < 0:
            raise InputError("negative variable index in monomial atom")
        if not isinstance(self.exponent, int) or self.exponent < 0:
            raise InputError(f"exponent must be a non-negative int, got {self.exponent!r}")

    @property
    def variables(self) -> tuple[int, ...]:
        return (self.lhs_var, self.rhs_var)

    def renamed(self, mapping: Mapping[int, int]) -> "MonomialAtom":
        return MonomialAtom(mapping[self.lhs_var], self.relation,
                            mapping[self.rhs_var], self.exponent)


def _check_index(var: int, dim: int) -> None:
    if not 0 <= var < dim:
        raise InputError(f"variable index {var} out of range for dimension {dim}")


def eval_linear_atom(atom: LinearAtom, x: Sequence[int]) -> bool:
    for var in atom.variables:
        _check_index(var, len(x))
    return compare(atom.lhs_value(x), atom.relation, atom.constant)


def eval_monomial_atom(atom: MonomialAtom, x: Sequence[int]) -> bool:
    _check_index(atom.lhs_var, len(x))
    _check_index(atom.rhs_var, len(x))
    # Python defines 0 ** 0 == 1, which is the convention we want.
    return compare(x[atom.lhs_var], atom.relation, x[atom.rhs_var] ** atom.exponent)


class Direction(str, enum.Enum):
    PURE_LE = "pure-LE"
    PURE_GE = "pure-GE"
    MIXED = "mixed"
    LINEAR_ONLY = "linear-only"


def default_names(n: int) -> tuple[str, ...]:
    return tuple(f"x{i + 1}" for i in range(n))


@dataclass(frozen=True)
class ConstraintSystem:
    """A conjunction ``L and Q`` of linear and monomial atoms over N^num_vars."""

    num_vars: int
    linear: tuple[LinearAtom, ...] = ()
    monomial: tuple[MonomialAtom, ...] = ()
    var_names: Optional[tuple[str, ...]] = None

    def __post_init__(self):
        if self.num_vars < 1:
            raise InputError("a constraint system needs at least one variable")
        object.__setattr__(self, "linear", tuple(self.linear))
        object.__setattr__(self, "monomial", tuple(self.monomial))
        if self.var_names is not None:
            names = tuple(self.var_names)
            if len(names) != self.num_vars:
                raise InputError("var_names length differs from num_vars")
            if len(set(names)) != len(names):
                raise InputError("duplicate variable names")
            object.__setattr__(self, "var_names", names)
        for atom in self.linear:
            for v in atom.variables:
                _check_index(v, self.num_vars)
        for atom in self.monomial:
            for v in atom.variables:
                _check_index(v, self.num_vars)

    @property
    def names(self) -> tuple[str, ...]:
        return self.var_names if self.var_names is not None else default_names(self.num_vars)

    @property
    def direction(self) -> Direction:
        return direction_of(self)

    def with_atoms(self, linear: Iterable[LinearAtom] = (), monomial: Iterable[MonomialAtom] = ()) -> "ConstraintSystem":
        return ConstraintSystem(self.num_vars, self.linear + tuple(linear),
                                self.monomial + tuple(monomial), self.var_names)

    def satisfied_by(self, x: Sequence[int]) -> bool:
        if len(x) != self.num_vars:
            raise InputError(f"point has dimension {len(x)}, system has {self.num_vars}")
        return (all(eval_linear_atom(a, x) for a in self.linear)
                and all(eval_monomial_atom(a, x) for a in self.monomial))


def direction_of(system: ConstraintSystem) -> Direction:
    """Classify by the monomial atoms of exponent >= 2 (lower exponents are linear)."""
    rels = {a.relation for a in system.monomial if a.exponent >= 2}
    if not rels:
        return Direction.LINEAR_ONLY
    if rels == {LE}:
        return Direction.PURE_LE
    if rels == {GE}:
        return Direction.PURE_GE
    return Direction.MIXED


def _is_positive_multiple(big: Sequence[int], small: Sequence[int]) -> bool:
    """True if ``big == k * small`` for an integer k >= 2."""
    k = None
    for b, s in zip(big, small):
        if s == 0:
            if b != 0:
                return False
            continue
        if b % s:
            return False
        q = b // s
        if k is None:
            k = q
        elif k != q:
            return False
    return k is not None and k >= 2


def drop_redundant_steps(steps: Iterable[Sequence[int]]) -> list[tuple[int, ...]]:
    """Remove zero vectors, duplicates and exact positive multiples (order kept)."""
    unique: list[tuple[int, ...]] = []
    seen = set()
    for s in steps:
        s = tuple(s)
        if not any(s) or s in seen:
            continue
        seen.add(s)
        unique.append(s)
    return [s for s in unique if not any(o != s and _is_positive_multiple(s, o) for o in unique)]


@dataclass(frozen=True)
class LinearSet:
    """``{base + sum(alpha_i * steps[i]) : alpha in N^K}``."""

    base: NatVec
    steps: tuple[NatVec, ...] = ()

    def __post_init__(self):
        base = self.base if isinstance(self.base, NatVec) else NatVec(self.base)
        steps = tuple(s if isinstance(s, NatVec) else NatVec(s) for s in self.steps)
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "steps", steps)
        for s in steps:
            if s.dim != base.dim:
                raise InputError("step dimension differs from base dimension")
            if s.is_zero():
                raise InputError("zero step vector")
        # only steps on the same ray can be multiples of each other
        rays: dict[tuple[int, ...], list[NatVec]] = {}
        for s in steps:
            g = math.gcd(*s)
            rays.setdefault(tuple(c // g for c in s), []).append(s)
        for group in rays.values():
            for i, s in enumerate(group):
                for j, t in enumerate(group):
                    if i != j and (s == t or _is_positive_multiple(s, t)):
                        raise InputError(f"step {tuple(s)} is a multiple of step {tuple(t)}")

    @property
    def dim(self) -> int:
        return self.base.dim

    @property
    def K(self) -> int:
        return len(self.steps)

    def point(self, alpha: Sequence[int]) -> NatVec:
        if len(alpha) != len(self.steps):
            raise InputError(f"expected {len(self.steps)} coefficients, got {len(alpha)}")
        x = list(self.base)
        for a, step in zip(alpha, self.steps):
            if a < 0:
                raise InputError("negative coefficient")
            if a:
                for c, b in enumerate(step):
                    x[c] += a * b
        return NatVec(x)

    def max_coeff(self) -> int:
        return max([self.base.norm_inf()] + [s.norm_inf() for s in self.steps])


def caratheodory_bound(n: int, M: int) -> int:
    """ceil(2 n log2(4 n M)); 0 when there is nothing to bound."""
    if M < 1 or n < 1:
        return 0
    return math.ceil(2 * n * math.log2(4 * n * M))


@dataclass(frozen=True)
class SemilinearStats:
    max_generator_coeff: int
    max_inf_norm: int
    caratheodory_bound: int


@dataclass(frozen=True)
class SemilinearSet:
    components: tuple[LinearSet, ...]
    dim: int

    def __post_init__(self):
        object.__setattr__(self, "components", tuple(self.components))
        for c in self.components:
            if c.dim != self.dim:
                raise InputError("component dimension mismatch")

    @property
    def stats(self) -> SemilinearStats:
        m = max((c.max_coeff() for c in self.components), default=0)
        M = max((s.norm_inf() for c in self.components for s in c.steps), default=0)
        return SemilinearStats(m, M, caratheodory_bound(self.dim, M))

    def is_empty(self) -> bool:
        return not self.components


class Status(str, enum.Enum):
    SAT = "sat"
    UNSAT = "unsat"


@dataclass(frozen=True)
class Witness:
    x_values: NatVec
    alpha_values: Optional[tuple[int, ...]] = None
    component_index: Optional[int] = None
    permutation: Optional[tuple[int, ...]] = None
    names: Optional[tuple[str, ...]] = field(default=None, compare=False)

    def __post_init__(self):
        if not isinstance(self.x_values, NatVec):
            object.__setattr__(self, "x_values", NatVec(self.x_values))
        if self.alpha_values is not None:
            alpha = tuple(self.alpha_values)
            if any(a < 0 for a in alpha):
                raise InputError("negative alpha value")
            object.__setattr__(self, "alpha_values", alpha)
        if self.permutation is not None:
            object.__setattr__(self, "permutation", tuple(self.permutation))


@dataclass(frozen=True)
class SolveStats:
    m: int = 0
    K: int = 0
    components: int = 0
    caratheodory_bound: int = 0

    def merge(self, other: "SolveStats") -> "SolveStats":
        return SolveStats(max(self.m, other.m), max(self.K, other.K),
                          self.components + other.components,
                          max(self.caratheodory_bound, other.caratheodory_bound))


@dataclass(frozen=True)
class Verdict:
    status: Status
    witness: Optional[Witness] = None
    certificate_note: Optional[str] = None
    stats: SolveStats = SolveStats()

    @property
    def is_sat(self) -> bool:
        return self.status is Status.SAT

    @classmethod
    def unsat(cls, stats: SolveStats = SolveStats()) -> "Verdict":
        return cls(Status.UNSAT, stats=stats)
