"""Hardness constructions as instance generators, with ground-truth checkers.

Circuits of NAND gates become explicitly given linear sets with monomial
atoms of a single direction; subset-sum instances become one convex
quadratic inequality over the naturals.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from typing import Optional, Sequence

from .errors import InputError, ResourceExhausted
from .model import GE, LE, LinearSet, MonomialAtom, NatVec, SolveStats, Status, Verdict, Witness

IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")

# per-gate coordinates, in block order
GATE_FIELDS = ("x", "y", "z", "u01", "u02", "u03", "u12", "u13", "u23",
               "v", "r", "s", "t0", "t1", "t2", "t3")
PAIRS = ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))
ONE = "const.1"


@dataclass(frozen=True)
class Circuit:
    input_names: tuple[str, ...]
    gates: tuple[tuple[str, str, str], ...]
    output: str

    def __post_init__(self):
        object.__setattr__(self, "input_names", tuple(self.input_names))
        object.__setattr__(self, "gates", tuple(tuple(g) for g in self.gates))
        defined: set[str] = set()
        for w in self.input_names:
            if not IDENT.match(w):
                raise InputError(f"bad wire name {w!r}")
            if w in defined:
                raise InputError(f"wire {w} defined twice")
            defined.add(w)
        for out, a, b in self.gates:
            if not IDENT.match(out):
                raise InputError(f"bad wire name {out!r}")
            for w in (a, b):
                if w not in defined:
                    raise InputError(f"gate {out} reads {w} before it is defined")
            if out in defined:
                raise InputError(f"wire {out} defined twice")
            defined.add(out)
        if self.output not in defined:
            raise InputError(f"output {self.output} is not a defined wire")


def circuit_eval(c: Circuit, assignment: Sequence[int]) -> int:
    if len(assignment) != len(c.input_names):
        raise InputError(f"circuit has {len(c.input_names)} inputs, got {len(assignment)} bits")
    val = dict(zip(c.input_names, (int(bool(a)) for a in assignment)))
    for out, a, b in c.gates:
        val[out] = 1 - (val[a] & val[b])
    return val[c.output]


def circuit_satisfiable(c: Circuit) -> bool:
    return any(circuit_eval(c, u) for u in itertools.product((0, 1), repeat=len(c.input_names)))


@dataclass(frozen=True)
class SolvedInstance:
    """A linear set given by generators, monomial atoms over it, and a search hint."""

    linear_set: LinearSet
    atoms: tuple[MonomialAtom, ...]
    var_names: tuple[str, ...]
    alpha_bound: Optional[int] = None
    alpha_bound_complete: bool = False

    def __iter__(self):
        return iter((self.linear_set, self.atoms, self.alpha_bound))


def _layout(c: Circuit) -> tuple[list[str], dict[str, int]]:
    names = list(c.input_names)
    for out, _, _ in c.gates:
        names.extend(f"{out}.{f}" for f in GATE_FIELDS)
    names.append(ONE)
    return names, {n: i for i, n in enumerate(names)}


def _gate_step(k: int) -> dict[str, int]:
    """Entries of the step for coefficient alpha_k; index k encodes (x, y) = (k >> 1, k & 1)."""
    x, y = k >> 1, k & 1
    col = {"x": x, "y": y, "z": 1 - (x & y), "s": 1, f"t{k}": 1}
    for i, j in PAIRS:
        if k in (i, j):
            col[f"u{i}{j}"] = 1
    return col


def _nand_instance(c: Circuit, direction: str) -> SolvedInstance:
    names, idx = _layout(c)
    dim = len(names)
    base = [0] * dim
    base[idx[ONE]] = 1
    steps = []
    for w in c.input_names:
        s = [0] * dim
        s[idx[w]] = 1
        steps.append(NatVec(s))
    wire = {w: w for w in c.input_names}
    for out, _, _ in c.gates:
        base[idx[f"{out}.v"]] = 3 if direction == GE else 1
        base[idx[f"{out}.r"]] = 1
        for k in range(4):
            s = [0] * dim
            for f, val in _gate_step(k).items():
                s[idx[f"{out}.{f}"]] = val
            steps.append(NatVec(s))
        wire[out] = f"{out}.z"

    def le(small: str, big: str) -> MonomialAtom:
        # small^2 <= big in the GE form, small <= big^2 in the LE form
        if direction == GE:
            return MonomialAtom(idx[big], GE, idx[small], 2)
        return MonomialAtom(idx[small], LE, idx[big], 2)

    atoms: list[MonomialAtom] = []
    for n in names:
        if direction == GE:
            if not n.endswith(".v"):
                atoms.append(MonomialAtom(idx[n], GE, idx[n], 2))
        else:
            atoms.append(MonomialAtom(idx[n], LE, idx[ONE], 2))
    for out, a, b in c.gates:
        for i, j in PAIRS:
            atoms.append(le(f"{out}.u{i}{j}", f"{out}.v"))
        atoms.append(le(f"{out}.r", f"{out}.s"))
        for mine, src in ((f"{out}.x", wire[a]), (f"{out}.y", wire[b])):
            atoms.append(le(mine, src))
            atoms.append(le(src, mine))
    atoms.append(le(ONE, wire[c.output]))
    return SolvedInstance(LinearSet(NatVec(base), tuple(steps)), tuple(atoms),
                          tuple(names), 1, True)


def nand_to_more(c: Circuit) -> SolvedInstance:
    """Encode ``exists u. C(u) = 1`` with atoms ``x >= y^2`` only."""
    return _nand_instance(c, GE)


def nand_to_less(c: Circuit) -> SolvedInstance:
    """Encode ``exists u. C(u) = 1`` with atoms ``x <= y^2`` only."""
    return _nand_instance(c, LE)


def decode_inputs(c: Circuit, inst: SolvedInstance, x: Sequence[int]) -> tuple[int, ...]:
    """Read the input assignment back from a solution point."""
    pos = {n: i for i, n in enumerate(inst.var_names)}
    return tuple(x[pos[w]] for w in c.input_names)


@dataclass(frozen=True)
class CqcInstance:
    """``sum(x_i^2 - x_i) + (sum a_i x_i)^2 <= 0`` over naturals ``x_1..x_l``."""

    a_coeffs: tuple[int, ...]
    num_vars: int
    nonempty: bool = False

    def lhs(self, x: Sequence[int]) -> int:
        if len(x) != self.num_vars:
            raise InputError(f"expected {self.num_vars} values, got {len(x)}")
        lin = sum(a * v for a, v in zip(self.a_coeffs, x))
        return sum(v * v - v for v in x) + lin * lin

    def holds(self, x: Sequence[int]) -> bool:
        return self.lhs(x) <= 0 and (not self.nonempty or any(x))

    def polynomial(self) -> str:
        if not self.a_coeffs:
            return "0 <= 0"
        xs = [f"x{i + 1}" for i in range(self.num_vars)]
        quad = " + ".join(f"({v}^2 - {v})" for v in xs)
        lin = " + ".join(f"{a}*{v}" for a, v in zip(self.a_coeffs, xs))
        text = f"{quad} + ({lin})^2 <= 0"
        if self.nonempty:
            text += f" and {' + '.join(xs)} >= 1"
        return text


def subsetsum_to_cqc(values: Sequence[int], nonempty: bool = False) -> CqcInstance:
    vals = tuple(int(v) for v in values)
    return CqcInstance(vals, len(vals), nonempty)


def cqc_brute(instance: CqcInstance, nonempty: Optional[bool] = None) -> Verdict:
    """Decide by enumerating ``{0,1}^l``.

    Off the cube some ``x_i^2 - x_i`` is positive and no addend is negative,
    so every solution is Boolean.
    """
    ne = instance.nonempty if nonempty is None else nonempty
    l = instance.num_vars
    if l > 24:
        raise ResourceExhausted(f"{l} variables is beyond brute force (limit 24)")
    probe = CqcInstance(instance.a_coeffs, l, ne)
    for x in itertools.product((0, 1), repeat=l):
        if probe.holds(x):
            return Verdict(Status.SAT, Witness(NatVec(x)) if l else None,
                           None if l else "empty assignment", SolveStats())
    return Verdict.unsat()


def subsetsum_dp(values: Sequence[int], nonempty: bool = False) -> bool:
    """Whether some subset (nonempty if asked) sums to zero."""
    if len(values) > 24 or any(abs(v) > 10 ** 6 for v in values):
        raise InputError("subsetsum_dp expects at most 24 values of magnitude at most 10^6")
    if not nonempty:
        return True
    reachable: set[int] = set()  # sums of nonempty subsets
    for v in values:
        reachable |= {s + v for s in reachable} | {v}
    return 0 in reachable


def parse_values(text: str) -> list[int]:
    text = text.strip()
    if not text:
        return []
    try:
        return [int(t) for t in text.split(",")]
    except ValueError:
        raise InputError(f"expected comma-separated integers, got {text!r}") from None


def enumerate_circuits(num_inputs: int, max_gates: int) -> list[Circuit]:
    """Every circuit over ``num_inputs`` inputs with at most ``max_gates`` gates, up to structure.

    Two circuits are identified when they compute the output through the
    same NAND term with shared subterms merged, so gates are distinct and all
    reach the output. Inputs may go unused, which covers smaller input
    counts. Identity circuits (output is an input) are included.
    """
    inputs = tuple(f"i{k}" for k in range(num_inputs))

    def key(t) -> str:
        return t if isinstance(t, str) else "(" + key(t[0]) + " " + key(t[1]) + ")"

    def gates_of(t, acc: set) -> set:
        if not isinstance(t, str) and t not in acc:
            acc.add(t)
            gates_of(t[0], acc)
            gates_of(t[1], acc)
        return acc

    pool: set = set(inputs)
    for _ in range(max_gates):
        fresh = set()
        ordered = sorted(pool, key=key)
        for a, b in itertools.combinations_with_replacement(ordered, 2):
            t = (a, b)
            if t not in pool and len(gates_of(t, set())) <= max_gates:
                fresh.add(t)
        pool |= fresh
    out = [Circuit(inputs, (), w) for w in inputs]
    for term in sorted((t for t in pool if not isinstance(t, str)), key=lambda t: (len(key(t)), key(t))):
        names: dict = {}
        gates: list[tuple[str, str, str]] = []

        def emit(t) -> str:
            if isinstance(t, str):
                return t
            if t not in names:
                a, b = emit(t[0]), emit(t[1])
                names[t] = f"g{len(gates)}"
                gates.append((names[t], a, b))
            return names[t]

        top = emit(term)
        out.append(Circuit(inputs, tuple(gates), top))
    return out


def random_circuit(rng, num_inputs: int, num_gates: int) -> Circuit:
    """Gates read uniformly from earlier wires; the last gate is the output."""
    inputs = tuple(f"i{k}" for k in range(num_inputs))
    wires = list(inputs)
    gates = []
    for k in range(num_gates):
        g = f"g{k}"
        gates.append((g, rng.choice(wires), rng.choice(wires)))
        wires.append(g)
    return Circuit(inputs, tuple(gates), wires[-1])
