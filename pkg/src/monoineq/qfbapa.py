"""Set constraints with cardinalities, extended with power-image atoms.

Formulas are translated to linear arithmetic over Venn-region cardinalities:
one natural-number variable per cell of the set variables, plus ``maxc``
for the size of the universe. Boolean structure is expanded to DNF and each
disjunct becomes one ConstraintSystem. An image atom ``S = f[P^n]`` adds
``|S| <= |P|^n`` and ``S = f^-1[P^n]`` adds ``|P|^n <= |S|``.

Integer variables range over the naturals.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional, Sequence

from .errors import InputError, InternalConsistencyError, ResourceExhausted, SourceError
from .model import EQ, GE, LE, ConstraintSystem, LinearAtom, MonomialAtom, SolveStats, Status, Verdict
from .semilinear import DEFAULT_LIMITS, EngineLimits
from .sexpr import Atom, Node, SList, read_all
from .solver import DEFAULT_CONFIG, SolverConfig, solve

MAX_SET_VARS = 6
MAX_BRANCHES = 4096
IMAGE, INV_IMAGE = "image", "inv-image"


# set expressions
@dataclass(frozen=True)
class SetVar:
    name: str


@dataclass(frozen=True)
class Empty:
    pass


@dataclass(frozen=True)
class Univ:
    pass


@dataclass(frozen=True)
class Union_:
    args: tuple


@dataclass(frozen=True)
class Inter:
    args: tuple


@dataclass(frozen=True)
class Compl:
    arg: object


# integer terms
@dataclass(frozen=True)
class IntLit:
    value: int


@dataclass(frozen=True)
class IntVar:
    name: str


@dataclass(frozen=True)
class Maxc:
    pass


@dataclass(frozen=True)
class Plus:
    args: tuple


@dataclass(frozen=True)
class Scale:
    k: int
    term: object


@dataclass(frozen=True)
class Card:
    set: object


# atoms and connectives
@dataclass(frozen=True)
class SetEq:
    left: object
    right: object


@dataclass(frozen=True)
class Subset:
    left: object
    right: object


@dataclass(frozen=True)
class IntEq:
    left: object
    right: object


@dataclass(frozen=True)
class IntLe:
    left: object
    right: object


@dataclass(frozen=True)
class Dvd:
    k: int
    term: object


@dataclass(frozen=True)
class And:
    args: tuple


@dataclass(frozen=True)
class Or:
    args: tuple


@dataclass(frozen=True)
class Not:
    arg: object


@dataclass(frozen=True)
class ImageAtom:
    """``S = f[P^n]`` (kind image) or ``S = f^-1[P^n]`` (kind inv-image)."""

    S: str
    f: str
    P: str
    n: int
    kind: str


TRUE = And(())
_IMAGE_SLOT = object()  # placeholder left by an image atom inside a conjunction


@dataclass(frozen=True)
class QfbapaFormula:
    body: object
    image_atoms: tuple[ImageAtom, ...] = ()
    set_vars: tuple[str, ...] = ()
    int_vars: tuple[str, ...] = ()


def _collect(node, sets: set, ints: set) -> None:
    if isinstance(node, SetVar):
        sets.add(node.name)
    elif isinstance(node, IntVar):
        ints.add(node.name)
    elif isinstance(node, (IntLit, Maxc, Empty, Univ)):
        pass
    else:
        for v in vars(node).values():
            if isinstance(v, tuple):
                for c in v:
                    _collect(c, sets, ints)
            elif not isinstance(v, (int, str)):
                _collect(v, sets, ints)


def make_formula(body, image_atoms: Sequence[ImageAtom] = ()) -> QfbapaFormula:
    """Build a formula, deriving its variable lists from the tree."""
    sets: set[str] = set()
    ints: set[str] = set()
    _collect(body, sets, ints)
    for a in image_atoms:
        sets.update((a.S, a.P))
    if sets & ints:
        raise InputError(f"symbols used both as sets and integers: {sorted(sets & ints)}")
    return QfbapaFormula(body, tuple(image_atoms), tuple(sorted(sets)), tuple(sorted(ints)))


# --- parsing -------------------------------------------------------------

SET_OPS = {"union", "inter", "compl", "empty", "univ"}
INT_OPS = {"+", "*", "card", "maxc"}
RESERVED = {"empty", "univ", "maxc"}


class _Sorts:
    """Union-find over symbol names; a class may be pinned to 'set' or 'int'."""

    def __init__(self):
        self.parent: dict[str, str] = {}
        self.sort: dict[str, str] = {}
        self.where: dict[str, Atom] = {}

    def find(self, a: str) -> str:
        self.parent.setdefault(a, a)
        while self.parent[a] != a:
            self.parent[a] = self.parent[self.parent[a]]
            a = self.parent[a]
        return a

    def pin(self, sym: Atom, sort: str) -> None:
        r = self.find(sym.text)
        self.where.setdefault(sym.text, sym)
        have = self.sort.get(r)
        if have is not None and have != sort:
            raise SourceError(sym.line, sym.column, f"{sym.text} is used both as a set and as an integer")
        self.sort[r] = sort

    def join(self, a: Atom, b: Atom) -> None:
        ra, rb = self.find(a.text), self.find(b.text)
        if ra == rb:
            return
        sa, sb = self.sort.get(ra), self.sort.get(rb)
        if sa and sb and sa != sb:
            raise SourceError(b.line, b.column, f"{a.text} and {b.text} have different sorts")
        self.parent[ra] = rb
        if sa:
            self.sort[rb] = sa

    def of(self, name: str) -> str:
        return self.sort.get(self.find(name), "set")


def _head(node: Node) -> Optional[str]:
    if isinstance(node, SList) and node.items and isinstance(node.items[0], Atom):
        return node.items[0].text
    return None


def _err(node: Node, msg: str) -> SourceError:
    return SourceError(node.line, node.column, msg)


def _symbol(node: Node) -> Atom:
    if not isinstance(node, Atom) or node.is_int or node.text in RESERVED:
        raise _err(node, "expected a symbol")
    return node


def _literal(node: Node) -> int:
    if not isinstance(node, Atom) or not node.is_int:
        raise _err(node, "expected an integer literal")
    return int(node.text)


def _arity(node: SList, lo: int, hi: Optional[int] = None) -> tuple[Node, ...]:
    args = node.items[1:]
    if len(args) < lo or (hi is not None and len(args) > hi):
        want = f"{lo}" if hi == lo else f"{lo}..{hi if hi is not None else ''}"
        raise _err(node, f"{node.items[0].text} expects {want} arguments, got {len(args)}")
    return args


def _guess(node: Node) -> Optional[str]:
    """Sort evident from the shape of an expression, if any."""
    if isinstance(node, Atom):
        if node.is_int or node.text == "maxc":
            return "int"
        if node.text in ("empty", "univ"):
            return "set"
        return None
    h = _head(node)
    if h in SET_OPS:
        return "set"
    if h in INT_OPS:
        return "int"
    return None


def _infer(node: Node, sorts: _Sorts, want: Optional[str]) -> None:
    """First pass: pin symbol sorts from their positions."""
    if isinstance(node, Atom):
        if want and not node.is_int and node.text not in RESERVED:
            sorts.pin(node, want)
        return
    h = _head(node)
    if h is None:
        raise _err(node, "expected an operator")
    args = node.items[1:]
    if h in ("and", "or", "not"):
        for a in args:
            _infer(a, sorts, None)
    elif h in ("union", "inter", "compl", "card", "subset"):
        for a in args:
            _infer(a, sorts, "set")
    elif h in ("+", "*", "<=", "dvd"):
        for a in args:
            _infer(a, sorts, "int")
    elif h in ("image", "inv-image"):
        if len(args) == 4:
            _infer(args[0], sorts, "set")
            _infer(args[2], sorts, "set")
    elif h == "=":
        if len(args) != 2:
            return
        known = _guess(args[0]) or _guess(args[1])
        for a in args:
            _infer(a, sorts, known)
        if known is None and isinstance(args[0], Atom) and isinstance(args[1], Atom):
            sorts.join(_symbol(args[0]), _symbol(args[1]))


class _Builder:
    def __init__(self, sorts: _Sorts):
        self.sorts = sorts
        self.images: list[ImageAtom] = []

    def set_expr(self, node: Node):
        if isinstance(node, Atom):
            if node.text == "empty":
                return Empty()
            if node.text == "univ":
                return Univ()
            sym = _symbol(node)
            if self.sorts.of(sym.text) != "set":
                raise _err(node, f"{sym.text} is an integer, a set is expected here")
            return SetVar(sym.text)
        h = _head(node)
        if h in ("empty", "univ"):
            _arity(node, 0, 0)
            return Empty() if h == "empty" else Univ()
        if h in ("union", "inter"):
            args = tuple(self.set_expr(a) for a in _arity(node, 1))
            return Union_(args) if h == "union" else Inter(args)
        if h == "compl":
            return Compl(self.set_expr(_arity(node, 1, 1)[0]))
        raise _err(node, "expected a set expression")

    def term(self, node: Node):
        if isinstance(node, Atom):
            if node.is_int:
                return IntLit(int(node.text))
            if node.text == "maxc":
                return Maxc()
            sym = _symbol(node)
            if self.sorts.of(sym.text) != "int":
                raise _err(node, f"{sym.text} is a set, an integer is expected here")
            return IntVar(sym.text)
        h = _head(node)
        if h == "maxc":
            _arity(node, 0, 0)
            return Maxc()
        if h == "card":
            return Card(self.set_expr(_arity(node, 1, 1)[0]))
        if h == "+":
            args = tuple(self.term(a) for a in _arity(node, 1))
            return args[0] if len(args) == 1 else Plus(args)
        if h == "*":
            a, b = _arity(node, 2, 2)
            if isinstance(a, Atom) and a.is_int:
                return Scale(int(a.text), self.term(b))
            if isinstance(b, Atom) and b.is_int:
                return Scale(int(b.text), self.term(a))
            raise _err(node, "multiplication needs an integer literal factor")
        raise _err(node, "expected an integer term")

    def formula(self, node: Node, top: bool):
        h = _head(node)
        if h is None:
            raise _err(node, "expected a formula")
        if h == "and":
            kids = (self.formula(a, top) for a in node.items[1:])
            return And(tuple(k for k in kids if k is not _IMAGE_SLOT))
        if h == "or":
            return Or(tuple(self.formula(a, False) for a in _arity(node, 1)))
        if h == "not":
            return Not(self.formula(_arity(node, 1, 1)[0], False))
        if h in ("image", "inv-image"):
            s, f, p, n = _arity(node, 4, 4)
            if not top:
                raise _err(node, "image atoms are only allowed as top-level conjuncts")
            exp = _literal(n)
            if exp < 1:
                raise _err(n, "image exponent must be at least 1")
            self.images.append(ImageAtom(_set_name(s, self.sorts), _symbol(f).text,
                                         _set_name(p, self.sorts), exp, h))
            return _IMAGE_SLOT
        if h == "subset":
            a, b = _arity(node, 2, 2)
            return Subset(self.set_expr(a), self.set_expr(b))
        if h == "<=":
            a, b = _arity(node, 2, 2)
            return IntLe(self.term(a), self.term(b))
        if h == "dvd":
            k, t = _arity(node, 2, 2)
            return Dvd(_literal(k), self.term(t))
        if h == "=":
            a, b = _arity(node, 2, 2)
            sort = _guess(a) or _guess(b)
            if sort is None:
                sort = self.sorts.of(_symbol(a).text)
            if sort == "set":
                return SetEq(self.set_expr(a), self.set_expr(b))
            return IntEq(self.term(a), self.term(b))
        if h in SET_OPS or h in INT_OPS:
            raise _err(node, f"expected a formula, found a {h!r} expression")
        raise _err(node, f"unknown operator {h!r}")


def _set_name(node: Node, sorts: Optional[_Sorts] = None) -> str:
    sym = _symbol(node)
    if sorts is not None and sorts.of(sym.text) != "set":
        raise _err(node, f"{sym.text} must be a set variable")
    return sym.text


def formula_from_text(text: str) -> QfbapaFormula:
    """Parse s-expressions; several top-level expressions form a conjunction."""
    nodes = read_all(text)
    if not nodes:
        raise SourceError(1, 1, "empty formula")
    sorts = _Sorts()
    for n in nodes:
        _infer(n, sorts, None)
    b = _Builder(sorts)
    parts = tuple(p for p in (b.formula(n, True) for n in nodes) if p is not _IMAGE_SLOT)
    body = TRUE if not parts else parts[0] if len(parts) == 1 else And(parts)
    try:
        return make_formula(body, b.images)
    except InputError as exc:
        raise SourceError(nodes[0].line, nodes[0].column, str(exc)) from None


def validate_image_atoms(f: QfbapaFormula) -> list[str]:
    out = []
    if len({a.kind for a in f.image_atoms}) > 1:
        out.append("mixed-kinds")
    names = [a.f for a in f.image_atoms]
    if len(set(names)) != len(names):
        out.append("f-reused")
    if any(a.n < 1 for a in f.image_atoms):
        out.append("exponent")
    return out


# --- direct semantics ------------------------------------------------------

def eval_set(node, universe: frozenset, sets: dict) -> frozenset:
    if isinstance(node, SetVar):
        return sets[node.name]
    if isinstance(node, Empty):
        return frozenset()
    if isinstance(node, Univ):
        return universe
    if isinstance(node, Union_):
        return frozenset().union(*(eval_set(a, universe, sets) for a in node.args))
    if isinstance(node, Inter):
        out = universe
        for a in node.args:
            out = out & eval_set(a, universe, sets)
        return out
    if isinstance(node, Compl):
        return universe - eval_set(node.arg, universe, sets)
    raise InputError(f"not a set expression: {node!r}")


def eval_term(node, universe: frozenset, sets: dict, ints: dict) -> int:
    if isinstance(node, IntLit):
        return node.value
    if isinstance(node, IntVar):
        return ints[node.name]
    if isinstance(node, Maxc):
        return len(universe)
    if isinstance(node, Plus):
        return sum(eval_term(a, universe, sets, ints) for a in node.args)
    if isinstance(node, Scale):
        return node.k * eval_term(node.term, universe, sets, ints)
    if isinstance(node, Card):
        return len(eval_set(node.set, universe, sets))
    raise InputError(f"not an integer term: {node!r}")


def evaluate(node, universe: frozenset, sets: dict, ints: dict) -> bool:
    """Truth of an image-free formula in one concrete model."""
    if isinstance(node, And):
        return all(evaluate(a, universe, sets, ints) for a in node.args)
    if isinstance(node, Or):
        return any(evaluate(a, universe, sets, ints) for a in node.args)
    if isinstance(node, Not):
        return not evaluate(node.arg, universe, sets, ints)
    if isinstance(node, SetEq):
        return eval_set(node.left, universe, sets) == eval_set(node.right, universe, sets)
    if isinstance(node, Subset):
        return eval_set(node.left, universe, sets) <= eval_set(node.right, universe, sets)
    if isinstance(node, IntEq):
        return eval_term(node.left, universe, sets, ints) == eval_term(node.right, universe, sets, ints)
    if isinstance(node, IntLe):
        return eval_term(node.left, universe, sets, ints) <= eval_term(node.right, universe, sets, ints)
    if isinstance(node, Dvd):
        t = eval_term(node.term, universe, sets, ints)
        return t == 0 if node.k == 0 else t % node.k == 0
    raise InputError(f"not a formula: {node!r}")


def image_holds(a: ImageAtom, sets: dict) -> bool:
    s, p = len(sets[a.S]), len(sets[a.P])
    return s <= p ** a.n if a.kind == IMAGE else p ** a.n <= s


# --- translation -----------------------------------------------------------

@dataclass(frozen=True)
class VennRegion:
    signature: tuple[bool, ...]
    card_var: int

    def name(self) -> str:
        return "r_" + "".join("1" if b else "0" for b in self.signature) if self.signature else "r"


def regions(set_vars: Sequence[str]) -> list[VennRegion]:
    k = len(set_vars)
    if k > MAX_SET_VARS:
        raise ResourceExhausted(f"{k} set variables; at most {MAX_SET_VARS} are supported")
    return [VennRegion(sig, i) for i, sig in enumerate(itertools.product((False, True), repeat=k))]


def _plus(t, c: int):
    return Plus((t, IntLit(c)))


def _nnf(node, positive: bool = True):
    """Push negations to atoms; negated integer atoms become positive ones."""
    if isinstance(node, Not):
        return _nnf(node.arg, not positive)
    if isinstance(node, (And, Or)):
        kids = tuple(_nnf(a, positive) for a in node.args)
        return (And if isinstance(node, And) == positive else Or)(kids)
    if positive:
        return node
    if isinstance(node, IntLe):
        return IntLe(_plus(node.right, 1), node.left)
    if isinstance(node, IntEq):
        return Or((IntLe(_plus(node.left, 1), node.right), IntLe(_plus(node.right, 1), node.left)))
    if isinstance(node, Dvd) and node.k == 0:
        return _nnf(IntEq(node.term, IntLit(0)), False)
    return Not(node)


def _dnf(node) -> list[tuple]:
    if isinstance(node, And):
        out: list[tuple] = [()]
        for a in node.args:
            out = [x + y for x in out for y in _dnf(a)]
            if len(out) > MAX_BRANCHES:
                raise ResourceExhausted(f"DNF expansion exceeds {MAX_BRANCHES} branches")
        return out
    if isinstance(node, Or):
        out = [b for a in node.args for b in _dnf(a)]
        if len(out) > MAX_BRANCHES:
            raise ResourceExhausted(f"DNF expansion exceeds {MAX_BRANCHES} branches")
        return out
    return [(node,)]


class _Branch:
    """Allocates variables and linear atoms for one disjunct."""

    def __init__(self, f: QfbapaFormula):
        self.f = f
        self.regions = regions(f.set_vars)
        self.names = [r.name() for r in self.regions] + ["maxc"] + [f"int_{v}" for v in f.int_vars]
        self.maxc = len(self.regions)
        self.int_index = {v: self.maxc + 1 + i for i, v in enumerate(f.int_vars)}
        self.linear: list[LinearAtom] = [
            LinearAtom.of({**{r.card_var: 1 for r in self.regions}, self.maxc: -1}, EQ, 0)]
        self.monomial: list[MonomialAtom] = []

    def fresh(self, name: str) -> int:
        self.names.append(f"{name}{len(self.names)}")
        return len(self.names) - 1

    def cells(self, node) -> frozenset:
        """Indices of the regions inside a set expression."""
        sv = self.f.set_vars
        if isinstance(node, SetVar):
            k = sv.index(node.name)
            return frozenset(r.card_var for r in self.regions if r.signature[k])
        if isinstance(node, Empty):
            return frozenset()
        if isinstance(node, Univ):
            return frozenset(range(len(self.regions)))
        if isinstance(node, Union_):
            return frozenset().union(*(self.cells(a) for a in node.args))
        if isinstance(node, Inter):
            out = frozenset(range(len(self.regions)))
            for a in node.args:
                out &= self.cells(a)
            return out
        if isinstance(node, Compl):
            return frozenset(range(len(self.regions))) - self.cells(node.arg)
        raise InputError(f"not a set expression: {node!r}")

    def lin(self, node) -> tuple[dict, int]:
        """A term as (coefficients, constant)."""
        if isinstance(node, IntLit):
            return {}, node.value
        if isinstance(node, IntVar):
            return {self.int_index[node.name]: 1}, 0
        if isinstance(node, Maxc):
            return {self.maxc: 1}, 0
        if isinstance(node, Card):
            return {c: 1 for c in self.cells(node.set)}, 0
        if isinstance(node, Plus):
            co: dict = {}
            const = 0
            for a in node.args:
                c2, k2 = self.lin(a)
                for v, c in c2.items():
                    co[v] = co.get(v, 0) + c
                const += k2
            return co, const
        if isinstance(node, Scale):
            co, const = self.lin(node.term)
            return {v: node.k * c for v, c in co.items()}, node.k * const
        raise InputError(f"not an integer term: {node!r}")

    def rel(self, left, rel: str, right) -> None:
        lc, lk = self.lin(left)
        rc, rk = self.lin(right)
        co = dict(lc)
        for v, c in rc.items():
            co[v] = co.get(v, 0) - c
        self.linear.append(LinearAtom.of(co, rel, rk - lk))

    def literal(self, lit) -> None:
        neg = isinstance(lit, Not)
        atom = lit.arg if neg else lit
        if isinstance(atom, (SetEq, Subset)):
            a, b = self.cells(atom.left), self.cells(atom.right)
            diff = (a ^ b) if isinstance(atom, SetEq) else (a - b)
            co = {c: 1 for c in diff}
            self.linear.append(LinearAtom.of(co, GE, 1) if neg else LinearAtom.of(co, EQ, 0))
        elif isinstance(atom, IntLe):
            self.rel(atom.left, LE, atom.right)
        elif isinstance(atom, IntEq):
            self.rel(atom.left, EQ, atom.right)
        elif isinstance(atom, Dvd):
            self.dvd(atom, neg)
        else:
            raise InternalConsistencyError(f"unexpected literal {lit!r}")

    def dvd(self, atom: Dvd, neg: bool) -> None:
        co, const = self.lin(atom.term)
        k = abs(atom.k)
        if k == 0:
            if neg:
                raise InternalConsistencyError("negated 0 dvd T reached translation")
            self.linear.append(LinearAtom.of(co, EQ, -const))
            return
        # T = k (q+ - q-) [+ rem with 1 <= rem <= k - 1]
        qp, qm = self.fresh("q"), self.fresh("q")
        co = dict(co)
        co[qp] = co.get(qp, 0) - k
        co[qm] = co.get(qm, 0) + k
        if neg:
            rem = self.fresh("rem")
            co[rem] = -1
            self.linear.append(LinearAtom.of({rem: 1}, GE, 1))
            self.linear.append(LinearAtom.of({rem: 1}, LE, k - 1))
        self.linear.append(LinearAtom.of(co, EQ, -const))

    def image(self, a: ImageAtom) -> None:
        cs, cp = self.fresh(f"card_{a.S}_"), self.fresh(f"card_{a.P}_")
        for v, s in ((cs, a.S), (cp, a.P)):
            co = {c: -1 for c in self.cells(SetVar(s))}
            co[v] = 1
            self.linear.append(LinearAtom.of(co, EQ, 0))
        self.monomial.append(MonomialAtom(cs, LE if a.kind == IMAGE else GE, cp, a.n))

    def system(self) -> ConstraintSystem:
        return ConstraintSystem(len(self.names), tuple(self.linear), tuple(self.monomial), tuple(self.names))


def strict_refinement(a: ImageAtom):
    one = IntLit(1)
    s, p = Card(SetVar(a.S)), Card(SetVar(a.P))
    return Or((And((IntLe(one, p), IntLe(one, s))), And((IntEq(p, IntLit(0)), IntEq(s, IntLit(0))))))


def venn_translate(f: QfbapaFormula, strict_images: bool = False) -> list[ConstraintSystem]:
    """One ConstraintSystem per DNF disjunct; variables start with the regions and ``maxc``."""
    bad = validate_image_atoms(f)
    if "mixed-kinds" in bad:
        raise InputError("image and inverse-image atoms cannot be mixed: that fragment is undecidable")
    if bad:
        raise InputError(f"invalid image atoms: {', '.join(bad)}")
    regions(f.set_vars)  # size check before any expansion
    body = f.body
    if strict_images and f.image_atoms:
        body = And((body,) + tuple(strict_refinement(a) for a in f.image_atoms))
    out = []
    for lits in _dnf(_nnf(body)):
        br = _Branch(f)
        for lit in lits:
            br.literal(lit)
        for a in f.image_atoms:
            br.image(a)
        out.append(br.system())
    return out


def model_from_witness(f: QfbapaFormula, x: Sequence[int]) -> tuple[frozenset, dict, dict]:
    """Concrete universe, sets and integers built from region cardinalities."""
    regs = regions(f.set_vars)
    sets: dict[str, set] = {s: set() for s in f.set_vars}
    nxt = 0
    for r in regs:
        for e in range(nxt, nxt + x[r.card_var]):
            for k, s in enumerate(f.set_vars):
                if r.signature[k]:
                    sets[s].add(e)
        nxt += x[r.card_var]
    ints = {v: x[len(regs) + 1 + i] for i, v in enumerate(f.int_vars)}
    return frozenset(range(nxt)), {s: frozenset(v) for s, v in sets.items()}, ints


MODEL_CHECK_LIMIT = 10_000


def decide_qfbapa(f: QfbapaFormula, limits: EngineLimits = DEFAULT_LIMITS,
                  config: SolverConfig = DEFAULT_CONFIG, strict_images: bool = False) -> Verdict:
    """First SAT branch wins; a small enough witness is replayed as a concrete model."""
    stats = SolveStats()
    for system in venn_translate(f, strict_images):
        verdict = solve(system, limits, config)
        stats = stats.merge(verdict.stats)
        if verdict.is_sat:
            w = verdict.witness
            if w is not None and sum(w.x_values[:len(regions(f.set_vars))]) <= MODEL_CHECK_LIMIT:
                universe, sets, ints = model_from_witness(f, w.x_values)
                if not evaluate(f.body, universe, sets, ints) or \
                        not all(image_holds(a, sets) for a in f.image_atoms):
                    raise InternalConsistencyError("witness does not satisfy the formula as a model")
            return Verdict(Status.SAT, w, verdict.certificate_note, stats)
    return Verdict.unsat(stats)


def _emit_set(node) -> str:
    if isinstance(node, SetVar):
        return node.name
    if isinstance(node, Empty):
        return "empty"
    if isinstance(node, Univ):
        return "univ"
    if isinstance(node, (Union_, Inter)):
        op = "union" if isinstance(node, Union_) else "inter"
        return f"({op} {' '.join(_emit_set(a) for a in node.args)})"
    if isinstance(node, Compl):
        return f"(compl {_emit_set(node.arg)})"
    raise InputError(f"not a set expression: {node!r}")


def _emit_term(node) -> str:
    if isinstance(node, IntLit):
        return str(node.value)
    if isinstance(node, IntVar):
        return node.name
    if isinstance(node, Maxc):
        return "maxc"
    if isinstance(node, Plus):
        return f"(+ {' '.join(_emit_term(a) for a in node.args)})"
    if isinstance(node, Scale):
        return f"(* {node.k} {_emit_term(node.term)})"
    if isinstance(node, Card):
        return f"(card {_emit_set(node.set)})"
    raise InputError(f"not an integer term: {node!r}")


def _emit(node) -> str:
    if isinstance(node, (And, Or)):
        op = "and" if isinstance(node, And) else "or"
        return "(" + " ".join([op] + [_emit(a) for a in node.args]) + ")"
    if isinstance(node, Not):
        return f"(not {_emit(node.arg)})"
    if isinstance(node, SetEq):
        return f"(= {_emit_set(node.left)} {_emit_set(node.right)})"
    if isinstance(node, Subset):
        return f"(subset {_emit_set(node.left)} {_emit_set(node.right)})"
    if isinstance(node, IntEq):
        left = _emit_term(node.left)
        if isinstance(node.left, IntVar) and isinstance(node.right, IntVar):
            left = f"(+ {left})"  # two bare symbols would read back as sets
        return f"(= {left} {_emit_term(node.right)})"
    if isinstance(node, IntLe):
        return f"(<= {_emit_term(node.left)} {_emit_term(node.right)})"
    if isinstance(node, Dvd):
        return f"(dvd {node.k} {_emit_term(node.term)})"
    raise InputError(f"not a formula: {node!r}")


def formula_to_text(f: QfbapaFormula) -> str:
    """S-expression text that parses back to an equal formula."""
    lines = [] if f.body == TRUE and f.image_atoms else [_emit(f.body)]
    lines += [f"({a.kind} {a.S} {a.f} {a.P} {a.n})" for a in f.image_atoms]
    return "\n".join(lines) + "\n"
