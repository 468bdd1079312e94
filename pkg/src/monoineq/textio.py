"""Readers and writers for the text formats and the JSON result.

Formats, all line based except .bapa, all with ``#`` comments:

* ``.mlc``  ``vars x y`` then ``lin 2*x + y <= 5 + z`` and ``mono x <= y^2`` lines
* ``.lset`` ``dim``, optional ``vars``, one ``base``, ``step`` lines, ``mono``
  lines and an optional ``alpha_bound N [complete]``
* ``.nand`` ``inputs a b``, ``gate g a b`` (g = NAND(a, b)), ``output g``
* ``.bapa`` s-expressions, see ``qfbapa``

Every parser raises ``SourceError`` (and nothing else) on bad input.
"""

from __future__ import annotations

import json
import re
from typing import Optional, Sequence

from .errors import InputError, SourceError
from .model import (
    EQ,
    GE,
    LE,
    ConstraintSystem,
    LinearAtom,
    LinearSet,
    MonomialAtom,
    NatVec,
    SolveStats,
    Status,
    Verdict,
    Witness,
)
from .qfbapa import QfbapaFormula, formula_from_text, formula_to_text
from .reductions import Circuit, SolvedInstance

NAME = r"[A-Za-z_][A-Za-z0-9_.]*"
NAME_RE = re.compile(NAME + r"\Z")
MONO_RE = re.compile(rf"\s*({NAME})\s*(<=|>=|=)\s*({NAME})\s*\^\s*([+-]?[0-9]+)\s*\Z")
TERM_RE = re.compile(rf"\s*([+-])?\s*(?:([+-]?[0-9]+)\s*(\*)?\s*)?({NAME})?")
REL_RE = re.compile(r"<=|>=|=")


def _lines(text: str):
    """(line number, column of the body, keyword, rest) for every non-blank line."""
    if not isinstance(text, str):
        raise SourceError(1, 1, "input must be text")
    for no, raw in enumerate(text.split("\n"), start=1):
        body = raw.split("#", 1)[0].rstrip()
        stripped = body.lstrip()
        if not stripped:
            continue
        col = len(body) - len(stripped) + 1
        parts = stripped.split(None, 1)
        yield no, col, parts[0], parts[1] if len(parts) > 1 else ""


def _names(no: int, col: int, rest: str) -> list[str]:
    names = rest.split()
    if not names:
        raise SourceError(no, col, "expected at least one name")
    for n in names:
        if not NAME_RE.match(n):
            raise SourceError(no, col, f"bad name {n!r}")
    if len(set(names)) != len(names):
        raise SourceError(no, col, "duplicate name")
    return names


def _int(no: int, col: int, tok: str) -> int:
    if not re.fullmatch(r"[+-]?[0-9]+", tok):
        raise SourceError(no, col, f"expected an integer, got {tok!r}")
    return int(tok)


def _mono(no: int, col: int, rest: str, index: dict[str, int]) -> MonomialAtom:
    m = MONO_RE.match(rest)
    if m is None:
        raise SourceError(no, col, "expected `<var> (<=|>=) <var>^<nat>`")
    lhs, rel, rhs, exp = m.groups()
    if rel == EQ:
        raise SourceError(no, col, "monomial atoms use <= or >=")
    n = int(exp)
    if n < 0:
        raise SourceError(no, col, "negative exponent")
    for v in (lhs, rhs):
        if v not in index:
            raise SourceError(no, col, f"unknown variable {v}")
    return MonomialAtom(index[lhs], rel, index[rhs], n)


def _side(no: int, col: int, text: str, index: dict[str, int]) -> tuple[dict[int, int], int]:
    coef: dict[int, int] = {}
    const = 0
    pos = 0
    first = True
    text = text.rstrip()
    if not text.strip():
        raise SourceError(no, col, "empty side of a linear atom")
    while pos < len(text):
        m = TERM_RE.match(text, pos)
        sign, num, star, var = m.groups()
        if m.end() == pos or (not first and sign is None) or (num is None and var is None) \
                or (star and var is None) or (num and var and not star):
            raise SourceError(no, col + pos, "malformed term")
        value = int(num) if num is not None else 1
        if sign == "-":
            value = -value
        if var is None:
            const += value
        else:
            if var not in index:
                raise SourceError(no, col + pos, f"unknown variable {var}")
            coef[index[var]] = coef.get(index[var], 0) + value
        first = False
        pos = m.end()
    return coef, const


def parse_mlc(text: str) -> ConstraintSystem:
    names: Optional[list[str]] = None
    index: dict[str, int] = {}
    linear: list[LinearAtom] = []
    mono: list[MonomialAtom] = []
    for no, col, key, rest in _lines(text):
        if key == "vars":
            if names is not None:
                raise SourceError(no, col, "vars declared twice")
            names = _names(no, col, rest)
            index = {n: i for i, n in enumerate(names)}
            continue
        if names is None:
            raise SourceError(no, col, "the first line must be `vars ...`")
        if key == "lin":
            rels = REL_RE.findall(rest)
            if len(rels) != 1:
                raise SourceError(no, col, "a linear atom needs exactly one of <=, =, >=")
            left, right = REL_RE.split(rest)
            lc, lk = _side(no, col + 4, left, index)
            rc, rk = _side(no, col + 4 + len(left) + len(rels[0]), right, index)
            co = dict(lc)
            for v, c in rc.items():
                co[v] = co.get(v, 0) - c
            linear.append(LinearAtom.of(co, rels[0], rk - lk))
        elif key == "mono":
            mono.append(_mono(no, col, rest, index))
        else:
            raise SourceError(no, col, f"unknown directive {key!r}")
    if names is None:
        raise SourceError(1, 1, "missing `vars` line")
    return ConstraintSystem(len(names), tuple(linear), tuple(mono), tuple(names))


def _lin_side(coefs: Sequence[tuple[int, int]], names: Sequence[str]) -> str:
    return " + ".join(f"{c}*{names[v]}" for v, c in coefs) if coefs else "0"


def emit_mlc(system: ConstraintSystem) -> str:
    names = system.names
    out = ["vars " + " ".join(names)]
    for a in system.linear:
        out.append(f"lin {_lin_side(a.coefficients, names)} {a.relation} {a.constant}")
    for a in system.monomial:
        out.append(f"mono {names[a.lhs_var]} {a.relation} {names[a.rhs_var]}^{a.exponent}")
    return "\n".join(out) + "\n"


def parse_lset(text: str) -> SolvedInstance:
    """Unpacks as ``(linear_set, atoms, alpha_bound)``; names and completeness ride along."""
    dim: Optional[int] = None
    names: Optional[list[str]] = None
    base: Optional[list[int]] = None
    steps: list[tuple[int, ...]] = []
    mono_lines: list[tuple[int, int, str]] = []
    hint: Optional[int] = None
    complete = False
    seen_bound = False
    for no, col, key, rest in _lines(text):
        if key == "dim":
            if dim is not None:
                raise SourceError(no, col, "dim declared twice")
            dim = _int(no, col, rest.strip())
            if dim < 1:
                raise SourceError(no, col, "dim must be positive")
            continue
        if dim is None:
            raise SourceError(no, col, "the first line must be `dim <n>`")
        if key == "vars":
            if names is not None:
                raise SourceError(no, col, "vars declared twice")
            names = _names(no, col, rest)
            if len(names) != dim:
                raise SourceError(no, col, f"{len(names)} names for dimension {dim}")
        elif key in ("base", "step"):
            vals = [_int(no, col, t) for t in rest.split()]
            if len(vals) != dim:
                raise SourceError(no, col, f"{key} has {len(vals)} coordinates, dim is {dim}")
            if any(v < 0 for v in vals):
                raise SourceError(no, col, "coordinates must be non-negative")
            if key == "base":
                if base is not None:
                    raise SourceError(no, col, "more than one base")
                base = vals
            else:
                steps.append(tuple(vals))
        elif key == "mono":
            mono_lines.append((no, col, rest))
        elif key == "alpha_bound":
            if seen_bound:
                raise SourceError(no, col, "alpha_bound given twice")
            toks = rest.split()
            if not 1 <= len(toks) <= 2 or (len(toks) == 2 and toks[1] != "complete"):
                raise SourceError(no, col, "expected `alpha_bound <nat> [complete]`")
            hint = _int(no, col, toks[0])
            if hint < 0:
                raise SourceError(no, col, "alpha_bound must be non-negative")
            complete = len(toks) == 2
            seen_bound = True
        else:
            raise SourceError(no, col, f"unknown directive {key!r}")
    if dim is None:
        raise SourceError(1, 1, "missing `dim` line")
    if base is None:
        raise SourceError(1, 1, "missing `base` line")
    var_names = names if names is not None else [f"x{i + 1}" for i in range(dim)]
    index = {n: i for i, n in enumerate(var_names)}
    atoms = tuple(_mono(no, col, rest, index) for no, col, rest in mono_lines)
    try:
        L = LinearSet(NatVec(base), tuple(NatVec(s) for s in steps))
    except InputError as exc:
        raise SourceError(1, 1, str(exc)) from None
    return SolvedInstance(L, atoms, tuple(var_names), hint, complete)


def emit_lset(inst: SolvedInstance) -> str:
    L = inst.linear_set
    names = inst.var_names
    out = [f"dim {L.dim}", "vars " + " ".join(names), "base " + " ".join(map(str, L.base))]
    out += ["step " + " ".join(map(str, s)) for s in L.steps]
    out += [f"mono {names[a.lhs_var]} {a.relation} {names[a.rhs_var]}^{a.exponent}" for a in inst.atoms]
    if inst.alpha_bound is not None:
        out.append(f"alpha_bound {inst.alpha_bound}" + (" complete" if inst.alpha_bound_complete else ""))
    return "\n".join(out) + "\n"


def parse_nand(text: str) -> Circuit:
    """Gates may appear in any order; they are sorted topologically (file order breaks ties)."""
    inputs: Optional[list[str]] = None
    gates: dict[str, tuple[str, str, int, int]] = {}
    order: list[str] = []
    output: Optional[tuple[str, int, int]] = None
    for no, col, key, rest in _lines(text):
        if key == "inputs":
            if inputs is not None:
                raise SourceError(no, col, "inputs declared twice")
            inputs = [n for n in _names(no, col, rest)]
        elif key == "gate":
            toks = rest.split()
            if len(toks) != 3 or not all(re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", t) for t in toks):
                raise SourceError(no, col, "expected `gate <out> <in1> <in2>`")
            out, a, b = toks
            if out in gates or (inputs and out in inputs):
                raise SourceError(no, col, f"wire {out} defined twice")
            gates[out] = (a, b, no, col)
            order.append(out)
        elif key == "output":
            toks = rest.split()
            if len(toks) != 1:
                raise SourceError(no, col, "expected `output <wire>`")
            if output is not None:
                raise SourceError(no, col, "more than one output")
            output = (toks[0], no, col)
        else:
            raise SourceError(no, col, f"unknown directive {key!r}")
    if inputs is None:
        raise SourceError(1, 1, "missing `inputs` line")
    for w in inputs:
        if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", w):
            raise SourceError(1, 1, f"bad wire name {w!r}")
    if output is None:
        raise SourceError(1, 1, "missing `output` line")
    defined = set(inputs)
    for out in order:
        a, b, no, col = gates[out]
        for w in (a, b):
            if w not in defined and w not in gates:
                raise SourceError(no, col, f"undefined wire {w}")
    # Kahn's algorithm, always taking the earliest ready gate in file order
    placed: list[tuple[str, str, str]] = []
    done = set(inputs)
    pending = list(order)
    while pending:
        for out in pending:
            a, b, _, _ = gates[out]
            if a in done and b in done:
                placed.append((out, a, b))
                done.add(out)
                pending.remove(out)
                break
        else:
            _, _, no, col = gates[pending[0]]
            raise SourceError(no, col, f"cycle through gate {pending[0]}")
    name, no, col = output
    if name not in done:
        raise SourceError(no, col, f"undefined output wire {name}")
    try:
        return Circuit(tuple(inputs), tuple(placed), name)
    except InputError as exc:
        raise SourceError(no, col, str(exc)) from None


def emit_nand(c: Circuit) -> str:
    out = ["inputs " + " ".join(c.input_names)]
    out += [f"gate {g} {a} {b}" for g, a, b in c.gates]
    out.append(f"output {c.output}")
    return "\n".join(out) + "\n"


def parse_bapa(text: str) -> QfbapaFormula:
    if not isinstance(text, str):
        raise SourceError(1, 1, "input must be text")
    try:
        return formula_from_text(text)
    except SourceError:
        raise
    except (InputError, RecursionError) as exc:
        raise SourceError(1, 1, str(exc) or "input too deeply nested") from None


def emit_bapa(f: QfbapaFormula) -> str:
    return formula_to_text(f)


def _stats_json(s: SolveStats) -> dict:
    return {"m": s.m, "K": s.K, "components": s.components, "caratheodory_bound": s.caratheodory_bound}


def result_dict(verdict: Verdict, stats: Optional[SolveStats] = None) -> dict:
    out: dict = {"status": verdict.status.value,
                 "stats": _stats_json(stats if stats is not None else verdict.stats)}
    w = verdict.witness
    if w is not None:
        wd: dict = {"x": [str(v) for v in w.x_values]}
        if w.alpha_values is not None:
            wd["alpha"] = [str(v) for v in w.alpha_values]
        if w.component_index is not None:
            wd["component"] = w.component_index
        if w.permutation is not None:
            wd["permutation"] = list(w.permutation)
        out["witness"] = wd
    if verdict.certificate_note is not None:
        out["certificate_note"] = verdict.certificate_note
    return out


def emit_result(verdict: Verdict, stats: Optional[SolveStats] = None) -> str:
    """Canonical JSON: sorted keys, big integers as decimal strings, trailing newline."""
    return json.dumps(result_dict(verdict, stats), sort_keys=True, ensure_ascii=False,
                      separators=(",", ":")) + "\n"


def parse_result(text: str) -> Verdict:
    try:
        d = json.loads(text)
        status = Status(d["status"])
        s = d["stats"]
        stats = SolveStats(int(s["m"]), int(s["K"]), int(s["components"]), int(s["caratheodory_bound"]))
        w = None
        if "witness" in d:
            wd = d["witness"]
            alpha = tuple(int(v) for v in wd["alpha"]) if "alpha" in wd else None
            perm = tuple(int(v) for v in wd["permutation"]) if "permutation" in wd else None
            w = Witness(NatVec(int(v) for v in wd["x"]), alpha, wd.get("component"), perm)
        return Verdict(status, w, d.get("certificate_note"), stats)
    except (ValueError, KeyError, TypeError, AttributeError) as exc:
        raise SourceError(1, 1, f"malformed result: {exc}") from None
