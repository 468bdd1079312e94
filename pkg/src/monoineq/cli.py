"""Command-line driver.

Exit codes: 0 sat, 1 unsat, 2 unknown or bound-incomplete, 3 input error,
4 resource exhausted.
"""

from __future__ import annotations

import argparse
import contextlib
import json
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

from . import __version__
from .errors import BoundIncomplete, InputError, InternalConsistencyError, ResourceExhausted
from .model import Direction, SolveStats, Status, Verdict, Witness
from .normal_form import candidate_orders, first_row_zero, normalize
from .oracle import OracleBound, oracle_alpha_search, oracle_x_search
from .qfbapa import decide_qfbapa
from .reductions import cqc_brute, nand_to_less, nand_to_more, parse_values, subsetsum_to_cqc
from .semilinear import decompose
from .solver import SolverConfig, decide_solved, solve
from .textio import emit_lset, emit_result, parse_bapa, parse_lset, parse_mlc, parse_nand, result_dict

EXIT_SAT, EXIT_UNSAT, EXIT_UNKNOWN, EXIT_INPUT, EXIT_RESOURCE = 0, 1, 2, 3, 4


@dataclass(frozen=True)
class CliConfig:
    command: str
    input: Optional[str]
    format: Optional[str]
    direction: Optional[str]
    alpha_cap: Optional[int]
    witness_bit_cap: int
    oracle_bound: int
    json: bool
    output: Optional[str]

    def solver_config(self) -> SolverConfig:
        return SolverConfig(self.witness_bit_cap, self.alpha_cap, self.oracle_bound)


def _nat(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {text!r}") from None
    if v < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {text!r}")
    return v


def _pos(text: str) -> int:
    v = _nat(text)
    if v == 0:
        raise argparse.ArgumentTypeError("expected a positive integer")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="monoineq", description="Decide linear constraints with monomial inequalities.")
    p.add_argument("--version", action="version", version=f"monoineq {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="print the JSON result")
    common.add_argument("-o", "--output", help="write the main output to this file")
    sub = p.add_subparsers(dest="command", required=True)

    def with_input(name: str, help_: str) -> argparse.ArgumentParser:
        sp = sub.add_parser(name, parents=[common], help=help_)
        sp.add_argument("input", help="input file, or - for standard input")
        sp.add_argument("--format", choices=("mlc", "lset", "nand", "bapa"), help="override the file extension")
        return sp

    s = with_input("solve", "decide a .mlc system or a .lset solved instance")
    s.add_argument("--direction", choices=("le", "ge"), help="expected atom direction (checked)")
    s.add_argument("--alpha-cap", type=_nat, help="override the theoretical coefficient bound")
    s.add_argument("--witness-bit-cap", type=_pos, default=4096)
    s.add_argument("--oracle-bound", type=_nat, default=8, help="search bound for .lset instances without a hint")

    o = with_input("oracle", "brute-force search in a box (never reports unsat)")
    o.add_argument("--bound", type=_nat, default=8)

    with_input("hilbert", "print the semilinear decomposition of the linear atoms")

    n = with_input("normalize", "print the ordered normal-form components")
    n.add_argument("--order", help="comma-separated variable names, smallest first (default: every feasible order)")

    r = sub.add_parser("reduce", help="hardness reductions")
    rsub = r.add_subparsers(dest="reduction", required=True)
    ck = rsub.add_parser("ckt", parents=[common], help="NAND circuit to a solved instance")
    ck.add_argument("input")
    ck.add_argument("--direction", choices=("ge", "le"), default="ge")
    ss = rsub.add_parser("subsetsum", parents=[common], help="subset sum to one quadratic inequality")
    ss.add_argument("values", help='comma-separated integers, e.g. "3,5,-8"')
    ss.add_argument("--nonempty", action="store_true", help="require a nonempty subset")

    q = with_input("qfbapa", "decide a set-cardinality formula with image atoms")
    q.add_argument("--strict-images", action="store_true", help="add the nonemptiness refinement for images")
    q.add_argument("--witness-bit-cap", type=_pos, default=4096)
    return p


def _config(ns: argparse.Namespace) -> CliConfig:
    return CliConfig(ns.command, getattr(ns, "input", None), getattr(ns, "format", None),
                     getattr(ns, "direction", None), getattr(ns, "alpha_cap", None),
                     getattr(ns, "witness_bit_cap", 4096), getattr(ns, "oracle_bound", 8),
                     ns.json, ns.output)


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        return Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise InputError(f"cannot read {path}: {exc}") from None


def _format(cfg: CliConfig, allowed: Sequence[str]) -> str:
    fmt = cfg.format or (Path(cfg.input).suffix.lstrip(".") if cfg.input != "-" else None)
    if fmt not in allowed:
        raise InputError(f"cannot tell the input format; use --format with one of {', '.join(allowed)}")
    return fmt


def _verdict_text(v: Verdict) -> str:
    lines = [v.status.value]
    w = v.witness
    if w is not None:
        names = w.names or tuple(f"x{i + 1}" for i in range(len(w.x_values)))
        lines += [f"{n} = {x}" for n, x in zip(names, w.x_values)]
        if w.alpha_values is not None:
            lines.append("alpha = " + " ".join(map(str, w.alpha_values)))
    if v.certificate_note:
        lines.append(v.certificate_note)
    s = v.stats
    lines.append(f"m = {s.m}, K = {s.K}, components = {s.components}, caratheodory_bound = {s.caratheodory_bound}")
    return "\n".join(lines) + "\n"


def _emit_verdict(v: Verdict, cfg: CliConfig, out) -> int:
    out.write(emit_result(v) if cfg.json else _verdict_text(v))
    return EXIT_SAT if v.status == Status.SAT else EXIT_UNSAT


def _cmd_solve(cfg: CliConfig, out) -> int:
    fmt = _format(cfg, ("mlc", "lset"))
    text = _read(cfg.input)
    want = {"le": Direction.PURE_LE, "ge": Direction.PURE_GE, None: None}[cfg.direction]
    if fmt == "mlc":
        system = parse_mlc(text)
        if want is not None and system.direction not in (want, Direction.LINEAR_ONLY):
            raise InputError(f"--direction {cfg.direction} does not match the atoms ({system.direction.value})")
        return _emit_verdict(solve(system, config=cfg.solver_config()), cfg, out)
    inst = parse_lset(text)
    v = decide_solved(inst.linear_set, inst.atoms, want, cfg.solver_config(),
                      inst.alpha_bound, inst.alpha_bound_complete)
    if v.witness is not None:
        v = Verdict(v.status, _named(v.witness, inst.var_names), v.certificate_note, v.stats)
    return _emit_verdict(v, cfg, out)


def _named(w, names) -> Witness:
    return Witness(w.x_values, w.alpha_values, w.component_index, w.permutation, names=tuple(names))


def _cmd_oracle(cfg: CliConfig, bound: int, out) -> int:
    fmt = _format(cfg, ("mlc", "lset"))
    text = _read(cfg.input)
    if fmt == "mlc":
        w = oracle_x_search(parse_mlc(text), OracleBound(x_bound=bound))
    else:
        inst = parse_lset(text)
        w = oracle_alpha_search(inst.linear_set, inst.atoms, OracleBound(alpha_bound=bound))
        if w is not None:
            w = _named(w, inst.var_names)
    if w is None:
        if cfg.json:
            out.write(json.dumps({"bound": bound, "status": "unknown"}, sort_keys=True,
                                 separators=(",", ":")) + "\n")
        else:
            out.write(f"no solution with every value <= {bound} (this does not show unsat)\n")
        return EXIT_UNKNOWN
    return _emit_verdict(Verdict(Status.SAT, w, None, SolveStats()), cfg, out)


def _set_json(S) -> dict:
    return {"dim": S.dim, "components": [
        {"base": [str(v) for v in L.base], "steps": [[str(v) for v in s] for s in L.steps]}
        for L in S.components]}


def _cmd_hilbert(cfg: CliConfig, out) -> int:
    system = parse_mlc(_read(cfg.input))
    S = decompose(system.linear, system.num_vars)
    if cfg.json:
        out.write(json.dumps(_set_json(S), sort_keys=True, separators=(",", ":")) + "\n")
    else:
        out.write("vars " + " ".join(system.names) + "\n")
        for i, L in enumerate(S.components):
            out.write(f"component {i}\n  base " + " ".join(map(str, L.base)) + "\n")
            for s in L.steps:
                out.write("  step " + " ".join(map(str, s)) + "\n")
        if S.is_empty():
            out.write("empty\n")
    return EXIT_UNSAT if S.is_empty() else EXIT_SAT


def _cmd_normalize(cfg: CliConfig, order: Optional[str], out) -> int:
    system = parse_mlc(_read(cfg.input))
    names = system.names
    if order is not None:
        pos = {n: i for i, n in enumerate(names)}
        try:
            sigmas = [tuple(pos[t.strip()] for t in order.split(","))]
        except KeyError as exc:
            raise InputError(f"unknown variable {exc.args[0]} in --order") from None
    else:
        active = sorted({v for a in system.monomial for v in a.variables}) or list(range(system.num_vars))
        sigmas = list(candidate_orders(system, active))
    report = []
    for sigma in sigmas:
        for inst in normalize(system, sigma):
            report.append({
                "order": [names[v] for v in inst.permutation],
                "component": inst.component_index,
                "base": [str(v) for v in inst.component.base],
                "steps": [[str(v) for v in s] for s in inst.component.steps],
                "m": inst.m,
                "j_star": list(inst.profile.j_star),
                "i_star": list(inst.profile.i_star),
                "first_row_zero": first_row_zero(inst),
            })
    if cfg.json:
        out.write(json.dumps(report, sort_keys=True, separators=(",", ":")) + "\n")
    else:
        for r in report:
            out.write(f"order {' <= '.join(r['order'])} component {r['component']} m = {r['m']}\n")
            out.write("  base " + " ".join(r["base"]) + "\n")
            for s in r["steps"]:
                out.write("  step " + " ".join(s) + "\n")
            out.write(f"  j* {r['j_star']} i* {r['i_star']}\n")
        if not report:
            out.write("no components\n")
    return EXIT_SAT if report else EXIT_UNSAT


def _cmd_reduce(ns: argparse.Namespace, cfg: CliConfig, out) -> int:
    if ns.reduction == "ckt":
        circuit = parse_nand(_read(ns.input))
        inst = (nand_to_more if ns.direction == "ge" else nand_to_less)(circuit)
        out.write(emit_lset(inst))
        return EXIT_SAT
    values = parse_values(ns.values)
    cqc = subsetsum_to_cqc(values, ns.nonempty)
    v = cqc_brute(cqc)
    if cfg.json:
        d = result_dict(v)
        d["polynomial"] = cqc.polynomial()
        out.write(json.dumps(d, sort_keys=True, ensure_ascii=False, separators=(",", ":")) + "\n")
    else:
        out.write(cqc.polynomial() + "\n")
        out.write(_verdict_text(v))
    return EXIT_SAT if v.is_sat else EXIT_UNSAT


def run(argv: Optional[Sequence[str]] = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        with contextlib.redirect_stdout(stdout), contextlib.redirect_stderr(stderr):
            ns = parser.parse_args(argv)
    except SystemExit as exc:
        code = exc.code if isinstance(exc.code, int) else EXIT_INPUT
        return EXIT_SAT if code == 0 else EXIT_INPUT
    cfg = _config(ns)
    target = open(cfg.output, "w", encoding="utf-8") if cfg.output else stdout
    try:
        if ns.command == "solve":
            return _cmd_solve(cfg, target)
        if ns.command == "oracle":
            return _cmd_oracle(cfg, ns.bound, target)
        if ns.command == "hilbert":
            return _cmd_hilbert(cfg, target)
        if ns.command == "normalize":
            return _cmd_normalize(cfg, ns.order, target)
        if ns.command == "reduce":
            return _cmd_reduce(ns, cfg, target)
        if ns.command == "qfbapa":
            f = parse_bapa(_read(cfg.input))
            v = decide_qfbapa(f, config=cfg.solver_config(), strict_images=ns.strict_images)
            return _emit_verdict(v, cfg, target)
        raise InputError(f"unknown command {ns.command}")  # pragma: no cover
    except BoundIncomplete as exc:
        _unknown(cfg, target, str(exc))
        print(f"bound-incomplete: {exc}", file=stderr)
        return EXIT_UNKNOWN
    except InputError as exc:
        print(f"input error: {exc}", file=stderr)
        return EXIT_INPUT
    except ResourceExhausted as exc:
        print(f"resource exhausted: {exc}", file=stderr)
        return EXIT_RESOURCE
    except InternalConsistencyError as exc:
        print(f"internal error: {exc}", file=stderr)
        return EXIT_UNKNOWN
    finally:
        if target is not stdout:
            target.close()


def _unknown(cfg: CliConfig, out, reason: str) -> None:
    if cfg.json:
        out.write(json.dumps({"reason": reason, "status": "unknown"}, sort_keys=True,
                             separators=(",", ":")) + "\n")


def main() -> None:
    sys.exit(run())
