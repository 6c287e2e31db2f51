"""Command-line driver: ``lepage info|regularize|legendre|equations|verify|example``.

Exit codes: 0 success, 1 checks failed, 2 usage or input error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction
from typing import Sequence

from . import expr as E
from . import linalg
from .chart import Chart, JetPoint
from .errors import DimensionTooSmall, LepageError, NotRegular, SearchFailed, SizeLimitExceeded
from .gtensor import canonical_from_quadratic, closedness_check, random_constant
from .hamilton import p2_system
from .io import gtensor_document, load_problem_file, load_section
from .lagrangian import euler_lagrange_exprs, standard_regularity_report
from .legendre import is_regular_at, legendre_map, regularity_matrix, regularize_affine
from .presets import NAMES, load_preset, run_preset_checks
from .verify import GridSection, equivalence_suite, grid_residual

EXIT_OK, EXIT_FAILED, EXIT_INPUT = 0, 1, 2


class _Fail(Exception):
    """Raised by a command to report a failed check with exit code 1."""


def default_seed() -> int:
    raw = os.environ.get("LEPAGE_SEED")
    if raw is None:
        return 42
    try:
        return int(raw)
    except ValueError:
        raise argparse.ArgumentTypeError(f"LEPAGE_SEED must be an integer, got {raw!r}") from None


# -- formatting -------------------------------------------------------------------


def _legend(ch: Chart) -> str:
    return "index order (s,i): " + " ".join(f"({s},{i})" for s, i in ch.pairs)


def _matrix_text(M) -> list[str]:
    cells = [[E.to_text(x) for x in row] for row in M]
    w = max(len(c) for row in cells for c in row)
    return ["[ " + "  ".join(c.rjust(w) for c in row) + " ]" for row in cells]


def _matrix_json(M) -> list[list[str]]:
    return [[E.to_text(x) for x in row] for row in M]


def _complex_text(z: complex) -> str:
    z = complex(z)
    if abs(z.imag) < 1e-12:
        return f"{z.real:.12g}"
    return f"{z.real:.12g}{z.imag:+.12g}i"


def _half_point(ch: Chart) -> JetPoint:
    h = complex(Fraction(1, 2))
    return JetPoint(ch, (h,) * ch.n, (h,) * ch.m, (h,) * ch.size)


def _classify(sys) -> str:
    q = sys.quadratic
    if q is None:
        return "general"
    return "affine" if q.is_affine else "quadratic"


# -- commands ---------------------------------------------------------------------


def cmd_info(args) -> tuple[dict, list[str]]:
    prob = load_problem_file(args.problem)
    s = prob.system
    ch = s.chart
    rep = standard_regularity_report(s.lagrangian, _half_point(ch))
    data = {
        "n": ch.n,
        "m": ch.m,
        "parameters": list(s.params),
        "class": _classify(s),
        "lagrangian": E.to_text(s.lagrangian.expr),
        "g_mode": prob.g_mode,
        "standard_regularity": {
            "point": "all coordinates 1/2",
            "rank": rep.rank,
            "size": ch.size,
            "det": _complex_text(rep.det),
            "regular": rep.regular,
        },
    }
    lines = [
        f"dimensions: n={ch.n} m={ch.m}",
        f"parameters: {', '.join(s.params) or '(none)'}",
        f"class: {data['class']}",
        f"L = {data['lagrangian']}",
        f"standard Hessian at all coordinates 1/2: rank {rep.rank}/{ch.size}, "
        f"det {data['standard_regularity']['det']}, {'regular' if rep.regular else 'degenerate'}",
    ]
    return data, lines


def cmd_regularize(args) -> tuple[dict, list[str]]:
    prob = load_problem_file(args.problem)
    s = prob.system
    strategy = args.strategy
    if strategy == "canonical":
        g = canonical_from_quadratic(s.lagrangian)
    elif strategy == "random":
        q = s.quadratic
        if q is not None and q.is_affine:
            g = regularize_affine(s.lagrangian, seed=args.seed)
        else:
            g = random_constant(s.chart, args.seed)
    else:
        g = s.g
    s = s.with_g(g)
    K = regularity_matrix(s)
    try:
        det = linalg.symbolic_det(K)
    except SizeLimitExceeded:
        det = None
    regular = is_regular_at(s, _half_point(s.chart))
    clos = closedness_check(g)
    data = {
        "strategy": strategy,
        "g": gtensor_document(g),
        "det": E.to_text(det) if det is not None else None,
        "regular": regular,
        "closed": clos.closed,
        "violations": [{"condition": v.condition, "indices": list(v.indices), "residual": E.to_text(v.residual)}
                       for v in clos.violations],
    }
    lines = [f"strategy: {strategy}", "g components (sigma, nu, i, j): value"]
    lines += [f"  ({c['sigma']},{c['nu']},{c['i']},{c['j']}): {c['expr']}" for c in data["g"]["components"]]
    if not data["g"]["components"]:
        lines.append("  (all zero)")
    lines += [f"det K = {data['det']}", f"regular: {regular}", f"closed: {clos.closed}"]
    lines += [f"  {v['condition']} {tuple(v['indices'])}: {v['residual']}" for v in data["violations"]]
    if not regular:
        raise _Fail(data, lines)
    return data, lines


def cmd_legendre(args) -> tuple[dict, list[str]]:
    s = load_problem_file(args.problem).system
    ch = s.chart
    lm = legendre_map(s)
    mom = {ch.mom(si, i): E.to_text(p) for (si, i), p in zip(ch.pairs, lm.p)}
    data = {
        "index_order": [list(pr) for pr in ch.pairs],
        "K": _matrix_json(lm.K),
        "momenta": mom,
        "H_jet": E.to_text(lm.H_jet),
        "H_legendre": E.to_text(lm.H_leg) if lm.H_leg is not None else None,
    }
    lines = ["regularity matrix K", _legend(ch), *_matrix_text(lm.K), "momenta"]
    lines += [f"  {k} = {v}" for k, v in mom.items()]
    lines.append(f"H (jet coordinates) = {data['H_jet']}")
    lines.append(f"H (Legendre coordinates) = {data['H_legendre'] or '(no closed form)'}")
    return data, lines


def cmd_equations(args) -> tuple[dict, list[str]]:
    s = load_problem_file(args.problem).system
    el = [E.to_text(e) for e in euler_lagrange_exprs(s.lagrangian)]
    p2 = p2_system(s)
    data = {
        "euler_lagrange": el,
        "reduced": p2.reduced,
        "p2_first": [E.to_text(t) for t in p2.first],
        "p2_second": [E.to_text(t) for t in p2.second],
    }
    lines = ["Euler-Lagrange expressions"]
    lines += [f"  E{k} = {t}" for k, t in enumerate(el, start=1)]
    lines.append(f"p2 residual templates ({'reduced' if p2.reduced else 'full'} form)")
    lines += [f"  R{k} = {t}" for k, t in enumerate(data["p2_first"], start=1)]
    lines += [f"  R{si}_{i} = {t}" for (si, i), t in zip(s.chart.pairs, data["p2_second"])]
    return data, lines


def cmd_verify(args) -> tuple[dict, list[str]]:
    s = load_problem_file(args.problem).system
    sec = load_section(args.section, s.chart, s.params)
    overrides = {k: complex(v) for k, v in sec.bindings.items()}
    try:
        rep = equivalence_suite(s, [sec.fields], overrides, seed=args.seed)
    except NotRegular as exc:
        raise _Fail({"error": str(exc)}, [f"not regular: {exc}"]) from None
    sol = rep.solutions[0]
    data = {
        "fields": list(sol.fields),
        "el_residual": sol.el_residual,
        "p2_residual": sol.p2_residual,
        "identities": rep.identities,
        "closed": rep.closed,
        "same_euler_lagrange": rep.same_euler_lagrange,
        "passed": rep.passed,
    }
    lines = [
        f"section: ({', '.join(sol.fields)})",
        f"Euler-Lagrange residual (sup over probes): {sol.el_residual:.3e}",
        f"p2 residual (sup over probes): {sol.p2_residual:.3e}",
        f"closed: {rep.closed}",
    ]
    lines += [f"  {k}: {v}" for k, v in rep.identities.items()]
    if args.grid is not None:
        p2 = p2_system(s)
        gs = GridSection.from_fields(s.chart, sec.fields, args.grid, s.bindings(overrides))
        gr = grid_residual(p2, gs, overrides)
        data["grid"] = {"N": args.grid, "sup_norm": gr.sup_norm, "sup_norm_refined": gr.sup_norm_refined,
                        "order_estimate": None if gr.order_estimate != gr.order_estimate else gr.order_estimate}
        order = "undefined" if data["grid"]["order_estimate"] is None else f"{gr.order_estimate:.3f}"
        lines.append(f"grid N={args.grid}: sup {gr.sup_norm:.3e}, refined {gr.sup_norm_refined:.3e}, order {order}")
    lines.append("PASS" if rep.passed else "FAIL")
    if not rep.passed:
        raise _Fail(data, lines)
    return data, lines


def cmd_example(args) -> tuple[dict, list[str]]:
    pre = load_preset(args.name)
    s = pre.system
    ch = s.chart
    rep = run_preset_checks(pre)
    lm = legendre_map(s)
    data = rep.to_dict()
    data["K"] = _matrix_json(lm.K)
    data["momenta"] = {ch.mom(si, i): E.to_text(p) for (si, i), p in zip(ch.pairs, lm.p)}
    data["H_legendre"] = E.to_text(lm.H_leg) if lm.H_leg is not None else None
    lines = [f"preset {pre.name}", f"L = {E.to_text(s.lagrangian.expr)}", "regularity matrix K", _legend(ch)]
    lines += _matrix_text(lm.K)
    lines.append("momenta")
    lines += [f"  {k} = {v}" for k, v in data["momenta"].items()]
    lines.append(f"H (Legendre coordinates) = {data['H_legendre']}")
    lines.append("checks")
    for e in rep.entries:
        lines.append(f"  [{'pass' if e.passed else 'FAIL'}] {e.tag}" + (f" ({e.detail})" if e.detail else ""))
    lines += [f"note: {n}" for n in rep.notes]
    lines.append("PASS" if rep.passed else "FAIL")
    if not rep.passed:
        raise _Fail(data, lines)
    return data, lines


# -- entry point ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    def options(defaults: bool) -> argparse.ArgumentParser:
        # subcommands repeat the options with suppressed defaults so that a
        # value given before the subcommand is not overwritten
        p = argparse.ArgumentParser(add_help=False)
        p.add_argument("--format", choices=("text", "json"), default="text" if defaults else argparse.SUPPRESS)
        p.add_argument("--seed", type=int, default=None if defaults else argparse.SUPPRESS,
                       help="default 42, or LEPAGE_SEED")
        return p

    top, common = options(True), options(False)

    ap = argparse.ArgumentParser(prog="lepage", description="Lepagean regularization and Legendre transforms.",
                                 parents=[top])
    sub = ap.add_subparsers(dest="command", required=True)
    p = sub.add_parser("info", parents=[common], help="dimensions, class and standard regularity")
    p.add_argument("problem")
    p.set_defaults(func=cmd_info)
    p = sub.add_parser("regularize", parents=[common], help="choose g and report regularity and closedness")
    p.add_argument("problem")
    p.add_argument("--strategy", choices=("canonical", "random", "explicit"), default="random")
    p.set_defaults(func=cmd_regularize)
    p = sub.add_parser("legendre", parents=[common], help="momenta, K and Hamiltonians")
    p.add_argument("problem")
    p.set_defaults(func=cmd_legendre)
    p = sub.add_parser("equations", parents=[common], help="Euler-Lagrange and p2 residual templates")
    p.add_argument("problem")
    p.set_defaults(func=cmd_equations)
    p = sub.add_parser("verify", parents=[common], help="check a section against both equation systems")
    p.add_argument("problem")
    p.add_argument("--section", required=True)
    p.add_argument("--grid", type=int, default=None, metavar="N")
    p.set_defaults(func=cmd_verify)
    p = sub.add_parser("example", parents=[common], help="run the checks of a built-in preset")
    p.add_argument("name", choices=NAMES)
    p.set_defaults(func=cmd_example)
    return ap


def _emit(fmt: str, data, lines, stream) -> None:
    if fmt == "json":
        stream.write(json.dumps(data, indent=2, sort_keys=True, default=str) + "\n")
    else:
        stream.write("\n".join(lines) + "\n")


def _error(fmt: str, kind: str, exc: BaseException) -> None:
    payload = {"error": kind, "message": str(exc)}
    for attr in ("path", "position"):
        if hasattr(exc, attr):
            payload[attr] = getattr(exc, attr)
    if fmt == "json":
        sys.stderr.write(json.dumps(payload, sort_keys=True) + "\n")
    else:
        sys.stderr.write(f"error: {kind}: {exc}\n")


def main(argv: Sequence[str] | None = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
        if args.seed is None:
            args.seed = default_seed()
    except SystemExit as exc:
        return EXIT_INPUT if exc.code not in (0, None) else EXIT_OK
    except argparse.ArgumentTypeError as exc:
        _error("text", "UsageError", exc)
        return EXIT_INPUT
    fmt = args.format
    try:
        data, lines = args.func(args)
    except _Fail as exc:
        data, lines = exc.args
        _emit(fmt, data, lines, sys.stdout)
        return EXIT_FAILED
    except (DimensionTooSmall, SearchFailed, NotRegular) as exc:
        _error(fmt, type(exc).__name__, exc)
        return EXIT_FAILED
    except (LepageError, OSError, ValueError) as exc:
        kind = "IoError" if isinstance(exc, OSError) else type(exc).__name__
        _error(fmt, kind, exc)
        return EXIT_INPUT
    _emit(fmt, data, lines, sys.stdout)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
