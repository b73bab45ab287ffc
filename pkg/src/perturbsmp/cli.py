"""Command-line front end.

Examples::

    perturbsmp validate model.json
    perturbsmp stationary model.json --format json
    perturbsmp reduce model.json --state 2 --trace --output reduced.json
    perturbsmp hitting model.json --state 1 --order 3,2
    perturbsmp pair model.json 1 2
    perturbsmp oracle-check model.json --grid 1/100,1/1000
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

from ._exact import as_fraction, fmt
from .errors import InvalidModel, InvariantViolation, ParseError, PerturbSMPError
from .laurent import LaurentExpansion, to_record
from .model import load_model, model_to_record, validate
from .oracle import compare
from .reduction import hitting_trace, pair_hitting, reduce_state, search_orders
from .stationary import stationary_distribution

FORMAT_VERSION = 1

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _grid(text: str):
    try:
        return [as_fraction(x) for x in text.split(",") if x.strip()]
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"expected comma-separated rationals, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="perturbsmp",
        description="Asymptotic expansions for perturbed semi-Markov processes.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("model", type=Path, help="model file (JSON)")
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--output", "-o", type=Path, help="write the report here")
    mode = common.add_mutually_exclusive_group()
    mode.add_argument("--bounded", dest="bounded", action="store_true", default=None,
                      help="treat the model as bounded-mode")
    mode.add_argument("--plain", dest="bounded", action="store_false",
                      help="ignore remainder bounds")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("validate", parents=[common], help="check structural conditions")

    p = sub.add_parser("reduce", parents=[common], help="eliminate one or more states")
    p.add_argument("--state", type=_int_list, required=True,
                   help="state(s) to eliminate, in order, e.g. 2 or 3,2")
    p.add_argument("--trace", action="store_true",
                   help="write every intermediate model (JSON list)")

    p = sub.add_parser("hitting", parents=[common], help="mean return time expansions")
    p.add_argument("--state", type=int, help="target state (default: all)")
    p.add_argument("--order", type=_int_list, help="elimination order")
    p.add_argument("--trace", action="store_true", help="include intermediate models")
    p.add_argument("--search-orders", action="store_true",
                   help="try all orders and keep the tightest bound")

    p = sub.add_parser("stationary", parents=[common], help="stationary distribution")
    p.add_argument("--force", action="store_true",
                   help="emit expansions even if structural checks fail")

    p = sub.add_parser("pair", parents=[common], help="hitting times between two states")
    p.add_argument("i", type=int)
    p.add_argument("j", type=int)

    p = sub.add_parser("oracle-check", parents=[common],
                       help="compare expansions with exact solves at fixed eps")
    p.add_argument("--grid", type=_grid, help="comma-separated eps values")
    p.add_argument("--pairs", action="store_true", help="also check E_ij for i != j")
    return parser


def _strip_bounds(model):
    strip = lambda d: {k: replace(a, bound=None) for k, a in d.items()}
    return replace(model, p=strip(model.p), e=strip(model.e), bounded=False)


def _expansion_text(name: str, a: LaurentExpansion) -> str:
    return f"{name} = {a}    (h={a.h}, k={a.k})"


def _emit(args, record: dict, text: str):
    record = {"format_version": FORMAT_VERSION, **record}
    out = json.dumps(record, indent=2) + "\n" if args.format == "json" else text.rstrip() + "\n"
    if args.output:
        args.output.write_text(out)
    else:
        sys.stdout.write(out)


def cmd_validate(args, model) -> int:
    report = validate(model)
    lines = [f"model: {model.n_states} states, eps0={model.eps0}, "
             f"mode={'bounded' if model.bounded else 'plain'}"]
    if report.ok:
        lines.append("valid: all conditions hold")
    for v in report.violations:
        lines.append(f"[{v.condition}] {v.location}: {v.message}")
    _emit(args, report.to_record(), "\n".join(lines))
    return EXIT_OK if report.ok else EXIT_FAIL


def cmd_reduce(args, model) -> int:
    _check_valid(model)
    models = [model]
    for r in args.state:
        models.append(reduce_state(models[-1], r))
    final = models[-1]
    if args.trace:
        record = {"steps": [model_to_record(m) for m in models[1:]]}
    else:
        record = model_to_record(final)
    lines = [f"eliminated {list(final.eliminated)}; remaining states {list(final.states)}"]
    for (i, j), a in final.p.items():
        lines.append(_expansion_text(f"p[{i},{j}]", a))
    for (i, j), a in final.e.items():
        lines.append(_expansion_text(f"e[{i},{j}]", a))
    if args.format == "json":
        # model files carry their own version field
        out = json.dumps(record, indent=2) + "\n"
        if args.output:
            args.output.write_text(out)
        else:
            sys.stdout.write(out)
    else:
        _emit(args, record, "\n".join(lines))
    return EXIT_OK


def cmd_hitting(args, model) -> int:
    _check_valid(model)
    targets = [args.state] if args.state is not None else list(model.states)
    results, lines = [], []
    for i in targets:
        if args.search_orders:
            tr = search_orders(model, i)
        else:
            tr = hitting_trace(model, i, args.order, trace=args.trace)
        rec = {"state": i, "order": list(tr.order), "E": to_record(tr.result)}
        if args.trace:
            rec["steps"] = [model_to_record(m) for m in tr.models[1:]]
        results.append(rec)
        lines.append(_expansion_text(f"E[{i},{i}]", tr.result) + f"  order={list(tr.order)}")
    _emit(args, {"hitting": results}, "\n".join(lines))
    return EXIT_OK


def cmd_stationary(args, model) -> int:
    _check_valid(model)
    try:
        report = stationary_distribution(model, force=args.force, check=False)
    except InvariantViolation as exc:
        report = exc.report
        code = EXIT_FAIL
    else:
        code = EXIT_OK if report.ok else EXIT_FAIL
    lines = []
    for ent in report.entries:
        lines.append(_expansion_text(f"pi[{model.label(ent.state)}]", ent.pi)
                     + f"  limit={ent.limit}")
        lines.append("  " + _expansion_text("E", ent.E))
    lines.append(f"X0 = {report.X0}")
    lines.append("coefficient sum residuals: "
                 + ", ".join(f"{l}:{v}" for l, v in report.residuals.items()))
    if report.delta_min is not None:
        lines.append(f"min input delta = {report.delta_min}")
    for v in report.violations:
        lines.append(f"VIOLATION: {v}")
    record = report.to_record()
    record.pop("format_version")
    _emit(args, record, "\n".join(lines))
    return code


def cmd_pair(args, model) -> int:
    _check_valid(model)
    res = pair_hitting(model, args.i, args.j, check=False)
    items = {"E_ij": res.E_ij, "E_ji": res.E_ji, "E_ii": res.E_ii, "E_jj": res.E_jj}
    record = {"i": args.i, "j": args.j, **{k: to_record(v) for k, v in items.items()}}
    text = "\n".join(_expansion_text(k, v) for k, v in items.items())
    _emit(args, record, text)
    return EXIT_OK


def cmd_oracle(args, model) -> int:
    _check_valid(model)
    pairs = []
    if args.pairs:
        states = list(model.states)
        for a in states:
            for b in states:
                if a < b:
                    res = pair_hitting(model, a, b, check=False)
                    pairs += [(a, b, res.E_ij), (b, a, res.E_ji)]
    rep = compare(model, args.grid, pairs=pairs)
    lines = [f"grid: {[fmt(e) for e in rep.grid]}"]
    for c in rep.checks:
        sl = "n/a" if c.slope is None else f"{c.slope:.3f}"
        status = "PASS" if c.passed else "FAIL"
        worst = max((float(abs(p.error)) for p in c.points), default=0.0)
        lines.append(f"{status} {c.name}: k={c.expansion.k} slope={sl} "
                     f"(need >= {float(c.required_slope):.3g}) max|err|={worst:.3e}")
    lines += [f"warning: {w}" for w in rep.warnings]
    lines.append("overall: " + ("PASS" if rep.passed else "FAIL"))
    record = rep.to_record()
    record.pop("format_version")
    _emit(args, record, "\n".join(lines))
    return EXIT_OK if rep.passed else EXIT_FAIL


def _check_valid(model):
    report = validate(model)
    if not report.ok:
        raise InvalidModel(report)


COMMANDS = {
    "validate": cmd_validate,
    "reduce": cmd_reduce,
    "hitting": cmd_hitting,
    "stationary": cmd_stationary,
    "pair": cmd_pair,
    "oracle-check": cmd_oracle,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        model = load_model(args.model)
        if args.bounded is False:
            model = _strip_bounds(model)
        elif args.bounded:
            model = replace(model, bounded=True)
        return COMMANDS[args.command](args, model)
    except (OSError, ParseError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InvalidModel as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except PerturbSMPError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
