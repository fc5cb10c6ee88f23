"""Command-line front end.

Exit codes: 0 trivializable / success, 1 not trivializable, 2 bad input,
3 undecided, 4 expansion cap (``ODEINV_MAX_DEGREE``) exceeded.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import expr
from .expr import ExpansionLimitError, ParseError
from .jets import OdeSystem, PointMap, ShapeError, SingularMapError, prolong, pullback

EXIT_OK = 0
EXIT_NOT_TRIVIALIZABLE = 1
EXIT_INPUT = 2
EXIT_UNDECIDED = 3
EXIT_LIMIT = 4


class InputError(Exception):
    pass


def exit_code(verdict) -> int:
    from .invariants import NOT_TRIVIALIZABLE, TRIVIALIZABLE

    if verdict.status == TRIVIALIZABLE:
        return EXIT_OK
    if verdict.status == NOT_TRIVIALIZABLE:
        return EXIT_NOT_TRIVIALIZABLE
    return EXIT_UNDECIDED


def _read_json(path: str) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from None


def _emit(data, fmt: str, text_fn=None) -> None:
    if fmt == "json" or text_fn is None:
        print(json.dumps(data, indent=2))
    else:
        print(text_fn(data))


# -- text renderers -------------------------------------------------------------


def _text_report(rep: dict) -> str:
    lines = [f"system: m={rep['system']['m']} order={rep['system']['order']}"]
    for i, rhs in enumerate(rep["system"]["rhs"], start=1):
        lines.append(f"  y{i}^({rep['system']['order']}) = {rhs}")
    for inv in rep["invariants"]:
        flag = "zero" if inv["is_zero"] else "NONZERO"
        tag = " (defined modulo lower invariants)" if inv.get("partial") else ""
        lines.append(f"{inv['name']} [{flag}]{tag}")
        if not inv["is_zero"]:
            for idx, val in inv["components"].items():
                if val != "0":
                    lines.append(f"  {inv['name']}{('[' + idx + ']') if idx else ''} = {val}")
    lines.append(_text_verdict(rep["verdict"]))
    return "\n".join(lines)


def _text_verdict(v: dict) -> str:
    lines = [f"verdict: {v['status']} ({v['equivalence_kind']} equivalence)"]
    for w in v["witnesses"]:
        lines.append(f"  witness {w['invariant']}{('[' + w['index'] + ']') if w['index'] else ''} = {w['value']}")
    if v["blocked_by"]:
        lines.append("  blocked by: " + ", ".join(v["blocked_by"]))
    return "\n".join(lines)


def _text_cohomology(rep: dict) -> str:
    lines = [f"g(k={rep['k']}, m={rep['m']}), dim {rep['dim_g']}"]
    lines.append(f"{'q':>2} {'degree':>6} {'dim':>4}  source")
    for row in rep["table"]:
        lines.append(f"{row['q']:>2} {row['degree']:>6} {row['dim']:>4}  {row['source']}")
    lines.append(f"ker Sop1: {rep['spencer_kernel']['1']}; ker Sop2 by degree: {rep['spencer_kernel']['2']}")
    return "\n".join(lines)


# -- subcommands -------------------------------------------------------------------


def cmd_invariants(args, conv) -> int:
    from .invariants import report

    sys_ = OdeSystem.from_json(_read_json(args.system))
    _emit(report(sys_, conv), args.format, _text_report)
    return EXIT_OK


def cmd_trivializable(args, conv) -> int:
    from .invariants import all_verdicts

    sys_ = OdeSystem.from_json(_read_json(args.system))
    verdicts = all_verdicts(sys_, conv)
    deciding = verdicts.get("point") or verdicts["contact"]
    data = deciding.to_json()
    if len(verdicts) > 1:
        data["other"] = {k: v.to_json() for k, v in verdicts.items() if v is not deciding}
    _emit(data, args.format, _text_verdict)
    return exit_code(deciding)


def cmd_transform(args, conv) -> int:
    pmap = PointMap.from_json(_read_json(args.map))
    sys_ = OdeSystem.from_json(_read_json(args.system))
    _emit(pullback(pmap, sys_).to_json(), args.format,
          lambda d: "\n".join(f"y{i}^({d['order']}) = {r}" for i, r in enumerate(d["rhs"], 1)))
    return EXIT_OK


def cmd_prolong(args, conv) -> int:
    pmap = PointMap.from_json(_read_json(args.map))
    sys_ = OdeSystem.from_json(_read_json(args.system)) if args.system else None
    levels = prolong(pmap, sys_, args.order)
    data = {"m": pmap.m, "x": str(pmap.x), "levels": [[str(e) for e in lev] for lev in levels]}
    _emit(data, args.format, lambda d: "\n".join(
        f"y{i}_{s} -> {e}" for s, lev in enumerate(d["levels"]) for i, e in enumerate(lev, 1)))
    return EXIT_OK


def cmd_theta(args, conv) -> int:
    from .linwilczynski import LinDiffOp, NotLaguerreForsyth, theta

    op = LinDiffOp.from_json(_read_json(args.operator))
    try:
        T = theta(op, args.r)
    except NotLaguerreForsyth as exc:
        raise InputError(str(exc)) from None
    except ValueError as exc:
        raise InputError(str(exc)) from None
    _emit({"r": args.r, "theta": T.to_strings()}, args.format, lambda d: str(T))
    return EXIT_OK


def cmd_cohomology(args, conv) -> int:
    from .cohomology import report

    if args.k < 1 or args.m < 1:
        raise InputError("need k >= 1 and m >= 1")
    _emit(report(args.k, args.m), args.format, _text_cohomology)
    return EXIT_OK


def cmd_selftest(args, conv) -> int:
    from .selftest import run_all

    crit = [int(c) for c in args.criteria.split(",")] if args.criteria else None
    results = run_all(seed=args.seed, convention=conv, criteria=crit, echo=print)
    return 0 if all(r.ok for r in results) else 1


def build_parser() -> argparse.ArgumentParser:
    def flags(defaults: bool) -> argparse.ArgumentParser:
        # subcommands repeat the global flags without defaults so either position works
        d = (lambda v: v) if defaults else (lambda v: argparse.SUPPRESS)
        q = argparse.ArgumentParser(add_help=False)
        q.add_argument("--format", choices=("json", "text"), default=d("json"))
        q.add_argument("--seed", type=int, default=d(0), help="seed for randomized suites")
        q.add_argument("--convention", metavar="FILE", default=d(None),
                       help="convention table replacing the built-in one")
        return q

    common = flags(False)
    p = argparse.ArgumentParser(prog="odeinv", parents=[flags(True)],
                                description="Point-equivalence invariants of ODE systems and the cohomology behind them.")
    sub = p.add_subparsers(dest="command", required=True)
    s = sub.add_parser("invariants", parents=[common], help="list all applicable invariants")
    s.add_argument("system")
    s.set_defaults(fn=cmd_invariants)
    s = sub.add_parser("trivializable", parents=[common], help="decide equivalence to the trivial system")
    s.add_argument("system")
    s.set_defaults(fn=cmd_trivializable)
    s = sub.add_parser("transform", parents=[common], help="pull a system back along a point map")
    s.add_argument("map")
    s.add_argument("system")
    s.set_defaults(fn=cmd_transform)
    s = sub.add_parser("prolong", parents=[common], help="prolong a point map to jet space")
    s.add_argument("map")
    s.add_argument("--order", type=int, required=True)
    s.add_argument("--system", help="substitute this system at its top order")
    s.set_defaults(fn=cmd_prolong)
    s = sub.add_parser("theta", parents=[common], help="Wilczynski invariant of a linear operator")
    s.add_argument("operator")
    s.add_argument("r", type=int)
    s.set_defaults(fn=cmd_theta)
    s = sub.add_parser("cohomology", parents=[common], help="graded cohomology report for g(k, m)")
    s.add_argument("k", type=int)
    s.add_argument("m", type=int)
    s.set_defaults(fn=cmd_cohomology)
    s = sub.add_parser("selftest", parents=[common], help="run the acceptance checks")
    s.add_argument("--criteria", help="comma-separated criterion numbers (default: all)")
    s.set_defaults(fn=cmd_selftest)
    return p


def _max_degree_from_env() -> int | None:
    raw = os.environ.get("ODEINV_MAX_DEGREE")
    if not raw:
        return None
    try:
        cap = int(raw)
    except ValueError:
        raise InputError(f"ODEINV_MAX_DEGREE must be an integer, got {raw!r}") from None
    if cap < 0:
        raise InputError("ODEINV_MAX_DEGREE must be non-negative")
    return cap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    from .genwilczynski import Convention, ConventionError, default_convention, validate_convention

    try:
        cap = _max_degree_from_env()
        conv = default_convention()
        if args.convention:
            try:
                conv = Convention.from_json(_read_json(args.convention))
            except (KeyError, ValueError) as exc:
                raise InputError(f"bad convention file: {exc}") from None
        token = expr.max_degree.set(None)
        try:
            validate_convention(conv)
        finally:
            expr.max_degree.reset(token)
        token = expr.max_degree.set(cap)
        try:
            return args.fn(args, conv)
        finally:
            expr.max_degree.reset(token)
    except ParseError as exc:
        print(f"error: {exc.annotated()}", file=sys.stderr)
        return EXIT_INPUT
    except (InputError, ShapeError, SingularMapError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ConventionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ExpansionLimitError as exc:
        print(f"error: {exc} (raise ODEINV_MAX_DEGREE to allow larger expansions)", file=sys.stderr)
        return EXIT_LIMIT


if __name__ == "__main__":
    sys.exit(main())
