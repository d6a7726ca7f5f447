"""Command-line front end.

Exit codes: 0 success, 1 usage or input error, 2 verification failure,
3 enumeration cap refusal.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from fractions import Fraction
from itertools import product

from . import __version__
from .audit import DEFAULT_MAX_CHECKS, EnumerationCapExceeded, audit_dsic, grid_vectors
from .core import (
    Instance,
    competitive_ratio_over,
    expected_gains,
    load_json,
    opt_gain,
    rational_str,
    to_rational,
)
from .families import DEFAULT_EPS, DEFAULT_L, build_chain
from .lp.bound import CSV_HEADER, EXACT, FLOAT, LPSolveError, verify_upper_bound
from .mechanisms import harmonic, parse_mechanism
from .sampling import instances
from .trade import (
    MultiUnitScenario,
    gft_oracle_multiunit,
    gft_oracle_unitdemand,
    reduce_multiunit,
    reduce_unitdemand,
    scenario_from_json,
)

EXIT_OK, EXIT_USAGE, EXIT_FAIL, EXIT_CAP = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _emit(obj, fmt: str, out) -> None:
    if fmt == "json":
        json.dump(obj, out, indent=2, sort_keys=True)
        out.write("\n")
        return
    rows = obj if isinstance(obj, list) else [obj]
    flat = [{k: v for k, v in r.items() if not isinstance(v, (list, dict))} for r in rows]
    keys = list(flat[0]) if flat else []
    if fmt == "csv":
        w = csv.writer(out, lineterminator="\n")
        w.writerow(keys)
        for r in flat:
            w.writerow([r[k] for k in keys])
        return
    cells = [[str(k) for k in keys]] + [["" if r[k] is None else str(r[k]) for k in keys] for r in flat]
    widths = [max(len(row[i]) for row in cells) for i in range(len(keys))]
    for row in cells:
        out.write("  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip() + "\n")


def _load_instance(path: str) -> Instance:
    try:
        return Instance.from_json(load_json(path))
    except (OSError, ValueError, TypeError, KeyError, ZeroDivisionError) as exc:
        raise UsageError(f"cannot read instance {path}: {exc}") from None


def _grid(spec: str) -> list[Fraction]:
    try:
        return [to_rational(v) for v in spec.split(",") if v.strip()]
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"bad grid {spec!r}: {exc}") from None


def _mechanism(spec: str, M: int):
    try:
        return parse_mechanism(spec, M)
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(str(exc)) from None


def cmd_eval(args, out) -> int:
    inst = _load_instance(args.instance)
    mech = _mechanism(args.mechanism, inst.M)
    r = mech(inst)
    report = expected_gains(r, inst)
    _, arg = opt_gain(inst)
    payload = {"mechanism": mech.name, "instance": inst.to_json(), **r.to_json(), **report.to_json(), "opt_option": arg}
    _emit(payload, args.format, out)
    return EXIT_OK


def cmd_ratio(args, out) -> int:
    mech = _mechanism(args.mechanism, args.M)
    if args.exhaustive:
        vecs = grid_vectors(_grid(args.grid), args.M, args.submodular)
        pool = (Instance(b, s) for b, s in product(vecs, vecs))
        source = f"grid {args.grid}"
    else:
        pool = instances(args.M, args.trials, args.seed, args.submodular)
        source = f"{args.trials} random instances, seed {args.seed}"
    res = competitive_ratio_over(mech, pool)
    payload = {
        "mechanism": mech.name,
        "M": args.M,
        "source": source,
        "submodular": args.submodular,
        "ratio": None if res.ratio is None else rational_str(res.ratio),
        "ratio_float": None if res.ratio is None else float(res.ratio),
        "evaluated": res.evaluated,
        "skipped_opt_zero": res.skipped,
        "violations": len(res.violations),
        "witness": None if res.witness is None else res.witness.to_json(),
    }
    _emit(payload, args.format, out)
    return EXIT_OK if not res.violations else EXIT_FAIL


def cmd_audit(args, out) -> int:
    mech = _mechanism(args.mechanism, args.M)
    try:
        verdict = audit_dsic(mech, _grid(args.grid), args.M, args.submodular, args.max_checks)
    except EnumerationCapExceeded as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return EXIT_CAP
    payload = {"mechanism": mech.name, "M": args.M, "grid": args.grid, **verdict.to_json()}
    _emit(payload, args.format, out)
    status = "PASS" if verdict.dsic_on_grid else "FAIL"
    print(f"{status}: {mech.name} DSIC on grid {args.grid} (M={args.M})", file=sys.stderr)
    return EXIT_OK if verdict.dsic_on_grid else EXIT_FAIL


def cmd_verify(args, out) -> int:
    try:
        rep = verify_upper_bound(
            args.M, to_rational(args.eps), to_rational(args.L), args.family, args.mode, args.graded
        )
    except LPSolveError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_FAIL
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if args.format == "csv":
        w = csv.writer(out, lineterminator="\n")
        w.writerow(CSV_HEADER)
        w.writerow(rep.csv_row())
    else:
        payload = rep.to_json()
        if args.format == "table" or not args.assignment:
            payload.pop("assignment")
        _emit(payload, args.format, out)
    status = "PASS" if rep.passed else "FAIL"
    print(
        f"{status}: {args.family} M={args.M} alpha*={float(rep.alpha_star):.9f} "
        f"in [{float(rep.theoretical_bound):.9f}, {float(rep.upper_limit):.9f}]",
        file=sys.stderr,
    )
    return EXIT_OK if rep.passed else EXIT_FAIL


def cmd_reduce(args, out) -> int:
    try:
        sc = scenario_from_json(load_json(args.scenario))
    except (OSError, ValueError, TypeError, KeyError, ZeroDivisionError) as exc:
        raise UsageError(f"cannot read scenario {args.scenario}: {exc}") from None
    if isinstance(sc, MultiUnitScenario):
        inst, oracle = reduce_multiunit(sc), gft_oracle_multiunit(sc)
    else:
        inst, oracle = reduce_unitdemand(sc), gft_oracle_unitdemand(sc)
    opt, arg = opt_gain(inst)
    payload = {
        "scenario": sc.to_json(),
        **inst.to_json(),
        "opt": rational_str(opt),
        "opt_option": arg,
        "oracle_gft": rational_str(oracle),
    }
    _emit(payload, args.format, out)
    return EXIT_OK if opt == oracle else EXIT_FAIL


def cmd_chain(args, out) -> int:
    try:
        chain = build_chain(args.family, args.M, to_rational(args.eps), to_rational(args.L), args.graded)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    json.dump(chain.to_json(), out, indent=2)
    out.write("\n")
    return EXIT_OK


def cmd_sweep(args, out) -> int:
    rows = []
    ok = True
    for M in range(1, args.max_M + 1):
        ur = competitive_ratio_over(_mechanism("ur", M), instances(M, args.trials, args.seed))
        dr = competitive_ratio_over(_mechanism("dr", M), instances(M, args.trials, args.seed, submodular=True))
        row = {
            "M": M,
            "one_over_M": float(Fraction(1, M)),
            "one_over_H_M": float(1 / harmonic(M)),
            "ur_worst": None if ur.ratio is None else float(ur.ratio),
            "dr_worst_submodular": None if dr.ratio is None else float(dr.ratio),
        }
        ok &= ur.ratio is None or ur.ratio >= Fraction(1, M)
        ok &= dr.ratio is None or dr.ratio >= 1 / harmonic(M)
        if M <= args.lp_max_M:
            for fam in ("general", "submodular"):
                rep = verify_upper_bound(M, to_rational(args.eps), to_rational(args.L), fam)
                row[f"lp_alpha_{fam}"] = float(rep.alpha_star)
                ok &= bool(rep.passed)
        rows.append(row)
    _emit(rows, args.format, out)
    return EXIT_OK if ok else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="coopbounds", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def fmt(p, default="json"):
        p.add_argument("--format", choices=["json", "csv", "table"], default=default)

    p = sub.add_parser("eval", help="run a mechanism on one instance")
    p.add_argument("--mechanism", required=True)
    p.add_argument("--instance", required=True)
    fmt(p)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("ratio", help="worst ratio over random or grid instances")
    p.add_argument("--mechanism", required=True)
    p.add_argument("--M", type=int, required=True)
    p.add_argument("--trials", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--submodular", action="store_true")
    p.add_argument("--exhaustive", action="store_true", help="enumerate grid^M x grid^M instead of sampling")
    p.add_argument("--grid", default="-1,0,1/2,1")
    fmt(p)
    p.set_defaults(func=cmd_ratio)

    p = sub.add_parser("audit", help="brute-force DSIC check on a report grid")
    p.add_argument("--mechanism", required=True)
    p.add_argument("--M", type=int, required=True)
    p.add_argument("--grid", required=True)
    p.add_argument("--submodular", action="store_true")
    p.add_argument("--max-checks", type=int, default=DEFAULT_MAX_CHECKS)
    fmt(p)
    p.set_defaults(func=cmd_audit)

    for name in ("verify-bound", "chain"):
        p = sub.add_parser(name, help="LP certificate of the ratio bound" if name == "verify-bound" else "export a deviation chain as JSON")
        p.add_argument("--family", choices=["general", "submodular"], required=True)
        p.add_argument("--M", type=int, required=True)
        p.add_argument("--eps", default=str(DEFAULT_EPS))
        p.add_argument("--L", default=str(DEFAULT_L))
        p.add_argument("--graded", action="store_true", help="steepen deviation tails level by level")
        if name == "verify-bound":
            p.add_argument("--mode", choices=[EXACT, FLOAT], default=EXACT)
            p.add_argument("--assignment", action="store_true", help="include the optimal per-profile distributions")
            fmt(p)
            p.set_defaults(func=cmd_verify)
        else:
            p.set_defaults(func=cmd_chain)

    p = sub.add_parser("reduce", help="turn a trade scenario into an instance")
    p.add_argument("--scenario", required=True)
    fmt(p)
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("sweep", help="table of bounds, sampled worst ratios and LP optima")
    p.add_argument("--max-M", type=int, default=5)
    p.add_argument("--lp-max-M", type=int, default=5)
    p.add_argument("--trials", type=int, default=2000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--eps", default=str(DEFAULT_EPS))
    p.add_argument("--L", default=str(DEFAULT_L))
    fmt(p, default="table")
    p.set_defaults(func=cmd_sweep)
    return parser


def _attach_grid_values(argv: list[str]) -> list[str]:
    # a grid such as "-1,0,1" starts with a dash and would otherwise be read as a flag
    fixed, i = [], 0
    while i < len(argv):
        if argv[i] == "--grid" and i + 1 < len(argv):
            fixed.append(f"--grid={argv[i + 1]}")
            i += 2
        else:
            fixed.append(argv[i])
            i += 1
    return fixed


def run(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    args = parser.parse_args(_attach_grid_values(argv))
    try:
        return args.func(args, out)
    except UsageError as exc:
        print(f"coopbounds {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
