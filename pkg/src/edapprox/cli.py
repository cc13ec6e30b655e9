"""Command line: ``edapprox gen | run | sweep``.

Exit codes: 0 success, 1 bad input or parameters, 2 when ``--oracle``
finds an estimate below the exact distance.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import time
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence

from .driver import RunReport, approx_ed, default_Delta
from .exact import exact_ed
from .generate import InstanceSpec, generate
from .oracle import verify_envelope
from .params import ParamSet, derive_params

EXIT_OK, EXIT_ERROR, EXIT_UNSOUND = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on usage errors; 2 is reserved for soundness failures
    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def _param_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--delta", type=Fraction, default=Fraction(1), help="running-time exponent in (0, 2]")
    p.add_argument("--Delta", type=int, default=None, help="additive target (default depends on mode)")
    p.add_argument("--mode", choices=["paper", "practical"], default="practical")
    p.add_argument("--preset", default="desk")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tau-max", type=int)
    p.add_argument("--rho-exp", type=Fraction)
    p.add_argument("--imax", type=int)
    p.add_argument("--lmax", type=int)
    p.add_argument("--child-count", type=int)
    p.add_argument("--exact-fallback-n", type=int)
    p.add_argument("--oracle", action="store_true", help="also compute the exact distance and check soundness")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--timings", action="store_true", help="include wall-clock phase times (breaks byte-identical output)")


def params_from_args(args: argparse.Namespace) -> ParamSet:
    overrides = {
        "seed": args.seed,
        "tau_max": args.tau_max,
        "rho_exp": args.rho_exp,
        "i_max": args.imax,
        "L_max": args.lmax,
        "child_count": args.child_count,
        "exact_fallback_n": args.exact_fallback_n,
    }
    overrides = {k: v for k, v in overrides.items() if v is not None}
    if args.mode == "paper":
        return derive_params(args.delta, "paper", overrides)
    return derive_params(args.delta, "practical", overrides, preset=args.preset)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="edapprox", description="Approximate and exact edit distance with instrumentation.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("gen", help="write a seeded string pair")
    g.add_argument("out_a", type=Path)
    g.add_argument("out_b", type=Path)
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--alphabet", type=int, default=4)
    g.add_argument("--generator", choices=["random", "mutate", "adversarial-skew"], default="mutate")
    g.add_argument("--rate", type=float, default=0.05)
    g.add_argument("--seed", type=int, default=0)

    r = sub.add_parser("run", help="estimate the distance between two files")
    r.add_argument("file_a", type=Path)
    r.add_argument("file_b", type=Path)
    how = r.add_mutually_exclusive_group()
    how.add_argument("--exact", action="store_true")
    how.add_argument("--approx", action="store_true", help="default")
    r.add_argument("--emit-edges", type=Path, help="write each rung's edge set as JSON lines")
    _param_flags(r)

    s = sub.add_parser("sweep", help="CSV of estimate vs exact over a grid of sizes and rates")
    s.add_argument("--n", type=int, nargs="+", required=True)
    s.add_argument("--rate", type=float, nargs="+", required=True)
    s.add_argument("--alphabet", type=int, default=4)
    s.add_argument("--out", type=Path, help="CSV path (default stdout)")
    _param_flags(s)
    return parser


def cmd_gen(args: argparse.Namespace) -> int:
    inst = InstanceSpec(args.n, args.alphabet, args.generator, args.rate, args.seed)
    a, b, planted = generate(inst)
    args.out_a.write_bytes(a)
    args.out_b.write_bytes(b)
    if planted is not None:
        Path(f"{args.out_b}.planted").write_text(f"{planted}\n")
    return EXIT_OK


def _exact_report(a: bytes, b: bytes, params: ParamSet, Delta: Optional[int]) -> RunReport:
    n = min(len(a), len(b))
    rep = RunReport("exact", n, str(params.delta), Delta or default_Delta(n, params), params.seed)
    t0 = time.perf_counter()
    rep.estimate = exact_ed(a, b)
    rep.phase_times_ms["total"] = (time.perf_counter() - t0) * 1000
    return rep


def _dump(obj: dict) -> str:
    return json.dumps(obj, sort_keys=True)


def cmd_run(args: argparse.Namespace) -> int:
    a, b = args.file_a.read_bytes(), args.file_b.read_bytes()
    params = params_from_args(args)
    if args.exact:
        report = _exact_report(a, b, params, args.Delta)
        if args.oracle:
            report.true_distance = report.estimate
            report.sound = True
    else:
        _, report = approx_ed(
            a, b, params, Delta=args.Delta, oracle=args.oracle,
            threads=args.threads, keep_edges=args.emit_edges is not None,
        )
    if args.emit_edges is not None:
        with args.emit_edges.open("w") as fh:
            for Delta_q, edges in report.edge_sets:
                fh.write(_dump({"Delta_q": Delta_q, "edges": edges}) + "\n")
    print(_dump(report.to_json(timings=args.timings)))
    return EXIT_UNSOUND if report.sound is False else EXIT_OK


SWEEP_COLUMNS = ["n", "rate", "estimate", "exact", "ratio", "queries"]


def cmd_sweep(args: argparse.Namespace) -> int:
    params = params_from_args(args)
    rows = []
    unsound = False
    for n in args.n:
        for rate in args.rate:
            a, b, _ = generate(InstanceSpec(n, args.alphabet, "mutate", rate, args.seed))
            est, rep = approx_ed(a, b, params, Delta=args.Delta, threads=args.threads)
            row = {"n": n, "rate": rate, "estimate": est, "exact": "", "ratio": "",
                   "queries": sum(rep.query_counts.values())}
            if args.oracle:
                env = verify_envelope(a, b, est, rep.Delta)
                row["exact"], row["ratio"] = env.exact, f"{env.ratio:.6g}"
                unsound |= not env.passed
            rows.append(row)
    fh = args.out.open("w", newline="") if args.out else sys.stdout
    try:
        w = csv.DictWriter(fh, fieldnames=SWEEP_COLUMNS, lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
    finally:
        if args.out:
            fh.close()
    return EXIT_UNSOUND if unsound else EXIT_OK


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    handler = {"gen": cmd_gen, "run": cmd_run, "sweep": cmd_sweep}[args.command]
    try:
        return handler(args)
    except (OSError, ValueError) as exc:
        print(f"edapprox: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
