"""Command-line entry point.

Exit codes: 0 success, 1 verification failure, 2 usage or I/O error.
"""
from __future__ import annotations

import argparse
import csv
import logging
import sys
from pathlib import Path

from . import io
from .baselines import rand_baseline, rmax_baseline
from .errors import RoutesubError
from .harness import (ScenarioConfig, check_budget_safety, emit_report, gen_instance,
                      load_instance, poi_points, run_experiment, write_instance)
from .optimizer import solve
from .verification import check_oracle, run_suite

EXIT_OK, EXIT_VERIFY, EXIT_USAGE = 0, 1, 2
ORACLES = ("tsp-exact", "tsp-mst-double", "tsp-two-opt", "steiner-kmb", "steiner-exact")

log = logging.getLogger("routesub")


def _k(text):
    if text == "auto":
        return "auto"
    try:
        k = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer or 'auto', got {text!r}")
    if k < 1:
        raise argparse.ArgumentTypeError("k must be at least 1")
    return k


def _seeds(text):
    try:
        seeds = io.parse_seeds(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad seed list {text!r}")
    if not seeds:
        raise argparse.ArgumentTypeError("seed list is empty")
    return seeds


def _budgets(text):
    try:
        return io.parse_floats(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad budget list {text!r}")


def _scenario_flags(p, seeds_default=None):
    p.add_argument("--config", type=Path, help="key=value file; flags override it")
    p.add_argument("--scenario", choices=("poi", "multicast"))
    p.add_argument("--n", type=int, help="number of items (default: 45 poi, 20 multicast)")
    p.add_argument("--budget", type=_budgets, help="budget, or comma list for bench")
    p.add_argument("--theta", type=float, help="relaxation (default: the oracle's error)")
    p.add_argument("--k", type=_k, help="outer iterations: integer or 'auto'")
    p.add_argument("--lambda", dest="lam", type=float, help="cut-diversity weight (multicast)")
    p.add_argument("--oracle", choices=ORACLES)


def build_parser():
    ap = argparse.ArgumentParser(prog="routesub", description=(
        "Submodular maximization under routing budgets: solver, baselines, benchmarks "
        "and brute-force verification."))
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="cmd", required=True, metavar="COMMAND")

    p = sub.add_parser("gen", help="write instance files")
    _scenario_flags(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", type=Path, required=True)

    p = sub.add_parser("solve", help="run one algorithm on one instance")
    _scenario_flags(p)
    p.add_argument("--instance", type=Path, help="instance.txt written by 'gen'")
    p.add_argument("--seed", type=int, default=0, help="instance seed (and Rand's seed)")
    p.add_argument("--algo", choices=("ours", "rand", "rmax"), default="ours")
    p.add_argument("--trace", action="store_true", help="print per-step trace lines")
    p.add_argument("--out", type=Path, help="also write solution.txt here")

    p = sub.add_parser("bench", help="run a seeded sweep and write CSV + SVG")
    _scenario_flags(p)
    p.add_argument("--seeds", type=_seeds, help="e.g. 1..20, 3,5,8 or a count")
    p.add_argument("--algo", action="append", choices=("ours", "rand", "rmax"),
                   help="repeatable; default all three")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", type=Path, required=True)

    p = sub.add_parser("verify", help="brute-force property suite")
    p.add_argument("--n", type=int, default=8)
    p.add_argument("--seeds", type=int, default=300, help="number of seeds")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", type=Path, help="write report.txt and report.csv here")

    p = sub.add_parser("oracle-check", help="audit a cost oracle against exact costs")
    p.add_argument("--oracle", choices=ORACLES, default="steiner-kmb")
    p.add_argument("--n", type=int, default=8)
    p.add_argument("--seeds", type=_seeds, default=list(range(20)))
    p.add_argument("--out", type=Path, help="write report.txt and report.csv here")
    return ap


def _config(args, seeds=None):
    m = io.read_keyvalue(args.config) if args.config else {}
    if args.scenario:
        m["scenario"] = args.scenario
    for key, val in (("n", args.n), ("theta", args.theta), ("k", args.k),
                     ("lambda", args.lam), ("oracle", args.oracle)):
        if val is not None:
            m[key] = str(val)
    if args.budget:
        m["budgets"] = ",".join(repr(b) for b in args.budget)
    if seeds is not None:
        m["seeds"] = ",".join(str(s) for s in seeds) + ","
    if getattr(args, "algo", None) and isinstance(args.algo, list):
        m["algos"] = ",".join(dict.fromkeys(args.algo))
    return ScenarioConfig.from_mapping(m)


def _instance_kw(cfg):
    kw = {"budget": cfg.budgets[0], "theta": cfg.theta, "k": cfg.loop_k}
    if cfg.oracle:
        kw["oracle"] = cfg.oracle
    if cfg.scenario == "multicast":
        kw["lam"] = cfg.lam
    return kw


def _write_reports(out, reports):
    out.mkdir(parents=True, exist_ok=True)
    (out / "report.txt").write_text("\n\n".join(r.summary() for r in reports) + "\n")
    with open(out / "report.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("property", "seed", "pass", "lhs", "rhs"))
        for r in reports:
            w.writerows(r.csv_rows())


def cmd_gen(args):
    cfg = _config(args, seeds=[args.seed])
    inst = gen_instance(cfg.scenario, n=cfg.n, seed=args.seed, **_instance_kw(cfg))
    path = write_instance(args.out, inst, cfg.scenario, args.seed)
    print(f"wrote {path}")
    return EXIT_OK


def cmd_solve(args):
    if args.instance is not None:
        if not args.instance.is_file():
            print(f"routesub: instance file not found: {args.instance}", file=sys.stderr)
            return EXIT_USAGE
        k = None if args.k in (None, "auto") else args.k
        inst = load_instance(args.instance, budget=args.budget[0] if args.budget else None,
                             theta=args.theta, k=k, oracle=args.oracle)
    else:
        cfg = _config(args, seeds=[args.seed])
        inst = gen_instance(cfg.scenario, n=cfg.n, seed=args.seed, **_instance_kw(cfg))
    trace = print if args.trace else None
    if args.algo == "ours":
        sol = solve(inst, trace=trace)
    elif args.algo == "rand":
        sol = rand_baseline(inst, args.seed, trace=trace)
    else:
        sol = rmax_baseline(inst, trace=trace)
    for msg in sol.warnings:
        print(f"warning: {msg}", file=sys.stderr)
    print(sol.summary())
    print(f"travel={sol.travel:.6g} collect={sol.collect:.6g}")
    if args.out:
        args.out.mkdir(parents=True, exist_ok=True)
        (args.out / "solution.txt").write_text(sol.summary() + "\n")
    return EXIT_OK


def cmd_bench(args):
    cfg = _config(args, seeds=args.seeds)
    records = run_experiment(cfg, jobs=args.jobs)
    points = None
    if cfg.scenario == "poi":
        points = poi_points(cfg.seeds[0], cfg.n or 45)[0]
    paths = emit_report(records, args.out, scenario=cfg.scenario, points=points)
    safety = check_budget_safety(records)
    errors = [r for r in records if r.error]
    print(f"{len(records)} records, {len(errors)} failed runs")
    for p in paths:
        print(f"wrote {p}")
    print(safety.summary())
    return EXIT_OK if safety.passed else EXIT_VERIFY


def cmd_verify(args):
    reports = run_suite(n=args.n, seeds=args.seeds, jobs=args.jobs)
    for r in reports:
        print(r.summary())
    if args.out:
        _write_reports(args.out, reports)
    return EXIT_OK if all(r.passed for r in reports) else EXIT_VERIFY


def cmd_oracle_check(args):
    rep, mono = check_oracle(args.oracle, args.seeds, n=args.n)
    print(rep.summary())
    drops = sum(int(row[2]) for row in mono.rows)
    print(f"[INFO] {mono.name}: {drops} raw cost decreases along single-item extensions "
          f"over {mono.checked} instances")
    if args.out:
        _write_reports(args.out, [rep, mono])
    return EXIT_OK if rep.passed else EXIT_VERIFY


COMMANDS = {"gen": cmd_gen, "solve": cmd_solve, "bench": cmd_bench, "verify": cmd_verify,
            "oracle-check": cmd_oracle_check}


def dispatch(argv=None):
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.cmd](args)
    except (OSError, RoutesubError, ValueError) as exc:
        print(f"routesub: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main():
    sys.exit(dispatch())


if __name__ == "__main__":
    main()
