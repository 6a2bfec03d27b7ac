"""Command-line interface: ``noisyonemax {theory,optimal-r,run,validate,sweep}``.

Exit codes: 0 success, 1 usage error, 2 numerical overflow, 3 budget
exhausted (``run``), 4 validation tolerance breached (``validate``).
Output files default to ``$NOISYONEMAX_OUTPUT_DIR`` (else the working
directory).
"""
from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from pathlib import Path

from . import __version__
from .harness import ExperimentConfig, persist_report, sweep, table_config, validate_table, write_gnuplot
from .onemax import Genome, RngStream
from .rmhc import PolicyConfig, run_noisy
from .theory import RecursionOverflowError, expected_evaluations, optimal_resampling, theory_from_p_ta

EXIT_OK, EXIT_USAGE, EXIT_OVERFLOW, EXIT_BUDGET, EXIT_BREACH = 0, 1, 2, 3, 4
OUTPUT_ENV = "NOISYONEMAX_OUTPUT_DIR"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}")
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value}")
    return value


def _seed(text: str) -> int:
    value = int(text)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must be in [0, 2**64)")
    return value


def _non_negative_float(text: str) -> float:
    value = float(text)
    if not value >= 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative number, got {text!r}")
    return value


def _positive_float(text: str) -> float:
    value = float(text)
    if not value > 0:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text!r}")
    return value


def _int_list(text: str) -> list[int]:
    """``"1,2,5"`` or ranges such as ``"1-10"``; items may be mixed."""
    out: list[int] = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if "-" in part[1:]:
            lo, hi = part.split("-", 1)
            lo_i, hi_i = _positive_int(lo), _positive_int(hi)
            if hi_i < lo_i:
                raise argparse.ArgumentTypeError(f"empty range {part!r}")
            out.extend(range(lo_i, hi_i + 1))
        else:
            out.append(_positive_int(part))
    if not out:
        raise argparse.ArgumentTypeError("empty list")
    return out


def _output_dir(value: str | None) -> Path:
    return Path(value or os.environ.get(OUTPUT_ENV) or ".")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="noisyonemax", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("theory", help="exact expected evaluations for (n, r, sigma)")
    p.add_argument("--n", type=_positive_int, required=True)
    group = p.add_mutually_exclusive_group()
    group.add_argument("--r", type=_positive_int, default=1)
    group.add_argument("--r-range", type=_int_list, help="e.g. 1-50; one row per r")
    p.add_argument("--sigma", type=_positive_float, default=1.0)
    p.add_argument("--p-ta-override", type=float, help="use this acceptance probability instead of the noise model")
    p.add_argument("--out", help="also write the rows to this CSV file")

    p = sub.add_parser("optimal-r", help="cost-minimising resampling number per n")
    p.add_argument("--n-list", type=_int_list, required=True)
    p.add_argument("--sigma", type=_positive_float, default=1.0)
    p.add_argument("--r-max", type=_positive_int, default=10_000)
    p.add_argument("--out", help="directory for cost_curves.csv (default: $%s or .)" % OUTPUT_ENV)

    p = sub.add_parser("run", help="a single RMHC run")
    p.add_argument("--n", type=_positive_int, required=True)
    p.add_argument("--r", type=_positive_int, default=1)
    p.add_argument("--sigma", type=_non_negative_float, default=1.0)
    p.add_argument("--budget", type=_positive_int, default=10_000_000)
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("--store-statistic", action="store_true")
    p.add_argument("--init", choices=("all-zeros", "uniform-random"), default="all-zeros")
    p.add_argument("--out", help="write the run summary as JSON to this file")

    p = sub.add_parser("validate", help="compare simulation with theory at n = 10")
    p.add_argument("--trials", type=_positive_int, default=10_000)
    p.add_argument("--tolerance", type=_positive_float, default=0.02)
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("--workers", type=_positive_int, default=1)
    p.add_argument("--out", help="write the comparison as JSON to this file")

    p = sub.add_parser("sweep", help="repeated trials over an n x r grid")
    p.add_argument("--n-list", type=_int_list, required=True)
    p.add_argument("--r-list", type=_int_list, required=True)
    p.add_argument("--sigma", type=_non_negative_float, default=1.0)
    p.add_argument("--trials", type=_positive_int, default=100)
    p.add_argument("--budget", type=_positive_int, default=10_000_000)
    p.add_argument("--store-statistic", action="store_true")
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("--init", choices=("all-zeros", "uniform-random"), default="all-zeros")
    p.add_argument("--censored", action="store_true", help="include budget-truncated trials in the means")
    p.add_argument("--workers", type=_positive_int, default=1)
    p.add_argument("--out", help="output directory (default: $%s or .)" % OUTPUT_ENV)
    return parser


def cmd_theory(args) -> int:
    r_values = args.r_range if args.r_range else [args.r]
    rows = []
    for r in r_values:
        try:
            if args.p_ta_override is not None:
                res = theory_from_p_ta(args.n, r, args.p_ta_override, args.sigma)
            else:
                res = expected_evaluations(args.n, r, args.sigma)
        except RecursionOverflowError as exc:
            print(f"overflow for n={args.n}, r={r}: {exc}", file=sys.stderr)
            return EXIT_OVERFLOW
        except ValueError as exc:
            print(f"noisyonemax theory: error: {exc}", file=sys.stderr)
            return EXIT_USAGE
        rows.append(res)
    print(f"{'n':>6} {'r':>5} {'sigma':>8} {'p_ta':>12} {'E[n|0]':>14} {'2r*E[n|0]':>14}")
    for res in rows:
        print(f"{res.n:>6} {res.r:>5} {res.sigma:>8g} {res.p_ta:>12.9f} "
              f"{res.expected_generations:>14.4f} {res.expected_evaluations:>14.4f}")
    if args.out:
        path = Path(args.out)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["n", "r", "sigma", "p_ta", "expected_generations", "expected_evaluations"])
            for res in rows:
                w.writerow([res.n, res.r, repr(res.sigma), repr(res.p_ta),
                            repr(res.expected_generations), repr(res.expected_evaluations)])
    return EXIT_OK


def cmd_optimal_r(args) -> int:
    results = []
    for n in args.n_list:
        try:
            results.append((n, optimal_resampling(n, args.sigma, args.r_max)))
        except RecursionOverflowError as exc:
            print(f"overflow for n={n}: {exc}", file=sys.stderr)
            return EXIT_OVERFLOW
    print(f"{'n':>6} {'r_star':>7} {'cost':>16}")
    for n, opt in results:
        flag = "  (r_max bound hit)" if opt.bound_hit else ""
        print(f"{n:>6} {opt.r_star:>7} {opt.cost:>16.4f}{flag}")
    out_dir = _output_dir(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    with open(out_dir / "cost_curves.csv", "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["n", "sigma", "r", "expected_evaluations", "is_optimal"])
        for n, opt in results:
            for r, cost in enumerate(opt.costs, start=1):
                w.writerow([n, repr(args.sigma), r, repr(cost), str(r == opt.r_star).lower()])
    return EXIT_OK


def cmd_run(args) -> int:
    cfg = PolicyConfig(r=args.r, store_statistic=args.store_statistic, budget=args.budget, sigma=args.sigma)
    rng = RngStream(args.seed)
    init = Genome.random(args.n, rng) if args.init == "uniform-random" else Genome.zeros(args.n)
    res = run_noisy(args.n, init, cfg, rng)
    summary = {
        "n": args.n, "r": args.r, "sigma": args.sigma, "budget": args.budget, "seed": args.seed,
        "store_statistic": args.store_statistic, "init": args.init, "rng": rng.algorithm_id,
        "solved": res.solved, "evaluations_used": res.evaluations_used,
        "generations": res.generations, "final_true_fitness": res.final_true_fitness,
    }
    for key in ("solved", "evaluations_used", "generations", "final_true_fitness"):
        value = summary[key]
        print(f"{key}: {str(value).lower() if isinstance(value, bool) else value}")
    if args.out:
        Path(args.out).write_text(json.dumps(summary, indent=2) + "\n", encoding="utf-8")
    return EXIT_OK if res.solved else EXIT_BUDGET


def cmd_validate(args) -> int:
    table = validate_table(table_config(trials=args.trials, master_seed=args.seed),
                           tolerance=args.tolerance, workers=args.workers)
    print(f"n={table.n} sigma={table.sigma:g} trials={table.trials} seed={args.seed} tolerance={table.tolerance:g}")
    print(table.format())
    if args.out:
        doc = {
            "n": table.n, "sigma": table.sigma, "trials": table.trials, "seed": args.seed,
            "tolerance": table.tolerance, "ok": table.ok,
            "rows": [row.__dict__ for row in table.rows],
        }
        Path(args.out).write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")
    return EXIT_OK if table.ok else EXIT_BREACH


def cmd_sweep(args) -> int:
    cfg = ExperimentConfig(
        n_list=tuple(args.n_list), r_list=tuple(args.r_list), sigma=args.sigma, trials=args.trials,
        budget=args.budget, store_statistic=args.store_statistic, master_seed=args.seed,
        init_policy=args.init, censored=args.censored,
    )
    report = sweep(cfg, workers=args.workers)
    out_dir = _output_dir(args.out)
    csv_path, json_path = persist_report(report, out_dir / "sweep")
    dat_paths = write_gnuplot(report, out_dir)
    print(f"{'n':>6} {'r':>5} {'solved':>9} {'mean_evaluations':>18} {'std_error':>12}")
    for c in report.cells:
        mean = "truncated" if c.mean_evaluations is None else f"{c.mean_evaluations:.4f}"
        se = "-" if c.std_error is None else f"{c.std_error:.4f}"
        print(f"{c.n:>6} {c.r:>5} {c.success_count:>4}/{c.trials:<4} {mean:>18} {se:>12}")
    for n, r in report.argmin_r().items():
        print(f"argmin r for n={n}: {r if r is not None else '-'}")
    if args.verbose:
        for p in (csv_path, json_path, *dat_paths):
            print(f"wrote {p}", file=sys.stderr)
    return EXIT_OK


COMMANDS = {
    "theory": cmd_theory,
    "optimal-r": cmd_optimal_r,
    "run": cmd_run,
    "validate": cmd_validate,
    "sweep": cmd_sweep,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except RecursionOverflowError as exc:
        print(f"noisyonemax: {exc}", file=sys.stderr)
        return EXIT_OVERFLOW
    except OSError as exc:
        print(f"noisyonemax: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
