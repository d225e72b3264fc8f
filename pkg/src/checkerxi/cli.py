"""Command-line interface.

Exit status: 0 on success, 1 on a data or validation error (reported on
stderr with the error name), 2 on a usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import asdict
from pathlib import Path
from typing import Sequence

from . import bernstein, checkerboard, oracle, shuffle
from .core import (
    CheckerboardFamily,
    Family,
    MeasureReport,
    Permutation,
    cumulate,
    format_samples_csv,
    read_matrix,
    read_samples,
)
from .errors import CopulaError
from .estimators import EstimatorConfig, Model, Variant, convergence_experiment, estimate, timing_experiment

MATRIX_FAMILIES = ("pi", "min", "w", "bernstein")
_SYMBOLS = (("rho_s", "ρ_S"), ("tau", "τ"), ("xi", "ξ"), ("lambda_lower", "λL"), ("lambda_upper", "λU"))


def _num(x: float) -> str:
    return format(float(x), ".15g")


def _int_list(text: str) -> list[int]:
    try:
        return [int(float(tok)) for tok in text.split(",") if tok.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _float_list(text: str) -> list[float]:
    try:
        return [float(tok) for tok in text.split(",") if tok.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _permutation(text: str) -> Permutation:
    try:
        return Permutation.parse(text)
    except CopulaError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="checkerxi",
        description="Association measures for checkerboard, Bernstein and shuffle-of-min copulas, "
        "and checkerboard estimators of Chatterjee's xi.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser(
        "measures",
        help="closed-form rho_S, tau, xi and tail coefficients",
        description="Closed-form Spearman's rho, Kendall's tau, Chatterjee's xi and tail coefficients. "
        "--matrix reads a checkerboard (cell mass) matrix as CSV or JSON; family bernstein "
        "cumulates it to a grid copula matrix first. --shuffle takes a 1-based permutation "
        "defining a straight shuffle-of-min copula.",
    )
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--matrix", type=Path, help="checkerboard matrix file (CSV rows or JSON)")
    src.add_argument("--shuffle", type=_permutation, help="shuffle permutation, e.g. 2,3,1")
    p.add_argument("--family", choices=MATRIX_FAMILIES, default="pi", help="copula built on the matrix")
    p.add_argument("--json", action="store_true", help="emit JSON instead of text")
    p.add_argument("--seed", type=int, default=0, help="echoed for provenance")

    p = sub.add_parser(
        "estimate",
        help="estimate xi from x,y sample data",
        description="Estimate Chatterjee's xi from a CSV with header x,y. Variants lower/upper/avg "
        "bin ranks into a floor(n^kappa) grid and use the within-cell independence, "
        "perfect-dependence or averaged checkerboard formula; classical is the "
        "rank/nearest-neighbour estimator with seeded tie breaks.",
    )
    p.add_argument("--in", dest="infile", type=Path, required=True, help="samples CSV (header x,y)")
    p.add_argument("--variant", choices=[v.value for v in Variant], default="avg")
    p.add_argument("--kappa", type=float, default=1.0 / 3.0, help="grid exponent in (0, 1]")
    p.add_argument("--seed", type=int, default=0, help="seed for nearest-neighbour tie breaks")
    p.add_argument("--json", action="store_true")

    p = sub.add_parser(
        "sample",
        help="draw exact samples from a shuffle-of-min or checkerboard-type copula",
        description="Write exact draws (CSV with header x,y) from a straight shuffle-of-min copula "
        "or from the checkerboard-type copula of a matrix.",
    )
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--shuffle", type=_permutation)
    src.add_argument("--matrix", type=Path)
    p.add_argument("--family", choices=MATRIX_FAMILIES[:3], default="pi")
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", type=Path, help="output CSV (default: stdout)")

    p = sub.add_parser(
        "oracle",
        help="numeric cross-check of the closed forms",
        description="Evaluate rho_S, tau and xi by cell-aligned Gauss-Legendre quadrature of their "
        "integral definitions and the tail coefficients by dyadic limits, next to the "
        "closed-form values and their differences.",
    )
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--matrix", type=Path)
    src.add_argument("--shuffle", type=_permutation)
    p.add_argument("--family", choices=MATRIX_FAMILIES, default="pi")
    p.add_argument("--points", type=int, default=8, help="Gauss-Legendre nodes per axis per cell")
    p.add_argument("--json", action="store_true")
    p.add_argument("--seed", type=int, default=0, help="echoed for provenance")

    p = sub.add_parser("experiment", help="convergence and timing tables (CSV)")
    exp = p.add_subparsers(dest="experiment", required=True)
    c = exp.add_parser(
        "convergence",
        help="estimator values over sample sizes, grid exponents and replicates",
        description="Rows model,n,kappa,replicate,variant,value for the lower, avg, upper and "
        "classical estimators.",
    )
    c.add_argument("--model", choices=[m.value for m in Model], default=Model.GAUSSIAN_FACTOR.value)
    c.add_argument("--ns", type=_int_list, required=True)
    c.add_argument("--kappas", type=_float_list, default=[1.0 / 3.0])
    c.add_argument("--replicates", type=int, default=50)
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--threads", type=int, default=1)
    c.add_argument("--out", type=Path, help="output CSV (default: stdout)")
    t = exp.add_parser(
        "timing",
        help="wall time per estimator and sample size",
        description="Rows estimator,n,millis (best of --repeats) on single-factor Gaussian samples.",
    )
    t.add_argument("--ns", type=_int_list, required=True)
    t.add_argument("--kappa", type=float, default=1.0 / 3.0)
    t.add_argument("--repeats", type=int, default=3)
    t.add_argument("--seed", type=int, default=0)
    t.add_argument("--out", type=Path)
    return parser


# -- helpers ------------------------------------------------------------------


def _report_text(report: MeasureReport, seed: int) -> str:
    lines = [f"# seed={seed}", f"family={Family(report.family).value}", f"source={report.source.value}"]
    d = report.as_dict()
    lines += [f"{sym}={_num(d[key])}" for key, sym in _SYMBOLS]
    return "\n".join(lines) + "\n"


def _closed_form(args) -> tuple[MeasureReport, oracle.CopulaEvaluator]:
    if args.shuffle is not None:
        return shuffle.shuffle_measures(args.shuffle), oracle.shuffle_evaluator(args.shuffle)
    delta = read_matrix(args.matrix)
    if args.family == "bernstein":
        grid = cumulate(delta)
        return bernstein.measures(grid), oracle.bernstein_evaluator(grid)
    fam = CheckerboardFamily(args.family)
    return checkerboard.measures(delta, fam), oracle.checkerboard_evaluator(delta, fam)


def _write(text: str, out: Path | None, stdout) -> None:
    if out is None:
        stdout.write(text)
    else:
        out.write_text(text)


def _rows_csv(rows, header: Sequence[str], seed: int) -> str:
    buf = io.StringIO()
    buf.write(f"# seed={seed}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        d = asdict(row)
        writer.writerow([_num(d[h]) if isinstance(d[h], float) else d[h] for h in header])
    return buf.getvalue()


# -- subcommands ----------------------------------------------------------------


def _cmd_measures(args, stdout) -> None:
    report, _ = _closed_form(args)
    if args.json:
        out = {"command": "measures", "seed": args.seed, **report.as_dict()}
        stdout.write(json.dumps(out, sort_keys=True) + "\n")
    else:
        stdout.write(_report_text(report, args.seed))


def _cmd_estimate(args, stdout) -> None:
    samples = read_samples(args.infile)
    cfg = EstimatorConfig(kappa=args.kappa, seed=args.seed, variant=Variant(args.variant))
    value = estimate(samples, cfg)
    if args.json:
        out = {
            "command": "estimate",
            "seed": args.seed,
            "variant": cfg.variant.value,
            "kappa": cfg.kappa,
            "n": len(samples),
            "xi": value,
        }
        stdout.write(json.dumps(out, sort_keys=True) + "\n")
    else:
        stdout.write(f"# seed={args.seed}\nvariant={cfg.variant.value}\nkappa={_num(cfg.kappa)}\n"
                     f"n={len(samples)}\nξ={_num(value)}\n")


def _cmd_sample(args, stdout) -> None:
    if args.count < 1:
        raise CopulaError("--count must be at least 1")
    if args.shuffle is not None:
        samples = shuffle.sample_shuffle(args.shuffle, args.count, args.seed)
    else:
        samples = checkerboard.sample_checkerboard(read_matrix(args.matrix), args.family, args.count, args.seed)
    _write(f"# seed={args.seed}\n" + format_samples_csv(samples), args.out, stdout)


def _cmd_oracle(args, stdout) -> None:
    closed, evaluator = _closed_form(args)
    q = oracle.QuadratureSpec(points_per_cell=args.points)
    numeric = oracle.oracle_report(evaluator, closed.family, q)
    a, b = closed.as_dict(), numeric.as_dict()
    keys = [key for key, _ in _SYMBOLS]
    if args.json:
        out = {
            "command": "oracle",
            "seed": args.seed,
            "family": a["family"],
            "points": args.points,
            "closed_form": {k: a[k] for k in keys},
            "oracle": {k: b[k] for k in keys},
            "difference": {k: b[k] - a[k] for k in keys},
        }
        stdout.write(json.dumps(out, sort_keys=True) + "\n")
        return
    lines = [f"# seed={args.seed}", f"family={a['family']}", "measure,closed_form,oracle,difference"]
    for key, sym in _SYMBOLS:
        lines.append(f"{sym},{_num(a[key])},{_num(b[key])},{_num(b[key] - a[key])}")
    stdout.write("\n".join(lines) + "\n")


def _cmd_experiment(args, stdout) -> None:
    if args.experiment == "convergence":
        rows = convergence_experiment(
            args.model, args.ns, args.kappas, args.replicates, seed=args.seed, threads=args.threads
        )
        text = _rows_csv(rows, ["model", "n", "kappa", "replicate", "variant", "value"], args.seed)
    else:
        rows = timing_experiment(args.ns, seed=args.seed, kappa=args.kappa, repeats=args.repeats)
        text = _rows_csv(rows, ["estimator", "n", "millis"], args.seed)
    _write(text, args.out, stdout)


_COMMANDS = {
    "measures": _cmd_measures,
    "estimate": _cmd_estimate,
    "sample": _cmd_sample,
    "oracle": _cmd_oracle,
    "experiment": _cmd_experiment,
}


def main(argv: Sequence[str] | None = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        _COMMANDS[args.command](args, stdout)
    except CopulaError as exc:
        stderr.write(f"error: {type(exc).__name__}: {exc}\n")
        return 1
    except (OSError, ValueError) as exc:
        stderr.write(f"error: {type(exc).__name__}: {exc}\n")
        return 1
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
