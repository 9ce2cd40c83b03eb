"""Command-line surface: evaluate, fit, plan, isoflop, compare, tables.

Every subcommand is deterministic given its flags and seed.  Exit codes:
0 success, 2 domain error (a value outside a law's valid region), 3 input
error (malformed flags, files, or JSON).  Counts accept scientific notation
and the suffixes M/B/T for 1e6/1e9/1e12.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from typing import Sequence

from .data import parse_records, reference_grid, GRID_NAMES
from .errors import DomainError, InputError
from .fit import (
    DEFAULT_OBJECTIVE,
    FitObjectiveConfig,
    default_search_space,
    fit_result_to_doc,
    grid_search,
    local_refine,
    random_search,
    smbo_fit,
    space_from_doc,
)
from .isoflop import (
    DEFAULT_SAMPLES,
    DEFAULT_SPIKE_THRESHOLD,
    compare_laws,
    curve_minimum,
    curve_to_csv,
    curves_to_csv,
    curves_to_svg,
    detect_spike,
    divergence_to_csv,
    isoflop_curve,
)
from .laws import (
    LAW_IDS,
    coeffs_from_doc,
    coeff_names,
    evaluate,
    law_of,
    published,
    published_tables_doc,
)
from .plan import optimal_allocation_dense, optimal_allocation_sparse, optimal_sparsity, plan_to_doc

__all__ = ["main", "parse_quantity"]

_SUFFIXES = {"M": 1e6, "B": 1e9, "T": 1e12}

#: Default --seed when neither the flag nor SCALELAW_SEED is set.
_ENV_SEED = "SCALELAW_SEED"


def parse_quantity(text: str) -> float:
    """Parse a count/budget: plain or scientific, with optional M/B/T suffix."""
    raw = str(text).strip()
    scale = 1.0
    if raw and raw[-1].upper() in _SUFFIXES:
        scale = _SUFFIXES[raw[-1].upper()]
        raw = raw[:-1]
    try:
        return float(raw) * scale
    except ValueError:
        raise InputError(f"not a quantity: {text!r}") from None


class _Parser(argparse.ArgumentParser):
    """argparse that reports flag problems as input errors (exit 3)."""

    def error(self, message):
        raise InputError(message)


def _resolve_seed(value: int | None) -> int:
    if value is not None:
        return value
    env = os.environ.get(_ENV_SEED)
    if env is None:
        return 0
    try:
        return int(env)
    except ValueError:
        raise InputError(f"{_ENV_SEED} must be an integer; got {env!r}") from None


def _load_coeffs(args):
    """Coefficients from --coeffs JSON, else the published table for --law."""
    if getattr(args, "coeffs", None):
        doc = _parse_json(_read_file(args.coeffs), args.coeffs)
        coeffs = coeffs_from_doc(doc)
        if law_of(coeffs) != args.law:
            raise InputError(
                f"coefficient file is for law '{law_of(coeffs)}' but --law is '{args.law}'"
            )
        return coeffs
    return published(args.law)


def _read_file(path: str) -> str:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path!r}: {exc}") from None


def _parse_json(text: str, what: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"invalid JSON in {what}: {exc}") from None


# ---------------------------------------------------------------------------
# subcommands (each returns the text to emit)
# ---------------------------------------------------------------------------


def _cmd_eval(args) -> str:
    coeffs = _load_coeffs(args)
    loss = evaluate(coeffs, parse_quantity(args.n), parse_quantity(args.d), args.sparsity)
    return f"{loss:.6g}\n"


def _cmd_fit(args) -> str:
    records = parse_records(_read_file(args.records))
    if args.space:
        space = space_from_doc(args.law, _parse_json(_read_file(args.space), args.space))
    else:
        space = default_search_space(args.law)
    config = FitObjectiveConfig(metric=args.metric, space=DEFAULT_OBJECTIVE.space)
    seed = _resolve_seed(args.seed)
    if args.method == "grid":
        result = grid_search(space, records, args.budget, config=config, workers=args.workers)
    elif args.method == "random":
        result = random_search(
            space, records, args.budget, seed=seed, config=config, workers=args.workers
        )
    else:
        result = smbo_fit(
            space,
            records,
            args.budget,
            init_samples=args.init_samples,
            seed=seed,
            config=config,
            workers=args.workers,
        )
    if args.refine > 0:
        result = local_refine(result.coefficients, records, max_iters=args.refine, config=config)
    if args.trace:
        _write_file(args.trace, _trace_csv(result))
    return json.dumps(fit_result_to_doc(result), indent=2) + "\n"


def _trace_csv(result) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    names = list(coeff_names(result.law))
    writer.writerow(["index", "objective", *names])
    for entry in result.trace:
        writer.writerow([entry.index, repr(entry.objective), *(repr(v) for v in entry.values)])
    return out.getvalue()


def _cmd_plan(args) -> str:
    coeffs = _load_coeffs(args)
    budget = parse_quantity(args.compute)
    if args.sparsity_grid is not None:
        if args.law != "generalized":
            raise InputError("--sparsity-grid requires --law generalized")
        grid = [float(x) for x in args.sparsity_grid.split(",") if x.strip() != ""]
        s_best, plan = optimal_sparsity(coeffs, budget, grid)
        doc = {
            "s_best": s_best,
            "plan": plan_to_doc(plan),
            "evaluated": [
                plan_to_doc(optimal_allocation_sparse(coeffs, budget, s)) for s in grid
            ],
        }
        return json.dumps(doc, indent=2) + "\n"
    if args.law == "hoffmann":
        if args.sparsity != 0.0:
            raise DomainError("law 'hoffmann' is dense; sparsity must be 0")
        plan = optimal_allocation_dense(coeffs, budget)
    elif args.law == "generalized":
        plan = optimal_allocation_sparse(coeffs, budget, args.sparsity)
    else:
        raise InputError("planning supports --law hoffmann (dense) or generalized (sparse)")
    return json.dumps(plan_to_doc(plan), indent=2) + "\n"


def _cmd_isoflop(args) -> str:
    coeffs = _load_coeffs(args)
    budget = parse_quantity(args.compute)
    sparsities = args.sparsity if args.sparsity else [0.0]
    kwargs = {"samples": args.samples}
    if args.n_min is not None or args.n_max is not None:
        if args.n_min is None or args.n_max is None:
            raise InputError("pass both --n-min and --n-max, or neither")
        kwargs["n_min"] = parse_quantity(args.n_min)
        kwargs["n_max"] = parse_quantity(args.n_max)
    curves = [isoflop_curve(coeffs, budget, s, **kwargs) for s in sparsities]
    if args.format == "svg":
        return curves_to_svg(curves)
    if args.format == "json":
        body = []
        for curve in curves:
            n_star, d_star, loss_star = curve_minimum(curve)
            spike = detect_spike(curve, args.threshold)
            body.append(
                {
                    "sparsity": curve.sparsity,
                    "n_star": n_star,
                    "d_star": d_star,
                    "loss_star": loss_star,
                    "rise": spike.rise,
                    "spiky": spike.spiky,
                }
            )
        doc = {
            "law": curves[0].law,
            "budget_flops": curves[0].budget.flops,
            "threshold": args.threshold,
            "curves": body,
        }
        return json.dumps(doc, indent=2) + "\n"
    if len(curves) == 1:
        return curve_to_csv(curves[0])
    return curves_to_csv(curves)


def _compare_grid(args):
    if args.records:
        records = parse_records(_read_file(args.records))
        scales = [r.scale for r in records]
    else:
        scales = list(reference_grid(args.grid).scales)
    if args.sparsity is not None:
        from .data import ModelScale

        scales = [
            ModelScale(s.n_active, s.d_tokens, args.sparsity) for s in scales
        ]
    return scales


def _cmd_compare(args) -> str:
    coeffs_a = coeffs_from_doc(_parse_json(_read_file(args.coeffs_a), args.coeffs_a)) if args.coeffs_a else published(args.law_a)
    coeffs_b = coeffs_from_doc(_parse_json(_read_file(args.coeffs_b), args.coeffs_b)) if args.coeffs_b else published(args.law_b)
    report = compare_laws(coeffs_a, coeffs_b, _compare_grid(args))
    if args.format == "csv":
        return divergence_to_csv(report)
    if args.format == "json":
        doc = {
            "law_a": report.law_a,
            "law_b": report.law_b,
            "max_abs_diff": report.max_abs_diff,
            "argmax": {
                "n_active": report.argmax.n_active,
                "d_tokens": report.argmax.d_tokens,
                "sparsity": report.argmax.sparsity,
            },
            "points": [
                {
                    "n_active": scale.n_active,
                    "d_tokens": scale.d_tokens,
                    "sparsity": scale.sparsity,
                    "loss_a": la,
                    "loss_b": lb,
                    "diff": diff,
                }
                for scale, la, lb, diff in zip(
                    report.scales, report.loss_a, report.loss_b, report.diffs
                )
            ],
        }
        return json.dumps(doc, indent=2) + "\n"
    a = report.argmax
    return (
        f"max |{report.law_a} - {report.law_b}| = {report.max_abs_diff:.6g} "
        f"at n={a.n_active:.6g}, d={a.d_tokens:.6g}, s={a.sparsity:g}\n"
    )


def _cmd_tables(args) -> str:
    return json.dumps(published_tables_doc(), indent=2) + "\n"


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def _add_coeff_source(sub) -> None:
    group = sub.add_mutually_exclusive_group()
    group.add_argument(
        "--published", action="store_true", help="use the published coefficient table (default)"
    )
    group.add_argument("--coeffs", metavar="PATH", help="coefficient JSON file")


def _add_output(sub) -> None:
    sub.add_argument("--output", metavar="PATH", help="write to a file instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="scalelaw", description=__doc__.splitlines()[0])
    commands = parser.add_subparsers(dest="command", required=True)

    p_eval = commands.add_parser("eval", help="evaluate a law at one point")
    p_eval.add_argument("--law", choices=LAW_IDS, required=True)
    _add_coeff_source(p_eval)
    p_eval.add_argument("-n", required=True, help="active parameters (M/B/T ok)")
    p_eval.add_argument("-d", required=True, help="training tokens (M/B/T ok)")
    p_eval.add_argument("-s", "--sparsity", type=float, default=0.0)
    _add_output(p_eval)

    p_fit = commands.add_parser("fit", help="fit coefficients to a records CSV")
    p_fit.add_argument("--law", choices=LAW_IDS, required=True)
    p_fit.add_argument("--records", metavar="PATH", required=True, help="records CSV")
    p_fit.add_argument("--space", metavar="PATH", help="search-space JSON (default: published +/- a decade)")
    p_fit.add_argument("--method", choices=("grid", "random", "smbo"), default="smbo")
    p_fit.add_argument(
        "--budget",
        type=int,
        required=True,
        help="evaluations (random/smbo) or points per dimension (grid)",
    )
    p_fit.add_argument("--init-samples", type=int, default=16, help="smbo initial design size")
    p_fit.add_argument("--refine", type=int, default=0, metavar="ITERS", help="polish the best fit locally")
    p_fit.add_argument("--metric", choices=("mse", "huber", "log_mse"), default="mse")
    p_fit.add_argument("--seed", type=int, default=None, help=f"default: ${_ENV_SEED} or 0")
    p_fit.add_argument("--workers", type=int, default=1)
    p_fit.add_argument("--trace", metavar="PATH", help="also write the evaluation trace CSV")
    _add_output(p_fit)

    p_plan = commands.add_parser("plan", help="compute-optimal allocation for a budget")
    p_plan.add_argument("--law", choices=("hoffmann", "generalized"), required=True)
    _add_coeff_source(p_plan)
    p_plan.add_argument("-C", "--compute", required=True, help="budget in FLOPs (M/B/T ok)")
    p_plan.add_argument("-s", "--sparsity", type=float, default=0.0)
    p_plan.add_argument("--sparsity-grid", metavar="S1,S2,...", help="pick the best sparsity from a grid")
    _add_output(p_plan)

    p_iso = commands.add_parser("isoflop", help="constant-compute loss curves")
    p_iso.add_argument("--law", choices=LAW_IDS, required=True)
    _add_coeff_source(p_iso)
    p_iso.add_argument("-C", "--compute", required=True, help="budget in FLOPs (M/B/T ok)")
    p_iso.add_argument(
        "-s", "--sparsity", type=float, action="append", help="repeatable; default 0"
    )
    p_iso.add_argument("--n-min", help="sweep start (M/B/T ok)")
    p_iso.add_argument("--n-max", help="sweep end (M/B/T ok)")
    p_iso.add_argument("--samples", type=int, default=DEFAULT_SAMPLES)
    p_iso.add_argument("--threshold", type=float, default=DEFAULT_SPIKE_THRESHOLD, help="spike rise threshold (json format)")
    p_iso.add_argument("--format", choices=("csv", "svg", "json"), default="csv")
    _add_output(p_iso)

    p_cmp = commands.add_parser("compare", help="pointwise gap between two laws")
    p_cmp.add_argument("--law-a", choices=LAW_IDS, required=True)
    p_cmp.add_argument("--law-b", choices=LAW_IDS, required=True)
    p_cmp.add_argument("--coeffs-a", metavar="PATH", help="coefficient JSON for law A (default published)")
    p_cmp.add_argument("--coeffs-b", metavar="PATH", help="coefficient JSON for law B (default published)")
    grid = p_cmp.add_mutually_exclusive_group()
    grid.add_argument("--grid", choices=GRID_NAMES, default="hoffmann9")
    grid.add_argument("--records", metavar="PATH", help="take scales from a records CSV")
    p_cmp.add_argument("-s", "--sparsity", type=float, default=None, help="override every grid sparsity")
    p_cmp.add_argument("--format", choices=("text", "csv", "json"), default="text")
    _add_output(p_cmp)

    p_tab = commands.add_parser("tables", help="dump the published coefficient tables as JSON")
    _add_output(p_tab)

    return parser


_DISPATCH = {
    "eval": _cmd_eval,
    "fit": _cmd_fit,
    "plan": _cmd_plan,
    "isoflop": _cmd_isoflop,
    "compare": _cmd_compare,
    "tables": _cmd_tables,
}


def _write_file(path: str, text: str) -> None:
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as exc:
        raise InputError(f"cannot write {path!r}: {exc}") from None


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        text = _DISPATCH[args.command](args)
        if getattr(args, "output", None):
            _write_file(args.output, text)
        else:
            sys.stdout.write(text)
        return 0
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
