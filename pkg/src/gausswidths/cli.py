"""Command-line front end: parameter sweeps emitted as CSV or JSON.

Every command is deterministic for fixed flags and seed; floats are
printed with 17 significant digits so reruns are byte-identical and
diffable.  Domain errors exit nonzero with a single machine-parsable
``error: <code>: <detail>`` line on stderr.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from typing import Iterable, Sequence

from . import approx, assembler, bernstein, indexsets, widths
from .caps import ResourceCapError


def _fmt(value: object) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return f"{value:.17g}"
    return str(value)


def _write_csv(out, header: Sequence[str], rows: Iterable[Sequence[object]]) -> None:
    out.write(",".join(header) + "\n")
    for row in rows:
        out.write(",".join(_fmt(v) for v in row) + "\n")


def _write_json(out, payload: object) -> None:
    out.write(json.dumps(payload, indent=2))
    out.write("\n")


def _open_out(path: str | None):
    if path is None or path == "-":
        return sys.stdout, False
    return open(path, "w", encoding="utf-8", newline="\n"), True


def _cmd_widths(args) -> None:
    seq = widths.exact_widths(args.alpha, args.d, args.n_max, cap=args.cap)
    limit = widths.asymptotic_limit(args.alpha, args.d)
    rows = []
    for i, value in enumerate(seq.values):
        n = i + 1
        ratio = widths.asymptotic_ratio(args.alpha, args.d, n) if n >= 2 else math.nan
        rows.append((n, float(value), ratio, limit))
    out, close = _open_out(args.out)
    try:
        _write_csv(out, ("n", "s_n", "ratio_to_asymptotic", "limit_constant"), rows)
    finally:
        if close:
            out.close()


def _cmd_count(args) -> None:
    rows = []
    for r in range(1, args.r_max + 1):
        c = indexsets.count_c(r, args.d)
        if r > 1:
            lower, upper = indexsets.chernov_dung_bounds(r, args.d)
            within = lower < c < upper
        else:
            lower = upper = math.nan
            within = False
        rows.append((r, c, lower, upper, within))
    out, close = _open_out(args.out)
    try:
        _write_csv(out, ("r", "c", "lower", "upper", "within_bounds"), rows)
    finally:
        if close:
            out.close()


def _cmd_cross(args) -> None:
    rows = []
    for xi in range(0, args.xi + 1):
        card = indexsets.cross_cardinality_value(xi, args.d)
        ratio = indexsets.cross_cardinality_ratio(xi, args.d) if xi >= 1 else math.nan
        rows.append((xi, card, ratio))
    out, close = _open_out(args.out)
    try:
        _write_csv(out, ("xi", "cardinality", "ratio_to_shape"), rows)
    finally:
        if close:
            out.close()


def _cmd_approx(args) -> None:
    spec = approx.GridSpec(spacing=args.grid_spacing)
    result = approx.convergence_study(
        args.alpha, args.d, range(1, args.xi + 1), grid_spec=spec, cap=args.cap
    )
    header = (
        "xi", "rank", "l2_error", "sobolev_tail", "linf_grid", "linf_bound",
        "l2_shape", "linf_shape",
    )
    rows = [
        (r.xi, r.rank, r.l2_error, r.sobolev_tail, r.linf_grid, r.linf_bound,
         r.l2_shape, r.linf_shape)
        for r in result.rows
    ]
    out, close = _open_out(args.out)
    try:
        if args.format == "csv":
            _write_csv(out, header, rows)
        else:
            _write_json(out, {
                "alpha": args.alpha,
                "d": args.d,
                "coefficient_exponent": result.exponent,
                "rows": [dict(zip(header, row)) for row in rows],
                "l2_slope_vs_rank": result.l2_slope_vs_rank,
                "l2_slope_log_corrected": result.l2_slope_log_corrected,
            })
    finally:
        if close:
            out.close()


def _cmd_assemble(args) -> None:
    plan = assembler.build_budget(args.n, args.a, args.delta, args.d, cap=args.cap)
    out, close = _open_out(args.out)
    try:
        _write_json(out, plan.to_json_dict())
    finally:
        if close:
            out.close()


def _cmd_envelope(args) -> None:
    value = assembler.assemble_envelope(
        args.n, args.a, args.b, args.p, args.q, args.theta, args.d, cap=args.cap
    )
    normalized = value * args.n**args.a * math.log(args.n) ** (-args.b)
    out, close = _open_out(args.out)
    try:
        _write_json(out, {
            "n": args.n, "a": args.a, "b": args.b, "p": args.p, "q": args.q,
            "theta": args.theta, "d": args.d,
            "delta": assembler.choose_delta(args.p, args.q, args.theta),
            "envelope": value,
            "normalized": normalized,
        })
    finally:
        if close:
            out.close()


def _nikolskii_degrees(m_max: int) -> list[int]:
    degrees = []
    m = 4
    while m <= m_max:
        degrees.append(m)
        m *= 2
    return degrees or [m_max]


def _cmd_nikolskii(args) -> None:
    sweep = bernstein.nikolskii_sweep(
        _nikolskii_degrees(args.n_max), args.n, seed=args.seed,
        grid_spacing=args.grid_spacing,
    )
    out, close = _open_out(args.out)
    try:
        if args.format == "csv":
            _write_csv(
                out,
                ("m", "trials", "seed", "max_ratio", "mean_ratio"),
                [(r.m, r.trials, r.seed, r.max_ratio, r.mean_ratio) for r in sweep.records],
            )
        else:
            _write_json(out, {
                "seed": args.seed,
                "trials": args.n,
                "grid_spacing": args.grid_spacing,
                "records": [
                    {"m": r.m, "max_ratio": r.max_ratio, "mean_ratio": r.mean_ratio}
                    for r in sweep.records
                ],
                "fitted_exponent": sweep.fitted_exponent,
            })
    finally:
        if close:
            out.close()


def _cmd_bernstein(args) -> None:
    spec = approx.GridSpec(spacing=args.grid_spacing, margin=4.0)
    xis = list(range(min(2, args.xi), args.xi + 1))
    records = [
        bernstein.bernstein_lower_estimate(
            args.alpha, xi, args.d, grid_spec=spec, seed=args.seed, cap=args.cap
        )
        for xi in xis
    ]
    if len(records) >= 2:
        import numpy as np

        slope = float(np.polyfit(xis, [math.log2(r.estimate) for r in records], 1)[0])
    else:
        slope = math.nan
    out, close = _open_out(args.out)
    try:
        if args.format == "csv":
            _write_csv(
                out,
                ("xi", "n", "seed", "estimate", "witness_upper", "shape", "grid_points"),
                [(xi, r.n, r.seed, r.estimate, r.witness_upper, r.shape, r.grid_points)
                 for xi, r in zip(xis, records)],
            )
        else:
            _write_json(out, {
                "alpha": args.alpha,
                "d": args.d,
                "seed": args.seed,
                "records": [
                    {"xi": xi, "n": r.n, "estimate": r.estimate,
                     "witness_upper": r.witness_upper, "shape": r.shape,
                     "grid_points": r.grid_points}
                    for xi, r in zip(xis, records)
                ],
                "log2_slope": slope,
            })
    finally:
        if close:
            out.close()


def _cmd_rates(args) -> None:
    exponent = widths.rate_exponent(args.kind, args.p, args.q, args.alpha, args.d)
    out, close = _open_out(args.out)
    try:
        out.write(f"a={_fmt(exponent.a)} b={_fmt(exponent.b)}\n")
    finally:
        if close:
            out.close()


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gausswidths",
        description="Widths, hyperbolic-cross approximation and budget "
        "assembly for Gaussian-weighted Sobolev embeddings.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--out", default=None, help="output path (default stdout)")
        p.add_argument("--cap", type=int, default=None,
                       help="resource cap override (also env HW_CAP)")

    p = sub.add_parser("widths", help="exact width sequence and asymptotic ratio")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--n-max", type=int, required=True)
    add_common(p)
    p.set_defaults(func=_cmd_widths)

    p = sub.add_parser("count", help="counting function with closed-form bounds")
    p.add_argument("--r-max", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    add_common(p)
    p.set_defaults(func=_cmd_count)

    p = sub.add_parser("cross", help="hyperbolic cross cardinalities")
    p.add_argument("--xi", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    add_common(p)
    p.set_defaults(func=_cmd_cross)

    p = sub.add_parser("approx", help="truncation error sweep")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--xi", type=int, required=True, help="largest truncation radius")
    p.add_argument("--grid-spacing", type=float, default=0.02)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    add_common(p)
    p.set_defaults(func=_cmd_approx)

    p = sub.add_parser("assemble", help="budget allocation plan as JSON")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--d", type=int, required=True)
    add_common(p)
    p.set_defaults(func=_cmd_assemble)

    p = sub.add_parser("envelope", help="assembled error envelope as JSON")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--b", type=float, required=True)
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--q", type=float, required=True)
    p.add_argument("--theta", type=float, default=1.5)
    p.add_argument("--d", type=int, required=True)
    add_common(p)
    p.set_defaults(func=_cmd_envelope)

    p = sub.add_parser("nikolskii", help="weighted polynomial ratio sweep")
    p.add_argument("--n", type=int, default=50, help="trials per degree")
    p.add_argument("--n-max", type=int, default=256, help="largest degree (sweep 4,8,...)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--grid-spacing", type=float, default=0.01)
    p.add_argument("--format", choices=("csv", "json"), default="json")
    add_common(p)
    p.set_defaults(func=_cmd_nikolskii)

    p = sub.add_parser("bernstein", help="subspace lower-bound estimates")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--xi", type=int, required=True, help="largest cross radius")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--grid-spacing", type=float, default=0.05)
    p.add_argument("--format", choices=("csv", "json"), default="json")
    add_common(p)
    p.set_defaults(func=_cmd_bernstein)

    p = sub.add_parser("rates", help="rate exponents for a covered regime")
    p.add_argument("--kind", required=True, choices=("a", "b", "c", "d", "e", "x"))
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--q", type=float, required=True)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--d", type=int, required=True)
    add_common(p)
    p.set_defaults(func=_cmd_rates)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except widths.RegimeNotCoveredError as exc:
        print(f"error: regime-not-covered: {exc}", file=sys.stderr)
        return 1
    except ResourceCapError as exc:
        print(f"error: resource-cap: {exc}", file=sys.stderr)
        return 1
    except (ValueError, ArithmeticError) as exc:
        print(f"error: invalid-parameter: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
