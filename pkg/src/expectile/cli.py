"""Command line interface: compute expectiles, dump traces, benchmark methods.

Delimited output (CSV by default, JSON on request) goes to stdout or to
``--output``.  The trace and bench subcommands can additionally render
matplotlib figures next to the delimited output via ``--plot``.

Exit codes: 0 success, 2 ingestion or usage error, 3 when any solve hit the
iteration cap, failed to bracket, or methods disagreed beyond tolerance.
"""

from __future__ import annotations

import argparse
import contextlib
import csv
import json
import math
import sys
from pathlib import Path
from typing import Sequence

import numpy as np

from .api import solve
from .distributions import (
    AlphaLevel,
    DistributionOracle,
    EmpiricalDistribution,
    EmptySample,
    NonFiniteDatum,
    NormalDistribution,
    PointMassDistribution,
    UniformDistribution,
    make_empirical,
)
from .maps import one_sided_map, two_sided_map
from .solvers import (
    BracketingFailed,
    ExpectileResult,
    Method,
    SolverConfig,
    Termination,
)

EXIT_OK = 0
EXIT_INGEST = 2
EXIT_SOLVE = 3

AGREEMENT_RTOL = 1e-8
METHOD_ORDER = [
    Method.ONE_SIDED,
    Method.TWO_SIDED,
    Method.BISECTION,
    Method.SAMPLE_ONE_SIDED,
    Method.SAMPLE_TWO_SIDED,
]

COMPUTE_FIELDS = ["alpha", "method", "value", "iterations", "termination", "foc_residual"]
TRACE_FIELDS = ["alpha", "method", "iteration", "x", "residual"]
CURVE_FIELDS = ["alpha", "method", "x", "map_value", "increment"]
BENCH_FIELDS = ["alpha", "method", "x0", "value", "iterations", "termination", "delta"]


class ParseError(ValueError):
    """Input file did not parse as numbers."""


class InvalidSpec(ValueError):
    """Distribution spec or option value not recognized."""


def parse_distribution_spec(spec: str) -> DistributionOracle:
    """Build an analytic oracle from normal:MU,SIGMA | uniform:A,B | point:C."""
    name, sep, argstr = spec.partition(":")
    if not sep:
        raise InvalidSpec(f"expected FAMILY:ARGS, got {spec!r}")
    try:
        args = [float(tok) for tok in argstr.split(",")]
    except ValueError:
        raise InvalidSpec(f"bad numeric arguments in {spec!r}") from None
    try:
        if name == "normal" and len(args) == 2:
            return NormalDistribution(args[0], args[1])
        if name == "uniform" and len(args) == 2:
            return UniformDistribution(args[0], args[1])
        if name == "point" and len(args) == 1:
            return PointMassDistribution(args[0])
    except ValueError as exc:
        raise InvalidSpec(str(exc)) from None
    raise InvalidSpec(f"unknown distribution spec {spec!r}")


def load_sample(path: str | Path) -> EmpiricalDistribution:
    """Read numbers from UTF-8 text, one per line or comma separated.

    A non-numeric first line is treated as a header and skipped; any later
    non-numeric line raises :class:`ParseError` with its line number.
    """
    raw = Path(path).read_text(encoding="utf-8")
    numbers: list[float] = []
    for lineno, line in enumerate(raw.splitlines(), start=1):
        stripped = line.strip()
        if not stripped:
            continue
        tokens = [t.strip() for t in stripped.split(",") if t.strip()]
        row: list[float] = []
        ok = True
        for tok in tokens:
            try:
                row.append(float(tok))
            except ValueError:
                ok = False
                break
        if not ok:
            if lineno == 1 and not numbers:
                continue  # header row
            raise ParseError(f"{path}:{lineno}: not a number: {stripped!r}")
        numbers.extend(row)
    return make_empirical(numbers)


def resolve_x0(policy: str, d: DistributionOracle, alpha: AlphaLevel) -> float | None:
    """mean -> None (solver default), quantile -> order statistic, else literal."""
    if policy == "mean":
        return None
    if policy == "quantile":
        if not isinstance(d, EmpiricalDistribution):
            raise InvalidSpec("the quantile starting point requires sample input")
        index = max(1, math.ceil(alpha.value * d.count))
        return d.values[index - 1]
    try:
        return float(policy)
    except ValueError:
        raise InvalidSpec(
            f"x0 must be 'mean', 'quantile' or a number, got {policy!r}"
        ) from None


def methods_for(method: str, d: DistributionOracle) -> list[Method]:
    if method == "all":
        if isinstance(d, EmpiricalDistribution):
            return list(METHOD_ORDER)
        return [Method.ONE_SIDED, Method.TWO_SIDED, Method.BISECTION]
    m = Method(method)
    if not isinstance(d, EmpiricalDistribution) and m in (
        Method.SAMPLE_ONE_SIDED,
        Method.SAMPLE_TWO_SIDED,
    ):
        raise InvalidSpec(f"{m.value} requires sample input")
    return [m]


def fmt(x: float) -> str:
    """15 significant digits, full double precision for the golden values."""
    return f"{x:.15g}"


def _roundtrip(x: float) -> float:
    return float(fmt(x))


def write_rows(rows, fieldnames, float_fields, output_format, stream) -> None:
    if output_format == "json":
        clean = [
            {
                k: (_roundtrip(row[k]) if k in float_fields else row[k])
                for k in fieldnames
            }
            for row in rows
        ]
        json.dump(clean, stream, indent=2)
        stream.write("\n")
    else:
        writer = csv.writer(stream)
        writer.writerow(fieldnames)
        for row in rows:
            writer.writerow(
                [fmt(row[k]) if k in float_fields else row[k] for k in fieldnames]
            )


def _out_stream(output: str | None):
    if output:
        return open(output, "w", encoding="utf-8", newline="")
    return contextlib.nullcontext(sys.stdout)


def _check_agreement(d, results: dict[Method, ExpectileResult], alpha) -> str | None:
    values = [r.value for r in results.values()]
    scale = 1.0 + abs(d.mean()) + max(abs(v) for v in values)
    spread = max(values) - min(values)
    if spread > AGREEMENT_RTOL * scale:
        return (
            f"methods disagree at alpha={alpha.value:g}: "
            f"spread {spread:.3e} exceeds {AGREEMENT_RTOL:g}*scale"
        )
    return None


def _ingest(args) -> DistributionOracle:
    if getattr(args, "input", None):
        return load_sample(args.input)
    return parse_distribution_spec(args.dist)


_INGEST_ERRORS = (ParseError, InvalidSpec, EmptySample, NonFiniteDatum, OSError, ValueError)


def cmd_compute(args) -> int:
    try:
        d = _ingest(args)
        methods = methods_for(args.method, d)
    except _INGEST_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INGEST
    cfg = SolverConfig(tolerance=args.tol, max_iterations=args.max_iter)
    rows = []
    status = EXIT_OK
    for alpha in args.alphas:
        try:
            x0 = resolve_x0(args.x0, d, alpha)
        except InvalidSpec as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_INGEST
        results: dict[Method, ExpectileResult] = {}
        for m in methods:
            try:
                res = solve(alpha, d, method=m, x0=x0, config=cfg)
            except BracketingFailed as exc:
                print(f"error: {exc}", file=sys.stderr)
                return EXIT_SOLVE
            results[m] = res
            rows.append(
                {
                    "alpha": alpha.value,
                    "method": m.value,
                    "value": res.value,
                    "iterations": res.iterations,
                    "termination": res.termination.value,
                    "foc_residual": res.foc_residual,
                }
            )
            if res.termination is Termination.MAX_ITERATIONS_HIT:
                print(
                    f"warning: {m.value} hit the iteration cap at "
                    f"alpha={alpha.value:g}",
                    file=sys.stderr,
                )
                status = EXIT_SOLVE
        if len(results) > 1:
            complaint = _check_agreement(d, results, alpha)
            if complaint:
                print(f"error: {complaint}", file=sys.stderr)
                status = EXIT_SOLVE
    with _out_stream(args.output) as stream:
        write_rows(
            rows,
            COMPUTE_FIELDS,
            {"alpha", "value", "foc_residual"},
            args.format,
            stream,
        )
    return status


def _curve_rows(
    d: EmpiricalDistribution, alpha: AlphaLevel, method: Method, points: int = 257
) -> list[dict]:
    """Sample the relevant map over the sample range, breakpoints included."""
    lo, hi = d.support_bounds()
    if lo == hi:
        grid = [lo]
    else:
        grid = sorted(set(np.linspace(lo, hi, points).tolist()) | set(d.values))
    one_sided = method in (Method.ONE_SIDED, Method.SAMPLE_ONE_SIDED)
    rows = []
    for x in grid:
        value = (
            one_sided_map(alpha, x, d) if one_sided else two_sided_map(alpha, x, d)
        )
        rows.append(
            {
                "alpha": alpha.value,
                "method": method.value,
                "x": x,
                "map_value": value,
                "increment": value - x,
            }
        )
    return rows


def _curve_path(output: str) -> Path:
    p = Path(output)
    return p.with_name(p.stem + ".curve" + (p.suffix or ".csv"))


def cmd_trace(args) -> int:
    try:
        d = _ingest(args)
        methods = methods_for(args.method, d)
        if args.curve and not args.output:
            raise InvalidSpec("--curve requires --output (curve goes next to it)")
        if args.curve and not isinstance(d, EmpiricalDistribution):
            raise InvalidSpec("--curve requires sample input")
    except _INGEST_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INGEST
    m = methods[0]
    cfg = SolverConfig(
        tolerance=args.tol, max_iterations=args.max_iter, record_trace=True
    )
    rows = []
    curve_rows = []
    plot_runs = []
    status = EXIT_OK
    for alpha in args.alphas:
        try:
            x0 = resolve_x0(args.x0, d, alpha)
        except InvalidSpec as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_INGEST
        try:
            res = solve(alpha, d, method=m, x0=x0, config=cfg)
        except BracketingFailed as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_SOLVE
        if res.termination is Termination.MAX_ITERATIONS_HIT:
            print(
                f"warning: {m.value} hit the iteration cap at alpha={alpha.value:g}",
                file=sys.stderr,
            )
            status = EXIT_SOLVE
        for i, (xv, rv) in enumerate(zip(res.trace.iterates, res.trace.residuals)):
            rows.append(
                {
                    "alpha": alpha.value,
                    "method": m.value,
                    "iteration": i,
                    "x": xv,
                    "residual": rv,
                }
            )
        run_curve = None
        if (args.curve or args.plot) and isinstance(d, EmpiricalDistribution):
            run_curve = _curve_rows(d, alpha, m)
            curve_rows.extend(run_curve)
        plot_runs.append(
            {
                "alpha": alpha.value,
                "method": m.value,
                "iterates": list(res.trace.iterates),
                "value": res.value,
                "curve": (
                    [(c["x"], c["increment"]) for c in run_curve]
                    if run_curve
                    else None
                ),
            }
        )
    with _out_stream(args.output) as stream:
        write_rows(rows, TRACE_FIELDS, {"alpha", "x", "residual"}, args.format, stream)
    if args.curve:
        with open(_curve_path(args.output), "w", encoding="utf-8", newline="") as f:
            write_rows(
                curve_rows,
                CURVE_FIELDS,
                {"alpha", "x", "map_value", "increment"},
                args.format,
                f,
            )
    if args.plot:
        from . import plotting

        plotting.render_trace_figure(plot_runs, args.plot)
    return status


def draw_sample(base: DistributionOracle, rng: np.random.Generator, n: int) -> list[float]:
    if isinstance(base, NormalDistribution):
        return [float(v) for v in rng.normal(base.mu, base.sigma, n)]
    if isinstance(base, UniformDistribution):
        return [float(v) for v in rng.uniform(base.lower, base.upper, n)]
    if isinstance(base, PointMassDistribution):
        return [base.location] * n
    raise InvalidSpec("bench needs an analytic distribution spec")


def cmd_bench(args) -> int:
    try:
        base = parse_distribution_spec(args.dist)
        if args.n < 1:
            raise InvalidSpec(f"--n must be positive, got {args.n}")
        rng = np.random.default_rng(args.seed)
        d = make_empirical(draw_sample(base, rng, args.n))
    except _INGEST_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INGEST
    cfg = SolverConfig(
        tolerance=args.tol,
        max_iterations=args.max_iter,
        record_trace=bool(args.plot),
    )
    rows = []
    plot_groups = []
    status = EXIT_OK
    for alpha in args.alphas:
        try:
            x0 = resolve_x0(args.x0, d, alpha)
        except InvalidSpec as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_INGEST
        results: dict[Method, ExpectileResult] = {}
        for m in METHOD_ORDER:
            results[m] = solve(alpha, d, method=m, x0=x0, config=cfg)
            if results[m].termination is Termination.MAX_ITERATIONS_HIT:
                print(
                    f"warning: {m.value} hit the iteration cap at "
                    f"alpha={alpha.value:g}",
                    file=sys.stderr,
                )
                status = EXIT_SOLVE
        reference = results[Method.BISECTION].value
        start = d.mean() if x0 is None else x0
        for m in METHOD_ORDER:
            res = results[m]
            rows.append(
                {
                    "alpha": alpha.value,
                    "method": m.value,
                    "x0": start,
                    "value": res.value,
                    "iterations": res.iterations,
                    "termination": res.termination.value,
                    "delta": abs(res.value - reference),
                }
            )
        complaint = _check_agreement(d, results, alpha)
        if complaint:
            print(f"error: {complaint}", file=sys.stderr)
            status = EXIT_SOLVE
        if args.plot:
            plot_groups.append(
                (
                    alpha.value,
                    [
                        (m.value, list(results[m].trace.iterates), results[m].value)
                        for m in METHOD_ORDER
                    ],
                )
            )
    with _out_stream(args.output) as stream:
        write_rows(
            rows,
            BENCH_FIELDS,
            {"alpha", "x0", "value", "delta"},
            args.format,
            stream,
        )
    if args.plot:
        from . import plotting

        plotting.render_bench_figure(plot_groups, args.plot)
    return status


def _add_source_arguments(p: argparse.ArgumentParser) -> None:
    source = p.add_mutually_exclusive_group(required=True)
    source.add_argument(
        "--input", help="text file of numbers, newline or comma separated"
    )
    source.add_argument(
        "--dist",
        help="analytic distribution spec: normal:MU,SIGMA | uniform:A,B | point:C",
    )


def _add_run_arguments(p: argparse.ArgumentParser) -> None:
    p.add_argument(
        "--alpha", required=True, help="comma separated levels in (0,1)"
    )
    p.add_argument(
        "--x0",
        default="mean",
        help="starting point: 'mean', 'quantile', or a number (default mean)",
    )
    p.add_argument("--tol", type=float, default=1e-12, help="stopping tolerance")
    p.add_argument(
        "--max-iter", type=int, default=10_000, help="iteration cap per solve"
    )
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.add_argument("--output", "-o", help="write to this file instead of stdout")


_METHOD_CHOICES = [m.value for m in METHOD_ORDER]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="expectile",
        description=(
            "Compute expectiles of a data file or an analytic distribution "
            "via fixed-point iterations, with traces and benchmarks."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    compute = sub.add_parser(
        "compute", help="expectile values per level and method"
    )
    _add_source_arguments(compute)
    compute.add_argument(
        "--method", default="two_sided", choices=_METHOD_CHOICES + ["all"]
    )
    _add_run_arguments(compute)

    trace = sub.add_parser(
        "trace", help="per-iteration trace, plot-ready; optional map curve"
    )
    _add_source_arguments(trace)
    trace.add_argument("--method", default="two_sided", choices=_METHOD_CHOICES)
    _add_run_arguments(trace)
    trace.add_argument(
        "--curve",
        action="store_true",
        help="also write the sampled map curve next to --output",
    )
    trace.add_argument(
        "--plot", help="render a figure of curve and iterates to this path"
    )

    bench = sub.add_parser(
        "bench", help="seeded synthetic benchmark comparing all methods"
    )
    bench.add_argument(
        "--dist",
        required=True,
        help="analytic family to sample from: normal:MU,SIGMA | uniform:A,B | point:C",
    )
    bench.add_argument(
        "--n", type=int, default=1000, help="number of synthetic points"
    )
    bench.add_argument(
        "--seed", type=int, default=0, help="generator seed (default 0)"
    )
    _add_run_arguments(bench)
    bench.add_argument(
        "--plot", help="render per-level convergence paths to this path"
    )
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        tokens = [tok for tok in args.alpha.split(",") if tok.strip()]
        args.alphas = [AlphaLevel(float(tok)) for tok in tokens]
        if not args.alphas:
            raise ValueError("no alpha levels given")
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INGEST
    if args.command == "compute":
        return cmd_compute(args)
    if args.command == "trace":
        return cmd_trace(args)
    return cmd_bench(args)


if __name__ == "__main__":
    sys.exit(main())
