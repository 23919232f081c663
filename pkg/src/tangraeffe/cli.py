"""Command-line front end: ``solve``, ``bench`` and ``diagram`` subcommands.

Exit codes: 0 success, 2 input error, 3 numeric failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import statistics
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .diagram import corner_threshold, strict_convex_hull, write_diagram_csv
from .graeffe import init_jet, tangent_graeffe_renorm
from .oracle import aberth_roots, match_rootsets
from .poly import (
    PolyFormatError,
    Polynomial,
    backward_error,
    deflate_zero_roots,
    gen_chebyshev,
    gen_kostlan,
    gen_perfidious,
    read_poly,
)
from .solver import RHO_FLOOR, SolveError, SolveOptions, solve

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NUMERIC = 3

SUITES = ("kostlan-real", "kostlan-complex", "perfidious", "chebyshev")
DEFAULT_DEGREES = {
    "kostlan-real": [50, 100, 200],
    "kostlan-complex": [50, 100, 200],
    "perfidious": [10, 15, 20],
    "chebyshev": [10, 15, 20, 25, 30, 35],
}
METRICS = {
    "kostlan-real": ("time_s", "oracle_match", "solver_backward", "oracle_backward"),
    "kostlan-complex": ("time_s", "oracle_match", "solver_backward", "oracle_backward"),
    "perfidious": ("time_s", "round_error"),
    "chebyshev": ("time_s", "index_error"),
}
REPEATS = 3


class InputError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    subcommand: str
    input_path: str | None
    mode: str | None
    options: SolveOptions
    output: str = "json"
    levels: int = 10


def _options(args) -> SolveOptions:
    try:
        return SolveOptions(
            max_level=args.max_level,
            root_rtol=args.rtol,
            polish=not args.no_polish,
            seed=args.seed,
            mode=args.mode,
        )
    except ValueError as e:
        raise InputError(str(e)) from None


def _load(path: str) -> Polynomial:
    try:
        return read_poly(path)
    except PolyFormatError as e:
        raise InputError(f"{path}: {e}") from None
    except (OSError, ValueError) as e:
        raise InputError(f"{path}: {e}") from None


# -- solve ------------------------------------------------------------------


def _format_report(report, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(report.to_dict(), indent=2) + "\n"
    buf = io.StringIO()
    if fmt == "csv":
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["re", "im", "backward_error"])
        for z, e in zip(report.roots, report.backward_errors):
            w.writerow([repr(float(z.real)), repr(float(z.imag)), repr(float(e))])
        return buf.getvalue()
    for z, e in zip(report.roots, report.backward_errors):
        buf.write(f"{z.real: .17g} {z.imag:+.17g}i  (backward error {e:.2e})\n")
    if report.zero_root_multiplicity:
        buf.write(f"0 with multiplicity {report.zero_root_multiplicity}\n")
    buf.write(
        f"stop: {report.stop_reason.value} after {report.iterations_used} levels, "
        f"theta = {report.theta_used!r}\n"
    )
    return buf.getvalue()


def run_solve(config: RunConfig, out=None) -> int:
    out = out or sys.stdout
    p = _load(config.input_path)
    if config.mode == "real" and not p.is_real:
        raise InputError("--mode real needs a real polynomial")
    if p.degree < 1:
        raise InputError("degree must be >= 1")
    report = solve(p, config.options)
    out.write(_format_report(report, config.output))
    return EXIT_OK


# -- diagram ----------------------------------------------------------------


def diagram_rows(p: Polynomial, levels: int, rho_initial: float = 2.0):
    """``(N, i, r_i, is_corner)`` for ``N = 1..levels`` on the untransformed input."""
    q, _ = deflate_zero_roots(p)
    if q.degree < 1:
        raise InputError("nothing to plot: the polynomial is a monomial")
    d = q.degree
    jet = init_jet(q)
    rho = rho_initial
    rows = []
    for _ in range(levels):
        jet = tangent_graeffe_renorm(jet)
        N = jet.level
        corners = set(strict_convex_hull(N, d, jet.r, rho).corners)
        rows.extend((N, i, float(jet.r[i]), i in corners) for i in range(d + 1))
        if N > corner_threshold(d, rho):
            rho = max(math.sqrt(rho), RHO_FLOOR)
    return rows


def run_diagram(config: RunConfig, out=None) -> int:
    out = out or sys.stdout
    p = _load(config.input_path)
    write_diagram_csv(out, diagram_rows(p, config.levels, config.options.rho_initial))
    return EXIT_OK


# -- bench ------------------------------------------------------------------


def _generate(suite: str, d: int, seed: int) -> Polynomial:
    if suite == "kostlan-real":
        return gen_kostlan(d, seed, real=True)
    if suite == "kostlan-complex":
        return gen_kostlan(d, seed, real=False)
    if suite == "perfidious":
        return gen_perfidious(d)
    return gen_chebyshev(d)


def perfidious_error(roots) -> float:
    roots = np.asarray(roots, dtype=complex)
    return float(np.max(np.abs(roots - np.round(roots.real))))


def chebyshev_index_error(roots) -> float:
    """``max |m - round m|`` with ``m = (d arccos z - pi/2)/pi``."""
    roots = np.asarray(roots, dtype=complex)
    d = roots.size
    m = (d * np.arccos(roots) - np.pi / 2) / np.pi
    return float(np.max(np.abs(m - np.round(m.real))))


def _all_roots(report) -> np.ndarray:
    return np.concatenate([np.zeros(report.zero_root_multiplicity, dtype=complex), report.roots])


def bench_cell(suite: str, d: int, seed: int, opts: SolveOptions, timed: bool = True) -> dict:
    """Metric name -> (value, status) for one cell."""
    metrics = METRICS[suite]
    try:
        p = _generate(suite, d, seed)
        times = []
        for _ in range(REPEATS if timed else 1):
            t0 = time.perf_counter()
            report = solve(p, opts)
            times.append(time.perf_counter() - t0)
    except (SolveError, ArithmeticError, ValueError) as e:
        return {m: (math.nan, f"error: {e}") for m in metrics}
    roots = _all_roots(report)
    out = {"time_s": (statistics.median(times), "ok") if timed else (math.nan, "untimed")}
    if suite.startswith("kostlan"):
        oracle = aberth_roots(p)
        out["oracle_match"] = (match_rootsets(roots, oracle.roots), "ok")
        out["solver_backward"] = (float(np.max(report.backward_errors)), "ok")
        ob = max(backward_error(p, z) for z in oracle.roots)
        out["oracle_backward"] = (ob, "ok" if oracle.converged else "oracle_unconverged")
    elif suite == "perfidious":
        out["round_error"] = (perfidious_error(roots), "ok")
    else:
        out["index_error"] = (chebyshev_index_error(roots), "ok")
    return out


def scaling_summary(rows) -> list[tuple]:
    """``(suite, d, 2d, time(2d)/time(d))`` from median cell times."""
    med = {}
    for suite, d, _seed, metric, value, status in rows:
        if metric == "time_s" and status == "ok":
            med.setdefault((suite, d), []).append(value)
    med = {k: statistics.median(v) for k, v in med.items()}
    out = []
    for (suite, d), t in sorted(med.items()):
        t2 = med.get((suite, 2 * d))
        if t2 is not None and t > 0:
            out.append((suite, d, 2 * d, t2 / t))
    return out


def run_bench(suites, degrees, seeds, opts: SolveOptions, parallel: bool = False,
              out=None, summary_out=None) -> int:
    out = out or sys.stdout
    summary_out = summary_out or sys.stderr
    cells = []
    for suite in suites:
        s_seeds = seeds if suite.startswith("kostlan") else [0]
        for d in degrees.get(suite, DEFAULT_DEGREES[suite]):
            cells.extend((suite, d, seed) for seed in s_seeds)
    if parallel:
        with ThreadPoolExecutor() as pool:
            results = list(pool.map(lambda c: bench_cell(*c, opts, timed=False), cells))
    else:
        results = [bench_cell(*c, opts) for c in cells]
    rows = []
    for (suite, d, seed), res in zip(cells, results):
        for metric in METRICS[suite]:
            value, status = res[metric]
            rows.append((suite, d, seed, metric, value, status))
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["suite", "degree", "seed", "metric", "value", "status"])
    for suite, d, seed, metric, value, status in rows:
        w.writerow([suite, d, seed, metric, repr(float(value)), status])
    sw = csv.writer(summary_out, lineterminator="\n")
    sw.writerow(["suite", "degree", "double_degree", "time_ratio"])
    for row in scaling_summary(rows):
        sw.writerow([row[0], row[1], row[2], f"{row[3]:.3f}"])
    return EXIT_OK


# -- argument parsing -------------------------------------------------------


def _add_solver_flags(sp):
    sp.add_argument("--mode", choices=("real", "complex"), default=None)
    sp.add_argument("--max-level", type=int, default=SolveOptions.max_level)
    sp.add_argument("--rtol", type=float, default=SolveOptions.root_rtol)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--no-polish", action="store_true")


def _int_list(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="tangraeffe", description="Polynomial roots by renormalized tangent Graeffe iteration."
    )
    sub = ap.add_subparsers(dest="subcommand", required=True)

    sp = sub.add_parser("solve", help="solve a polynomial read from a file")
    sp.add_argument("input", help="polynomial text file ('-' is not supported)")
    _add_solver_flags(sp)
    sp.add_argument("--output", choices=("json", "csv", "text"), default="json")

    dp = sub.add_parser("diagram", help="dump renormalized Newton diagrams as CSV")
    dp.add_argument("input")
    dp.add_argument("--levels", type=int, default=10)

    bp = sub.add_parser("bench", help="run the benchmark suites, CSV on stdout")
    bp.add_argument("--suite", action="append", choices=SUITES,
                    help="repeatable; default runs all suites")
    bp.add_argument("--degrees", type=_int_list, default=None,
                    help="comma-separated degrees, applied to every selected suite")
    bp.add_argument("--seeds", type=int, default=10, help="Kostlan seeds 0..n-1")
    _add_solver_flags(bp)
    bp.add_argument("--parallel", action="store_true",
                    help="fan cells across threads; timings are then not reported")
    bp.add_argument("--summary", default=None,
                    help="write the scaling summary here instead of stderr")
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_INPUT
    try:
        opts = SolveOptions() if args.subcommand == "diagram" else _options(args)
        if args.subcommand == "solve":
            cfg = RunConfig("solve", args.input, args.mode, opts, args.output)
            return run_solve(cfg)
        if args.subcommand == "diagram":
            if args.levels < 1:
                raise InputError("--levels must be positive")
            cfg = RunConfig("diagram", args.input, None, opts, "csv", args.levels)
            return run_diagram(cfg)
        suites = args.suite or list(SUITES)
        degrees = {s: args.degrees for s in suites} if args.degrees else {}
        if args.seeds < 1:
            raise InputError("--seeds must be positive")
        if args.summary:
            with open(args.summary, "w", newline="") as fh:
                return run_bench(suites, degrees, list(range(args.seeds)), opts,
                                 args.parallel, summary_out=fh)
        return run_bench(suites, degrees, list(range(args.seeds)), opts, args.parallel)
    except InputError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except (SolveError, ArithmeticError) as e:
        print(f"numeric failure: {e}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
