"""Command-line front end.

Exit codes: 0 success, 2 invalid arguments, 3 input/output failure,
4 no crossing of the orientable fraction on the scanned grid.
"""

from __future__ import annotations

import argparse
import sys
from contextlib import contextmanager
from pathlib import Path

from .audit import run_audit, write_audit_csv
from .core import Orientation, orient
from .experiment import (
    CSV_HEADER,
    MODELS,
    ExperimentSpec,
    NoCrossing,
    c_grid,
    estimate_crossing,
    format_record,
    run_scan,
    summarize,
)
from .hypergraph import FormatError, read_hypergraph
from .numeric import DomainError
from .threshold import OrientParams, c_star, core_prediction

EXIT_OK, EXIT_USAGE, EXIT_IO, EXIT_NO_CROSSING = 0, 2, 3, 4

DEFAULTS = {
    "k": 3,
    "l": 2,
    "c": None,
    "c_min": None,
    "c_max": None,
    "c_step": 0.01,
    "n": 100000,
    "trials": 20,
    "seed": 0,
    "model": "uniform",
    "out": None,
    "tol": 0.015,
    "jobs": 1,
}


class UsageError(Exception):
    pass


def _c_list(text: str) -> tuple:
    try:
        return tuple(float(x) for x in str(text).split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid density list {text!r}") from None


_TYPES = {
    "k": int, "l": int, "c": _c_list, "c_min": float, "c_max": float, "c_step": float,
    "n": int, "trials": int, "seed": int, "model": str, "out": str, "tol": float, "jobs": int,
}


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("common options")
    g.add_argument("--k", type=int, help="edge size (default 3)")
    g.add_argument("--l", type=int, help="orientation capacity ell (default 2)")
    g.add_argument("--c", type=_c_list, help="edge density, or comma-separated densities")
    g.add_argument("--c-min", type=float)
    g.add_argument("--c-max", type=float)
    g.add_argument("--c-step", type=float, help="grid step (default 0.01)")
    g.add_argument("--n", type=int, help="number of vertices (default 100000)")
    g.add_argument("--trials", type=int, help="trials per density (default 20)")
    g.add_argument("--seed", type=int, help="base seed (default 0)")
    g.add_argument("--model", choices=MODELS, help="random model (default uniform)")
    g.add_argument("--out", help="output file (default stdout)")
    g.add_argument("--tol", type=float, help="estimate: accepted |estimate - c*| (default 0.015)")
    g.add_argument("--jobs", type=int, help="worker processes (default 1)")
    g.add_argument("--timing", action="store_true", help="record elapsed_ms (makes output non-reproducible)")
    g.add_argument("--config", help="file of 'key = value' lines; command-line flags take precedence")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(
        prog="hyperorient",
        description="Orientability thresholds and experiments for random k-uniform hypergraphs.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("threshold", parents=[common], help="solve for xi*, c* and the core threshold")
    sub.add_parser("predict-core", parents=[common], help="predicted (ell+1)-core at density c")
    sub.add_parser("scan", parents=[common], help="Monte Carlo scan over densities, CSV output")
    sub.add_parser("estimate", parents=[common], help="empirical threshold from a scan")
    p = sub.add_parser("orient", parents=[common], help="orient a hypergraph file")
    p.add_argument("file")
    p.add_argument("--no-core", action="store_true", help="match the whole graph without peeling")
    p = sub.add_parser("audit", parents=[common], help="numerical audit of the analytic bounds, CSV output")
    p.add_argument("--full", action="store_true", help="one row per grid point instead of the worst per claim")
    p.add_argument("--f-grid", action="store_true", help="include the two-dimensional grid of f")
    return parser


def read_config(path) -> dict:
    out = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.lstrip("-").replace("-", "_")
        if key == "ell":
            key = "l"
        if key not in _TYPES:
            raise UsageError(f"{path}:{lineno}: unknown key {key!r}")
        try:
            out[key] = _TYPES[key](value)
        except (ValueError, argparse.ArgumentTypeError):
            raise UsageError(f"{path}:{lineno}: invalid value {value!r} for {key}") from None
    if "model" in out and out["model"] not in MODELS:
        raise UsageError(f"{path}: model must be one of {', '.join(MODELS)}")
    return out


def resolve(args: argparse.Namespace) -> dict:
    """Effective settings: command line, then config file, then defaults."""
    config = read_config(args.config) if args.config else {}
    opts = {}
    for key, default in DEFAULTS.items():
        value = getattr(args, key)
        if value is None:
            value = config.get(key, default)
        opts[key] = value
    opts["timing"] = args.timing
    return opts


@contextmanager
def _output(path):
    if path is None:
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def _fmt(x: float) -> str:
    return f"{x:.12g}"


def cmd_threshold(o: dict) -> int:
    t = c_star(OrientParams(o["k"], o["l"]))
    print(f"k = {t.k}")
    print(f"ell = {t.ell}")
    print(f"xi_star = {_fmt(t.xi_star)}")
    print(f"kl_minus_xi_star = {_fmt(t.gap)}")
    print(f"c_star = {_fmt(t.c_star)}")
    print(f"lambda_core = {_fmt(t.lambda_core)}")
    print(f"core_emergence_c = {_fmt(t.lambda_core / t.k)}")
    print(f"residual_xi = {t.residual_xi:.3e}")
    return EXIT_OK


def cmd_predict_core(o: dict) -> int:
    if not o["c"] or len(o["c"]) != 1:
        raise UsageError("predict-core needs a single --c")
    c = o["c"][0]
    pred = core_prediction(OrientParams(o["k"], o["l"]), None, c)
    print(f"k = {pred.k}")
    print(f"ell = {pred.ell}")
    print(f"c = {c!r}")
    if not pred.exists:
        print("no core predicted")
        return EXIT_OK
    n = o["n"]
    print(f"xi = {_fmt(pred.xi)}")
    print(f"x_bar = {_fmt(pred.x_bar)}")
    print(f"core_vertex_fraction = {_fmt(pred.n_frac)}")
    print(f"core_edges_per_vertex = {_fmt(pred.m_per_n)}")
    print(f"core_density = {_fmt(pred.density)}")
    print(f"n = {n}")
    print(f"core_vertices = {_fmt(pred.n_frac * n)}")
    print(f"core_edges = {_fmt(pred.m_per_n * n)}")
    return EXIT_OK


def _spec(o: dict) -> ExperimentSpec:
    if o["c"]:
        grid = tuple(o["c"])
    elif o["c_min"] is not None and o["c_max"] is not None:
        grid = c_grid(o["c_min"], o["c_max"], o["c_step"])
    else:
        raise UsageError("give --c, or --c-min and --c-max")
    return ExperimentSpec(o["k"], o["l"], o["model"], o["n"], grid, o["trials"], o["seed"], o["timing"])


def _scan(o: dict):
    """Run the scan, streaming the CSV; returns the per-c summaries."""
    spec = _spec(o)
    records = []
    with _output(o["out"]) as fh:
        fh.write(CSV_HEADER + "\n")
        for r in run_scan(spec, jobs=o["jobs"]):
            fh.write(format_record(r) + "\n")
            fh.flush()
            records.append(r)
    summary = summarize(records)
    log = sys.stdout if o["out"] else sys.stderr
    print("c,trials,orientable,fraction,wilson95_lo,wilson95_hi,mean_core_n,mean_core_m", file=log)
    for s in summary:
        print(
            f"{s.c!r},{s.trials},{s.orientable},{s.fraction:.4f},{s.wilson_lo:.4f},"
            f"{s.wilson_hi:.4f},{s.mean_core_n:.1f},{s.mean_core_m:.1f}",
            file=log,
        )
    return spec, summary


def cmd_scan(o: dict) -> int:
    _scan(o)
    return EXIT_OK


def cmd_estimate(o: dict) -> int:
    spec, summary = _scan(o)
    log = sys.stdout if o["out"] else sys.stderr
    try:
        est = estimate_crossing(summary)
    except NoCrossing as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NO_CROSSING
    print(f"estimate = {_fmt(est)}", file=log)
    try:
        cs = c_star(OrientParams(spec.k, spec.ell)).c_star
    except DomainError:
        return EXIT_OK
    diff = abs(est - cs)
    print(f"c_star = {_fmt(cs)}", file=log)
    print(f"abs_error = {_fmt(diff)}", file=log)
    print(f"within_tol = {'yes' if diff <= o['tol'] else 'no'} (tol {o['tol']:g})", file=log)
    return EXIT_OK


def cmd_orient(o: dict, args) -> int:
    h = read_hypergraph(args.file)
    result = orient(h, o["l"], use_core=not args.no_core)
    with _output(o["out"]) as fh:
        if isinstance(result, Orientation):
            fh.write("ORIENTABLE\n")
            fh.writelines(f"{e} {v}\n" for e, v in enumerate(result.assignment.tolist()))
        else:
            fh.write("NOT_ORIENTABLE\n")
            fh.write(" ".join(map(str, result.witness_vertices.tolist())) + "\n")
            fh.write(" ".join(map(str, result.hall_edges.tolist())) + "\n")
    return EXIT_OK


def cmd_audit(o: dict, args) -> int:
    report = run_audit(f_grid=args.f_grid)
    with _output(o["out"]) as fh:
        write_audit_csv(report, fh, full=args.full)
    failed = sorted({r.claim for r in report.rows if not r.passed})
    log = sys.stdout if o["out"] else sys.stderr
    print(f"audited {len(report.rows)} points; claims with violations: {', '.join(failed) or 'none'}", file=log)
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        o = resolve(args)
        if o["jobs"] < 1:
            raise UsageError("--jobs must be at least 1")
        if args.command == "threshold":
            return cmd_threshold(o)
        if args.command == "predict-core":
            return cmd_predict_core(o)
        if args.command == "scan":
            return cmd_scan(o)
        if args.command == "estimate":
            return cmd_estimate(o)
        if args.command == "orient":
            return cmd_orient(o, args)
        return cmd_audit(o, args)
    except (UsageError, ValueError, OverflowError) as exc:
        if isinstance(exc, FormatError):
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_IO
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
