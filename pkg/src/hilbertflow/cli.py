"""Command-line interface.

Subcommands: ``spectrum``, ``flow``, ``table1``, ``fixedpoint``, ``sweep``.
Settings are resolved as built-in defaults, then ``--config`` file values,
then command-line flags.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import dataclass, replace
from typing import Optional

from .analysis import DEFAULT_DEGENERACY_TOL, DEFAULT_FIXED_POINT_TOL
from .eigen import eigen_decompose
from .errors import HilbertFlowError
from .flow import FlowConfig, run_flow
from .models import ModelSpec, build_model, full_matrix
from .reference import TABLE1, compare_table1, fixed_point_regression, run_table1_flows
from .serialize import read_config_file, rows_to_csv, trace_to_csv, trace_to_json
from .sweep import SWEEP_HEADER, run_sweep, sweep_rows

logger = logging.getLogger("hilbertflow")

_MODEL_ALIASES = {
    "tight_binding": "tight_binding",
    "tb": "tight_binding",
    "degenerate": "degenerate_fixed_point",
    "degenerate_fixed_point": "degenerate_fixed_point",
    "custom": "custom",
}


@dataclass(frozen=True)
class RunConfig:
    model: ModelSpec
    flow: FlowConfig
    output_format: str = "csv"
    output_path: Optional[str] = None
    fixed_point_tol: float = DEFAULT_FIXED_POINT_TOL
    degeneracy_tol: float = DEFAULT_DEGENERACY_TOL
    workers: int = 1
    track: int = 5


def _add_common(p):
    p.add_argument("--config", help="INI file with [model], [flow], [analysis], [output] sections")
    p.add_argument("--model", choices=sorted(_MODEL_ALIASES), help="model kind")
    p.add_argument("--source", help="JSON model file for --model custom")
    p.add_argument("--n", type=int, help="initial dimension N")
    p.add_argument("--beta", type=float, help="tight-binding diagonal element")
    p.add_argument("--gamma", type=float, help="tight-binding neighbour coupling")
    p.add_argument("--g0", type=float, help="initial coupling constant")
    p.add_argument("--n-min", type=int, dest="n_min", help="final dimension of the flow")
    p.add_argument("--mode", choices=["running", "frozen"], help="ground-energy target mode")
    p.add_argument("--track", type=int, help="number of low eigenvalues recorded")
    p.add_argument("--format", choices=["csv", "json"], dest="format")
    p.add_argument("--out", help="output file (default: stdout)")
    p.add_argument("--workers", type=int, help="parallel workers (sweep)")
    p.add_argument("--fixed-point-tol", type=float, dest="fixed_point_tol")
    p.add_argument("--degeneracy-tol", type=float, dest="degeneracy_tol")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hilbertflow",
        description="Hilbert-space reduction with coupling-constant renormalisation.",
    )
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("spectrum", help="lowest eigenvalues of the initial Hamiltonian")
    _add_common(p)
    p = sub.add_parser("flow", help="run one reduction flow and write its trace")
    _add_common(p)
    p = sub.add_parser("table1", help="compare the reference tight-binding flows, both modes")
    _add_common(p)
    p = sub.add_parser("fixedpoint", help="degenerate fixed-point regression")
    _add_common(p)
    p.add_argument("--sizes", default="5,10,20,50", help="comma-separated initial dimensions")
    p = sub.add_parser("sweep", help="grid of flows over N and g0")
    _add_common(p)
    p.add_argument("--grid-n", dest="grid_n", help="comma-separated N values (default: --n)")
    p.add_argument("--grid-g0", dest="grid_g0", help="comma-separated g0 values (default: --g0)")
    p.add_argument(
        "--with-degenerate",
        action="store_true",
        help="add the degenerate fixed-point model at every (N, g0) grid point",
    )
    return parser


def _int_list(s):
    return [int(x) for x in s.split(",") if x.strip()]


def _float_list(s):
    return [float(x) for x in s.split(",") if x.strip()]


def resolve_config(args) -> RunConfig:
    """Defaults < config file < flags."""
    file_cfg = read_config_file(args.config) if args.config else {}
    m = dict(file_cfg.get("model", {}))
    f = dict(file_cfg.get("flow", {}))
    a = dict(file_cfg.get("analysis", {}))
    o = dict(file_cfg.get("output", {}))

    flag_model = {
        "kind": args.model and _MODEL_ALIASES[args.model],
        "source_path": args.source,
        "n": args.n,
        "beta": args.beta,
        "gamma": args.gamma,
        "g0": args.g0,
    }
    m.update({k: v for k, v in flag_model.items() if v is not None})
    if "kind" in m:
        m["kind"] = _MODEL_ALIASES.get(m["kind"], m["kind"])
    model = ModelSpec(**m)

    flag_flow = {"n_min": args.n_min, "target_mode": args.mode, "m_track": args.track}
    f.update({k: v for k, v in flag_flow.items() if v is not None})
    f.setdefault("n_min", 5)
    track = f.get("m_track", 5)
    # a flow can only record as many eigenvalues as its final dimension holds
    f["m_track"] = min(track, f["n_min"])
    flow = FlowConfig(**f)

    for key in ("fixed_point_tol", "degeneracy_tol"):
        if getattr(args, key) is not None:
            a[key] = getattr(args, key)
    if args.format is not None:
        o["format"] = args.format
    if args.out is not None:
        o["out"] = args.out
    if args.workers is not None:
        o["workers"] = args.workers
    fmt = o.get("format", "csv")
    if fmt not in ("csv", "json"):
        raise ValueError(f"unknown output format {fmt!r}")
    return RunConfig(
        model=model,
        flow=flow,
        output_format=fmt,
        output_path=o.get("out"),
        fixed_point_tol=a.get("fixed_point_tol", DEFAULT_FIXED_POINT_TOL),
        degeneracy_tol=a.get("degeneracy_tol", DEFAULT_DEGENERACY_TOL),
        workers=int(o.get("workers", 1)),
        track=track,
    )


def _emit(text: str, path: Optional[str]) -> None:
    if path:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _dump_json(obj) -> str:
    return json.dumps(obj, indent=2, allow_nan=False) + "\n"


def _summary_lines(trace, dims=None):
    m = trace.config.m_track
    head = f"{'n':>5} {'g':>12} " + " ".join(f"{'lambda_' + str(k):>12}" for k in range(1, m + 1))
    lines = [head]
    spectra = trace.spectra()
    for n, g in trace.couplings().items():
        if dims is not None and n not in dims:
            continue
        lam = " ".join(f"{x:12.6g}" for x in spectra[n])
        lines.append(f"{n:>5} {g:12.6g} {lam}")
    return lines


def cmd_spectrum(cfg: RunConfig) -> int:
    h = build_model(cfg.model)
    es = eigen_decompose(full_matrix(h), cfg.flow.eigen_method)
    m = min(cfg.track, h.n)
    vals = [float(x) for x in es.values[:m]]
    if cfg.output_format == "json":
        text = _dump_json({"model": cfg.model.to_dict(), "dimension": h.n, "g": h.g, "eigenvalues": vals})
    else:
        text = rows_to_csv(["index", "eigenvalue"], [[k, v] for k, v in enumerate(vals, start=1)])
    _emit(text, cfg.output_path)
    return 0


def cmd_flow(cfg: RunConfig) -> int:
    h0 = build_model(cfg.model)
    model = replace(cfg.model, n=h0.n, g0=h0.g)
    trace = run_flow(h0, cfg.flow, model=model)
    text = trace_to_json(trace) if cfg.output_format == "json" else trace_to_csv(trace)
    _emit(text, cfg.output_path)
    report = sys.stdout if cfg.output_path else sys.stderr
    print("\n".join(_summary_lines(trace)), file=report)
    if not trace.completed:
        print(f"flow terminated: {trace.termination}", file=sys.stderr)
        return 1
    return 0


def _table1_report(verdicts) -> str:
    lines = []
    for v in verdicts:
        lines.append(f"== target mode: {v.mode}  verdict: {v.status}")
        lines.append(f"{'N':>4} {'g0':>5} {'n':>4} {'quantity':>9} {'published':>10} {'computed':>10} "
                     f"{'deviation':>10} {'tol':>7}  ok")
        for c in v.cells:
            lines.append(
                f"{c.N:>4} {c.g0:>5g} {c.n:>4} {c.quantity:>9} {c.published:>10.4g} "
                f"{c.computed:>10.4f} {c.deviation:>+10.4f} {c.tolerance:>7.3f}  "
                f"{'yes' if c.passed else 'NO'}"
            )
        lines.append(f"cells failing: {len(v.failed_cells)} of {len(v.cells)}")
        for key in TABLE1:
            pub, comp, ok = v.drift_check[key]
            lines.append(
                f"N={key[0]} g0={key[1]:g}: coupling decreasing={v.g_decreasing[key]}, "
                f"ground drift at n=5 published {pub:+.4f} computed {comp:+.4f} "
                f"({'ok' if ok else 'outside 50%'}), termination: {v.terminations[key]}"
            )
        lines.append("")
    lines.append("passing modes: " + (", ".join(f"{v.mode} ({v.status})" for v in verdicts if v.status != "FAIL") or "none"))
    return "\n".join(lines) + "\n"


def cmd_table1(cfg: RunConfig) -> int:
    verdicts = [compare_table1(mode, run_table1_flows(mode)) for mode in ("frozen", "running")]
    report = _table1_report(verdicts)
    if cfg.output_path:
        header = ["mode", "N", "g0", "n", "quantity", "published", "computed", "deviation", "tolerance", "passed"]
        rows = [
            [v.mode, c.N, c.g0, c.n, c.quantity, c.published, c.computed, c.deviation, c.tolerance, c.passed]
            for v in verdicts
            for c in v.cells
        ]
        if cfg.output_format == "json":
            data = {
                "verdicts": {v.mode: v.status for v in verdicts},
                "cells": [dict(zip(header, r)) for r in rows],
            }
            _emit(_dump_json(data), cfg.output_path)
        else:
            _emit(rows_to_csv(header, rows), cfg.output_path)
    sys.stdout.write(report)
    return 0 if any(v.status != "FAIL" for v in verdicts) else 1


def cmd_fixedpoint(cfg: RunConfig, sizes) -> int:
    g0 = cfg.model.g0
    checks = [
        fixed_point_regression(
            N, g0, fixed_point_tol=cfg.fixed_point_tol, degeneracy_tol=cfg.degeneracy_tol,
            mode=cfg.flow.target_mode,
        )
        for N in sizes
    ]
    header = ["N", "n_min", "g0", "max_rel_g_change", "max_rel_ground_error",
              "global_fixed_point", "ground_multiplicity_N", "ground_multiplicity_n", "passed"]
    rows = [[c.N, c.n_min, c.g0, c.max_rel_g_change, c.max_rel_ground_error, c.global_fixed_point,
             c.initial_multiplicity, c.final_multiplicity, c.passed] for c in checks]
    if cfg.output_format == "json":
        text = _dump_json([dict(zip(header, r)) for r in rows])
    else:
        text = rows_to_csv(header, rows)
    _emit(text, cfg.output_path)
    for c in checks:
        print(
            f"N={c.N:>3} -> {c.n_min}: max |dg|/g = {c.max_rel_g_change:.2e}, "
            f"max |lambda_1 + g0|/g0 = {c.max_rel_ground_error:.2e}, "
            f"global fixed point = {c.global_fixed_point}, "
            f"ground multiplicity {c.initial_multiplicity} -> {c.final_multiplicity}: "
            f"{'PASS' if c.passed else 'FAIL'}",
            file=sys.stdout if cfg.output_path else sys.stderr,
        )
    return 0 if all(c.passed for c in checks) else 1


def cmd_sweep(cfg: RunConfig, grid_n, grid_g0, with_degenerate=False) -> int:
    n_values = _int_list(grid_n) if grid_n else [cfg.model.n]
    g_values = _float_list(grid_g0) if grid_g0 else [cfg.model.g0]
    extra = []
    if with_degenerate:
        extra = [
            ModelSpec("degenerate_fixed_point", n, g0=g) for n in n_values for g in g_values
        ]
    points = run_sweep(
        cfg.model, cfg.flow, n_values, g_values, workers=cfg.workers,
        fixed_point_tol=cfg.fixed_point_tol, extra=extra,
    )
    rows = sweep_rows(points)
    if cfg.output_format == "json":
        text = _dump_json([dict(zip(SWEEP_HEADER, r)) for r in rows])
    else:
        text = rows_to_csv(SWEEP_HEADER, rows)
    _emit(text, cfg.output_path)
    return 0 if all(p.termination == "completed" for p in points) else 1


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = resolve_config(args)
        if args.command == "spectrum":
            return cmd_spectrum(cfg)
        if args.command == "flow":
            return cmd_flow(cfg)
        if args.command == "table1":
            return cmd_table1(cfg)
        if args.command == "fixedpoint":
            return cmd_fixedpoint(cfg, _int_list(args.sizes))
        if args.command == "sweep":
            return cmd_sweep(cfg, args.grid_n, args.grid_g0, args.with_degenerate)
    except (HilbertFlowError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    parser.error(f"unknown command {args.command}")


if __name__ == "__main__":
    sys.exit(main())
