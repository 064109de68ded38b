"""Grids of flows over initial dimension and coupling."""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from typing import Iterable, List, Optional

from .analysis import detect_fixed_points
from .flow import FlowConfig, run_flow
from .models import ModelSpec, build_model

__all__ = ["SweepPoint", "run_point", "run_sweep", "SWEEP_HEADER", "sweep_rows"]

SWEEP_HEADER = ["N", "g0", "n", "g", "lambda_1", "global_fixed_point", "termination"]


@dataclass(frozen=True)
class SweepPoint:
    N: int
    g0: float
    couplings: tuple  # ((n, g, lambda_1), ...) from the starting dimension down
    global_fixed_point: Optional[bool]
    termination: str


def run_point(model: ModelSpec, config: FlowConfig, fixed_point_tol: float = 1e-6) -> SweepPoint:
    """Run one flow; any failure is captured in ``termination``."""
    try:
        h0 = build_model(model)
        trace = run_flow(h0, config, model=model)
    except Exception as exc:  # recorded per point, sweep goes on
        return SweepPoint(model.n, model.g0, (), None, f"{type(exc).__name__}: {exc}")
    spectra = trace.spectra()
    rows = tuple((n, g, spectra[n][0]) for n, g in trace.couplings().items())
    fp = detect_fixed_points(trace, fixed_point_tol).is_global_fixed_point if trace.steps else None
    return SweepPoint(h0.n, h0.g, rows, fp, trace.termination)


def _run(args):
    return run_point(*args)


def run_sweep(
    base: ModelSpec,
    config: FlowConfig,
    n_values: Iterable[int],
    g0_values: Iterable[float],
    workers: int = 1,
    fixed_point_tol: float = 1e-6,
    extra: Iterable[ModelSpec] = (),
) -> List[SweepPoint]:
    """Flows for every ``(N, g0)`` in the grid (plus ``extra`` models).

    Points may run in parallel; the result is sorted by ``(N, g0)`` and then
    model kind, independent of completion order.
    """
    specs = [replace(base, n=int(n), g0=float(g)) for n in n_values for g in g0_values]
    specs.extend(extra)
    if not specs:
        raise ValueError("empty sweep grid")
    jobs = [(s, config, fixed_point_tol) for s in specs]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run, jobs))
    else:
        results = [_run(j) for j in jobs]
    order = sorted(range(len(specs)), key=lambda i: (specs[i].n, specs[i].g0, specs[i].kind))
    return [results[i] for i in order]


def sweep_rows(points: List[SweepPoint]) -> list:
    rows = []
    for p in points:
        if not p.couplings:
            rows.append([p.N, p.g0, None, None, None, p.global_fixed_point, p.termination])
        for n, g, lam in p.couplings:
            rows.append([p.N, p.g0, n, g, lam, p.global_fixed_point, p.termination])
    return rows
