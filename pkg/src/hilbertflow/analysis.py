"""Fixed points, degeneracies and spectral stability along a flow."""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Tuple

import numpy as np

from .flow import FlowTrace

__all__ = [
    "FixedPointReport",
    "DegeneracyReport",
    "DriftRow",
    "detect_fixed_points",
    "detect_degeneracies",
    "spectrum_drift",
    "anchor_overlap_profile",
]

DEFAULT_FIXED_POINT_TOL = 1e-6
DEFAULT_DEGENERACY_TOL = 1e-8


@dataclass(frozen=True)
class FixedPointReport:
    """Steps where the coupling did not move.

    ``flagged_steps`` holds ``(dim_after, g_after, |dg|)`` per flagged step.
    """

    flagged_steps: Tuple[Tuple[int, float, float], ...]
    is_global_fixed_point: bool
    tolerance_used: float
    n_steps: int


@dataclass(frozen=True)
class DegeneracyReport:
    """Adjacent near-equal eigenvalue pairs ``(i, j, gap)`` with ``j = i + 1``."""

    pairs: Tuple[Tuple[int, int, float], ...]
    gap_tolerance: float
    spectral_scale: float

    @property
    def multiplets(self) -> List[List[int]]:
        """Index groups formed by chaining the pairs."""
        groups: List[List[int]] = []
        for i, j, _ in self.pairs:
            if groups and groups[-1][-1] == i:
                groups[-1].append(j)
            else:
                groups.append([i, j])
        return groups


@dataclass(frozen=True)
class DriftRow:
    dimension: int
    drift: Tuple[float, ...]
    max_rel_drift: float


def detect_fixed_points(trace: FlowTrace, rel_tol: float = DEFAULT_FIXED_POINT_TOL) -> FixedPointReport:
    """Flag steps with ``|g_after - g_before| <= rel_tol * max(1, |g_before|)``."""
    if not trace.steps:
        raise ValueError("trace has no steps")
    flagged = []
    for s in trace.steps:
        dg = abs(s.g_after - s.g_before)
        if dg <= rel_tol * max(1.0, abs(s.g_before)):
            flagged.append((s.dim_after, s.g_after, dg))
    return FixedPointReport(
        flagged_steps=tuple(flagged),
        is_global_fixed_point=len(flagged) == len(trace.steps),
        tolerance_used=rel_tol,
        n_steps=len(trace.steps),
    )


def detect_degeneracies(spectrum, rel_tol: float = DEFAULT_DEGENERACY_TOL) -> DegeneracyReport:
    """Adjacent pairs closer than ``rel_tol * max(1, max|spectrum|)``.

    Parameters
    ----------
    spectrum : array_like
        Eigenvalues in ascending order.
    rel_tol : float
        Gap tolerance relative to the spectral scale.

    Raises
    ------
    ValueError
        If ``spectrum`` is not sorted ascending.
    """
    lam = np.asarray(spectrum, dtype=float)
    gaps = np.diff(lam)
    if np.any(gaps < 0):
        raise ValueError("spectrum must be sorted in ascending order")
    scale = max(1.0, float(np.max(np.abs(lam)))) if lam.size else 1.0
    tol = rel_tol * scale
    pairs = tuple((int(i), int(i) + 1, float(gaps[i])) for i in np.nonzero(gaps <= tol)[0])
    return DegeneracyReport(pairs=pairs, gap_tolerance=rel_tol, spectral_scale=scale)


def spectrum_drift(trace: FlowTrace) -> List[DriftRow]:
    """Shift of each tracked eigenvalue relative to the initial spectrum, per step."""
    ref = np.asarray(trace.initial_spectrum)
    rows = []
    for s in trace.steps:
        cur = np.asarray(s.spectrum_after)
        m = min(cur.size, ref.size)
        drift = cur[:m] - ref[:m]
        floor = 1e-12 * max(1.0, float(np.max(np.abs(ref))))
        denom = np.maximum(np.abs(ref[:m]), floor)
        rows.append(DriftRow(s.dim_after, tuple(drift.tolist()), float(np.max(np.abs(drift) / denom))))
    return rows


def anchor_overlap_profile(trace: FlowTrace) -> List[Tuple[int, float]]:
    """``(dim_before, |a11|)`` per step; a sudden drop hints at a level crossing."""
    return [(s.dim_before, abs(s.build.a11)) for s in trace.steps]
