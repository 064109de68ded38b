"""Basis reduction with coupling-constant renormalisation.

Each step removes one basis state ``e`` from ``H = diag(eps) + g h1`` and picks
a new coupling ``g'`` for the survivors such that the effective (Feshbach)
Hamiltonian of the survivors, evaluated at the pinned energy ``lam`` and
projected onto the anchor state ``0``, reproduces ``lam`` on the projected
ground state ``a``::

    eps_0 a_0 + g' F + g'^2 h1[0, e] S / (lam - eps_e - g' h1[e, e]) = lam a_0

with ``F = sum_{i != e} a_i h1[0, i]`` and ``S = sum_{i != e} a_i h1[e, i]``.
Clearing the denominator gives ``A g'^2 + B g' + C = 0`` (see
:func:`build_quadratic`), and of its two roots the one nearest the current
coupling is kept.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .eigen import EigenSystem, eigen_decompose
from .errors import (
    ComplexRootsError,
    DegenerateAnchorError,
    InvalidDimensionError,
    NearSingularDenominatorError,
    NoSolutionError,
    ResidualError,
    StepError,
)
from .models import Hamiltonian, ModelSpec, full_matrix

logger = logging.getLogger(__name__)

__all__ = [
    "FlowConfig",
    "QuadraticBuild",
    "FlowStep",
    "FlowTrace",
    "build_quadratic",
    "solve_continuity",
    "constraint_residual",
    "select_elimination",
    "projected_ground",
    "reduction_step",
    "run_flow",
    "flow_derivative",
]

TARGET_MODES = ("running", "frozen")
ELIMINATION_ORDERS = ("highest_index_first", "highest_eps_first")
TIE_POLICIES = ("smaller_magnitude",)

ANCHOR_TOL = 1e-12
LINEAR_TOL = 1e-14
DISCRIMINANT_TOL = 1e-12
DENOMINATOR_TOL = 1e-12
# Relative eigenvalue gap below which the ground level is treated as degenerate.
GROUND_DEGENERACY_TOL = 1e-10


@dataclass(frozen=True)
class FlowConfig:
    """Reduction policy.

    Attributes
    ----------
    n_min : int
        Dimension at which the flow stops.
    m_track : int
        Number of low eigenvalues recorded after every step.
    target_mode : {"frozen", "running"}
        ``"frozen"`` pins the ground energy of the initial Hamiltonian for the
        whole flow. ``"running"`` re-pins to the ground energy of the current
        Hamiltonian before each step; the current coupling then solves the
        constraint exactly, so the flow only truncates.
    anchor_index : int
        0-based basis state onto which the effective equation is projected.
    elimination_order : {"highest_index_first", "highest_eps_first"}
    residual_tol : float
        Relative bound on the direct constraint residual; multiplied by
        ``max(1, |lam|, spectral radius)``.
    continuity_tie : {"smaller_magnitude"}
    eigen_method : {"lapack", "jacobi"}
    """

    n_min: int = 5
    m_track: int = 5
    target_mode: str = "frozen"
    anchor_index: int = 0
    elimination_order: str = "highest_index_first"
    residual_tol: float = 1e-8
    continuity_tie: str = "smaller_magnitude"
    eigen_method: str = "lapack"

    def __post_init__(self):
        if self.n_min < 2:
            raise InvalidDimensionError(f"n_min must be >= 2, got {self.n_min}")
        if not 1 <= self.m_track <= self.n_min:
            raise ValueError(f"m_track must be in [1, n_min={self.n_min}], got {self.m_track}")
        if self.target_mode not in TARGET_MODES:
            raise ValueError(f"target_mode must be one of {TARGET_MODES}")
        if self.elimination_order not in ELIMINATION_ORDERS:
            raise ValueError(f"elimination_order must be one of {ELIMINATION_ORDERS}")
        if self.continuity_tie not in TIE_POLICIES:
            raise ValueError(f"continuity_tie must be one of {TIE_POLICIES}")
        if self.anchor_index < 0:
            raise ValueError("anchor_index must be non-negative")
        if not self.residual_tol > 0:
            raise ValueError("residual_tol must be positive")

    def to_dict(self) -> dict:
        return {
            "n_min": self.n_min,
            "m_track": self.m_track,
            "target_mode": self.target_mode,
            "anchor_index": self.anchor_index,
            "elimination_order": self.elimination_order,
            "residual_tol": self.residual_tol,
            "continuity_tie": self.continuity_tie,
            "eigen_method": self.eigen_method,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "FlowConfig":
        return cls(**d)


@dataclass(frozen=True)
class QuadraticBuild:
    """Intermediates and coefficients of ``a g^2 + b g + c = 0``."""

    f1n: float
    sn: float
    g1n: float
    h_nn: float
    h_1n: float
    a_coef: float
    b_coef: float
    c_coef: float
    lambda1: float
    eps_anchor: float
    eps_elim: float
    a11: float
    anchor: int
    elim: int

    def to_dict(self) -> dict:
        return dict(self.__dict__)


@dataclass(frozen=True)
class FlowStep:
    dim_before: int
    dim_after: int
    g_before: float
    g_after: float
    build: QuadraticBuild
    discriminant: float
    roots: tuple
    chosen_root_index: int
    residual: float
    residual_tol: float
    spectrum_after: tuple
    lambda1_target_next: float

    @property
    def other_root(self) -> Optional[float]:
        if len(self.roots) < 2:
            return None
        return self.roots[1 - self.chosen_root_index]

    def to_dict(self) -> dict:
        d = dict(self.__dict__)
        d["build"] = self.build.to_dict()
        d["roots"] = list(self.roots)
        d["spectrum_after"] = list(self.spectrum_after)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "FlowStep":
        d = dict(d)
        d["build"] = QuadraticBuild(**d["build"])
        d["roots"] = tuple(d["roots"])
        d["spectrum_after"] = tuple(d["spectrum_after"])
        return cls(**d)


@dataclass(frozen=True)
class FlowTrace:
    """Full trajectory of a flow.

    ``termination`` is ``"completed"`` or the message of the error that
    stopped the flow; the steps completed before the error are kept.
    """

    model: Optional[ModelSpec]
    config: FlowConfig
    initial_dim: int
    initial_g: float
    initial_spectrum: tuple
    steps: tuple = ()
    termination: str = "completed"
    error_type: Optional[str] = None

    @property
    def completed(self) -> bool:
        return self.termination == "completed"

    @property
    def final_dim(self) -> int:
        return self.steps[-1].dim_after if self.steps else self.initial_dim

    def couplings(self) -> dict:
        """Map dimension -> coupling, including the starting point."""
        out = {self.initial_dim: self.initial_g}
        for s in self.steps:
            out[s.dim_after] = s.g_after
        return out

    def spectra(self) -> dict:
        """Map dimension -> tracked low spectrum, including the starting point."""
        out = {self.initial_dim: self.initial_spectrum}
        for s in self.steps:
            out[s.dim_after] = s.spectrum_after
        return out

    def to_dict(self) -> dict:
        return {
            "model": None if self.model is None else self.model.to_dict(),
            "config": self.config.to_dict(),
            "initial_dim": self.initial_dim,
            "initial_g": self.initial_g,
            "initial_spectrum": list(self.initial_spectrum),
            "steps": [s.to_dict() for s in self.steps],
            "termination": self.termination,
            "error_type": self.error_type,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "FlowTrace":
        return cls(
            model=None if d["model"] is None else ModelSpec.from_dict(d["model"]),
            config=FlowConfig.from_dict(d["config"]),
            initial_dim=d["initial_dim"],
            initial_g=d["initial_g"],
            initial_spectrum=tuple(d["initial_spectrum"]),
            steps=tuple(FlowStep.from_dict(s) for s in d["steps"]),
            termination=d["termination"],
            error_type=d["error_type"],
        )


def build_quadratic(h: Hamiltonian, es, lambda1: float, anchor: int, elim: int) -> QuadraticBuild:
    """Coefficients of the renormalisation quadratic for eliminating ``elim``.

    Parameters
    ----------
    h : Hamiltonian
        Current Hamiltonian (dimension ``k``).
    es : EigenSystem or array_like
        Decomposition of ``full_matrix(h)``; its first column supplies the
        ground-state amplitudes. A plain vector is taken as the amplitudes.
    lambda1 : float
        Pinned target energy.
    anchor, elim : int
        Basis indices of the projection state and the eliminated state.
    """
    if anchor == elim:
        raise ValueError("anchor and eliminated state must differ")
    a = es.ground_components if isinstance(es, EigenSystem) else np.asarray(es, dtype=float)
    a11 = float(a[anchor])
    if abs(a11) < ANCHOR_TOL:
        raise DegenerateAnchorError(
            f"ground state has no overlap with anchor state {anchor} (|a11| = {abs(a11):.3e})"
        )
    h1 = h.h1
    keep = np.ones(h.n, dtype=bool)
    keep[elim] = False
    f1n = float(np.dot(a[keep], h1[anchor, keep]))
    sn = float(np.dot(a[keep], h1[elim, keep]))
    h_1n = float(h1[anchor, elim])
    h_nn = float(h1[elim, elim])
    g1n = h_1n * sn
    eps_anchor = float(h.eps[anchor])
    eps_elim = float(h.eps[elim])
    d_anchor = lambda1 - eps_anchor
    d_elim = lambda1 - eps_elim
    return QuadraticBuild(
        f1n=f1n,
        sn=sn,
        g1n=g1n,
        h_nn=h_nn,
        h_1n=h_1n,
        a_coef=g1n - h_nn * f1n,
        b_coef=a11 * h_nn * d_anchor + f1n * d_elim,
        c_coef=-a11 * d_anchor * d_elim,
        lambda1=float(lambda1),
        eps_anchor=eps_anchor,
        eps_elim=eps_elim,
        a11=a11,
        anchor=int(anchor),
        elim=int(elim),
    )


def solve_continuity(a: float, b: float, c: float, g_prev: float, tie: str = "smaller_magnitude"):
    """Real root of ``a g^2 + b g + c`` nearest ``g_prev``.

    Returns
    -------
    chosen : float
    roots : tuple of float
        All real roots; one entry in the linear or double-root case.
    discriminant : float
        ``b^2 - 4ac`` (``nan`` in the linear case).
    """
    if tie not in TIE_POLICIES:
        raise ValueError(f"unknown tie policy {tie!r}")
    if a == 0 and b == 0 and c == 0:
        raise NoSolutionError("all quadratic coefficients vanish")
    if abs(a) <= LINEAR_TOL * max(abs(b), abs(c)):
        if abs(b) <= LINEAR_TOL * abs(c):
            raise NoSolutionError(f"degenerate equation: a={a:.3e}, b={b:.3e}, c={c:.3e}")
        root = -c / b
        return root, (root,), math.nan

    disc = b * b - 4.0 * a * c
    scale2 = b * b + abs(4.0 * a * c)
    if disc < -DISCRIMINANT_TOL * scale2:
        raise ComplexRootsError(f"negative discriminant {disc:.6e} (a={a:.6e}, b={b:.6e}, c={c:.6e})")
    if disc <= DISCRIMINANT_TOL * scale2:
        root = -b / (2.0 * a)
        return root, (root,), disc

    q = -0.5 * (b + math.copysign(math.sqrt(disc), b))
    r_big = q / a
    r_small = c / q
    roots = (r_big, r_small)
    key = lambda r: (abs(r - g_prev), abs(r))
    chosen = min(roots, key=key)
    return chosen, roots, disc


def constraint_residual(
    g: float,
    lambda1: float,
    a11: float,
    f1n: float,
    sn: float,
    h_1n: float,
    h_nn: float,
    eps_anchor: float,
    eps_elim: float,
) -> float:
    """Anchor-row effective eigen-equation at coupling ``g``, left minus right side."""
    denom = lambda1 - eps_elim - g * h_nn
    return eps_anchor * a11 + g * f1n + g * g * h_1n * sn / denom - lambda1 * a11


def select_elimination(h: Hamiltonian, anchor: int, order: str) -> int:
    """Index of the basis state removed next."""
    candidates = [i for i in range(h.n) if i != anchor]
    if order == "highest_index_first":
        return candidates[-1]
    if order == "highest_eps_first":
        return max(candidates, key=lambda i: (h.eps[i], i))
    raise ValueError(f"unknown elimination order {order!r}")


def projected_ground(es: EigenSystem, anchor: int, rel_tol: float = GROUND_DEGENERACY_TOL):
    """Ground amplitudes, fixed within a degenerate ground level.

    If the lowest eigenvalue is degenerate, any vector of its eigenspace is a
    ground state; the one with the largest anchor component (the normalised
    projection of the anchor basis state) is returned so the flow does not
    depend on the solver's arbitrary choice of basis.
    """
    vals = es.values
    scale = max(1.0, float(np.max(np.abs(vals))))
    block = vals - vals[0] <= rel_tol * scale
    if np.count_nonzero(block) == 1:
        return es.vectors[:, 0]
    basis = es.vectors[:, block]
    a = basis @ basis[anchor]
    norm = np.linalg.norm(a)
    if norm == 0:
        return es.vectors[:, 0]
    return a / norm


def _spectral_scale(values, lambda1):
    return max(1.0, abs(lambda1), float(np.max(np.abs(values))))


def reduction_step(
    h: Hamiltonian, lambda1_target: float, config: FlowConfig, es=None, anchor=None
):
    """Remove one basis state and renormalise the coupling.

    Parameters
    ----------
    h : Hamiltonian
    lambda1_target : float
        Energy pinned by the constraint.
    config : FlowConfig
    es : EigenSystem, optional
        Precomputed decomposition of ``full_matrix(h)``.
    anchor : int, optional
        Current index of the anchor state; defaults to ``config.anchor_index``.

    Returns
    -------
    h_next : Hamiltonian
        ``h`` with the eliminated row/column removed and the new coupling.
    step : FlowStep
    es_next : EigenSystem
        Decomposition of ``full_matrix(h_next)``, reusable by the next step.
    """
    k = h.n
    if anchor is None:
        anchor = config.anchor_index
    if anchor >= k:
        raise ValueError(f"anchor index {anchor} out of range for dimension {k}")
    if es is None:
        es = eigen_decompose(full_matrix(h), config.eigen_method)
    if config.target_mode == "running":
        lambda1_target = float(es.values[0])
    elim = select_elimination(h, anchor, config.elimination_order)
    a = projected_ground(es, anchor)
    qb = build_quadratic(h, a, lambda1_target, anchor, elim)
    g_new, roots, disc = solve_continuity(
        qb.a_coef, qb.b_coef, qb.c_coef, h.g, config.continuity_tie
    )
    chosen_index = roots.index(g_new)

    scale = _spectral_scale(es.values, lambda1_target)
    denom = lambda1_target - qb.eps_elim - g_new * qb.h_nn
    if abs(denom) < DENOMINATOR_TOL * scale:
        raise NearSingularDenominatorError(
            f"propagator denominator {denom:.3e} vanishes at g = {g_new:.17g}"
        )
    residual = constraint_residual(
        g_new, lambda1_target, qb.a11, qb.f1n, qb.sn, qb.h_1n, qb.h_nn, qb.eps_anchor, qb.eps_elim
    )
    tol = config.residual_tol * scale
    if not abs(residual) <= tol:
        raise ResidualError(f"constraint residual {residual:.3e} exceeds {tol:.3e} at g = {g_new:.17g}")

    h_next = h.delete(elim, g=g_new)
    es_next = eigen_decompose(full_matrix(h_next), config.eigen_method)
    if config.target_mode == "running":
        target_next = float(es_next.values[0])
    else:
        target_next = float(lambda1_target)
    step = FlowStep(
        dim_before=k,
        dim_after=k - 1,
        g_before=h.g,
        g_after=g_new,
        build=qb,
        discriminant=disc,
        roots=tuple(float(r) for r in roots),
        chosen_root_index=chosen_index,
        residual=residual,
        residual_tol=tol,
        spectrum_after=tuple(float(x) for x in es_next.values[: config.m_track]),
        lambda1_target_next=target_next,
    )
    return h_next, step, es_next


def run_flow(h0: Hamiltonian, config: FlowConfig, model: Optional[ModelSpec] = None) -> FlowTrace:
    """Reduce ``h0`` one state at a time down to ``config.n_min``.

    Step errors do not propagate: the returned trace holds the steps completed
    so far and the error message in ``termination``.
    """
    if h0.n <= config.n_min:
        raise InvalidDimensionError(f"dimension {h0.n} must exceed n_min = {config.n_min}")
    es = eigen_decompose(full_matrix(h0), config.eigen_method)
    target = float(es.values[0])
    trace = FlowTrace(
        model=model,
        config=config,
        initial_dim=h0.n,
        initial_g=h0.g,
        initial_spectrum=tuple(float(x) for x in es.values[: config.m_track]),
    )
    steps = []
    h = h0
    anchor = config.anchor_index
    termination, error_type = "completed", None
    while h.n > config.n_min:
        try:
            h, step, es = reduction_step(h, target, config, es=es, anchor=anchor)
        except StepError as exc:
            exc.dimension = h.n
            termination, error_type = str(exc), type(exc).__name__
            logger.warning("flow terminated: %s", termination)
            break
        steps.append(step)
        target = step.lambda1_target_next
        if step.build.elim < anchor:
            anchor -= 1
    return replace(trace, steps=tuple(steps), termination=termination, error_type=error_type)


def flow_derivative(trace: FlowTrace) -> np.ndarray:
    """Per-step coupling change ``g_after - g_before`` (discrete dg/dx).

    Entry ``i`` belongs to ``trace.steps[i]``, i.e. the reduction from
    dimension ``trace.steps[i].dim_before``.
    """
    if not trace.steps:
        raise ValueError("trace has no steps")
    return np.array([s.g_after - s.g_before for s in trace.steps])
