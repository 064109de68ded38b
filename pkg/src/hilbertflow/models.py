"""Hamiltonians of the form ``H = diag(eps) + g * h1`` and their builders.

The basis is the standard coordinate basis: ``eps[i]`` is the unperturbed
energy of basis state ``i`` and ``h1[i, j]`` the interaction matrix element
between basis states ``i`` and ``j``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .errors import InvalidDimensionError, ModelFileError, NotSymmetricError, ShapeError

__all__ = [
    "Hamiltonian",
    "ModelSpec",
    "MODEL_KINDS",
    "build_tight_binding",
    "build_degenerate_fixed_point",
    "build_custom",
    "build_model",
    "full_matrix",
    "load_custom_file",
]

MODEL_KINDS = ("tight_binding", "degenerate_fixed_point", "custom")

# Asymmetry accepted (and averaged away) in user-supplied matrices.
SYMMETRISE_TOL = 1e-9


def _frozen(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Hamiltonian:
    """Immutable ``H0 + g H1`` with diagonal ``H0``.

    Parameters
    ----------
    eps : array_like, shape (n,)
        Diagonal of ``H0``.
    h1 : array_like, shape (n, n)
        Symmetric interaction matrix.
    g : float
        Coupling constant.
    """

    eps: np.ndarray
    h1: np.ndarray
    g: float

    def __post_init__(self):
        eps = _frozen(self.eps)
        h1 = _frozen(self.h1)
        if eps.ndim != 1:
            raise ShapeError(f"eps must be a vector, got shape {eps.shape}")
        n = eps.shape[0]
        if n < 2:
            raise InvalidDimensionError(f"dimension must be >= 2, got {n}")
        if h1.shape != (n, n):
            raise ShapeError(f"h1 has shape {h1.shape}, expected {(n, n)}")
        if not (np.all(np.isfinite(eps)) and np.all(np.isfinite(h1))):
            raise ValueError("eps and h1 must be finite")
        if not math.isfinite(self.g):
            raise ValueError(f"coupling must be finite, got {self.g}")
        bound = 1e-12 * np.maximum(1.0, np.abs(h1))
        if np.any(np.abs(h1 - h1.T) > bound):
            raise NotSymmetricError("h1 is not symmetric")
        object.__setattr__(self, "eps", eps)
        object.__setattr__(self, "h1", h1)
        object.__setattr__(self, "g", float(self.g))

    @property
    def n(self) -> int:
        return self.eps.shape[0]

    def with_coupling(self, g: float) -> "Hamiltonian":
        return Hamiltonian(self.eps, self.h1, g)

    def restrict(self, keep) -> "Hamiltonian":
        """Sub-Hamiltonian on the basis states ``keep`` (same coupling)."""
        keep = np.asarray(keep, dtype=int)
        return Hamiltonian(self.eps[keep], self.h1[np.ix_(keep, keep)], self.g)

    def delete(self, index: int, g: Optional[float] = None) -> "Hamiltonian":
        """Drop basis state ``index``; optionally set a new coupling."""
        eps = np.delete(self.eps, index)
        h1 = np.delete(np.delete(self.h1, index, axis=0), index, axis=1)
        return Hamiltonian(eps, h1, self.g if g is None else g)


@dataclass(frozen=True)
class ModelSpec:
    """Parameters that identify a model; serialised alongside flow traces."""

    kind: str = "tight_binding"
    n: int = 10
    beta: float = 1.0
    gamma: float = 0.5
    diag_val: float = -0.5
    offdiag_val: float = 0.5
    g0: float = 20.0
    source_path: Optional[str] = None

    def __post_init__(self):
        if self.kind not in MODEL_KINDS:
            raise ValueError(f"unknown model kind {self.kind!r}; expected one of {MODEL_KINDS}")
        if self.kind == "custom":
            if not self.source_path:
                raise ValueError("custom model requires source_path")
        elif self.n < 2:
            raise InvalidDimensionError(f"dimension must be >= 2, got {self.n}")

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "n": self.n,
            "beta": self.beta,
            "gamma": self.gamma,
            "diag_val": self.diag_val,
            "offdiag_val": self.offdiag_val,
            "g0": self.g0,
            "source_path": self.source_path,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ModelSpec":
        return cls(**d)


def _check_dim(n):
    if int(n) != n or n < 2:
        raise InvalidDimensionError(f"dimension must be an integer >= 2, got {n}")
    return int(n)


def build_tight_binding(n: int, beta: float, gamma: float, g0: float) -> Hamiltonian:
    """Uniform chain: ``beta`` on the diagonal, ``gamma`` between neighbours, ``H0 = 0``."""
    n = _check_dim(n)
    h1 = beta * np.eye(n) + gamma * (np.eye(n, k=1) + np.eye(n, k=-1))
    return Hamiltonian(np.zeros(n), h1, g0)


def build_degenerate_fixed_point(
    n: int, g0: float, diag_val: float = -0.5, offdiag_val: float = 0.5
) -> Hamiltonian:
    """Fully connected model with equal diagonal and equal off-diagonal entries.

    With the defaults, ``g0 * h1`` has eigenvalue ``-g0`` with multiplicity
    ``n - 1`` and ``g0 * (n - 2) / 2`` once.
    """
    n = _check_dim(n)
    h1 = np.full((n, n), float(offdiag_val))
    np.fill_diagonal(h1, diag_val)
    return Hamiltonian(np.zeros(n), h1, g0)


def build_custom(eps, h1, g0: float) -> Hamiltonian:
    """Validate user data; asymmetry up to 1e-9 (relative) is averaged away."""
    eps = np.asarray(eps, dtype=float)
    h1 = np.asarray(h1, dtype=float)
    if eps.ndim != 1:
        raise ShapeError(f"eps must be a vector, got shape {eps.shape}")
    if h1.ndim != 2 or h1.shape[0] != h1.shape[1]:
        raise ShapeError(f"h1 must be square, got shape {h1.shape}")
    if h1.shape[0] != eps.shape[0]:
        raise ShapeError(f"h1 is {h1.shape[0]}x{h1.shape[1]} but eps has length {eps.shape[0]}")
    asym = np.max(np.abs(h1 - h1.T)) if h1.size else 0.0
    if asym > SYMMETRISE_TOL * max(1.0, float(np.max(np.abs(h1)))):
        raise NotSymmetricError(f"h1 asymmetry {asym:.3e} exceeds tolerance {SYMMETRISE_TOL:g}")
    return Hamiltonian(eps, 0.5 * (h1 + h1.T), g0)


def full_matrix(h: Hamiltonian) -> np.ndarray:
    """Dense ``diag(eps) + g * h1``."""
    return np.diag(h.eps) + h.g * h.h1


def _as_real(value, what, row=None, column=None, path=None):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ModelFileError(f"{what}: expected a real number, got {value!r}", path, row, column)
    if not math.isfinite(value):
        raise ModelFileError(f"{what}: value is not finite", path, row, column)
    return float(value)


def load_custom_file(path) -> Hamiltonian:
    """Read a JSON model file with keys ``eps``, ``h1`` and ``g0``.

    Syntax errors report the file line/column; bad matrix entries report the
    1-based matrix row/column.
    """
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelFileError(exc.msg, path, exc.lineno, exc.colno) from None
    if not isinstance(data, dict):
        raise ModelFileError("top level must be an object", path)
    for key in ("eps", "h1", "g0"):
        if key not in data:
            raise ModelFileError(f"missing field {key!r}", path)

    raw_eps = data["eps"]
    if not isinstance(raw_eps, list):
        raise ModelFileError("eps must be an array", path)
    eps = [_as_real(v, "eps", None, j + 1, path) for j, v in enumerate(raw_eps)]

    raw_h1 = data["h1"]
    if not isinstance(raw_h1, list):
        raise ModelFileError("h1 must be an array of arrays", path)
    h1 = []
    for i, row in enumerate(raw_h1):
        if not isinstance(row, list):
            raise ModelFileError("h1 row is not an array", path, i + 1)
        if len(row) != len(eps):
            raise ModelFileError(
                f"h1 row has {len(row)} entries, expected {len(eps)}", path, i + 1
            )
        h1.append([_as_real(v, "h1", i + 1, j + 1, path) for j, v in enumerate(row)])
    if len(h1) != len(eps):
        raise ModelFileError(f"h1 has {len(h1)} rows, expected {len(eps)}", path)

    g0 = _as_real(data["g0"], "g0", path=path)
    return build_custom(eps, h1, g0)


def build_model(spec: ModelSpec) -> Hamiltonian:
    """Dispatch on ``spec.kind``."""
    if spec.kind == "tight_binding":
        return build_tight_binding(spec.n, spec.beta, spec.gamma, spec.g0)
    if spec.kind == "degenerate_fixed_point":
        return build_degenerate_fixed_point(spec.n, spec.g0, spec.diag_val, spec.offdiag_val)
    return load_custom_file(spec.source_path)
