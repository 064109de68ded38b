"""Dense symmetric eigendecomposition with a deterministic output convention."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NotSymmetricError, NumericalFailureError, ShapeError

__all__ = ["EigenSystem", "eigen_decompose", "ground_state", "jacobi_eigh"]

SYMMETRY_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class EigenSystem:
    """Ascending eigenvalues and matching orthonormal eigenvectors (columns).

    In every column the entry of largest magnitude is positive.
    """

    values: np.ndarray
    vectors: np.ndarray

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def ground_components(self) -> np.ndarray:
        return self.vectors[:, 0]


def _fix_signs(vectors):
    idx = np.argmax(np.abs(vectors), axis=0)
    signs = np.sign(vectors[idx, np.arange(vectors.shape[1])])
    signs[signs == 0] = 1.0
    return vectors * signs


def jacobi_eigh(m, tol=1e-14, max_sweeps=100):
    """Cyclic Jacobi eigensolver.

    Returns ``(values, vectors)`` unsorted. Raises :class:`NumericalFailureError`
    if the off-diagonal Frobenius norm has not dropped below
    ``tol * ||m||_F`` after ``max_sweeps`` sweeps.
    """
    a = np.array(m, dtype=float)
    n = a.shape[0]
    v = np.eye(n)
    target = tol * np.linalg.norm(a)

    def off_norm():
        return np.linalg.norm(a - np.diag(np.diag(a)))

    for sweep in range(max_sweeps):
        if off_norm() <= target:
            return np.diag(a).copy(), v
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                app, aqq = a[p, p], a[q, q]
                big = 100.0 * abs(apq)
                # element below round-off of both diagonals: drop it
                if sweep > 3 and abs(app) + big == abs(app) and abs(aqq) + big == abs(aqq):
                    a[p, q] = a[q, p] = 0.0
                    continue
                h = aqq - app
                if abs(h) + big == abs(h):
                    t = apq / h
                else:
                    theta = 0.5 * h / apq
                    t = 1.0 / (abs(theta) + np.sqrt(1.0 + theta * theta))
                    if theta < 0:
                        t = -t
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                ap = a[:, p].copy()
                aq = a[:, q].copy()
                a[:, p] = c * ap - s * aq
                a[:, q] = s * ap + c * aq
                rp = a[p, :].copy()
                rq = a[q, :].copy()
                a[p, :] = c * rp - s * rq
                a[q, :] = s * rp + c * rq
                a[p, q] = a[q, p] = 0.0
                vp = v[:, p].copy()
                v[:, p] = c * vp - s * v[:, q]
                v[:, q] = s * vp + c * v[:, q]
    off = off_norm()
    if off <= target:
        return np.diag(a).copy(), v
    raise NumericalFailureError(
        f"Jacobi iteration did not converge in {max_sweeps} sweeps; "
        f"off-diagonal norm {off:.3e} remains",
        off_norm=off,
    )


def eigen_decompose(m, method: str = "lapack") -> EigenSystem:
    """Diagonalise a real symmetric matrix.

    Parameters
    ----------
    m : array_like, shape (n, n)
        Symmetric to within ``1e-9 * max(1, max|m|)``; the symmetric part is used.
    method : {"lapack", "jacobi"}
        ``"lapack"`` calls :func:`numpy.linalg.eigh`; ``"jacobi"`` uses the
        in-package cyclic Jacobi iteration.

    Returns
    -------
    EigenSystem
    """
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ShapeError(f"expected a square matrix, got shape {m.shape}")
    asym = np.max(np.abs(m - m.T)) if m.size else 0.0
    if asym > SYMMETRY_TOL * max(1.0, float(np.max(np.abs(m))) if m.size else 1.0):
        raise NotSymmetricError(f"matrix asymmetry {asym:.3e} exceeds {SYMMETRY_TOL:g}")
    m = 0.5 * (m + m.T)

    if method == "lapack":
        try:
            values, vectors = np.linalg.eigh(m)
        except np.linalg.LinAlgError as exc:
            raise NumericalFailureError(f"LAPACK eigh failed: {exc}") from exc
    elif method == "jacobi":
        values, vectors = jacobi_eigh(m)
    else:
        raise ValueError(f"unknown method {method!r}")

    order = np.argsort(values, kind="stable")
    values = values[order]
    vectors = _fix_signs(vectors[:, order])
    values.setflags(write=False)
    vectors.setflags(write=False)
    return EigenSystem(values, vectors)


def ground_state(es: EigenSystem):
    """Lowest eigenvalue and its unit eigenvector."""
    a = es.vectors[:, 0]
    return float(es.values[0]), a / np.linalg.norm(a)
