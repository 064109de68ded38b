"""
Initial spectrum of the tight-binding chain
============================================

The starting Hamiltonian is a nearest-neighbour chain, H = g * h1 with
h1 = beta on the diagonal and gamma on the first off-diagonals. Its spectrum
is known in closed form, lambda_k = g (beta + 2 gamma cos(k pi / (N + 1))),
which makes it a convenient check of the eigensolver.
"""

import numpy as np

from hilbertflow import build_tight_binding, eigen_decompose, full_matrix
from hilbertflow.reference import analytic_tight_binding_spectrum

# Build the N = 10 chain at strong coupling and diagonalise it.
h = build_tight_binding(10, 1.0, 0.5, 20.0)
es = eigen_decompose(full_matrix(h))
print("five lowest levels, N=10 g=20:", np.round(es.values[:5], 2))

# The closed-form spectrum agrees to round-off.
exact = analytic_tight_binding_spectrum(10, 1.0, 0.5, 20.0)
print("max deviation from the cosine formula:", np.max(np.abs(es.values - exact)))

# The in-package Jacobi solver gives the same levels as LAPACK.
jac = eigen_decompose(full_matrix(h), method="jacobi")
print("Jacobi vs LAPACK:", np.max(np.abs(jac.values - es.values)))

# Longer chains squeeze the band bottom towards zero.
for n in (20, 30, 50):
    vals = eigen_decompose(full_matrix(build_tight_binding(n, 1.0, 0.5, 20.0))).values
    print(f"N={n:2d}", np.round(vals[:5], 2))
