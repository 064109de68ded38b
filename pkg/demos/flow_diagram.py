"""
Data for a flow diagram
=======================

A grid of starting couplings and dimensions gives a family of trajectories
g(n). Independent grid points run in separate processes; the combined table
is sorted, so repeated runs print the same table.
"""

import numpy as np

from hilbertflow import FlowConfig, ModelSpec
from hilbertflow.sweep import run_sweep

if __name__ == "__main__":
    points = run_sweep(
        ModelSpec("tight_binding", n=20, beta=1.0, gamma=0.5, g0=1.0),
        FlowConfig(n_min=5),
        n_values=[10, 20, 30],
        g0_values=np.geomspace(0.5, 20, 6),
        workers=2,
    )
    for p in points:
        gs = [g for _, g, _ in p.couplings]
        print(f"N={p.N:2d} g0={p.g0:7.3f} -> g(5)={gs[-1]:7.4f}  ratio {gs[-1] / gs[0]:.3f}  [{p.termination}]")
