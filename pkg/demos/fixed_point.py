"""
A degenerate global fixed point
================================

With h1 = 0.5 on every off-diagonal and -0.5 on the diagonal, H = g h1 has an
(N-1)-fold degenerate ground level at -g. Removing states leaves the ground
energy untouched, so the coupling never needs to change: g is a fixed point
of the flow at every dimension.
"""

from hilbertflow import build_degenerate_fixed_point, detect_degeneracies, detect_fixed_points, run_flow
from hilbertflow import FlowConfig

for N in (10, 20, 50):
    trace = run_flow(build_degenerate_fixed_point(N, 20.0), FlowConfig(n_min=5))
    report = detect_fixed_points(trace)
    final = trace.spectra()[5]
    multiplets = detect_degeneracies(final).multiplets
    print(f"N={N}: g stays {trace.couplings()[5]:.12g}, global fixed point: {report.is_global_fixed_point}, "
          f"ground multiplet size at n=5: {len(multiplets[0]) if multiplets else 1}")

# The tight-binding chain, by contrast, moves after its first step.
from hilbertflow import build_tight_binding

report = detect_fixed_points(run_flow(build_tight_binding(20, 1.0, 0.5, 20.0), FlowConfig(n_min=5)))
print("tight-binding flagged steps:", [dim for dim, _, _ in report.flagged_steps])
