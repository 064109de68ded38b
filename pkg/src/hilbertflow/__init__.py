"""Hilbert-space reduction with coupling-constant renormalisation.

A Hamiltonian ``H = diag(eps) + g * h1`` is shrunk one basis state at a time.
After each elimination the coupling ``g`` is re-fitted so that the effective
Hamiltonian of the surviving states keeps the pinned ground-state energy.
Stationary couplings along the flow (fixed points) are detected together with
degeneracies of the spectrum.
"""

from .analysis import (
    DegeneracyReport,
    FixedPointReport,
    anchor_overlap_profile,
    detect_degeneracies,
    detect_fixed_points,
    spectrum_drift,
)
from .eigen import EigenSystem, eigen_decompose, ground_state
from .errors import (
    ComplexRootsError,
    DegenerateAnchorError,
    HilbertFlowError,
    NearSingularDenominatorError,
    NoSolutionError,
    StepError,
)
from .flow import (
    FlowConfig,
    FlowStep,
    FlowTrace,
    QuadraticBuild,
    build_quadratic,
    flow_derivative,
    reduction_step,
    run_flow,
    solve_continuity,
)
from .models import (
    Hamiltonian,
    ModelSpec,
    build_custom,
    build_degenerate_fixed_point,
    build_model,
    build_tight_binding,
    full_matrix,
    load_custom_file,
)

__version__ = "0.1.0"
