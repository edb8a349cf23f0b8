"""Norm-preserving flows on the finite matrix torus.

Builds clock-shift (and custom) matrix-geometry models, diagonalizes their
Laplacian super-operator, solves the L2-norm-preserving flow by spectral,
Picard, and RK4 routes, and verifies the flow's structural properties:
norm conservation, convergence to eigen-matrices, positivity and trace
preservation, entropy stability, and operator-convexity preservation along
the heat flow.
"""

__version__ = "0.1.0"

from .errors import (
    ConfigError,
    DegenerateModelError,
    DimensionMismatchError,
    DomainError,
    EigensolverError,
    MatflowError,
    NonHermitianError,
)
from .linalg import (
    EigDecomposition,
    hermitian_eig,
    hs_inner,
    hs_norm,
    hs_norm_sq,
    is_hermitian,
    matrix_function,
    min_eigenvalue,
    trace_norm,
)
from .geometry import (
    EigenBasis,
    TorusModel,
    build_model,
    decompose,
    delta1,
    delta2,
    dirichlet_energy,
    eigenbasis,
    fourier_matrix,
    laplacian_apply,
    laplacian_superoperator,
    rayleigh,
    reconstruct,
    unvec,
    vec,
)
from .flows import (
    ConvergenceReport,
    FlowObservation,
    FlowTrace,
    detect_convergence,
    heat_flow_spectral,
    normalized_flow_picard,
    normalized_flow_rk4,
    normalized_flow_spectral,
    observe,
    spectral_trace,
)
from .stability import (
    FannesCheck,
    StabilityReport,
    entropy_stability_experiment,
    eta,
    fannes_bound,
    hs_stability_experiment,
    trace_distance,
    von_neumann_entropy,
)
from .convexity import (
    ConvexityVerdict,
    HeatPositivityReport,
    ScalarFunction,
    bochner_identity_check,
    convexity_gap,
    cube_function,
    heat_positivity_experiment,
    identity_function,
    is_operator_convex_sampled,
    loewner_integrand,
    parse_function_spec,
    resolvent,
    square_function,
)
from .presets import preset
from .config import ExperimentConfig, emit_config, parse_config
from .runner import RunManifest, run

__all__ = [name for name in dir() if not name.startswith("_")]
