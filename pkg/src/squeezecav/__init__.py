"""squeezecav: squeezed light generated in a lossy cavity.

Time evolution and steady-state properties of the squeezed thermal state
produced by degenerate parametric down-conversion below and above the
critical pump-to-loss ratio, with a truncated-Fock-space master-equation
solver as an independent verification path.
"""

from . import errors
from .core_model import (
    ObservableSet,
    PumpConfig,
    StsState,
    Trajectory,
    beta_from_nth,
    g2,
    mean_photon,
    nth_from_beta,
    observables_from_state,
    quadrature_variances,
    uncertainty_product,
)
from .fock_oracle import (
    FockDensityMatrix,
    LadderOperators,
    build_operators,
    compare_trajectories,
    evolve_rho,
    lindblad_rhs,
    observables_from_rho,
    sts_density_matrix,
    trace_distance,
)
from .kernels import backend_name
from .scenario_runner import FigureDataset, RunConfig, emit_csv, parse_config, run_scenario
from .steady_state import (
    QuadratureLimits,
    SteadyStateResult,
    ThresholdResult,
    find_threshold,
    g2_ss,
    quad_limits,
    steady_state,
    svs_g2,
)
from .sts_dynamics import (
    IntegrationControl,
    StsDerivative,
    check_resonance_condition,
    integrate,
    rhs_general,
    rhs_resonant,
)

__version__ = "0.1.0"

__all__ = [
    "errors",
    "ObservableSet",
    "PumpConfig",
    "StsState",
    "Trajectory",
    "beta_from_nth",
    "g2",
    "mean_photon",
    "nth_from_beta",
    "observables_from_state",
    "quadrature_variances",
    "uncertainty_product",
    "FockDensityMatrix",
    "LadderOperators",
    "build_operators",
    "compare_trajectories",
    "evolve_rho",
    "lindblad_rhs",
    "observables_from_rho",
    "sts_density_matrix",
    "trace_distance",
    "backend_name",
    "FigureDataset",
    "RunConfig",
    "emit_csv",
    "parse_config",
    "run_scenario",
    "QuadratureLimits",
    "SteadyStateResult",
    "ThresholdResult",
    "find_threshold",
    "g2_ss",
    "quad_limits",
    "steady_state",
    "svs_g2",
    "IntegrationControl",
    "StsDerivative",
    "check_resonance_condition",
    "integrate",
    "rhs_general",
    "rhs_resonant",
    "__version__",
]
