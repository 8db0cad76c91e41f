"""Trajectory-based simulator for a pulse-controlled three-level system in a
colored-noise environment, with Monte Carlo density-matrix reconstruction and
independent analytic / Markov-limit oracles."""

__version__ = "0.1.0"

from .backend import HAS_NUMBA, active_backend
from .coefficients import (
    CoefficientTables,
    quadrature_consistency_check,
    solve_dephasing,
    solve_dissipative,
    two_time_system,
)
from .config import (
    RunConfig,
    build_presets,
    config_from_dict,
    get_preset,
    list_presets,
    load_config,
)
from .ensemble import (
    DensitySeries,
    InitialStateSpec,
    decompose_initial,
    expectations,
    fidelity,
    run_ensemble,
    trace_distance,
)
from .errors import (
    ConfigError,
    GridAlignmentError,
    KernelFactorizationError,
    NumericalFault,
    TriqsdError,
    ValidationError,
)
from .noise import (
    NoiseKernel,
    NoisePath,
    sample_kernel_path,
    sample_ou_block,
    sample_ou_path,
    validate_statistics,
)
from .operators import OperatorSet, build_operator_set, check_algebra
from .oracles import (
    DephasingOracleResult,
    dephasing_analytic,
    lindblad_markov,
    ou_sign_double_integral,
    signed_time_integral,
)
from .pulses import (
    PulseSchedule,
    free_evolution,
    half_grid,
    nested_udd_times,
    segment_grid,
    signs_at,
    single_layer_udd,
    step_signs,
    udd_times,
)
from .trajectory import TrajectoryStates, integrate_trajectory, rhs_dephasing, rhs_dissipative
