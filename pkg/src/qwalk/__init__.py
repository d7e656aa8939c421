"""Controlled quantum-walk search on a torus with intermediate control measurements."""

from .analysis import (
    OrderFitSeries,
    SweepResult,
    SweepRow,
    efficiency,
    optimal_kmax,
    order_fit,
    repetitions_needed,
    resolve_lapse,
    sweep_lapse,
    sweep_order,
    total_steps,
)
from .correlations import CorrelationKind, CorrelationSeries, ccm, mutual_information, normalize, smooth
from .engine import (
    DegenerateCollapseError,
    IMAConfig,
    RunTrace,
    collapse_control,
    control_zero_probability,
    default_kmax,
    run_ima_deterministic,
    run_ima_monte_carlo,
    run_unitary,
    t_delta,
)
from .grid import (
    GridGeometry,
    WalkState,
    make_initial_state,
    reduced_density,
    subsystem_entropy,
    target_probability,
    von_neumann_entropy,
)
from .operators import (
    OracleSpec,
    apply_coin,
    apply_conditional_walk,
    apply_oracle,
    apply_shift,
    build_dense_unitary,
    step,
    tulsi_delta,
)

__version__ = "0.1.0"
