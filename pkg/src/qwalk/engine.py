"""
Unitary and intermediate-measurement runs of the controlled walk search.

The deterministic engine follows the single surviving measurement branch
(control outcome 1) and accumulates the stop-on-0 probability exactly, so the
cumulative success probability carries no sampling error. The Monte Carlo
engine samples individual experiments and serves as an independent check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from numpy.typing import NDArray

from .correlations import CorrelationKind, correlation_values
from .grid import GridGeometry, WalkState, make_initial_state, target_probability
from .operators import OracleSpec, step

__all__ = [
    "DegenerateCollapseError",
    "IMAConfig",
    "RunTrace",
    "t_delta",
    "default_kmax",
    "control_zero_probability",
    "collapse_control",
    "run_unitary",
    "run_ima_deterministic",
    "sample_ima_outcomes",
    "run_ima_monte_carlo",
]

COLLAPSE_TOL = 1e-12

Callback = Callable[[int, WalkState], None]


class DegenerateCollapseError(ValueError):
    """The requested control outcome has (numerically) zero probability."""


@dataclass(frozen=True)
class IMAConfig:
    """Parameters of one search run.

    ``lapse=None`` means no intermediate measurements (unitary run).
    ``k_max=None`` uses :func:`default_kmax`.
    """

    geometry: GridGeometry
    delta: float = math.pi / 4
    target: tuple[int, int] = (0, 0)
    lapse: int | None = None
    k_max: int | None = None
    success_target: float = 0.5
    mode: str = "deterministic"
    trials: int = 10_000
    seed: int = 0

    def __post_init__(self) -> None:
        if self.lapse is not None and self.lapse < 1:
            raise ValueError(f"lapse must be >= 1, got {self.lapse}")
        if self.k_max is not None and self.k_max < 0:
            raise ValueError(f"k_max must be >= 0, got {self.k_max}")
        if not 0.0 < self.success_target < 1.0:
            raise ValueError(f"success_target must lie in (0, 1), got {self.success_target}")
        if self.mode not in ("deterministic", "monte_carlo"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.mode == "monte_carlo" and self.trials < 1:
            raise ValueError("trials must be >= 1")
        self.geometry.check_position(self.target)
        OracleSpec(self.delta, self.target)

    @property
    def oracle(self) -> OracleSpec:
        return OracleSpec(self.delta, self.target)

    @property
    def steps(self) -> int:
        return default_kmax(self.geometry) if self.k_max is None else self.k_max


@dataclass
class RunTrace:
    """Per-step record of a run; index ``k`` runs from 0 (initial state) to k_max.

    At a measurement step every quantity after ``p_control_one`` and ``p0``
    refers to the post-collapse (outcome 1) state.
    """

    p_target: NDArray[np.float64]
    is_measurement: NDArray[np.bool_]
    p0: NDArray[np.float64]  # NaN off-measurement
    survival: NDArray[np.float64]
    p_cumulative: NDArray[np.float64]
    p_control_one: NDArray[np.float64]  # before any collapse at that step
    correlations: dict[str, NDArray[np.float64]] = field(default_factory=dict)
    lapse: int | None = None

    def __len__(self) -> int:
        return len(self.p_target)

    @property
    def k(self) -> NDArray[np.int64]:
        return np.arange(len(self.p_target))

    @property
    def k_max(self) -> int:
        return len(self.p_target) - 1

    @property
    def stopped(self) -> NDArray[np.float64]:
        """Probability already booked from control outcomes 0; non-decreasing in k."""
        return self.p_cumulative - self.survival * self.p_target

    @property
    def final_cumulative(self) -> float:
        return float(self.p_cumulative[-1])


def t_delta(geometry: GridGeometry, delta: float) -> int:
    """Tulsi's step count ``round(pi/4 * sqrt(N (log2 N + tan^2(delta) / 4)))``."""
    n = geometry.n_positions
    return round(math.pi / 4 * math.sqrt(n * (geometry.log_n + math.tan(delta) ** 2 / 4)))


def default_kmax(geometry: GridGeometry) -> int:
    """``round(pi/4 * sqrt(N log2 N))``."""
    return round(math.pi / 4 * math.sqrt(geometry.n_positions * geometry.log_n))


def control_zero_probability(state: WalkState) -> float:
    a = state.matrix[:4]
    return float(np.vdot(a, a).real)


def collapse_control(state: WalkState, outcome: int) -> tuple[WalkState, float]:
    """Project the control qubit onto ``outcome`` and renormalize, in place.

    Returns the state and the pre-collapse probability of that outcome.
    """
    if outcome not in (0, 1):
        raise ValueError(f"outcome must be 0 or 1, got {outcome}")
    m = state.matrix
    keep = m[4 * outcome : 4 * outcome + 4]
    prob = float(np.vdot(keep, keep).real)
    if prob < COLLAPSE_TOL:
        raise DegenerateCollapseError(f"control outcome {outcome} has probability {prob:.3e}")
    m[4 * (1 - outcome) : 4 * (1 - outcome) + 4] = 0.0
    keep *= 1.0 / math.sqrt(prob)
    return state, prob


class _Recorder:
    def __init__(self, n_steps: int, kinds: Sequence[str], lapse: int | None):
        kinds = tuple(dict.fromkeys(CorrelationKind(k).value for k in kinds))
        size = n_steps + 1
        self.trace = RunTrace(
            p_target=np.zeros(size),
            is_measurement=np.zeros(size, dtype=bool),
            p0=np.full(size, np.nan),
            survival=np.ones(size),
            p_cumulative=np.zeros(size),
            p_control_one=np.ones(size),
            correlations={kind: np.zeros(size) for kind in kinds},
            lapse=lapse,
        )
        self.kinds = kinds

    def record_correlations(self, k: int, state: WalkState) -> None:
        if not self.kinds:
            return
        for kind, value in correlation_values(state, self.kinds).items():
            self.trace.correlations[kind][k] = value


def run_unitary(
    config: IMAConfig,
    correlations: Sequence[str] = (),
    callback: Callback | None = None,
) -> RunTrace:
    """Apply ``k_max`` steps with no measurement; ``P_c(k) = P_t(k)``."""
    return _run(config, None, correlations, callback)


def run_ima_deterministic(
    config: IMAConfig,
    correlations: Sequence[str] = (),
    callback: Callback | None = None,
) -> RunTrace:
    """Exact cumulative success probability with control measured every ``lapse`` steps.

    After step ``j * lapse`` the stop probability ``P0`` is booked with the current
    survival weight, the state is collapsed onto control 1, and the run goes on.
    ``P_c(k)`` = booked stops + survival * ``P_t(k)`` of the conditioned state.
    A ``lapse`` of ``None`` gives the unitary run.
    """
    return _run(config, config.lapse, correlations, callback)


def _run(
    config: IMAConfig,
    lapse: int | None,
    correlations: Sequence[str],
    callback: Callback | None,
) -> RunTrace:
    spec = config.oracle
    n_steps = config.steps
    rec = _Recorder(n_steps, correlations, lapse)
    tr = rec.trace
    state = make_initial_state(config.geometry)

    stopped = 0.0
    survival = 1.0
    tr.p_target[0] = target_probability(state, config.target)
    tr.p_cumulative[0] = tr.p_target[0]
    rec.record_correlations(0, state)
    if callback is not None:
        callback(0, state)

    for k in range(1, n_steps + 1):
        step(state, spec)
        p0 = control_zero_probability(state)
        tr.p_control_one[k] = 1.0 - p0
        if lapse is not None and k % lapse == 0:
            tr.is_measurement[k] = True
            tr.p0[k] = p0
            stopped += survival * p0
            try:
                collapse_control(state, 1)
            except DegenerateCollapseError:
                # every remaining experiment has stopped on outcome 0
                stopped += survival * (1.0 - p0)
                survival = 0.0
                tr.p_target[k:] = 0.0
                tr.survival[k:] = 0.0
                tr.p_cumulative[k:] = min(stopped, 1.0)
                for kind in rec.kinds:
                    tr.correlations[kind][k:] = np.nan
                return tr
            survival *= 1.0 - p0
        pt = target_probability(state, config.target)
        tr.p_target[k] = pt
        tr.survival[k] = survival
        tr.p_cumulative[k] = stopped + survival * pt
        rec.record_correlations(k, state)
        if callback is not None:
            callback(k, state)
    return tr


@dataclass
class MonteCarloOutcomes:
    """Per-trial results: ``stop_step`` is the step of the deciding observation,
    ``stopped_on_zero`` marks a control outcome 0, ``success`` the trial result."""

    stop_step: NDArray[np.int64]
    stopped_on_zero: NDArray[np.bool_]
    success: NDArray[np.bool_]


def sample_ima_outcomes(config: IMAConfig) -> MonteCarloOutcomes:
    """Sample ``config.trials`` independent experiments of the measurement algorithm.

    Trials that have not stopped share the same conditioned state, so they are
    advanced together: one state evolution, with each trial drawing its own
    control outcomes and, at ``k_max``, its own position measurement from the
    Born distribution.
    """
    rng = np.random.default_rng(config.seed)
    geom = config.geometry
    spec = config.oracle
    n_steps = config.steps
    trials = config.trials

    stop_step = np.full(trials, n_steps, dtype=np.int64)
    on_zero = np.zeros(trials, dtype=bool)
    active = np.arange(trials)
    state = make_initial_state(geom)

    for k in range(1, n_steps + 1):
        step(state, spec)
        if config.lapse is None or k % config.lapse:
            continue
        p0 = control_zero_probability(state)
        draws = rng.random(active.size) < p0
        hit = active[draws]
        stop_step[hit] = k
        on_zero[hit] = True
        active = active[~draws]
        if active.size == 0:
            break
        try:
            collapse_control(state, 1)
        except DegenerateCollapseError:
            # outcome 1 was drawn with probability ~0; treat as sampling noise
            stop_step[active] = k
            on_zero[active] = True
            active = active[:0]
            break

    success = on_zero.copy()
    if active.size:
        pos_prob = np.abs(state.matrix) ** 2
        pos_prob = pos_prob.sum(axis=0)
        pos_prob /= pos_prob.sum()
        found = rng.choice(geom.n_positions, size=active.size, p=pos_prob)
        success[active] = found == geom.position_index(*config.target)
    return MonteCarloOutcomes(stop_step, on_zero, success)


def run_ima_monte_carlo(config: IMAConfig) -> tuple[float, float]:
    """Success frequency over sampled experiments and its binomial standard error."""
    outcomes = sample_ima_outcomes(config)
    freq = float(outcomes.success.mean())
    stderr = math.sqrt(freq * (1.0 - freq) / config.trials)
    return freq, stderr
