"""
Self-checks of the simulator against brute-force references on small grids.

Each check returns a :class:`CheckResult` with the largest deviation seen, so a
report shows how close to tolerance each property is.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import operators as ops
from .correlations import CorrelationKind, mutual_information
from .engine import (
    IMAConfig,
    control_zero_probability,
    run_ima_deterministic,
    run_ima_monte_carlo,
)
from .grid import GridGeometry, WalkState, make_initial_state, subsystem_entropy
from .reference import (
    build_dense_unitary,
    dense_coin,
    dense_entropy,
    dense_initial_state,
    dense_oracle,
    dense_reduced_density,
    dense_shift,
)


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    max_deviation: float
    tolerance: float
    detail: str = ""


def random_state(geometry: GridGeometry, rng: np.random.Generator) -> WalkState:
    amps = rng.normal(size=geometry.dim) + 1j * rng.normal(size=geometry.dim)
    amps /= np.linalg.norm(amps)
    return WalkState(geometry, amps)


def _deltas(geometry: GridGeometry) -> tuple[float, ...]:
    return (0.0, math.pi / 4, ops.tulsi_delta(geometry.n_positions))


def check_dense_equivalence(exponents=(2, 4, 6), steps: int = 50, tol: float = 1e-10) -> CheckResult:
    worst = 0.0
    for n in exponents:
        geom = GridGeometry(n)
        for delta in _deltas(geom):
            spec = ops.OracleSpec(delta, (0, 0))
            u = build_dense_unitary(geom, spec)
            psi = dense_initial_state(geom)
            state = make_initial_state(geom)
            for _ in range(steps):
                psi = u @ psi
                ops.step(state, spec)
                worst = max(worst, float(np.max(np.abs(psi - state.amplitudes))))
    return CheckResult("dense_equivalence", worst < tol, worst, tol, f"N=2^{list(exponents)}, {steps} steps")


def check_involutions(n_qubits: int = 4, samples: int = 100, tol: float = 1e-12, seed: int = 7) -> CheckResult:
    rng = np.random.default_rng(seed)
    geom = GridGeometry(n_qubits)
    spec = ops.OracleSpec(math.pi / 4, (1, 2))
    worst = 0.0
    for _ in range(samples):
        s = random_state(geom, rng)
        ref = s.amplitudes.copy()
        for apply in (lambda st: ops.apply_oracle(st, spec), ops.apply_coin, ops.apply_shift):
            t = s.copy()
            apply(apply(t))
            worst = max(worst, float(np.max(np.abs(t.amplitudes - ref))))
    return CheckResult("involutions", worst < tol, worst, tol, "O^2 = C^2 = S^2 = I")


def check_dense_factors(n_qubits: int = 4, tol: float = 1e-12, seed: int = 11) -> CheckResult:
    """Each structured factor against its dense matrix on a random state."""
    rng = np.random.default_rng(seed)
    geom = GridGeometry(n_qubits)
    spec = ops.OracleSpec(0.3, (2, 1))
    s = random_state(geom, rng)
    eye2 = np.eye(2)
    pairs = (
        (lambda st: ops.apply_oracle(st, spec), dense_oracle(geom, spec.delta, spec.target)),
        (ops.apply_coin, np.kron(eye2, dense_coin(geom))),
        (ops.apply_shift, np.kron(eye2, dense_shift(geom))),
    )
    worst = 0.0
    for apply, mat in pairs:
        t = apply(s.copy())
        worst = max(worst, float(np.max(np.abs(t.amplitudes - mat @ s.amplitudes))))
    return CheckResult("dense_factors", worst < tol, worst, tol, "O, C, S vs dense matrices")


def check_norm(n_qubits: int = 10, steps: int = 1000, tol: float = 1e-9) -> CheckResult:
    geom = GridGeometry(n_qubits)
    spec = ops.OracleSpec(math.pi / 4)
    s = make_initial_state(geom)
    for _ in range(steps):
        ops.step(s, spec)
    drift = abs(s.norm() - 1.0)
    return CheckResult("norm_preservation", drift < tol, drift, tol, f"N=2^{n_qubits}, {steps} steps")


def check_invariant_subspace(n_qubits: int = 6, lapses=(1, 3, 8, None), tol: float = 1e-12) -> CheckResult:
    geom = GridGeometry(n_qubits)
    target = (geom.side // 2, 1)
    t_idx = geom.position_index(*target)
    worst = 0.0

    def observe(k, state):
        nonlocal worst
        zero = np.abs(state.matrix[:4]).copy()
        zero[:, t_idx] = 0.0
        worst = max(worst, float(zero.max()))

    for lapse in lapses:
        cfg = IMAConfig(geom, delta=math.pi / 4, target=target, lapse=lapse, k_max=150)
        run_ima_deterministic(cfg, callback=observe)
    return CheckResult("invariant_subspace", worst < tol, worst, tol, "control-0 amplitude off target")


def check_entropy_duality(n_qubits: int = 4, steps: int = 12, tol: float = 1e-10) -> CheckResult:
    geom = GridGeometry(n_qubits)
    spec = ops.OracleSpec(math.pi / 4)
    s = make_initial_state(geom)
    n = geom.n_positions
    worst = 0.0
    for _ in range(steps):
        ops.step(s, spec)
        psi = s.amplitudes
        for sub, keep in (
            ("position", ("position",)),
            ("coin+position", ("coin", "position")),
            ("control+position", ("control", "position")),
        ):
            ref = dense_entropy(dense_reduced_density(psi, n, keep))
            worst = max(worst, abs(subsystem_entropy(s, sub) - ref))
        mi = mutual_information(s, CorrelationKind.MI_COIN_POS)
        ref = (
            dense_entropy(dense_reduced_density(psi, n, ("coin",)))
            + dense_entropy(dense_reduced_density(psi, n, ("position",)))
            - dense_entropy(dense_reduced_density(psi, n, ("coin", "position")))
        )
        worst = max(worst, abs(mi - ref))
    return CheckResult("entropy_duality", worst < tol, worst, tol, "small-side vs dense partial traces")


def check_delta_zero(n_qubits: int = 6, tol: float = 1e-14) -> CheckResult:
    geom = GridGeometry(n_qubits)
    worst = 0.0

    def observe(k, state):
        nonlocal worst
        worst = max(worst, control_zero_probability(state))

    run_ima_deterministic(IMAConfig(geom, delta=0.0, lapse=1, k_max=80), callback=observe)
    return CheckResult("delta_zero_control", worst < tol, worst, tol, "P0 with delta=0")


def check_monte_carlo(n_qubits: int = 6, trials: int = 20_000, seed: int = 2024) -> CheckResult:
    geom = GridGeometry(n_qubits)
    cfg = IMAConfig(geom, lapse=geom.side // 2, mode="monte_carlo", trials=trials, seed=seed)
    freq, err = run_ima_monte_carlo(cfg)
    pc = run_ima_deterministic(cfg).final_cumulative
    z = abs(freq - pc) / err if err > 0 else math.inf
    return CheckResult("monte_carlo", z < 3.0, abs(freq - pc), 3.0 * err, f"z = {z:.2f}")


CHECKS: tuple[Callable[[], CheckResult], ...] = (
    check_dense_equivalence,
    check_dense_factors,
    check_involutions,
    check_norm,
    check_invariant_subspace,
    check_entropy_duality,
    check_delta_zero,
    check_monte_carlo,
)


def run_checks() -> list[CheckResult]:
    return [check() for check in CHECKS]
