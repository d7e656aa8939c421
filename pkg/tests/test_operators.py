import math

import numpy as np
import pytest

from qwalk import (
    GridGeometry,
    OracleSpec,
    WalkState,
    apply_coin,
    apply_conditional_walk,
    apply_oracle,
    apply_shift,
    build_dense_unitary,
    make_initial_state,
    step,
    target_probability,
    tulsi_delta,
)
from qwalk.grid import DOWN, LEFT, RIGHT, UP
from qwalk.reference import dense_initial_state, dense_shift

from conftest import random_state


def coin_state(g, vec, ctr=1, pos=(1, 2)):
    amps = np.zeros(g.dim, dtype=complex)
    for coin, a in enumerate(vec):
        amps[g.index(ctr, coin, *pos)] = a
    return WalkState(g, amps)


def axis_state(g, delta, target):
    amps = np.zeros(g.dim, dtype=complex)
    for coin in range(4):
        amps[g.index(0, coin, *target)] = -math.sin(delta) / 2
        amps[g.index(1, coin, *target)] = math.cos(delta) / 2
    return WalkState(g, amps)


def test_oracle_spec_validation():
    with pytest.raises(ValueError):
        OracleSpec(math.pi / 2)
    with pytest.raises(ValueError):
        OracleSpec(-0.1)


def test_tulsi_delta():
    assert math.cos(tulsi_delta(2**18)) == pytest.approx(1 / math.sqrt(18))
    assert math.tan(tulsi_delta(2**18)) ** 2 == pytest.approx(17)


@pytest.mark.parametrize("delta", [0.0, 0.4, math.pi / 4, 1.3])
def test_oracle_reflects_axis(g16, delta):
    s = axis_state(g16, delta, (2, 3))
    ref = s.amplitudes.copy()
    apply_oracle(s, OracleSpec(delta, (2, 3)))
    assert np.max(np.abs(s.amplitudes + ref)) < 1e-15


def test_oracle_leaves_other_positions(g16):
    s = coin_state(g16, [0.5] * 4, pos=(1, 1))
    ref = s.amplitudes.copy()
    apply_oracle(s, OracleSpec(math.pi / 4, (0, 0)))
    assert np.array_equal(s.amplitudes, ref)


def test_oracle_is_local(g16, rng):
    s = random_state(g16, rng)
    ref = s.amplitudes.copy()
    apply_oracle(s, OracleSpec(0.7, (3, 2)))
    mask = np.ones(g16.dim, dtype=bool)
    for c in range(2):
        for i in range(4):
            mask[g16.index(c, i, 3, 2)] = False
    assert np.array_equal(s.amplitudes[mask], ref[mask])


def test_coin_examples(g16):
    s = apply_coin(coin_state(g16, [1, 0, 0, 0]))
    got = [s.amplitude(1, i, 1, 2) for i in range(4)]
    assert np.allclose(got, [-0.5, 0.5, 0.5, 0.5], atol=1e-15)
    s = apply_coin(coin_state(g16, [0.5] * 4))
    assert np.allclose([s.amplitude(1, i, 1, 2) for i in range(4)], [0.5] * 4, atol=1e-15)


@pytest.mark.parametrize("name", ["oracle", "coin", "shift"])
def test_involutions(g16, rng, name):
    spec = OracleSpec(math.pi / 4, (1, 3))
    apply = {
        "oracle": lambda s: apply_oracle(s, spec),
        "coin": apply_coin,
        "shift": apply_shift,
    }[name]
    for _ in range(20):
        s = random_state(g16, rng)
        ref = s.amplitudes.copy()
        apply(apply(s))
        assert np.max(np.abs(s.amplitudes - ref)) < 1e-12


@pytest.mark.parametrize(
    "coin, pos, new_coin, new_pos",
    [
        (RIGHT, (0, 0), LEFT, (1, 0)),
        (RIGHT, (3, 2), LEFT, (0, 2)),
        (LEFT, (0, 1), RIGHT, (3, 1)),
        (UP, (2, 3), DOWN, (2, 0)),
        (DOWN, (2, 0), UP, (2, 3)),
        (UP, (1, 1), DOWN, (1, 2)),
    ],
)
def test_shift_basis(g16, coin, pos, new_coin, new_pos):
    s = WalkState.basis(g16, 1, coin, *pos)
    apply_shift(s)
    assert s.amplitude(1, new_coin, *new_pos) == 1.0
    assert s.norm() == pytest.approx(1.0)


def test_shift_matches_dense(g16, rng):
    s = random_state(g16, rng)
    block = s.amplitudes[4 * 16 :].copy()
    apply_shift(s)
    assert np.max(np.abs(s.amplitudes[4 * 16 :] - dense_shift(g16) @ block)) < 1e-15
    sq = dense_shift(g16) @ dense_shift(g16)
    assert np.array_equal(sq, np.eye(64))


def test_conditional_walk_control_zero(g16):
    s = WalkState.basis(g16, 0, UP, 2, 1)
    apply_conditional_walk(s)
    assert s.amplitude(0, UP, 2, 1) == -1.0


def test_conditional_walk_uniform_coin(g16):
    s = coin_state(g16, [0.5] * 4, pos=(1, 1))
    apply_conditional_walk(s)
    expected = {
        (LEFT, 2, 1): 0.5,
        (RIGHT, 0, 1): 0.5,
        (DOWN, 1, 2): 0.5,
        (UP, 1, 0): 0.5,
    }
    blk = s.blocks[1]
    nz = {(int(c), int(x), int(y)) for c, y, x in zip(*np.nonzero(np.abs(blk) > 1e-15))}
    assert nz == set(expected)
    for (c, x, y), v in expected.items():
        assert s.amplitude(1, c, x, y) == pytest.approx(v)


def test_conditional_walk_preserves_norm(g16, rng):
    s = random_state(g16, rng)
    apply_conditional_walk(s)
    assert abs(s.norm() - 1) < 1e-12


@pytest.mark.parametrize("n", [2, 4, 6])
@pytest.mark.parametrize("delta_name", ["zero", "pi4", "tulsi"])
def test_structured_matches_dense(n, delta_name):
    g = GridGeometry(n)
    delta = {"zero": 0.0, "pi4": math.pi / 4, "tulsi": tulsi_delta(g.n_positions)}[delta_name]
    spec = OracleSpec(delta, (1, 0))
    u = build_dense_unitary(g, spec)
    psi = dense_initial_state(g)
    s = make_initial_state(g)
    for _ in range(50):
        psi = u @ psi
        step(s, spec)
    assert np.max(np.abs(psi - s.amplitudes)) < 1e-10


def test_dense_unitary_properties(g16):
    u = build_dense_unitary(g16, OracleSpec(math.pi / 4))
    assert np.max(np.abs(u.conj().T @ u - np.eye(g16.dim))) < 1e-12
    assert np.max(np.abs(np.abs(np.linalg.eigvals(u)) - 1)) < 1e-10


def test_dense_unitary_columns_match_step(g16):
    spec = OracleSpec(0.9, (2, 2))
    u = build_dense_unitary(g16, spec)
    for idx in (0, 5, g16.index(1, 2, 2, 2), g16.index(0, 3, 2, 2), g16.dim - 1):
        s = WalkState(g16, np.eye(g16.dim)[idx])
        step(s, spec)
        assert np.max(np.abs(s.amplitudes - u[:, idx])) < 1e-15


def test_dense_guard():
    with pytest.raises(ValueError):
        build_dense_unitary(GridGeometry(8), OracleSpec(0.0))


def test_delta_zero_keeps_control_one(g16):
    s = make_initial_state(g16)
    spec = OracleSpec(0.0)
    for _ in range(40):
        step(s, spec)
        assert np.all(s.amplitudes[: 4 * 16] == 0)


def test_step_preserves_total_probability(g16):
    s = make_initial_state(g16)
    spec = OracleSpec(math.pi / 4)
    step(s, spec)
    total = sum(target_probability(s, (x, y)) for x in range(4) for y in range(4))
    assert total == pytest.approx(1.0, abs=1e-14)


def test_translation_invariance(g16):
    def trace(target):
        s = make_initial_state(g16)
        spec = OracleSpec(math.pi / 4, target)
        out = []
        for _ in range(30):
            step(s, spec)
            out.append(target_probability(s, target))
        return np.array(out)

    assert np.max(np.abs(trace((0, 0)) - trace((2, 3)))) < 1e-13
