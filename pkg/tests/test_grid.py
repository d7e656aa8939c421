import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qwalk import GridGeometry, WalkState, make_initial_state, step, OracleSpec
from qwalk.grid import (
    DOWN,
    reduced_density,
    subsystem_entropy,
    target_probability,
    von_neumann_entropy,
)
from qwalk.reference import dense_entropy, dense_reduced_density

from conftest import bell_state, random_state


@pytest.mark.parametrize("n", [2, 4, 10])
def test_geometry(n):
    g = GridGeometry(n)
    assert g.side ** 2 == g.n_positions == 2 ** n
    assert g.dim == 8 * g.n_positions


@pytest.mark.parametrize("n", [0, 3, 7])
def test_geometry_rejects_odd_or_empty(n):
    with pytest.raises(ValueError):
        GridGeometry(n)


def test_index_is_bijection():
    g = GridGeometry(4)
    seen = {
        g.index(c, i, x, y)
        for c in range(2)
        for i in range(4)
        for x in range(g.side)
        for y in range(g.side)
    }
    assert seen == set(range(g.dim))
    # position fastest-varying
    assert g.index(1, 2, 3, 1) == 1 * 64 + 2 * 16 + 1 * 4 + 3


def test_initial_state_n4():
    s = make_initial_state(GridGeometry(2))
    assert np.all(s.amplitudes[16:] == 0.25)
    assert np.all(s.amplitudes[:16] == 0)


def test_initial_state_n16_amplitude():
    s = make_initial_state(GridGeometry(4))
    assert s.amplitude(1, DOWN, 3, 0) == pytest.approx(1 / 8)


@pytest.mark.parametrize("n", [2, 4, 8, 12])
def test_initial_state_normalized(n):
    assert make_initial_state(GridGeometry(n)).norm() == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("target", [(0, 0), (3, 1), (2, 3)])
def test_target_probability_initial(target):
    s = make_initial_state(GridGeometry(4))
    assert target_probability(s, target) == pytest.approx(1 / 16, abs=1e-15)


def test_target_probability_concentrated():
    g = GridGeometry(4)
    amps = np.zeros(g.dim, dtype=complex)
    for coin in range(4):
        amps[g.index(1, coin, 2, 1)] = 0.5
    assert target_probability(WalkState(g, amps), (2, 1)) == pytest.approx(1.0)


def test_target_probability_out_of_range():
    with pytest.raises(ValueError):
        target_probability(make_initial_state(GridGeometry(4)), (4, 0))


def test_target_probability_matches_dense_projector(g16):
    spec = OracleSpec(math.pi / 4, (0, 0))
    s = make_initial_state(g16)
    for _ in range(5):
        step(s, spec)
    proj = np.zeros(g16.dim)
    for c in range(2):
        for i in range(4):
            proj[g16.index(c, i, 0, 0)] = 1.0
    psi = s.amplitudes
    assert target_probability(s, (0, 0)) == pytest.approx(float(np.real(psi.conj() @ (proj * psi))), abs=1e-14)


def test_reduced_density_product_state():
    rho = reduced_density(make_initial_state(GridGeometry(4)), "control")
    assert np.allclose(rho, [[0, 0], [0, 1]], atol=1e-15)


def test_reduced_density_bell():
    rho = reduced_density(bell_state(GridGeometry(4)), "control")
    assert np.allclose(rho, np.eye(2) / 2, atol=1e-15)


@pytest.mark.parametrize(
    "sub, keep",
    [("control", ("control",)), ("coin", ("coin",)), ("control+coin", ("control", "coin"))],
)
def test_reduced_density_matches_dense(g16, sub, keep):
    s = make_initial_state(g16)
    spec = OracleSpec(math.pi / 4)
    for _ in range(3):
        step(s, spec)
    ref = dense_reduced_density(s.amplitudes, g16.n_positions, keep)
    assert np.max(np.abs(reduced_density(s, sub) - ref)) < 1e-12


def test_reduced_density_invariants(g16, rng):
    s = random_state(g16, rng)
    for sub, dim in (("control", 2), ("coin", 4), ("control+coin", 8)):
        rho = reduced_density(s, sub)
        assert rho.shape == (dim, dim)
        assert np.allclose(rho, rho.conj().T, atol=1e-12)
        assert abs(np.trace(rho) - 1) < 1e-12
        assert np.linalg.eigvalsh(rho).min() > -1e-12


def test_entropy_values():
    assert von_neumann_entropy(np.eye(2) / 2) == pytest.approx(1.0)
    assert von_neumann_entropy(np.diag([0.5, 0.25, 0.25])) == pytest.approx(1.5)
    v = np.array([1, 1j, 0, -1]) / math.sqrt(3)
    assert von_neumann_entropy(np.outer(v, v.conj())) == pytest.approx(0.0, abs=1e-12)


def test_entropy_qubit_closed_form():
    # eigenvalues (0.75, 0.25) in a rotated basis
    expected = -(0.75 * math.log2(0.75) + 0.25 * math.log2(0.25))
    assert expected == pytest.approx(0.81128, abs=1e-5)
    u = np.array([[1, 1], [1, -1]]) / math.sqrt(2)
    rho = u @ np.diag([0.75, 0.25]) @ u.T
    assert von_neumann_entropy(rho) == pytest.approx(expected, abs=1e-12)


def test_entropy_rejects_bad_trace():
    with pytest.raises(ValueError):
        von_neumann_entropy(np.eye(2))


def test_entropy_clamps_tiny_negative():
    rho = np.diag([1.0 + 5e-13, -5e-13])
    assert von_neumann_entropy(rho) == 0.0
    with pytest.raises(ValueError):
        von_neumann_entropy(np.diag([1.0 + 1e-9, -1e-9]))


def test_subsystem_entropy_examples():
    g = GridGeometry(4)
    assert subsystem_entropy(make_initial_state(g), "control") == 0.0
    assert subsystem_entropy(bell_state(g), "control") == pytest.approx(1.0)
    assert subsystem_entropy(bell_state(g), "coin+position") == pytest.approx(1.0)


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_entropy_duality_against_dense(seed):
    g = GridGeometry(4)
    s = random_state(g, np.random.default_rng(seed))
    psi, n = s.amplitudes, g.n_positions
    for sub, keep in (
        ("position", ("position",)),
        ("coin+position", ("coin", "position")),
        ("control+position", ("control", "position")),
    ):
        ref = dense_entropy(dense_reduced_density(psi, n, keep))
        assert abs(subsystem_entropy(s, sub) - ref) < 1e-10
    # rho_p has at most 8 nonzero eigenvalues, equal to those of rho_{ctr,c}
    ev_p = np.sort(np.linalg.eigvalsh(dense_reduced_density(psi, n, ("position",))))[::-1]
    ev_cc = np.sort(np.linalg.eigvalsh(reduced_density(s, "control+coin")))[::-1]
    assert np.all(np.abs(ev_p[8:]) < 1e-10)
    assert np.max(np.abs(ev_p[:8] - ev_cc)) < 1e-10
