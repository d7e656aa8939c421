import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qwalk import (
    GridGeometry,
    IMAConfig,
    RunTrace,
    efficiency,
    optimal_kmax,
    order_fit,
    repetitions_needed,
    resolve_lapse,
    run_ima_deterministic,
    sweep_lapse,
    sweep_order,
    total_steps,
)
from qwalk.analysis import UNITARY, SweepResult, SweepRow, default_jobs, run_cell

probs = st.floats(1e-6, 1 - 1e-6)


def synthetic_trace(pc):
    pc = np.asarray(pc, dtype=float)
    n = pc.size
    return RunTrace(
        p_target=pc.copy(),
        is_measurement=np.zeros(n, bool),
        p0=np.full(n, np.nan),
        survival=np.ones(n),
        p_cumulative=pc,
        p_control_one=np.ones(n),
    )


def test_repetitions_examples():
    assert repetitions_needed(0.5, 0.75) == pytest.approx(2.0)
    assert repetitions_needed(0.3, 0.3) == 1.0
    assert repetitions_needed(0.1, 0.9) == pytest.approx(21.854, abs=1e-3)


@pytest.mark.parametrize("p0, p", [(0.0, 0.5), (1.0, 0.5), (0.5, 0.0), (0.5, 1.0)])
def test_repetitions_domain(p0, p):
    with pytest.raises(ValueError):
        repetitions_needed(p0, p)


def test_total_steps_examples():
    assert total_steps(100, 0.5, 0.75) == pytest.approx(200.0)
    assert total_steps(37, 0.42, 0.42) == 37
    assert efficiency(100, 0.75, 0.75) == pytest.approx(0.01)
    assert efficiency(200, 0.3, 0.9) == pytest.approx(efficiency(100, 0.3, 0.9) / 2)


@given(k=st.integers(1, 10_000), pc=probs, p=probs)
def test_scale_consistency(k, pc, p):
    ts = total_steps(k, pc, p)
    assert ts == k * repetitions_needed(pc, p)
    assert efficiency(k, pc, p) * ts == pytest.approx(1.0, rel=4e-16, abs=0)


@given(pa=probs, pb=probs, p=probs, q=probs, ka=st.integers(1, 5000), kb=st.integers(1, 5000))
def test_cost_ratio_independent_of_target(pa, pb, p, q, ka, kb):
    r1 = total_steps(ka, pa, p) / total_steps(kb, pb, p)
    r2 = total_steps(ka, pa, q) / total_steps(kb, pb, q)
    assert r1 == pytest.approx(r2, rel=1e-12)


def test_optimal_kmax_interior_maximum():
    k = np.arange(60)
    hazard = 5 * (1 - np.exp(-((k / 20.0) ** 3)))  # slow start, then saturating
    pc = 1 - np.exp(-hazard)
    k_opt, ts = optimal_kmax(synthetic_trace(pc), 0.5)
    ts_all = [total_steps(int(j), pc[j], 0.5) for j in range(1, 60)]
    assert k_opt == 1 + int(np.argmin(ts_all))
    assert 1 < k_opt < 59
    assert ts == pytest.approx(min(ts_all))


def test_optimal_kmax_constant_hazard_ties_to_smallest():
    c = 0.03
    k = np.arange(40)
    pc = 1 - (1 - c) ** k  # e(k) is constant
    k_opt, _ = optimal_kmax(synthetic_trace(pc), 0.5)
    assert k_opt == 1


def test_optimal_kmax_rejects_zero():
    with pytest.raises(ValueError):
        optimal_kmax(synthetic_trace(np.zeros(10)), 0.5)


@pytest.mark.parametrize(
    "rule, n, expected",
    [
        ("unitary", 256, None),
        (None, 256, None),
        ("1", 256, 1),
        (3, 256, 3),
        ("sqrtN", 256, 16),
        ("sqrtN/4", 256, 4),
        ("2sqrtN", 256, 32),
        ("sqrtN/16", 64, 1),  # 0.5 rounds to at least 1
    ],
)
def test_resolve_lapse(rule, n, expected):
    assert resolve_lapse(rule, n) == expected


@pytest.mark.parametrize("rule", ["abc", "sqrtN/x", "sqrtN*2", "sqrtN/0"])
def test_resolve_lapse_bad(rule):
    with pytest.raises(ValueError):
        resolve_lapse(rule, 256)


def test_order_fit_exact():
    ns = [2**n for n in (8, 10, 12, 14)]
    ts = {n: math.sqrt(n) * math.log2(n) ** 0.9 for n in ns}
    assert order_fit(ts, 0.9).flatness == pytest.approx(1.0, abs=1e-12)
    assert np.all(np.diff(order_fit(ts, 0.6).values) > 0)


def test_order_fit_needs_three_sizes():
    with pytest.raises(ValueError):
        order_fit({256: 1.0, 1024: 2.0}, 1.0)


def test_sweep_result_sorted():
    rows = [
        SweepRow(1024, UNITARY, 1, 0.5, 1, 1, 1),
        SweepRow(256, 4, 1, 0.5, 1, 1, 1),
        SweepRow(1024, 2, 1, 0.5, 1, 1, 1),
    ]
    res = SweepResult(rows)
    assert [(r.n_positions, r.lapse) for r in res.rows] == [(256, 4), (1024, 2), (1024, UNITARY)]


def test_run_cell_consistent_with_trace():
    g = GridGeometry(8)
    row = run_cell(g, math.pi / 4, 4, 0.5)
    tr = run_ima_deterministic(IMAConfig(g, lapse=4))
    assert row.p_c_final == pytest.approx(tr.final_cumulative, abs=1e-15)
    assert row.ts == pytest.approx(total_steps(tr.k_max, tr.final_cumulative, 0.5))
    assert row.ts_at_optimal > 0 and row.optimal_k >= 1


def test_sweep_lapse_schema_and_tulsi():
    g = GridGeometry(10)
    d = math.acos(1 / math.sqrt(10))
    res = sweep_lapse(g, d, ["2sqrtN", "sqrtN", "sqrtN/2", "sqrtN/4", "sqrtN/8"])
    unitary = res.select(lapse=UNITARY)
    assert len(unitary) == 1
    for row in res.rows:
        assert row.ts > 0 and 0 < row.p_c_final < 1
        assert row.p_c_final <= unitary[0].p_c_final
    assert sorted(r.m for r in res.rows if r.m is not None) == [0.5, 1, 2, 4, 8]


def test_sweep_lapse_correlation_extras():
    res = sweep_lapse(GridGeometry(8), math.pi / 4, ["sqrtN/4"], include_unitary=False, correlations=["MI_coin_pos"])
    (row,) = res.rows
    assert set(row.extras) == {"MI_coin_pos@kmax", "MI_coin_pos@opt"}


def test_sweep_order_monotone_in_n():
    for rule in ("1", "unitary", "sqrtN/2"):
        res = sweep_order([6, 8, 10], math.pi / 4, rule)
        ts = [r.ts for r in res.rows]
        assert np.all(np.diff(ts) > 0)


def test_sweep_order_empty():
    with pytest.raises(ValueError):
        sweep_order([], math.pi / 4, "1")


def test_sweep_parallel_matches_serial():
    a = sweep_order([6, 8], math.pi / 4, "sqrtN/2", jobs=1)
    b = sweep_order([6, 8], math.pi / 4, "sqrtN/2", jobs=2)
    assert a.rows == b.rows


def test_default_jobs(monkeypatch):
    monkeypatch.setenv("QWALK_JOBS", "3")
    assert default_jobs() == 3
    monkeypatch.setenv("QWALK_JOBS", "junk")
    assert default_jobs() == 1
