"""
Classical amplification cost, optimal stopping and order estimates.

Repeating an experiment with success probability ``p`` until the overall
success probability reaches ``P`` needs ``log(1-P)/log(1-p)`` runs on average
(geometric distribution). The total step count ``TS = k_max * R`` is the cost
whose growth with N gives the order of the search.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from numpy.typing import NDArray

from .correlations import odd_window, smooth
from .engine import IMAConfig, RunTrace, default_kmax, run_ima_deterministic
from .grid import GridGeometry

__all__ = [
    "UNITARY",
    "ALPHA_GRID",
    "repetitions_needed",
    "total_steps",
    "efficiency",
    "efficiency_series",
    "optimal_kmax",
    "resolve_lapse",
    "lapse_label",
    "SweepRow",
    "SweepResult",
    "OrderFitSeries",
    "run_cell",
    "sweep_lapse",
    "sweep_order",
    "order_fit",
    "default_jobs",
]

UNITARY = "unitary"
ALPHA_GRID = (0.6, 0.9, 1.25, 1.5)
HORIZON_FACTOR = 2
TIE_RTOL = 1e-12


def _check_open_unit(name: str, value: float) -> None:
    if not 0.0 < value < 1.0:
        raise ValueError(f"{name} must lie strictly between 0 and 1, got {value}")


def repetitions_needed(p0: float, p: float) -> float:
    """Expected number of independent repetitions to reach overall success ``p``."""
    _check_open_unit("P0", p0)
    _check_open_unit("P", p)
    return math.log1p(-p) / math.log1p(-p0)


def total_steps(k_max: int, p_c: float, p: float) -> float:
    return k_max * repetitions_needed(p_c, p)


def efficiency(k: int, p_c: float, p: float) -> float:
    """Inverse cost per step, ``1 / total_steps(k, p_c, p)``."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    return 1.0 / total_steps(k, p_c, p)


def efficiency_series(trace: RunTrace, p: float) -> NDArray[np.float64]:
    """``e(k)`` for every step of a trace; 0 where ``P_c(k)`` is 0 (and at k=0)."""
    _check_open_unit("P", p)
    pc = np.asarray(trace.p_cumulative, dtype=np.float64)
    k = np.arange(pc.size, dtype=np.float64)
    e = np.zeros_like(pc)
    ok = (k >= 1) & (pc > 0.0)
    clipped = np.minimum(pc[ok], np.nextafter(1.0, 0.0))
    e[ok] = np.log1p(-clipped) / (k[ok] * math.log1p(-p))
    return e


def optimal_kmax(trace: RunTrace, p: float, smoothing_window: int = 1) -> tuple[int, float]:
    """Step count minimizing total cost, located on the smoothed efficiency curve.

    The returned ``TS`` is the unsmoothed total step count at that step. Ties go to
    the smaller ``k``.
    """
    if len(trace) < 2:
        raise ValueError("trace has no steps")
    if not np.any(np.asarray(trace.p_cumulative)[1:] > 0.0):
        raise ValueError("cumulative probability is identically zero")
    e = efficiency_series(trace, p)
    es = smooth(e, odd_window(smoothing_window))
    es[0] = -np.inf
    best = es.max()
    # equal within rounding counts as a tie
    k_opt = int(np.flatnonzero(es >= best - TIE_RTOL * abs(best))[0])
    return k_opt, total_steps(k_opt, float(trace.p_cumulative[k_opt]), p)


def resolve_lapse(rule: str | int | None, n_positions: int) -> int | None:
    """Turn a lapse rule into a step count.

    Rules: ``"unitary"``/``None``; an integer (constant lapse); ``"sqrtN"``,
    ``"sqrtN/m"`` or ``"<c>sqrtN"``, rounded to the nearest integer >= 1.
    """
    if rule is None or rule == UNITARY:
        return None
    if isinstance(rule, (int, np.integer)):
        return max(int(rule), 1)
    text = str(rule).replace(" ", "")
    if "sqrtN" not in text:
        try:
            return max(int(text), 1)
        except ValueError:
            raise ValueError(f"unrecognized lapse rule {rule!r}") from None
    head, _, tail = text.partition("sqrtN")
    try:
        coeff = float(head) if head else 1.0
        div = float(tail[1:]) if tail.startswith("/") else (1.0 if not tail else None)
    except ValueError:
        div = None
    if div is None or div <= 0 or coeff <= 0:
        raise ValueError(f"unrecognized lapse rule {rule!r}")
    return max(int(round(coeff * math.sqrt(n_positions) / div)), 1)


def lapse_label(lapse: int | None) -> str:
    return UNITARY if lapse is None else str(lapse)


@dataclass(frozen=True)
class SweepRow:
    n_positions: int
    lapse: int | str  # "unitary" for the unmeasured run
    k_max_used: int
    p_c_final: float
    ts: float
    optimal_k: int
    ts_at_optimal: float
    extras: dict[str, float] = field(default_factory=dict, compare=False)

    @property
    def m(self) -> float | None:
        """``sqrt(N) / l``; the lapse-sweep axis."""
        return None if self.lapse == UNITARY else math.sqrt(self.n_positions) / int(self.lapse)

    @property
    def log2_n(self) -> int:
        return self.n_positions.bit_length() - 1


@dataclass
class SweepResult:
    rows: list[SweepRow] = field(default_factory=list)

    def __post_init__(self) -> None:
        self.rows.sort(key=_row_key)

    def select(self, lapse=None, n_positions: int | None = None) -> list[SweepRow]:
        out = self.rows
        if lapse is not None:
            out = [r for r in out if r.lapse == lapse]
        if n_positions is not None:
            out = [r for r in out if r.n_positions == n_positions]
        return out

    def ts_by_n(self) -> dict[int, float]:
        return {r.n_positions: r.ts for r in self.rows}


def _row_key(row: SweepRow) -> tuple[int, int]:
    # unitary sorts after every finite lapse
    return row.n_positions, (math.inf if row.lapse == UNITARY else int(row.lapse))


@dataclass(frozen=True)
class OrderFitSeries:
    alpha: float
    n_positions: NDArray[np.int64]
    values: NDArray[np.float64]
    beta: float = 1.0

    @property
    def flatness(self) -> float:
        """max/min of the fit curve over the three largest N."""
        top = self.values[-3:]
        return float(top.max() / top.min())

    def top(self, count: int = 3) -> NDArray[np.float64]:
        return self.values[-count:]


def default_jobs() -> int:
    raw = os.environ.get("QWALK_JOBS")
    if raw:
        try:
            return max(int(raw), 1)
        except ValueError:
            pass
    return 1


def run_cell(
    geometry: GridGeometry,
    delta: float,
    lapse: int | None,
    p: float,
    k_max: int | None = None,
    horizon: int | None = None,
    target: tuple[int, int] = (0, 0),
    correlations: Sequence[str] = (),
) -> SweepRow:
    """Run one (N, lapse) cell: TS at the standard ``k_max`` and at the optimum.

    The optimum is searched over steps ``1..horizon`` (default ``2 * k_max``).
    Requested correlation kinds are smoothed like ``e(k)`` and reported in
    ``extras`` at both step counts, keyed ``<kind>@kmax`` and ``<kind>@opt``.
    """
    k_std = default_kmax(geometry) if k_max is None else k_max
    k_run = HORIZON_FACTOR * k_std if horizon is None else max(horizon, k_std)
    config = IMAConfig(geometry, delta=delta, target=target, lapse=lapse, k_max=k_run, success_target=p)
    trace = run_ima_deterministic(config, correlations=correlations)
    pc = float(trace.p_cumulative[k_std])
    window = odd_window(lapse or 1)
    k_opt, ts_opt = optimal_kmax(trace, p, window)
    extras = {}
    for kind, values in trace.correlations.items():
        sm = smooth(values, window)
        extras[f"{kind}@kmax"] = float(sm[k_std])
        extras[f"{kind}@opt"] = float(sm[k_opt])
    return SweepRow(
        n_positions=geometry.n_positions,
        lapse=UNITARY if lapse is None else lapse,
        k_max_used=k_std,
        p_c_final=pc,
        ts=total_steps(k_std, pc, p),
        optimal_k=k_opt,
        ts_at_optimal=ts_opt,
        extras=extras,
    )


def _cell_args(args):
    return run_cell(*args)


def _run_cells(cells: Sequence[tuple], jobs: int | None) -> list[SweepRow]:
    jobs = default_jobs() if jobs is None else max(int(jobs), 1)
    if jobs == 1 or len(cells) <= 1:
        return [run_cell(*c) for c in cells]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_cell_args, cells))


def sweep_lapse(
    geometry: GridGeometry,
    delta: float,
    lapses: Iterable[int | str | None],
    p: float = 0.5,
    include_unitary: bool = True,
    jobs: int | None = None,
    correlations: Sequence[str] = (),
) -> SweepResult:
    """TS at standard and optimal ``k_max`` for each lapse at a fixed grid size."""
    resolved = {resolve_lapse(l, geometry.n_positions) for l in lapses}
    if include_unitary:
        resolved.add(None)
    order = sorted(resolved, key=lambda v: math.inf if v is None else v)
    cells = [(geometry, delta, l, p, None, None, (0, 0), tuple(correlations)) for l in order]
    return SweepResult(_run_cells(cells, jobs))


def sweep_order(
    exponents: Sequence[int],
    delta: float | str,
    lapse_rule: str | int | None,
    p: float = 0.5,
    jobs: int | None = None,
) -> SweepResult:
    """TS as a function of N for one lapse rule.

    ``delta`` may be ``"tulsi"`` to use the N-dependent Tulsi angle per grid.
    """
    if not exponents:
        raise ValueError("exponent list is empty")
    from .operators import tulsi_delta

    cells = []
    for n in sorted(set(exponents)):
        geom = GridGeometry(n)
        d = tulsi_delta(geom.n_positions) if delta == "tulsi" else float(delta)
        cells.append((geom, d, resolve_lapse(lapse_rule, geom.n_positions), p))
    return SweepResult(_run_cells(cells, jobs))


def order_fit(sweep: SweepResult | dict[int, float], alpha: float, beta: float = 1.0) -> OrderFitSeries:
    """``TS / (beta * sqrt(N) * log2(N)**alpha)`` across the grid sizes of a sweep."""
    ts = sweep.ts_by_n() if isinstance(sweep, SweepResult) else dict(sweep)
    if len(ts) < 3:
        raise ValueError("order fit needs at least three grid sizes")
    ns = np.array(sorted(ts), dtype=np.int64)
    tsv = np.array([ts[n] for n in ns], dtype=np.float64)
    values = tsv / (beta * np.sqrt(ns) * np.log2(ns) ** alpha)
    return OrderFitSeries(alpha=alpha, n_positions=ns, values=values, beta=beta)
