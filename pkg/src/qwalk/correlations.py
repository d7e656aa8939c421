"""
Mutual-information measures between the control, coin and position registers.

Every measure is evaluated from the three small reduced states (control,
coin, control+coin). For a pure global state the entropy of any subsystem
equals that of its complement, which covers all position-containing terms.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum
from typing import Iterable

import numpy as np
from numpy.typing import NDArray

from .grid import WalkState, reduced_density, von_neumann_entropy

__all__ = [
    "CorrelationKind",
    "CorrelationSeries",
    "mutual_information",
    "ccm",
    "ccm_of_density",
    "correlation_values",
    "smooth",
    "normalize",
    "odd_window",
]


class CorrelationKind(str, Enum):
    MI_CTR_REST = "MI_ctr_rest"  # control | coin+position
    MI_CTRCOIN_POS = "MI_ctrcoin_pos"  # control+coin | position
    MI_POSCTR_COIN = "MI_posctr_coin"  # position+control | coin
    MI_COIN_POS = "MI_coin_pos"
    MI_CTR_COIN = "MI_ctr_coin"
    MI_CTR_POS = "MI_ctr_pos"
    CCM_CTRCOIN = "CCM_ctrcoin"


MI_KINDS = tuple(k for k in CorrelationKind if k is not CorrelationKind.CCM_CTRCOIN)


def _entropies(state: WalkState) -> tuple[float, float, float, NDArray[np.complex128]]:
    rho_cc = reduced_density(state, "control+coin")
    r = rho_cc.reshape(2, 4, 2, 4)
    s_ctr = von_neumann_entropy(np.einsum("aibi->ab", r))
    s_coin = von_neumann_entropy(np.einsum("aiaj->ij", r))
    s_cc = von_neumann_entropy(rho_cc)
    return s_ctr, s_coin, s_cc, rho_cc


def _mi_from_entropies(kind: CorrelationKind, s_ctr: float, s_coin: float, s_cc: float) -> float:
    # S(pos) = S(ctr,coin), S(coin,pos) = S(ctr), S(ctr,pos) = S(coin)
    if kind is CorrelationKind.MI_CTR_REST:
        return 2.0 * s_ctr
    if kind is CorrelationKind.MI_CTRCOIN_POS:
        return 2.0 * s_cc
    if kind is CorrelationKind.MI_POSCTR_COIN:
        return 2.0 * s_coin
    if kind is CorrelationKind.MI_COIN_POS:
        return s_coin + s_cc - s_ctr
    if kind is CorrelationKind.MI_CTR_COIN:
        return s_ctr + s_coin - s_cc
    if kind is CorrelationKind.MI_CTR_POS:
        return s_ctr + s_cc - s_coin
    raise ValueError(f"{kind} is not a bipartite mutual information")


def mutual_information(state: WalkState, kind: CorrelationKind | str) -> float:
    """Bipartite mutual information (bits) of the given kind for a pure state."""
    kind = CorrelationKind(kind)
    s_ctr, s_coin, s_cc, _ = _entropies(state)
    return _mi_from_entropies(kind, s_ctr, s_coin, s_cc)


def ccm_of_density(rho: NDArray[np.complex128]) -> float:
    """Sum of single-qubit-cut mutual informations of a 3-qubit density matrix.

    Qubit order is (control, coin-high, coin-low), i.e. row index ``ctr*4 + coin``.
    """
    r = np.asarray(rho).reshape(2, 2, 2, 2, 2, 2)
    s_all = von_neumann_entropy(rho)
    total = 0.0
    # (single qubit, remaining pair) reductions
    cuts = (
        ("abcdbc->ad", "abcaef->bcef"),
        ("abcaec->be", "abcdbf->acdf"),
        ("abcabf->cf", "abcdec->abde"),
    )
    for one, rest in cuts:
        s_one = von_neumann_entropy(np.einsum(one, r))
        s_rest = von_neumann_entropy(np.einsum(rest, r).reshape(4, 4))
        total += s_one + s_rest - s_all
    return total


def ccm(state: WalkState) -> float:
    """Cumulative correlation of the 3-qubit control+coin reduced state."""
    return ccm_of_density(reduced_density(state, "control+coin"))


def correlation_values(state: WalkState, kinds: Iterable[CorrelationKind | str]) -> dict[str, float]:
    """Evaluate several kinds while sharing one set of reduced states."""
    s_ctr, s_coin, s_cc, rho_cc = _entropies(state)
    out = {}
    for kind in kinds:
        kind = CorrelationKind(kind)
        if kind is CorrelationKind.CCM_CTRCOIN:
            out[kind.value] = ccm_of_density(rho_cc)
        else:
            out[kind.value] = _mi_from_entropies(kind, s_ctr, s_coin, s_cc)
    return out


@dataclass(frozen=True)
class CorrelationSeries:
    kind: CorrelationKind
    values: NDArray[np.float64]
    smoothed: NDArray[np.float64] | None = None
    normalized: bool = False

    @property
    def curve(self) -> NDArray[np.float64]:
        return self.values if self.smoothed is None else self.smoothed


def odd_window(width: int) -> int:
    """Round ``width`` up to the nearest odd integer >= 1."""
    width = max(int(width), 1)
    return width if width % 2 else width + 1


def _moving_average(values: NDArray[np.float64], window: int) -> NDArray[np.float64]:
    if window < 1 or window % 2 == 0:
        raise ValueError(f"window must be a positive odd integer, got {window}")
    v = np.asarray(values, dtype=np.float64)
    if window == 1 or v.size == 0:
        return v.copy()
    half = window // 2
    csum = np.concatenate(([0.0], np.cumsum(v)))
    idx = np.arange(v.size)
    lo = np.maximum(idx - half, 0)
    hi = np.minimum(idx + half + 1, v.size)
    return (csum[hi] - csum[lo]) / (hi - lo)


def smooth(series: CorrelationSeries | NDArray[np.float64], window: int):
    """Centered moving average; near the ends the window is truncated.

    Accepts a :class:`CorrelationSeries` (returns one with ``smoothed`` set) or a
    plain array (returns an array).
    """
    if isinstance(series, CorrelationSeries):
        return replace(series, smoothed=_moving_average(series.curve, window))
    return _moving_average(series, window)


def normalize(series: CorrelationSeries | NDArray[np.float64]):
    """Scale by the largest absolute value so the maximum magnitude is 1."""
    if isinstance(series, CorrelationSeries):
        scale = _scale(series.curve)
        sm = None if series.smoothed is None else series.smoothed / scale
        return replace(series, values=series.values / scale, smoothed=sm, normalized=True)
    return np.asarray(series, dtype=np.float64) / _scale(series)


def _scale(v) -> float:
    m = float(np.max(np.abs(v))) if np.size(v) else 0.0
    if m == 0.0 or not np.isfinite(m):
        raise ValueError("cannot normalize an all-zero series")
    return m
