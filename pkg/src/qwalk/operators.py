"""
Structured walk operators acting in place on a :class:`~qwalk.grid.WalkState`.

One step is ``U = W O``: the oracle reflection followed by the conditional walk.
Each operator costs O(N) (the oracle O(1)) and allocates at most one coin-sized
temporary.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from .grid import DOWN, LEFT, RIGHT, UP, WalkState
from .reference import build_dense_unitary

__all__ = [
    "OracleSpec",
    "tulsi_delta",
    "apply_oracle",
    "apply_coin",
    "apply_shift",
    "apply_conditional_walk",
    "step",
    "build_dense_unitary",
]


@dataclass(frozen=True)
class OracleSpec:
    """Reflection angle ``delta`` and marked position ``target = (x, y)``."""

    delta: float
    target: tuple[int, int] = (0, 0)

    def __post_init__(self) -> None:
        if not (0.0 <= self.delta < math.pi / 2):
            raise ValueError(f"delta must lie in [0, pi/2), got {self.delta}")
        object.__setattr__(self, "target", (int(self.target[0]), int(self.target[1])))

    @property
    def control_axis(self) -> tuple[float, float]:
        """Amplitudes of ``|delta_ctr> = -sin(delta)|0> + cos(delta)|1>``."""
        return -math.sin(self.delta), math.cos(self.delta)


def tulsi_delta(n_positions: int) -> float:
    """``arccos(1 / sqrt(log2 N))``, the angle that makes the success probability N-independent."""
    return math.acos(1.0 / math.sqrt(math.log2(n_positions)))


def apply_oracle(state: WalkState, spec: OracleSpec) -> WalkState:
    """Reflect about ``|delta_ctr, u_c, t>``. Only the 8 target amplitudes change."""
    x, y = state.geometry.check_position(spec.target)
    s0, s1 = spec.control_axis
    b = state.blocks
    a = b[:, :, y, x]
    overlap = 0.5 * (s0 * a[0].sum() + s1 * a[1].sum())
    a[0] -= overlap * s0
    a[1] -= overlap * s1
    return state


def _grover_coin(w: NDArray[np.complex128]) -> NDArray[np.complex128]:
    # C0 v = -v + 2<u|v>u = sum(v)/2 - v, for each coin 4-vector along axis 0
    half = w.sum(axis=0)
    half *= 0.5
    return half - w


def _flip_flop_shift(src: NDArray[np.complex128], dst: NDArray[np.complex128]) -> None:
    # src, dst: (4, L, L) indexed [coin, y, x]; periodic boundaries
    dst[LEFT, :, 1:] = src[RIGHT, :, :-1]
    dst[LEFT, :, 0] = src[RIGHT, :, -1]
    dst[RIGHT, :, :-1] = src[LEFT, :, 1:]
    dst[RIGHT, :, -1] = src[LEFT, :, 0]
    dst[DOWN, 1:, :] = src[UP, :-1, :]
    dst[DOWN, 0, :] = src[UP, -1, :]
    dst[UP, :-1, :] = src[DOWN, 1:, :]
    dst[UP, -1, :] = src[DOWN, 0, :]


def apply_coin(state: WalkState) -> WalkState:
    """Apply the Grover coin to every coin 4-vector, in both control blocks."""
    b = state.blocks
    for ctr in (0, 1):
        b[ctr] = _grover_coin(b[ctr])
    return state


def apply_shift(state: WalkState) -> WalkState:
    """Apply the flip-flop shift in both control blocks.

    ``|R, x, y> -> |L, x+1, y>``, ``|L, x, y> -> |R, x-1, y>``,
    ``|U, x, y> -> |D, x, y+1>``, ``|D, x, y> -> |U, x, y-1>``, all mod L.
    """
    b = state.blocks
    for ctr in (0, 1):
        src = b[ctr].copy()
        _flip_flop_shift(src, b[ctr])
    return state


def apply_conditional_walk(state: WalkState) -> WalkState:
    """Coin-then-shift on the control-1 block, ``-1`` on the control-0 block."""
    b = state.blocks
    b[0] *= -1.0
    _flip_flop_shift(_grover_coin(b[1]), b[1])
    return state


def step(state: WalkState, spec: OracleSpec) -> WalkState:
    """One walk step ``U = W O``."""
    apply_oracle(state, spec)
    return apply_conditional_walk(state)
