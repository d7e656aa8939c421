"""
Dense brute-force reference for small grids.

Everything here is assembled from the operator definitions with explicit
Kronecker products and basis-state loops, never through the structured
routines in :mod:`qwalk.operators`, so it can serve as an independent oracle.
"""

from __future__ import annotations

import math

import numpy as np
from numpy.typing import NDArray

from .grid import DOWN, LEFT, RIGHT, UP, GridGeometry

MAX_DENSE_POSITIONS = 64

# Basis transitions of the flip-flop shift: (from_coin, to_coin, dx, dy).
_SHIFT_TABLE = (
    (RIGHT, LEFT, +1, 0),
    (LEFT, RIGHT, -1, 0),
    (UP, DOWN, 0, +1),
    (DOWN, UP, 0, -1),
)


def _guard(geometry: GridGeometry) -> None:
    if geometry.n_positions > MAX_DENSE_POSITIONS:
        raise ValueError(
            f"dense reference limited to N <= {MAX_DENSE_POSITIONS} (got {geometry.n_positions})"
        )


def dense_shift(geometry: GridGeometry) -> NDArray[np.complex128]:
    """``4N x 4N`` flip-flop shift on coin (x) position, built column by column."""
    _guard(geometry)
    n, side = geometry.n_positions, geometry.side
    s = np.zeros((4 * n, 4 * n), dtype=np.complex128)
    for c_from, c_to, dx, dy in _SHIFT_TABLE:
        for y in range(side):
            for x in range(side):
                col = c_from * n + y * side + x
                row = c_to * n + ((y + dy) % side) * side + (x + dx) % side
                s[row, col] = 1.0
    return s


def dense_coin(geometry: GridGeometry) -> NDArray[np.complex128]:
    """``C0 (x) I_p`` with ``C0 = -I + 2|u_c><u_c|``."""
    _guard(geometry)
    u = np.full(4, 0.5)
    c0 = -np.eye(4) + 2.0 * np.outer(u, u)
    return np.kron(c0, np.eye(geometry.n_positions)).astype(np.complex128)


def dense_oracle(geometry: GridGeometry, delta: float, target: tuple[int, int]) -> NDArray[np.complex128]:
    """``I - 2|v><v|`` with ``v = |delta_ctr> (x) |u_c> (x) |t>``."""
    _guard(geometry)
    ctr = np.array([-math.sin(delta), math.cos(delta)])
    u = np.full(4, 0.5)
    t = np.zeros(geometry.n_positions)
    t[geometry.position_index(*geometry.check_position(target))] = 1.0
    v = np.kron(ctr, np.kron(u, t))
    return (np.eye(geometry.dim) - 2.0 * np.outer(v, v)).astype(np.complex128)


def dense_walk(geometry: GridGeometry) -> NDArray[np.complex128]:
    """``|1><1| (x) S C - |0><0| (x) I``."""
    p0 = np.diag([1.0, 0.0])
    p1 = np.diag([0.0, 1.0])
    sc = dense_shift(geometry) @ dense_coin(geometry)
    return np.kron(p1, sc) - np.kron(p0, np.eye(4 * geometry.n_positions))


def build_dense_unitary(geometry: GridGeometry, spec) -> NDArray[np.complex128]:
    """Explicit ``8N x 8N`` matrix of one step ``U = W O`` (N <= 64 only)."""
    _guard(geometry)
    return dense_walk(geometry) @ dense_oracle(geometry, spec.delta, spec.target)


def dense_initial_state(geometry: GridGeometry) -> NDArray[np.complex128]:
    return np.kron(
        np.array([0.0, 1.0]),
        np.kron(np.full(4, 0.5), np.full(geometry.n_positions, geometry.n_positions**-0.5)),
    ).astype(np.complex128)


# Partial traces on the full density matrix, tensor factors (ctr, coin, pos).

_FACTORS = ("control", "coin", "position")


def dense_reduced_density(psi: NDArray[np.complex128], n_positions: int, keep: tuple[str, ...]) -> NDArray[np.complex128]:
    """Reduced density matrix of the factors in ``keep`` from the full ``|psi><psi|``."""
    dims = (2, 4, n_positions)
    rho = np.outer(psi, psi.conj()).reshape(dims + dims)
    letters_in, letters_out = "abc", "def"
    lhs_row, lhs_col, out_row, out_col = [], [], [], []
    for i, name in enumerate(_FACTORS):
        lhs_row.append(letters_in[i])
        if name in keep:
            lhs_col.append(letters_out[i])
            out_row.append(letters_in[i])
            out_col.append(letters_out[i])
        else:
            lhs_col.append(letters_in[i])
    spec = f"{''.join(lhs_row + lhs_col)}->{''.join(out_row + out_col)}"
    red = np.einsum(spec, rho)
    d = int(np.prod([dims[i] for i, name in enumerate(_FACTORS) if name in keep]))
    return red.reshape(d, d)


def dense_entropy(rho: NDArray[np.complex128]) -> float:
    """Entropy in bits from a full eigendecomposition, no clamping shortcuts."""
    w = np.linalg.eigvalsh(rho)
    w = w[w > 1e-15]
    return float(-np.sum(w * np.log2(w)))
