"""
State-vector representation for the controlled walk on a torus grid.

The full register is control (1 qubit) x coin (2 qubits) x position (n qubits).
Amplitudes are stored flat with the position index varying fastest::

    idx = ctr * 4N + coin * N + y * L + x

so ``amplitudes.reshape(2, 4, L, L)`` is indexed ``[ctr, coin, y, x]``.
Coin directions map to indices as LEFT=0, RIGHT=1, DOWN=2, UP=3.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray

__all__ = [
    "LEFT",
    "RIGHT",
    "DOWN",
    "UP",
    "SUBSYSTEMS",
    "GridGeometry",
    "WalkState",
    "make_initial_state",
    "target_probability",
    "reduced_density",
    "subsystem_entropy",
    "von_neumann_entropy",
    "check_density_matrix",
]

LEFT, RIGHT, DOWN, UP = 0, 1, 2, 3

# Small-side subsystems that are traced explicitly.
_DIRECT = ("control", "coin", "control+coin")
# Position-containing subsystems and their (pure-state) complements.
_COMPLEMENT = {
    "position": "control+coin",
    "coin+position": "control",
    "control+position": "coin",
}
SUBSYSTEMS = _DIRECT + tuple(_COMPLEMENT)

EIGEN_CLAMP = 1e-12
TRACE_TOL = 1e-8


@dataclass(frozen=True)
class GridGeometry:
    """Square torus of ``side x side`` positions encoded on ``n_qubits`` qubits."""

    n_qubits: int
    side: int = field(init=False)
    n_positions: int = field(init=False)

    def __post_init__(self) -> None:
        if not isinstance(self.n_qubits, (int, np.integer)) or isinstance(self.n_qubits, bool):
            raise TypeError(f"n_qubits must be an int, got {type(self.n_qubits).__name__}")
        if self.n_qubits < 2 or self.n_qubits % 2:
            raise ValueError(f"n_qubits must be even and >= 2 (got {self.n_qubits})")
        object.__setattr__(self, "n_qubits", int(self.n_qubits))
        object.__setattr__(self, "side", 1 << (self.n_qubits // 2))
        object.__setattr__(self, "n_positions", 1 << self.n_qubits)

    @classmethod
    def from_positions(cls, n_positions: int) -> GridGeometry:
        n = int(n_positions).bit_length() - 1
        if n_positions != 1 << n:
            raise ValueError(f"N must be a power of two (got {n_positions})")
        return cls(n)

    @property
    def dim(self) -> int:
        """Length of the full state vector, 8N."""
        return 8 * self.n_positions

    @property
    def log_n(self) -> float:
        """Base-2 logarithm of N."""
        return float(self.n_qubits)

    def check_position(self, pos: tuple[int, int]) -> tuple[int, int]:
        x, y = pos
        if not (0 <= x < self.side and 0 <= y < self.side):
            raise ValueError(f"position {pos} outside {self.side}x{self.side} grid")
        return int(x), int(y)

    def position_index(self, x: int, y: int) -> int:
        return y * self.side + x

    def index(self, ctr: int, coin: int, x: int, y: int) -> int:
        """Flat amplitude index of basis state ``|ctr, coin, x, y>``."""
        n = self.n_positions
        return ctr * 4 * n + coin * n + y * self.side + x


@dataclass
class WalkState:
    """Pure state of control, coin and position registers.

    Operators in :mod:`qwalk.operators` mutate ``amplitudes`` in place.
    """

    geometry: GridGeometry
    amplitudes: NDArray[np.complex128]

    def __post_init__(self) -> None:
        amps = np.asarray(self.amplitudes, dtype=np.complex128)
        if amps.shape != (self.geometry.dim,):
            raise ValueError(
                f"expected {self.geometry.dim} amplitudes, got shape {amps.shape}"
            )
        self.amplitudes = np.ascontiguousarray(amps)

    @property
    def blocks(self) -> NDArray[np.complex128]:
        """View of shape ``(2, 4, L, L)`` indexed ``[ctr, coin, y, x]``."""
        side = self.geometry.side
        return self.amplitudes.reshape(2, 4, side, side)

    @property
    def matrix(self) -> NDArray[np.complex128]:
        """View of shape ``(8, N)``: rows are (ctr, coin), columns are positions."""
        return self.amplitudes.reshape(8, self.geometry.n_positions)

    def amplitude(self, ctr: int, coin: int, x: int, y: int) -> complex:
        return complex(self.amplitudes[self.geometry.index(ctr, coin, x, y)])

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def copy(self) -> WalkState:
        return WalkState(self.geometry, self.amplitudes.copy())

    @classmethod
    def basis(cls, geometry: GridGeometry, ctr: int, coin: int, x: int, y: int) -> WalkState:
        amps = np.zeros(geometry.dim, dtype=np.complex128)
        amps[geometry.index(ctr, coin, x, y)] = 1.0
        return cls(geometry, amps)


def make_initial_state(geometry: GridGeometry) -> WalkState:
    """Return ``|1> (x) |u_c> (x) |u_p>``: uniform over coin and position, control set."""
    amps = np.zeros(geometry.dim, dtype=np.complex128)
    amps[4 * geometry.n_positions :] = 1.0 / (2.0 * np.sqrt(geometry.n_positions))
    return WalkState(geometry, amps)


def target_probability(state: WalkState, target: tuple[int, int]) -> float:
    """Probability of finding the walker at ``target`` if position were measured.

    This is the expectation of the position projector, summed over control and coin.
    """
    x, y = state.geometry.check_position(target)
    a = state.blocks[:, :, y, x]
    return float(np.vdot(a, a).real)


def reduced_density(state: WalkState, subsystem: str) -> NDArray[np.complex128]:
    """Partial trace of ``|psi><psi|`` onto control, coin or control+coin.

    Returns a 2x2, 4x4 or 8x8 matrix. Rows of the 8x8 ``control+coin`` matrix are
    ordered ``ctr * 4 + coin``.
    """
    m = state.matrix
    rho = m @ m.conj().T
    if subsystem == "control+coin":
        return rho
    r = rho.reshape(2, 4, 2, 4)
    if subsystem == "control":
        return np.einsum("aibi->ab", r)
    if subsystem == "coin":
        return np.einsum("aiaj->ij", r)
    raise ValueError(f"unknown subsystem {subsystem!r}; expected one of {_DIRECT}")


def check_density_matrix(rho: NDArray[np.complexfloating], tol: float = TRACE_TOL) -> None:
    rho = np.asarray(rho)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError(f"density matrix must be square, got shape {rho.shape}")
    tr = np.trace(rho)
    if abs(tr - 1.0) > tol:
        raise ValueError(f"density matrix trace {tr.real:.12g} deviates from 1")
    if not np.allclose(rho, rho.conj().T, atol=tol, rtol=0.0):
        raise ValueError("density matrix is not Hermitian")


def von_neumann_entropy(rho: NDArray[np.complexfloating]) -> float:
    """Von Neumann entropy in bits, ``-sum(l * log2(l))`` over eigenvalues.

    Eigenvalues in ``[-1e-12, 0)`` are treated as zero; anything more negative
    means the input is not a density matrix and raises ``ValueError``.
    """
    check_density_matrix(rho)
    evals = np.linalg.eigvalsh(rho)
    if evals[0] < -EIGEN_CLAMP:
        raise ValueError(f"density matrix has negative eigenvalue {evals[0]:.3e}")
    evals = np.clip(evals, 0.0, 1.0)
    nz = evals[evals > 0.0]
    s = -float(np.sum(nz * np.log2(nz)))
    return s if s > 0.0 else 0.0


def subsystem_entropy(state: WalkState, subsystem: str) -> float:
    """Entropy (bits) of any control/coin/position subsystem of a pure state.

    Position-containing subsystems are evaluated on their complement, which has
    the same spectrum for a pure global state, so no N x N matrix is built.
    """
    if subsystem in _COMPLEMENT:
        subsystem = _COMPLEMENT[subsystem]
    elif subsystem not in _DIRECT:
        raise ValueError(f"unknown subsystem {subsystem!r}; expected one of {SUBSYSTEMS}")
    return von_neumann_entropy(reduced_density(state, subsystem))
