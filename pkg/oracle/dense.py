"""
Dense brute-force reference for the measurement.

Everything here is built from full n³-dimensional tensors and (n², n²) POVM
matrices written out entry by entry, with no use of the rank-1 or
block-diagonal structure the fast path relies on. It shares nothing with
protocol.povm or optics.scheme beyond the grid, so agreement between the two
is evidence rather than tautology. Outcomes are duck-typed: anything with
`.t` and `.omega_plus_index`.

Test support only; grids above MAX_POINTS are refused.
"""

import math
from dataclasses import dataclass

import numpy as np

from core.errors import GridTooLarge, ZeroWeightOutcome
from core.freqgrid import FrequencyGrid
from core.states import DensityMatrix

MAX_POINTS = 12
MAX_POINTS_COMPLETENESS = 8


def _guard(grid: FrequencyGrid, limit: int = MAX_POINTS):
    if grid.n_points > limit:
        raise GridTooLarge(f"dense oracle limited to n <= {limit}, got {grid.n_points}", field="grid.n_points")


@dataclass(frozen=True, eq=False)
class DenseState:
    """Pure state tensor with explicit channel order."""

    tensor: np.ndarray
    channels: tuple[int, ...]

    @classmethod
    def from_parts(cls, epr_amps: np.ndarray, packet_amps: np.ndarray) -> "DenseState":
        tensor = np.zeros((len(packet_amps),) * 3, dtype=complex)
        for a1 in range(tensor.shape[0]):
            for a2 in range(tensor.shape[1]):
                for a3 in range(tensor.shape[2]):
                    tensor[a1, a2, a3] = epr_amps[a1, a2] * packet_amps[a3]
        return cls(tensor, (1, 2, 3))

    def density(self) -> np.ndarray:
        return np.multiply.outer(self.tensor, self.tensor.conj())


def dense_povm_matrix(grid: FrequencyGrid, outcome) -> np.ndarray:
    """M(t, Ω₊) on channels 1 ⊗ 3, index a₁·n + a₃."""
    _guard(grid)
    return _povm_entries(grid, outcome.t, float(grid.sums.nodes[outcome.omega_plus_index]))


def _povm_entries(grid: FrequencyGrid, t: float, omega_plus: float) -> np.ndarray:
    n = grid.n_points
    w = grid.nodes
    tol = 1e-9 * grid.delta_omega
    measure = grid.times.delta_t * grid.delta_omega / (2 * math.pi)
    mat = np.zeros((n * n, n * n), dtype=complex)
    for a1 in range(n):
        for a3 in range(n):
            if abs(w[a1] + w[a3] - omega_plus) > tol:
                continue
            ket = complex(math.cos((w[a1] - w[a3]) / 2 * t), math.sin((w[a1] - w[a3]) / 2 * t))
            for b1 in range(n):
                for b3 in range(n):
                    if abs(w[b1] + w[b3] - omega_plus) > tol:
                        continue
                    bra = complex(math.cos((w[b1] - w[b3]) / 2 * t), -math.sin((w[b1] - w[b3]) / 2 * t))
                    mat[a1 * n + a3, b1 * n + b3] = ket * bra * measure
    return mat


def _numerator(grid: FrequencyGrid, epr, packet, outcome) -> np.ndarray:
    """Tr₁₃{ρ₁₂₃ (M ⊗ I₂)} by full contraction."""
    n = grid.n_points
    rho = DenseState.from_parts(np.asarray(epr.amps), np.asarray(packet.amps)).density()
    m4 = dense_povm_matrix(grid, outcome).reshape(n, n, n, n)
    return np.einsum("iajkcl,klij->ac", rho, m4)


def dense_weight(grid: FrequencyGrid, epr, packet, outcome) -> float:
    _guard(grid)
    return float(np.trace(_numerator(grid, epr, packet, outcome)).real)


def dense_condition(grid: FrequencyGrid, epr, packet, outcome) -> DensityMatrix:
    _guard(grid)
    num = _numerator(grid, epr, packet, outcome)
    weight = float(np.trace(num).real)
    scale = float(np.sum(np.abs(np.asarray(epr.amps)) ** 2) * np.sum(np.abs(np.asarray(packet.amps)) ** 2))
    if weight <= 1e-28 * scale:
        raise ZeroWeightOutcome(f"outcome (t={outcome.t}, m={outcome.omega_plus_index}) has zero weight",
                                field="outcome")
    return DensityMatrix(grid, num / weight)


def dense_reduced(grid: FrequencyGrid, epr, packet, keep: int = 2) -> DensityMatrix:
    """Reduced pre-measurement state of one channel of ρ_EPR(1,2) ⊗ ρ(3)."""
    _guard(grid)
    rho = DenseState.from_parts(np.asarray(epr.amps), np.asarray(packet.amps)).density()
    subscripts = {1: "aijbij->ab", 2: "iajibj->ab", 3: "ijaijb->ab"}[keep]
    return DensityMatrix(grid, np.einsum(subscripts, rho))


def dense_completeness(grid: FrequencyGrid, truncate_time_grid: bool = False) -> float:
    """‖Σ_k Σ_m M(t_k, s_m) − I‖₂ from dense matrices."""
    _guard(grid, MAX_POINTS_COMPLETENESS)
    n = grid.n_points
    times = grid.times.truncated() if truncate_time_grid else grid.times.nodes
    total = np.zeros((n * n, n * n), dtype=complex)
    for t in times:
        for s in grid.sums.nodes:
            total += _povm_entries(grid, float(t), float(s))
    return float(np.linalg.norm(total - np.eye(n * n), 2))
