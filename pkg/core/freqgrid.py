"""
Frequency / time discretization.

The continuum frequency axis (0, ∞) is truncated to [omega_min, omega_max]
and sampled on a uniform grid. Three grids are derived from it:

  FrequencyGrid     ω_i = omega_min + i·Δω,            i = 0 … n-1
  TimeGrid          t_k = (k − ⌊n/2⌋)·Δt,  Δt = 2π/(n·Δω)   (DFT dual)
  SumFrequencyGrid  s_m = 2·omega_min + m·Δω,          m = 0 … 2n-2

Measure convention, used by every module:
  a continuum amplitude f(ω) is stored as F_i = f(ω_i)·√Δω, so Σ|F_i|²
  discretizes ∫|f|²dω, and δ(ω − ω′) becomes δ_ij / Δω.

Units are dimensionless (ħ = c = 1). All grids are immutable.
"""

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from core.errors import InvalidGrid, OffGridFrequency

# Node lookup tolerance, in units of the grid step.
NODE_TOLERANCE = 1e-9


def _nearest_node(value: float, origin: float, step: float, count: int, what: str) -> int:
    idx = int(round((value - origin) / step))
    if idx < 0 or idx >= count or abs(origin + idx * step - value) > NODE_TOLERANCE * step:
        raise OffGridFrequency(f"{what} {float(value)!r} is not a node of the grid "
                               f"(origin {float(origin)!r}, step {float(step)!r}, {count} nodes)")
    return idx


@dataclass(frozen=True)
class TimeGrid:
    n_points: int
    delta_t: float

    @cached_property
    def nodes(self) -> np.ndarray:
        return (np.arange(self.n_points) - self.n_points // 2) * self.delta_t

    def index_of(self, t: float) -> int:
        return _nearest_node(t, float(self.nodes[0]), self.delta_t, self.n_points, "time")

    def truncated(self) -> np.ndarray:
        """First half of the time nodes. Breaks the DFT pairing on purpose."""
        return self.nodes[: max(1, self.n_points // 2)]


@dataclass(frozen=True)
class SumFrequencyGrid:
    omega_min: float
    delta_omega: float
    base_points: int

    @property
    def n_points(self) -> int:
        return 2 * self.base_points - 1

    @cached_property
    def nodes(self) -> np.ndarray:
        return 2 * self.omega_min + np.arange(self.n_points) * self.delta_omega

    def index_of(self, s: float) -> int:
        return _nearest_node(s, 2 * self.omega_min, self.delta_omega, self.n_points, "sum frequency")

    def pairs(self, m: int) -> np.ndarray:
        """Channel-1 indices i with a valid partner j = m − i."""
        lo = max(0, m - self.base_points + 1)
        hi = min(m, self.base_points - 1)
        return np.arange(lo, hi + 1)


@dataclass(frozen=True)
class FrequencyGrid:
    omega_min: float
    omega_max: float
    n_points: int

    def __post_init__(self):
        if not (math.isfinite(self.omega_min) and math.isfinite(self.omega_max)):
            raise InvalidGrid("grid bounds must be finite", field="grid")
        if self.omega_min < 0:
            raise InvalidGrid(f"omega_min must be >= 0, got {self.omega_min}", field="grid.omega_min")
        if self.omega_max <= self.omega_min:
            raise InvalidGrid(f"omega_max ({self.omega_max}) must exceed omega_min ({self.omega_min})",
                              field="grid.omega_max")
        if int(self.n_points) != self.n_points or self.n_points < 2:
            raise InvalidGrid(f"n_points must be an integer >= 2, got {self.n_points}", field="grid.n_points")

    @property
    def delta_omega(self) -> float:
        return (self.omega_max - self.omega_min) / (self.n_points - 1)

    @cached_property
    def nodes(self) -> np.ndarray:
        return self.omega_min + np.arange(self.n_points) * self.delta_omega

    @cached_property
    def times(self) -> TimeGrid:
        return TimeGrid(self.n_points, 2 * math.pi / (self.n_points * self.delta_omega))

    @cached_property
    def sums(self) -> SumFrequencyGrid:
        return SumFrequencyGrid(self.omega_min, self.delta_omega, self.n_points)

    def index_of(self, omega: float) -> int:
        return _nearest_node(omega, self.omega_min, self.delta_omega, self.n_points, "frequency")

    # ── (ω_i, ω_j) ↔ (Ω₊, ω₋) ────────────────────────────────────────────────

    def pair_to_sum_diff(self, i: int, j: int) -> tuple[int, float]:
        """Sum-grid index of ω_i + ω_j, and ω₋ = (ω_i − ω_j)/2."""
        return i + j, float(self.nodes[i] - self.nodes[j]) / 2

    def sum_diff_to_pair(self, m: int, omega_minus: float) -> tuple[int, int]:
        i = int(round((m + 2 * omega_minus / self.delta_omega) / 2))
        j = m - i
        if not (0 <= i < self.n_points and 0 <= j < self.n_points):
            raise OffGridFrequency(f"(m={m}, ω₋={omega_minus}) has no pair on the grid")
        return i, j

    def describe(self) -> dict:
        return {"omega_min": self.omega_min, "omega_max": self.omega_max, "n_points": self.n_points}


def make_grid(omega_min: float, omega_max: float, n_points: int) -> FrequencyGrid:
    return FrequencyGrid(float(omega_min), float(omega_max), int(n_points))


def dft_orthogonality_defect(grid: FrequencyGrid) -> float:
    """max |(1/n) Σ_k exp(i(ω_a − ω_b)t_k) − δ_ab| over all node pairs."""
    phases = np.exp(1j * np.outer(grid.nodes, grid.times.nodes))
    gram = phases @ phases.conj().T / grid.n_points
    return float(np.max(np.abs(gram - np.eye(grid.n_points))))
