"""
Entangled time–energy measurement on channels 1 ⊗ 3.

The measurement is a rank-1 POVM on the outcome lattice TimeGrid × SumFrequencyGrid:

    M(t_k, s_m) = |R⟩⟨R| · Δt·ΔΩ₊/(2π),   R[i, j] = e^{iω₋t_k} · [i + j = m],
    ω₋ = (ω_i − ω_j)/2

With the DFT-dual time grid, Δt·ΔΩ₊/(2π) = 1/n and Σ_k Σ_m M = I exactly.

Applying ⟨R| to |ψ_EPR⟩₁₂ ⊗ |f⟩₃ leaves an unnormalized channel-2 ket φ; the
outcome weight is |φ|²·Δt·ΔΩ₊/(2π) and the conditioned state is |φ⟩⟨φ|/|φ|².
For Ω₊ = Ω and flat EPR, φ[ω₂] = e^{−iΩt/2} e^{+iω₂t} F[ω₂]: the packet with
a phase that user B removes once told t (CORRECTION_SIGN below).

All evaluation is vectorized per sum node m; the summation order inside a
lattice cell is fixed, so results do not depend on evaluation order.
"""

import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from core.channel import ClassicalMessage
from core.errors import NotFired, ZeroTotal, ZeroWeightOutcome
from core.freqgrid import FrequencyGrid
from core.states import DensityMatrix, SinglePhotonAmplitude, TwoChannelAmplitude

log = logging.getLogger(__name__)

# U(t) = diag(e^{iσω_i t}) undoes the phase left by the measurement; σ = −1
# follows from contracting the EPR ket with the reduction ket directly.
CORRECTION_SIGN = -1
ZERO_WEIGHT_RTOL = 1e-28
NORMALIZATION_TOL = 1e-8


def lattice_measure(grid: FrequencyGrid) -> float:
    """Δt·ΔΩ₊/(2π); equals 1/n on DFT-dual grids."""
    return grid.times.delta_t * grid.sums.delta_omega / (2 * math.pi)


# ── Types ─────────────────────────────────────────────────────────────────────

@dataclass(frozen=True)
class PovmOutcome:
    t: float
    omega_plus_index: int
    omega_plus: float

    @classmethod
    def at(cls, grid: FrequencyGrid, t: float, omega_plus: float) -> "PovmOutcome":
        k = grid.times.index_of(t)
        m = grid.sums.index_of(omega_plus)
        return cls(float(grid.times.nodes[k]), m, float(grid.sums.nodes[m]))

    @classmethod
    def from_indices(cls, grid: FrequencyGrid, k: int, m: int) -> "PovmOutcome":
        return cls(float(grid.times.nodes[k]), int(m), float(grid.sums.nodes[m]))

    def to_json(self) -> dict:
        return {"t": self.t, "omega_plus": self.omega_plus}


@dataclass(frozen=True, eq=False)
class ReductionVector:
    """R on the channel-1 ⊗ channel-3 basis, stored as an (n, n) matrix [i₁, i₃]."""

    grid: FrequencyGrid
    outcome: PovmOutcome
    amps: np.ndarray

    def vector(self) -> np.ndarray:
        return self.amps.reshape(-1)

    def support(self) -> list[tuple[int, int]]:
        return [tuple(map(int, p)) for p in np.argwhere(self.amps != 0)]

    def povm_matrix(self) -> np.ndarray:
        """Materialize M(outcome) as an (n², n²) matrix."""
        v = self.vector()
        return np.outer(v, v.conj()) * lattice_measure(self.grid)


@dataclass(frozen=True, eq=False)
class OutcomeDistribution:
    grid: FrequencyGrid
    weights: np.ndarray     # [time node, sum node], raw lattice weights
    times: np.ndarray

    @property
    def total(self) -> float:
        return float(self.weights.sum())

    def normalized(self) -> np.ndarray:
        return self.weights / self.total

    def weight(self, outcome: PovmOutcome) -> float:
        k = int(np.argmin(np.abs(self.times - outcome.t)))
        return float(self.weights[k, outcome.omega_plus_index])

    def sample(self, seed: int) -> PovmOutcome:
        rng = np.random.default_rng(seed)
        p = self.normalized().ravel()
        flat = int(rng.choice(p.size, p=p / p.sum()))
        k, m = np.unravel_index(flat, self.weights.shape)
        return PovmOutcome(float(self.times[k]), int(m), float(self.grid.sums.nodes[m]))

    def rows(self):
        """(t, omega_plus, weight, normalized_weight), time-major."""
        norm = self.normalized()
        sums = self.grid.sums.nodes
        for k, t in enumerate(self.times):
            for m, s in enumerate(sums):
                yield float(t), float(s), float(self.weights[k, m]), float(norm[k, m])


# ── Reduction operator ────────────────────────────────────────────────────────

def _diff_frequencies(grid: FrequencyGrid, m: int) -> tuple[np.ndarray, np.ndarray]:
    i1 = grid.sums.pairs(m)
    i3 = m - i1
    return i1, (grid.nodes[i1] - grid.nodes[i3]) / 2


def reduction_vector(grid: FrequencyGrid, outcome: PovmOutcome) -> ReductionVector:
    i1, omega_minus = _diff_frequencies(grid, outcome.omega_plus_index)
    amps = np.zeros((grid.n_points, grid.n_points), dtype=complex)
    amps[i1, outcome.omega_plus_index - i1] = np.exp(1j * omega_minus * outcome.t)
    return ReductionVector(grid, outcome, amps)


def completeness_defect(grid: FrequencyGrid, truncate_time_grid: bool = False) -> float:
    """‖Σ_k Σ_m M(t_k, s_m) − I‖₂ on channels 1 ⊗ 3.

    The summed operator is block diagonal in the sum node, so the norm is the
    largest block defect.
    """
    times = grid.times.truncated() if truncate_time_grid else grid.times.nodes
    measure = lattice_measure(grid)
    worst = 0.0
    for m in range(grid.sums.n_points):
        _, omega_minus = _diff_frequencies(grid, m)
        phases = np.exp(1j * np.outer(times, omega_minus))
        block = measure * (phases.T @ phases.conj())
        worst = max(worst, float(np.linalg.norm(block - np.eye(len(omega_minus)), 2)))
    return worst


# ── Outcome statistics / conditioning ─────────────────────────────────────────

def _branch_amplitudes(epr: TwoChannelAmplitude, packet: SinglePhotonAmplitude,
                       m: int, times: np.ndarray) -> np.ndarray:
    """φ[k, i₂] = Σ_{i₁} e^{−iω₋t_k} · epr[i₁, i₂] · F[m − i₁]."""
    i1, omega_minus = _diff_frequencies(epr.grid, m)
    reduced = epr.amps[i1, :] * packet.amps[m - i1][:, None]
    phases = np.exp(-1j * np.outer(times, omega_minus))
    return phases @ reduced


def _zero_threshold(epr: TwoChannelAmplitude, packet: SinglePhotonAmplitude) -> float:
    return ZERO_WEIGHT_RTOL * epr.norm_sq * packet.norm_sq * lattice_measure(epr.grid)


def outcome_distribution(epr: TwoChannelAmplitude, packet: SinglePhotonAmplitude) -> OutcomeDistribution:
    grid = epr.grid
    if abs(packet.norm_sq - 1) > NORMALIZATION_TOL:
        log.warning("packet norm² is %.12g, not 1; weights are scaled accordingly", packet.norm_sq)
    times = grid.times.nodes
    measure = lattice_measure(grid)
    weights = np.empty((len(times), grid.sums.n_points))
    for m in range(grid.sums.n_points):
        phi = _branch_amplitudes(epr, packet, m, times)
        weights[:, m] = measure * np.sum(np.abs(phi) ** 2, axis=1)
    dist = OutcomeDistribution(grid, weights, times)
    if dist.total <= _zero_threshold(epr, packet):
        raise ZeroTotal("packet support is disjoint from every reachable channel-3 frequency")
    return dist


def _conditioned(epr: TwoChannelAmplitude, packet: SinglePhotonAmplitude,
                 outcome: PovmOutcome) -> tuple[np.ndarray, float]:
    phi = _branch_amplitudes(epr, packet, outcome.omega_plus_index, np.array([outcome.t]))[0]
    weight = lattice_measure(epr.grid) * float(np.vdot(phi, phi).real)
    if weight <= _zero_threshold(epr, packet):
        raise ZeroWeightOutcome(f"outcome (t={outcome.t}, Ω₊={outcome.omega_plus}) has zero weight",
                                field="outcome")
    return phi, weight


def condition_on_outcome(epr: TwoChannelAmplitude, packet: SinglePhotonAmplitude,
                         outcome: PovmOutcome) -> DensityMatrix:
    """ρ̃(2) = Tr₁₃{(ρ_EPR ⊗ ρ(3)) M(outcome)} / Pr(outcome)."""
    phi, weight = _conditioned(epr, packet, outcome)
    return DensityMatrix(epr.grid, np.outer(phi, phi.conj()) * lattice_measure(epr.grid) / weight)


def outcome_weight(epr: TwoChannelAmplitude, packet: SinglePhotonAmplitude, outcome: PovmOutcome) -> float:
    return _conditioned(epr, packet, outcome)[1]


def unconditioned_state(epr: TwoChannelAmplitude, packet: SinglePhotonAmplitude) -> DensityMatrix:
    """Σ_outcomes Pr(outcome)·ρ̃(outcome): user B's state without the classical message."""
    grid = epr.grid
    mat = np.zeros((grid.n_points, grid.n_points), dtype=complex)
    for m in range(grid.sums.n_points):
        phi = _branch_amplitudes(epr, packet, m, grid.times.nodes)
        mat += phi.T @ phi.conj()
    return DensityMatrix(grid, mat * lattice_measure(grid))


def phase_correct(rho: DensityMatrix, msg: ClassicalMessage) -> DensityMatrix:
    if not msg.fired:
        raise NotFired("no registration was reported; there is nothing to correct")
    u = np.exp(1j * CORRECTION_SIGN * rho.grid.nodes * msg.t)
    return DensityMatrix(rho.grid, u[:, None] * rho.mat * u.conj()[None, :])


# ── Detector views ────────────────────────────────────────────────────────────

def firing_rates(dist: OutcomeDistribution, normalized: bool = True) -> np.ndarray:
    """Weight per Ω₊ summed over registration times (one detector per Ω₊)."""
    w = dist.normalized() if normalized else dist.weights
    return w.sum(axis=0)


def time_variation(dist: OutcomeDistribution, omega_plus_index: Optional[int] = None):
    """(max − min)/mean of the weights over t, per Ω₊ (0 where the detector never fires)."""
    w = dist.weights
    mean = w.mean(axis=0)
    spread = np.where(mean > 0, (w.max(axis=0) - w.min(axis=0)) / np.where(mean > 0, mean, 1), 0.0)
    return float(spread[omega_plus_index]) if omega_plus_index is not None else spread
