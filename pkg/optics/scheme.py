"""
Two-crystal optical scheme, to second order in χ.

  crystal 1:  |Ω⟩_in → χ Σ_{ω₁+ω₂=Ω} |ω₁⟩₁|ω₂⟩₂            (down-conversion)
  crystal 2:  |ω₁⟩₁|ω₃⟩₃ → χ |ω₁+ω₃⟩_out                    (up-conversion)
  detector:   P(Ω_d) = |Ω_d⟩_out⟨Ω_d|  behind a narrow-band filter

Each vertex is a matrix on the photon-number sector it connects. The
stationary limit turns the time integrals into exact energy conservation
(Kronecker deltas on the grid). Phase matching is taken as satisfied and
absorbed into χ; first-order susceptibility terms do not reach the output.

The channel-2 amplitude after a click is

    a[ω₂] = χ² Σ_{ω₁,ω₃} [ω₁+ω₂ = Ω][ω₁+ω₃ = Ω_d] F[ω₃] = χ² F[ω₂ + Ω_d − Ω]

so the channel-2 state is χ⁴ρ(3) for Ω_d = Ω and the click probability is
χ⁴Σ|F|², independent of the packet. Higher orders (χ⁶ false clicks) are not
computed.
"""

import logging
from dataclasses import dataclass, replace
from typing import Iterable, Optional

import numpy as np

from analytics.records import DetectorRow
from core.channel import ClassicalMessage
from core.errors import DegenerateFit, InvalidParameter, OffGridDetector, OffGridFrequency
from core.freqgrid import FrequencyGrid
from core.states import (
    DensityMatrix,
    EprSpec,
    SinglePhotonAmplitude,
    TwoChannelAmplitude,
    density_from_amplitude,
    epr_state,
    fidelity,
)

log = logging.getLogger(__name__)

SUPPORT_LEAK_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class SchemeConfig:
    grid: FrequencyGrid
    chi: float
    pump_frequency: float
    packet: SinglePhotonAmplitude
    detector_frequency: Optional[float] = None

    def __post_init__(self):
        if not self.chi > 0:
            raise InvalidParameter(f"chi must be > 0, got {self.chi}", field="chi")
        if self.packet.grid != self.grid:
            raise InvalidParameter("packet is defined on a different grid", field="packet")
        self.grid.sums.index_of(self.pump_frequency)
        try:
            self.grid.sums.index_of(self.detector)
        except OffGridFrequency as exc:
            raise OffGridDetector(str(exc), field="detector") from exc

    @property
    def detector(self) -> float:
        return self.pump_frequency if self.detector_frequency is None else self.detector_frequency

    @property
    def pump_index(self) -> int:
        return self.grid.sums.index_of(self.pump_frequency)

    @property
    def detector_index(self) -> int:
        return self.grid.sums.index_of(self.detector)


@dataclass(frozen=True, eq=False)
class SchemeResult:
    config:           SchemeConfig
    amplitude:        np.ndarray       # channel-2 ket, carries χ²
    channel2_state:   DensityMatrix    # unnormalized, carries χ⁴
    detection_weight: float

    @property
    def normalized_state(self) -> Optional[DensityMatrix]:
        return self.channel2_state.normalized() if self.detection_weight > 0 else None

    @property
    def fidelity(self) -> float:
        """Fidelity of the normalized channel-2 state with the input ρ(3)."""
        if self.normalized_state is None:
            return 0.0
        return fidelity(self.normalized_state, density_from_amplitude(self.config.packet))

    def message(self) -> ClassicalMessage:
        """Photodetector click report; the stationary scheme has no registration time."""
        if self.detection_weight <= 0:
            return ClassicalMessage.no_fire()
        return ClassicalMessage(fired=True, t=0.0, omega_plus=self.config.detector)


# ── Vertices ──────────────────────────────────────────────────────────────────

def spdc_first_order(config: SchemeConfig) -> TwoChannelAmplitude:
    """First-order S-matrix on |Ω⟩_in: χ·[ω₁ + ω₂ = Ω] on channels 1 ⊗ 2."""
    return epr_state(config.grid, EprSpec(config.pump_frequency)).scaled(config.chi)


def upconversion_vertex(grid: FrequencyGrid, chi: float, detector_index: int) -> np.ndarray:
    """⟨Ω_d|_out V |ω₁⟩₁|ω₃⟩₃ = χ·[ω₁ + ω₃ = Ω_d], as an (n, n) matrix [i₁, i₃]."""
    idx = np.arange(grid.n_points)
    return chi * (idx[:, None] + idx[None, :] == detector_index).astype(complex)


def _reachable_window(grid: FrequencyGrid, pump_index: int, detector_index: int) -> np.ndarray:
    """Channel-3 indices connected to the detector through some valid channel-1/2 pair."""
    idx = np.arange(grid.n_points)
    i1 = idx
    i2 = pump_index - i1
    i3 = detector_index - i1
    ok = (i2 >= 0) & (i2 < grid.n_points) & (i3 >= 0) & (i3 < grid.n_points)
    return np.unique(i3[ok])


# ── Scheme ────────────────────────────────────────────────────────────────────

def run_scheme(config: SchemeConfig, quiet: bool = False) -> SchemeResult:
    """Channel-2 state after both crystals. `quiet` logs the window leak at DEBUG."""
    grid = config.grid
    pair = spdc_first_order(config)
    vertex = upconversion_vertex(grid, config.chi, config.detector_index)

    window = _reachable_window(grid, config.pump_index, config.detector_index)
    outside = np.ones(grid.n_points, dtype=bool)
    outside[window] = False
    leaked = float(np.sum(np.abs(config.packet.amps[outside]) ** 2))
    if leaked > SUPPORT_LEAK_TOL * config.packet.norm_sq:
        log.log(logging.DEBUG if quiet else logging.WARNING,
                "%.3g of the packet norm lies outside the channel-3 window reachable "
                "for pump %.6g and detector %.6g", leaked / config.packet.norm_sq,
                config.pump_frequency, config.detector)

    amplitude = np.einsum("ab,ac,c->b", pair.amps, vertex, config.packet.amps)
    state = DensityMatrix(grid, np.outer(amplitude, amplitude.conj()))
    return SchemeResult(config, amplitude, state, state.trace)


def detune_detector(config: SchemeConfig, detector_frequency: float) -> SchemeResult:
    return run_scheme(replace(config, detector_frequency=detector_frequency))


def chi_scaling_exponent(config: SchemeConfig, chi_values: Iterable[float]) -> float:
    """Least-squares slope of log(detection_weight) against log(χ)."""
    chis = [float(c) for c in chi_values]
    if len(set(chis)) < 2:
        raise DegenerateFit(f"need at least 2 distinct χ values, got {sorted(set(chis))}", field="chi")
    weights = [run_scheme(replace(config, chi=c)).detection_weight for c in chis]
    if min(weights) <= 0:
        raise DegenerateFit("detection weight vanishes; the χ exponent is undefined", field="chi")
    slope, _ = np.polyfit(np.log(chis), np.log(weights), 1)
    return float(slope)


def sweep_detector(config: SchemeConfig, detector_frequencies: Iterable[float]) -> list[DetectorRow]:
    rows = []
    for freq in detector_frequencies:
        result = detune_detector(config, float(freq))
        rows.append(DetectorRow(float(freq), result.detection_weight, result.fidelity))
    return rows
