"""
Run configuration.

A JSON file (schema = RunConfig below) plus CLI flag overrides. Pydantic
checks types and ranges; `build()` then constructs every grid, packet and
EPR pair through the module constructors, so a bad config fails before any
computation, with the offending field named.
"""

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Literal, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

from core.errors import ConfigError, InvalidParameter, OffGridFrequency, TeleportationError
from core.freqgrid import FrequencyGrid, make_grid
from core.states import (
    EprSpec,
    SinglePhotonAmplitude,
    epr_state,
    gaussian_packet,
    lorentzian_packet,
    monochromatic_state,
    two_peak_packet,
)
from protocol.parties import FixedOutcome, OutcomePolicy, SampledOutcome


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid")


class GridSettings(_Section):
    omega_min: float = 0.0
    omega_max: float = 10.0
    n_points: int = Field(64, ge=2)


class PacketSettings(_Section):
    shape: Literal["gaussian", "lorentzian", "monochromatic", "two_peak"] = "gaussian"
    center: float = 5.0
    width: float = Field(0.8, gt=0)
    separation: float = 2.0        # two_peak only


class EnvelopeSettings(_Section):
    shape: Literal["flat", "gaussian"] = "flat"
    center: Optional[float] = None
    width: Optional[float] = Field(None, gt=0)


class OutcomeSettings(_Section):
    policy: Literal["fixed", "sample"] = "fixed"
    t: float = 0.0
    omega_plus: Optional[float] = None     # defaults to the pump
    seed: int = 7


class SweepSettings(_Section):
    detuning_min: float = 0.0
    detuning_max: Optional[float] = None   # defaults to `steps` grid steps from detuning_min
    steps: int = Field(5, ge=1)
    t: float = 0.0


class OutputSettings(_Section):
    path: Optional[str] = None
    format: Optional[Literal["csv", "json"]] = None


class RunConfig(_Section):
    grid: GridSettings = Field(default_factory=GridSettings)
    pump: Optional[float] = None           # defaults to omega_min + omega_max
    packet: PacketSettings = Field(default_factory=PacketSettings)
    envelope: EnvelopeSettings = Field(default_factory=EnvelopeSettings)
    chi: list[float] = Field(default_factory=lambda: [0.01, 0.02, 0.04])
    detector: Optional[float] = None       # defaults to the pump
    outcome: OutcomeSettings = Field(default_factory=OutcomeSettings)
    sweep: SweepSettings = Field(default_factory=SweepSettings)
    output: OutputSettings = Field(default_factory=OutputSettings)

    @field_validator("chi")
    @classmethod
    def _positive_chi(cls, values: list[float]) -> list[float]:
        if not values:
            raise ValueError("at least one chi value is required")
        if any(v <= 0 for v in values):
            raise ValueError("chi values must be > 0")
        return values

    def build(self) -> "Experiment":
        return build_experiment(self)


@dataclass(frozen=True, eq=False)
class Experiment:
    """Constructed, validated objects for one run."""
    config: RunConfig
    grid: FrequencyGrid
    pump: float
    packet: SinglePhotonAmplitude
    epr_spec: EprSpec
    policy: OutcomePolicy
    chi: list[float]
    detector: float
    detunings: np.ndarray


def build_packet(grid: FrequencyGrid, settings: PacketSettings) -> SinglePhotonAmplitude:
    if settings.shape == "gaussian":
        return gaussian_packet(grid, settings.center, settings.width)
    if settings.shape == "lorentzian":
        return lorentzian_packet(grid, settings.center, settings.width)
    if settings.shape == "two_peak":
        return two_peak_packet(grid, settings.center, settings.separation, settings.width)
    return monochromatic_state(grid, settings.center)


def build_epr_spec(grid: FrequencyGrid, pump: float, settings: EnvelopeSettings) -> EprSpec:
    if settings.shape == "flat":
        return EprSpec(pump)
    center = settings.center if settings.center is not None else pump / 2
    width = settings.width if settings.width is not None else (grid.omega_max - grid.omega_min) / 4
    return EprSpec.gaussian_envelope(grid, pump, center, width)


def _with_field(exc: TeleportationError, field: str) -> TeleportationError:
    exc.field = exc.field or field
    return exc


def build_experiment(config: RunConfig) -> Experiment:
    grid = make_grid(config.grid.omega_min, config.grid.omega_max, config.grid.n_points)
    pump = config.pump if config.pump is not None else grid.omega_min + grid.omega_max

    try:
        grid.sums.index_of(pump)
    except OffGridFrequency as exc:
        raise _with_field(exc, "pump")
    try:
        packet = build_packet(grid, config.packet)
    except TeleportationError as exc:
        raise _with_field(exc, "packet")
    epr_spec = build_epr_spec(grid, pump, config.envelope)
    epr_state(grid, epr_spec)

    if config.outcome.policy == "sample":
        policy: OutcomePolicy = SampledOutcome(config.outcome.seed)
    else:
        omega_plus = config.outcome.omega_plus if config.outcome.omega_plus is not None else pump
        try:
            grid.times.index_of(config.outcome.t)
        except OffGridFrequency as exc:
            raise _with_field(exc, "outcome.t")
        try:
            grid.sums.index_of(omega_plus)
        except OffGridFrequency as exc:
            raise _with_field(exc, "outcome.omega_plus")
        policy = FixedOutcome(config.outcome.t, omega_plus)

    detector = config.detector if config.detector is not None else pump
    try:
        grid.sums.index_of(detector)
    except OffGridFrequency as exc:
        raise _with_field(exc, "detector")

    sweep = config.sweep
    if sweep.detuning_max is None:
        # grid steps from detuning_min, stopping at the lowest sum frequency
        detunings = sweep.detuning_min + np.arange(sweep.steps) * grid.delta_omega
        detunings = detunings[pump - detunings >= grid.sums.nodes[0] - 0.5 * grid.delta_omega]
    elif sweep.detuning_max < sweep.detuning_min:
        raise InvalidParameter("empty detuning range", field="sweep")
    else:
        detunings = np.linspace(sweep.detuning_min, sweep.detuning_max, sweep.steps)
    if detunings.size == 0:
        raise InvalidParameter("empty detuning range", field="sweep")
    try:
        grid.times.index_of(sweep.t)
        for delta in detunings:
            grid.sums.index_of(pump - delta)
    except OffGridFrequency as exc:
        raise _with_field(exc, "sweep")

    return Experiment(config, grid, pump, packet, epr_spec, policy, list(config.chi), detector, detunings)


def _merge(base: dict, overrides: dict) -> dict:
    out = dict(base)
    for key, value in overrides.items():
        if isinstance(value, dict) and isinstance(out.get(key), dict):
            out[key] = _merge(out[key], value)
        else:
            out[key] = value
    return out


def load_config(path: Optional[str] = None, overrides: Optional[dict] = None) -> RunConfig:
    """Read the JSON config (if any), apply flag overrides, validate."""
    data = json.loads(Path(path).read_text()) if path else {}
    if not isinstance(data, dict):
        raise ConfigError("config file must hold a JSON object", field="config")
    return RunConfig.model_validate(_merge(data, overrides or {}))
