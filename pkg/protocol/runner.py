"""
Protocol runner — one teleportation round and the detuning sweep.

Round:
  [EPR source] → Alice (joint measurement, message) → Bob (phase correction)
"""

import logging
from dataclasses import dataclass
from typing import Iterable, Optional

from analytics.records import DetuningRow, TeleportRecord
from core.channel import ClassicalChannel, ClassicalMessage
from core.errors import InvalidParameter
from core.states import (
    DensityMatrix,
    EprSpec,
    SinglePhotonAmplitude,
    density_from_amplitude,
    epr_state,
    fidelity,
)
from protocol.parties import Alice, Bob, FixedOutcome, OutcomePolicy, SampledOutcome
from protocol.povm import PovmOutcome, condition_on_outcome, outcome_weight, phase_correct

log = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class TeleportationRun:
    message:           ClassicalMessage
    outcome:           PovmOutcome
    weight:            float
    normalized_weight: float
    before:            DensityMatrix
    after:             DensityMatrix
    fidelity_before:   float
    fidelity_after:    float
    seed:              Optional[int] = None

    def to_record(self) -> TeleportRecord:
        return TeleportRecord(
            seed=self.seed,
            outcome=self.outcome.to_json(),
            weight=self.weight,
            normalized_weight=self.normalized_weight,
            fidelity_before=self.fidelity_before,
            fidelity_after=self.fidelity_after,
            fired=self.message.fired,
        )


def teleport_once(epr_spec: EprSpec, packet: SinglePhotonAmplitude, policy: OutcomePolicy,
                  channel: Optional[ClassicalChannel] = None) -> TeleportationRun:
    grid = packet.grid
    channel = channel if channel is not None else ClassicalChannel()
    epr = epr_state(grid, epr_spec)

    alice = Alice(channel, epr, packet, policy)
    bob = Bob(channel)

    message = alice.run()
    before = alice.conditioned
    after = bob.run(before)

    target = density_from_amplitude(packet)
    weight = alice.distribution.weight(alice.outcome)
    run = TeleportationRun(
        message=message,
        outcome=alice.outcome,
        weight=weight,
        normalized_weight=weight / alice.distribution.total,
        before=before,
        after=after,
        fidelity_before=fidelity(before, target),
        fidelity_after=fidelity(after, target),
        seed=policy.seed if isinstance(policy, SampledOutcome) else None,
    )
    log.info("teleported at t=%.6g Ω₊=%.6g: fidelity %.12f → %.12f",
             run.outcome.t, run.outcome.omega_plus, run.fidelity_before, run.fidelity_after)
    return run


def detuning_sweep(epr_spec: EprSpec, packet: SinglePhotonAmplitude,
                   detunings: Iterable[float], t: float = 0.0) -> list[DetuningRow]:
    """One row per detuning δ = Ω − Ω₊, in parameter order."""
    grid = packet.grid
    epr = epr_state(grid, epr_spec)
    target = density_from_amplitude(packet)
    rows = []
    for delta in detunings:
        outcome = PovmOutcome.at(grid, t, epr_spec.pump_frequency - delta)
        before = condition_on_outcome(epr, packet, outcome)
        after = phase_correct(before, ClassicalMessage(True, outcome.t, outcome.omega_plus))
        rows.append(DetuningRow(
            detuning=float(delta),
            weight=outcome_weight(epr, packet, outcome),
            fidelity_before=fidelity(before, target),
            fidelity_after=fidelity(after, target),
        ))
    if not rows:
        raise InvalidParameter("empty detuning range", field="sweep")
    return rows


__all__ = ["FixedOutcome", "SampledOutcome", "TeleportationRun", "teleport_once", "detuning_sweep"]
