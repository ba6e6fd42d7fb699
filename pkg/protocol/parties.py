"""
The two users of the protocol.

User A (Alice) holds channel 1 of the EPR pair and the unknown packet in
channel 3; she performs the joint time–energy measurement and reports the
registration (t, Ω₊) over the classical channel. User B (Bob) holds channel 2
and applies the phase correction named by the message.
"""

import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Optional, Union

from core.channel import ClassicalChannel, ClassicalMessage
from core.errors import NotFired
from core.states import DensityMatrix, SinglePhotonAmplitude, TwoChannelAmplitude
from protocol.povm import (
    OutcomeDistribution,
    PovmOutcome,
    condition_on_outcome,
    outcome_distribution,
    phase_correct,
)

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class FixedOutcome:
    """The experimenter picks the registration time and detector frequency."""
    t: float
    omega_plus: float


@dataclass(frozen=True)
class SampledOutcome:
    """Draw the outcome from the normalized distribution with a seeded generator."""
    seed: int


OutcomePolicy = Union[FixedOutcome, SampledOutcome]


class Party(ABC):
    name: str = "party"

    def __init__(self, channel: ClassicalChannel):
        self.channel = channel

    def post(self, message: ClassicalMessage) -> ClassicalMessage:
        return self.channel.post(message)

    @abstractmethod
    def run(self, *args, **kwargs):
        ...


class Alice(Party):
    name = "alice"

    def __init__(self, channel: ClassicalChannel, epr: TwoChannelAmplitude,
                 packet: SinglePhotonAmplitude, policy: OutcomePolicy):
        super().__init__(channel)
        self.epr = epr
        self.packet = packet
        self.policy = policy
        self.distribution: Optional[OutcomeDistribution] = None
        self.outcome: Optional[PovmOutcome] = None
        self.conditioned: Optional[DensityMatrix] = None

    def choose_outcome(self) -> PovmOutcome:
        if isinstance(self.policy, SampledOutcome):
            return self.distribution.sample(self.policy.seed)
        return PovmOutcome.at(self.epr.grid, self.policy.t, self.policy.omega_plus)

    def run(self) -> ClassicalMessage:
        """Measure channels 1 ⊗ 3, leave channel 2 conditioned, report the outcome."""
        self.distribution = outcome_distribution(self.epr, self.packet)
        self.outcome = self.choose_outcome()
        self.conditioned = condition_on_outcome(self.epr, self.packet, self.outcome)
        return self.post(ClassicalMessage(fired=True, t=self.outcome.t,
                                          omega_plus=self.outcome.omega_plus, sender=self.name))


class Bob(Party):
    name = "bob"

    def run(self, received: DensityMatrix) -> DensityMatrix:
        """Apply the correction named by the latest message; without a click, keep the state."""
        msg = self.channel.latest(sender=Alice.name) or ClassicalMessage.no_fire()
        try:
            return phase_correct(received, msg)
        except NotFired:
            log.info("no registration reported; channel-2 state left as received")
            return received
