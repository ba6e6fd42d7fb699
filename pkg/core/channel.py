"""
Classical channel — the one-way link from user A to user B.

User A posts a ClassicalMessage after the joint measurement; user B reads the
latest one and decides whether (and how) to correct the teleported state.
Every message is kept in order and, if a log path is given, appended to a
JSON-lines file.
"""

import json
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Optional

from core.errors import InvalidParameter


@dataclass(frozen=True)
class ClassicalMessage:
    fired: bool
    t: Optional[float] = None
    omega_plus: Optional[float] = None
    sender: str = "alice"

    def __post_init__(self):
        if not self.fired and (self.t is not None or self.omega_plus is not None):
            raise InvalidParameter("a no-fire message carries no registration time or frequency")
        if self.fired and (self.t is None or self.omega_plus is None):
            raise InvalidParameter("a fired message needs the registration time and frequency")

    @classmethod
    def no_fire(cls, sender: str = "alice") -> "ClassicalMessage":
        return cls(fired=False, sender=sender)


class ClassicalChannel:
    """Append-only message log shared by the two parties."""

    def __init__(self, log_path: Optional[str] = None):
        self._messages: list[ClassicalMessage] = []
        self._log_path = Path(log_path) if log_path else None
        if self._log_path:
            self._log_path.parent.mkdir(parents=True, exist_ok=True)

    def post(self, message: ClassicalMessage) -> ClassicalMessage:
        self._messages.append(message)
        if self._log_path:
            with open(self._log_path, "a") as f:
                f.write(json.dumps(asdict(message)) + "\n")
        return message

    def latest(self, sender: Optional[str] = None) -> Optional[ClassicalMessage]:
        msgs = [m for m in self._messages if sender is None or m.sender == sender]
        return msgs[-1] if msgs else None

    def all_messages(self) -> list[ClassicalMessage]:
        return list(self._messages)

    def __len__(self) -> int:
        return len(self._messages)
