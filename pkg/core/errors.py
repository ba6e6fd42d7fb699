"""
Errors raised by the simulator.

Every error is a ValueError subclass carrying the name of the component that
raised it, so the CLI can report a machine-readable diagnostic.
"""

from typing import Optional


class TeleportationError(ValueError):
    component: str = "core"

    def __init__(self, message: str, field: Optional[str] = None):
        super().__init__(message)
        self.field = field

    def to_dict(self) -> dict:
        return {
            "error": type(self).__name__,
            "component": self.component,
            "field": self.field,
            "message": str(self),
        }


# ── freqgrid ──────────────────────────────────────────────────────────────────

class InvalidGrid(TeleportationError):
    component = "freqgrid"


class OffGridFrequency(TeleportationError):
    component = "freqgrid"


# ── states ────────────────────────────────────────────────────────────────────

class InvalidParameter(TeleportationError):
    component = "states"


class EmptyEpr(TeleportationError):
    component = "states"


class NonPositiveInput(TeleportationError):
    component = "states"


# ── povm ──────────────────────────────────────────────────────────────────────

class ZeroTotal(TeleportationError):
    component = "povm"


class ZeroWeightOutcome(TeleportationError):
    component = "povm"


class NotFired(TeleportationError):
    component = "povm"


# ── scheme ────────────────────────────────────────────────────────────────────

class OffGridDetector(TeleportationError):
    component = "scheme"


class DegenerateFit(TeleportationError):
    component = "scheme"


# ── oracle ────────────────────────────────────────────────────────────────────

class GridTooLarge(TeleportationError):
    component = "oracle"


# ── cli ───────────────────────────────────────────────────────────────────────

class ConfigError(TeleportationError):
    component = "cli"
