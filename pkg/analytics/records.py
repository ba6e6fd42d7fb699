"""
Output records — everything the CLI writes.

Records are flat dataclasses turned into JSON with `asdict`; tables go out as
CSV with 17 significant digits so golden files round-trip doubles. Nothing
here carries timestamps or random ids: identical runs give identical bytes.
"""

import csv
import io
import json
from dataclasses import asdict, dataclass, fields
from typing import Iterable, Optional, TextIO

DISTRIBUTION_HEADER = ("t", "omega_plus", "weight", "normalized_weight")
DETUNING_HEADER = ("detuning", "weight", "fidelity_before", "fidelity_after")
DETECTOR_HEADER = ("detector_frequency", "detection_weight", "fidelity")


@dataclass
class TeleportRecord:
    seed:              Optional[int]
    outcome:           dict            # {"t": …, "omega_plus": …}
    weight:            float           # raw lattice weight
    normalized_weight: float
    fidelity_before:   float           # vs ρ(3), before user B's correction
    fidelity_after:    float
    fired:             bool = True


@dataclass
class DetuningRow:
    detuning:        float
    weight:          float
    fidelity_before: float
    fidelity_after:  float


@dataclass
class SchemeRecord:
    chi:              float
    pump:             float
    detector:         float
    detection_weight: float
    fidelity:         float
    chi_values:       Optional[list] = None
    chi_exponent:     Optional[float] = None   # absent unless ≥ 2 distinct χ


@dataclass
class DetectorRow:
    detector_frequency: float
    detection_weight:   float
    fidelity:           float


@dataclass
class CheckResult:
    name:      str
    status:    str            # "pass" | "fail" | "skipped"
    value:     Optional[float] = None
    tolerance: Optional[float] = None
    detail:    str = ""

    @property
    def passed(self) -> bool:
        return self.status != "fail"


def fmt(value) -> str:
    if isinstance(value, float):
        return f"{value:.17g}"
    return str(value)


def record_to_dict(record) -> dict:
    """asdict without the optional fields that were left unset."""
    return {k: v for k, v in asdict(record).items() if v is not None}


def dumps(payload) -> str:
    if hasattr(payload, "__dataclass_fields__"):
        payload = record_to_dict(payload)
    elif isinstance(payload, list):
        payload = [record_to_dict(p) if hasattr(p, "__dataclass_fields__") else p for p in payload]
    return json.dumps(payload, indent=2) + "\n"


def write_csv(header: Iterable[str], rows: Iterable, stream: TextIO) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        values = [getattr(row, f.name) for f in fields(row)] if hasattr(row, "__dataclass_fields__") else row
        writer.writerow([fmt(v) for v in values])


def csv_text(header: Iterable[str], rows: Iterable) -> str:
    buf = io.StringIO()
    write_csv(header, rows, buf)
    return buf.getvalue()
