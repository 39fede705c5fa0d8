"""
Domain records for the external data sources: GFZ Kp, SILSO, SWPC and the
local SDO image cache.
"""

import datetime
import json
import logging
import os
from dataclasses import dataclass, field
from typing import Any, Dict, Generic, List, Optional, Tuple, TypeVar

from ..errors import IngestError
from ..models.storm import STORM_KP_THRESHOLD, StormClass

logger = logging.getLogger(__name__)

KP_READINGS_PER_DAY = 8
KP_MAX = 9.0
# HMI flattened intensitygram browse product
HMI_CHANNEL = "HMIIF"
WORKING_SIZE = 1024


def snap_kp(value: float) -> float:
    """Nearest Kp third, stored with two decimals (5- -> 4.67, 5+ -> 5.33)."""
    return round(round(value * 3.0) / 3.0, 2)


@dataclass(frozen=True)
class KpDay:
    """Eight 3-hourly Kp readings of one UTC day."""
    date: datetime.date
    values: Tuple[float, ...]

    def __post_init__(self):
        values = tuple(float(v) for v in self.values)
        if len(values) != KP_READINGS_PER_DAY:
            raise IngestError(f"{self.date}: expected {KP_READINGS_PER_DAY} Kp values, got {len(values)}")
        for v in values:
            if not 0.0 <= v <= KP_MAX:
                raise IngestError(f"{self.date}: Kp value {v} outside [0, {KP_MAX}]")
        object.__setattr__(self, "values", values)

    @property
    def max_kp(self) -> float:
        return max(self.values)


def label_day(k: KpDay) -> StormClass:
    """Storm iff the day's maximum Kp is at least 5 (inclusive)."""
    return StormClass.STORM if k.max_kp >= STORM_KP_THRESHOLD else StormClass.NO_STORM


@dataclass(frozen=True)
class SilsoRecord:
    """Daily total sunspot number. ``sesc_number`` is None when SILSO marks the day missing."""
    date: datetime.date
    sesc_number: Optional[float]
    provisional: bool = False

    def __post_init__(self):
        if self.sesc_number is not None and self.sesc_number < 0:
            raise IngestError(f"{self.date}: negative sunspot number {self.sesc_number}; use None for missing")

    @property
    def is_missing(self) -> bool:
        return self.sesc_number is None


@dataclass(frozen=True)
class SwpcForecastRecord:
    """SWPC 1-day outlook: the maximum Kp predicted for ``target_date``."""
    issue_date: datetime.date
    predicted_max_kp: float

    def __post_init__(self):
        if not 0.0 <= self.predicted_max_kp <= KP_MAX:
            raise IngestError(f"{self.issue_date}: predicted Kp {self.predicted_max_kp} outside [0, {KP_MAX}]")

    @property
    def target_date(self) -> datetime.date:
        return self.issue_date + datetime.timedelta(days=1)

    def predicted_class(self) -> StormClass:
        return StormClass.STORM if self.predicted_max_kp >= STORM_KP_THRESHOLD else StormClass.NO_STORM


@dataclass(frozen=True)
class ParseIssue:
    line_number: int
    line: str
    reason: str


T = TypeVar("T")


@dataclass
class ParseResult(Generic[T]):
    """Records parsed from a text source plus the lines that were rejected."""
    records: List[T] = field(default_factory=list)
    issues: List[ParseIssue] = field(default_factory=list)
    # lines that were data candidates (comments and blanks excluded)
    candidate_lines: int = 0

    @property
    def malformed_fraction(self) -> float:
        return len(self.issues) / self.candidate_lines if self.candidate_lines else 0.0


@dataclass
class ImageManifest:
    """Date -> local image file for one channel at the working resolution."""
    entries: Dict[datetime.date, str] = field(default_factory=dict)
    resolution: int = WORKING_SIZE
    channel: str = HMI_CHANNEL
    # days that could not be fetched (fetch_sdo only)
    gaps: List[datetime.date] = field(default_factory=list)
    # directory entries build_manifest skipped; not persisted
    ignored: int = 0

    def dates(self) -> List[datetime.date]:
        return sorted(self.entries)

    def __len__(self) -> int:
        return len(self.entries)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "resolution": self.resolution,
            "channel": self.channel,
            "entries": {d.isoformat(): self.entries[d] for d in self.dates()},
            "gaps": [d.isoformat() for d in sorted(self.gaps)],
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "ImageManifest":
        return cls(
            entries={datetime.date.fromisoformat(k): v for k, v in data.get("entries", {}).items()},
            resolution=data.get("resolution", WORKING_SIZE),
            channel=data.get("channel", HMI_CHANNEL),
            gaps=[datetime.date.fromisoformat(d) for d in data.get("gaps", [])],
        )

    def save(self, path: str) -> None:
        os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
        tmp_path = f"{path}.tmp"
        with open(tmp_path, "w") as f:
            json.dump(self.to_dict(), f, indent=2)
        os.replace(tmp_path, path)
        logger.debug(f"Saved manifest with {len(self)} entries to {path}")

    @classmethod
    def load(cls, path: str) -> "ImageManifest":
        try:
            with open(path, "r") as f:
                return cls.from_dict(json.load(f))
        except (OSError, ValueError) as e:
            raise IngestError(f"could not read manifest {path}: {e}", e)
