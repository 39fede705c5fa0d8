"""
Daily extraction records and the five-feature samples built from them.
"""

import datetime
import logging
import math
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from ..errors import FeatureError
from ..models.storm import StormClass

logger = logging.getLogger(__name__)

FEATURE_NAMES = ("prev_sunspots", "prev_regions", "prev_storm", "cur_sunspots", "cur_regions")
N_FEATURES = len(FEATURE_NAMES)
PREV_STORM_INDEX = 2


@dataclass(frozen=True)
class DailySunspotRecord:
    """Active sunspot and active region counts for one day.

    ``date`` is None for ad-hoc extractions that are not part of a series.
    """
    date: Optional[datetime.date]
    sunspots: int
    regions: int

    def __post_init__(self):
        if self.sunspots < 0 or self.regions < 0:
            raise FeatureError(f"{self.date}: counts must be >= 0, got sunspots={self.sunspots}, regions={self.regions}")

    def is_consistent(self) -> bool:
        """Soft check: every region should hold at least one sunspot."""
        return self.sunspots == 0 or self.regions <= self.sunspots


@dataclass(frozen=True)
class FeatureVector:
    """[prev_sunspots, prev_regions, prev_storm, cur_sunspots, cur_regions].

    Raw vectors hold counts (>= 0, prev_storm in {0, 1}). Scaled vectors come
    out of ``transform`` and may leave [0, 1] for values outside the fitted
    range, so only finiteness is enforced for them.
    """
    values: Tuple[float, ...]
    scaled: bool = False

    def __post_init__(self):
        values = tuple(float(v) for v in self.values)
        if len(values) != N_FEATURES:
            raise FeatureError(f"feature vector needs {N_FEATURES} entries, got {len(values)}")
        if not all(math.isfinite(v) for v in values):
            raise FeatureError(f"feature vector entries must be finite: {values}")
        if not self.scaled:
            if any(v < 0 for v in values):
                raise FeatureError(f"raw feature entries must be >= 0: {values}")
            if values[PREV_STORM_INDEX] not in (0.0, 1.0):
                raise FeatureError(f"prev_storm must be 0 or 1, got {values[PREV_STORM_INDEX]}")
        object.__setattr__(self, "values", values)

    @classmethod
    def from_records(cls, previous: DailySunspotRecord, prev_storm: bool,
                     current: DailySunspotRecord) -> "FeatureVector":
        return cls((previous.sunspots, previous.regions, 1.0 if prev_storm else 0.0,
                    current.sunspots, current.regions))

    def as_array(self) -> np.ndarray:
        return np.asarray(self.values, dtype=np.float64)

    def __getitem__(self, index: int) -> float:
        return self.values[index]

    def __len__(self) -> int:
        return N_FEATURES


@dataclass(frozen=True)
class LabeledExample:
    """Features of the "present day" ``date`` labeled with the NEXT day's storm status.

    SMOTE samples have no day of their own and carry ``date=None``.
    """
    date: Optional[datetime.date]
    features: FeatureVector
    label: StormClass


def feature_matrix(vectors: Sequence[FeatureVector]) -> np.ndarray:
    """(n, 5) array of the vectors' values."""
    if not vectors:
        return np.empty((0, N_FEATURES))
    return np.vstack([v.as_array() for v in vectors])
