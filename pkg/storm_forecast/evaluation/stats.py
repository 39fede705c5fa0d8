"""
Validation of the extracted counts against the SILSO sunspot number.
"""

import datetime
import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Sequence

import numpy as np

from ..errors import EvaluationError
from ..features.assemble import wolf_proxy
from ..features.records import DailySunspotRecord
from ..ingest.records import SilsoRecord

logger = logging.getLogger(__name__)


def _as_series(x: Sequence[float], name: str) -> np.ndarray:
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim != 1:
        raise EvaluationError(f"{name} must be a 1-D series")
    if not np.all(np.isfinite(arr)):
        raise EvaluationError(f"{name} contains non-finite values")
    return arr


def pearson(x: Sequence[float], y: Sequence[float]) -> float:
    """
    Pearson correlation coefficient
    sum((x - mean x)(y - mean y)) / sqrt(sum((x - mean x)^2) * sum((y - mean y)^2)).

    Raises:
        EvaluationError: on unequal lengths, fewer than 2 values, or a
            constant series ("zero variance")
    """
    x, y = _as_series(x, "x"), _as_series(y, "y")
    if len(x) != len(y):
        raise EvaluationError(f"series lengths differ: {len(x)} vs {len(y)}")
    if len(x) < 2:
        raise EvaluationError("pearson needs at least 2 values")
    dx, dy = x - x.mean(), y - y.mean()
    sxx, syy = float(dx @ dx), float(dy @ dy)
    if sxx == 0.0 or syy == 0.0:
        raise EvaluationError("zero variance")
    r = float(dx @ dy) / np.sqrt(sxx * syy)
    return float(min(1.0, max(-1.0, r)))


def mean_signed_difference(x: Sequence[float], y: Sequence[float]) -> float:
    """Mean of x_i - y_i."""
    x, y = _as_series(x, "x"), _as_series(y, "y")
    if len(x) != len(y):
        raise EvaluationError(f"series lengths differ: {len(x)} vs {len(y)}")
    if len(x) == 0:
        raise EvaluationError("mean_signed_difference needs at least 1 value")
    return float(np.mean(x - y))


@dataclass
class CorrelationReport:
    pcc: float
    mean_diff: float
    n_matched: int
    dates: List[datetime.date] = field(default_factory=list)

    def as_tuple(self):
        return self.pcc, self.mean_diff, self.n_matched

    def to_dict(self) -> Dict[str, Any]:
        return {
            "pcc": self.pcc,
            "mean_diff": self.mean_diff,
            "n_matched": self.n_matched,
            "first_date": self.dates[0].isoformat() if self.dates else None,
            "last_date": self.dates[-1].isoformat() if self.dates else None,
        }


def correlate_with_silso(records: Sequence[DailySunspotRecord],
                         silso: Sequence[SilsoRecord]) -> CorrelationReport:
    """
    Correlate our 10R + S series with SILSO's daily sunspot number.

    Days missing from either side (or marked missing by SILSO) are left out.

    Raises:
        EvaluationError: if fewer than 2 days match
    """
    ours = {r.date: wolf_proxy(r) for r in records if r.date is not None}
    theirs = {s.date: s.sesc_number for s in silso if not s.is_missing}
    dates = sorted(set(ours) & set(theirs))
    if len(dates) < 2:
        raise EvaluationError(f"only {len(dates)} day(s) shared with SILSO; at least 2 are needed")

    x = [ours[d] for d in dates]
    y = [theirs[d] for d in dates]
    report = CorrelationReport(pcc=pearson(x, y), mean_diff=mean_signed_difference(x, y),
                               n_matched=len(dates), dates=dates)
    logger.info(f"SILSO correlation over {len(dates)} days: pcc={report.pcc:.3f}, mean diff={report.mean_diff:.2f}")
    return report
