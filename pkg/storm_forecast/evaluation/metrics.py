"""
Classification metrics in the layout of a per-method comparison grid:
per-class precision and recall, plus accuracy figures.

Three accuracy figures are reported because "weighted accuracy" has no single
reading: support-weighted recall (equal to the fraction of correct
predictions), macro-averaged recall (balanced accuracy) and the ROC AUC.
Undefined cells (zero denominators) are None, never 0.
"""

import datetime
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Mapping, Optional, Sequence

from ..errors import EvaluationError
from ..models.storm import StormClass
from .roc import RocCurve, roc_curve

logger = logging.getLogger(__name__)


def _ratio(num: int, den: int) -> Optional[float]:
    return num / den if den else None


@dataclass(frozen=True)
class ConfusionCounts:
    """Counts with storm as the positive class."""
    tp: int = 0
    fp: int = 0
    tn: int = 0
    fn: int = 0

    def __post_init__(self):
        if min(self.tp, self.fp, self.tn, self.fn) < 0:
            raise EvaluationError(f"confusion counts must be >= 0: {self}")

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn

    @property
    def storm_support(self) -> int:
        return self.tp + self.fn

    @property
    def no_storm_support(self) -> int:
        return self.tn + self.fp

    def accuracy_fraction(self) -> Optional[Fraction]:
        return Fraction(self.tp + self.tn, self.total) if self.total else None

    def weighted_recall_fraction(self) -> Optional[Fraction]:
        """Support-weighted mean of the per-class recalls, exactly."""
        if not self.total:
            return None
        weighted = Fraction(0)
        for correct, support in ((self.tp, self.storm_support), (self.tn, self.no_storm_support)):
            if support:
                weighted += Fraction(support, self.total) * Fraction(correct, support)
        return weighted

    def to_dict(self) -> Dict[str, int]:
        return {"tp": self.tp, "fp": self.fp, "tn": self.tn, "fn": self.fn}

    @classmethod
    def tally(cls, pred: Sequence[StormClass], truth: Sequence[StormClass]) -> "ConfusionCounts":
        if len(pred) != len(truth):
            raise EvaluationError(f"{len(pred)} predictions for {len(truth)} truth labels")
        tp = fp = tn = fn = 0
        for p, t in zip(pred, truth):
            if p.is_storm and t.is_storm:
                tp += 1
            elif p.is_storm:
                fp += 1
            elif t.is_storm:
                fn += 1
            else:
                tn += 1
        return cls(tp=tp, fp=fp, tn=tn, fn=fn)


@dataclass(frozen=True)
class ClassMetrics:
    precision: Optional[float]
    recall: Optional[float]
    support: int

    def to_dict(self) -> Dict[str, Any]:
        return {"precision": self.precision, "recall": self.recall, "support": self.support}


@dataclass(frozen=True)
class MetricsRow:
    """One method's row of the comparison grid."""
    confusion: ConfusionCounts
    storm: ClassMetrics
    no_storm: ClassMetrics
    accuracy: Optional[float]
    weighted_accuracy: Optional[float]
    balanced_accuracy: Optional[float]

    def for_class(self, cls: StormClass) -> ClassMetrics:
        return self.storm if cls is StormClass.STORM else self.no_storm

    def to_dict(self) -> Dict[str, Any]:
        return {
            "confusion": self.confusion.to_dict(),
            "storm": self.storm.to_dict(),
            "no_storm": self.no_storm.to_dict(),
            "accuracy": self.accuracy,
            "weighted_accuracy": self.weighted_accuracy,
            "balanced_accuracy": self.balanced_accuracy,
        }


def classification_metrics(pred: Sequence[StormClass], truth: Sequence[StormClass]) -> MetricsRow:
    """Per-class precision/recall and accuracy figures for one set of predictions."""
    c = ConfusionCounts.tally(pred, truth)
    storm = ClassMetrics(precision=_ratio(c.tp, c.tp + c.fp), recall=_ratio(c.tp, c.tp + c.fn),
                         support=c.storm_support)
    no_storm = ClassMetrics(precision=_ratio(c.tn, c.tn + c.fn), recall=_ratio(c.tn, c.tn + c.fp),
                            support=c.no_storm_support)
    weighted = c.weighted_recall_fraction()
    balanced = None
    if storm.recall is not None and no_storm.recall is not None:
        balanced = (storm.recall + no_storm.recall) / 2.0
    return MetricsRow(confusion=c, storm=storm, no_storm=no_storm,
                      accuracy=_ratio(c.tp + c.tn, c.total),
                      weighted_accuracy=float(weighted) if weighted is not None else None,
                      balanced_accuracy=balanced)


@dataclass
class EvaluationReport:
    """Test-set evaluation of one method, with the per-date predictions behind it."""
    method: str
    metrics: MetricsRow
    roc: Optional[RocCurve] = None
    predictions: Dict[datetime.date, StormClass] = field(default_factory=dict)
    scores: Dict[datetime.date, float] = field(default_factory=dict)
    provenance: Dict[str, Any] = field(default_factory=dict)

    @property
    def auc(self) -> Optional[float]:
        return self.roc.auc if self.roc is not None else None

    @property
    def n_test(self) -> Dict[str, int]:
        return {"storm": self.metrics.storm.support, "no_storm": self.metrics.no_storm.support}

    def to_dict(self) -> Dict[str, Any]:
        return {
            "method": self.method,
            "metrics": self.metrics.to_dict(),
            "auc": self.auc,
            "n_test": self.n_test,
            "provenance": self.provenance,
        }


def evaluate_predictions(method: str, truth: Mapping[datetime.date, StormClass],
                         scores: Mapping[datetime.date, float],
                         provenance: Optional[Dict[str, Any]] = None) -> EvaluationReport:
    """Report for decision values keyed by date; storm iff the value is >= 0."""
    dates = sorted(scores)
    predictions = {d: StormClass.STORM if scores[d] >= 0.0 else StormClass.NO_STORM for d in dates}
    truth_list = [truth[d] for d in dates]
    metrics = classification_metrics([predictions[d] for d in dates], truth_list)
    roc = roc_curve([scores[d] for d in dates], truth_list)
    return EvaluationReport(method=method, metrics=metrics, roc=roc, predictions=predictions,
                            scores=dict(scores), provenance=dict(provenance or {}))


@dataclass
class BaselineComparison:
    """Both methods scored on exactly the same dates."""
    ours: MetricsRow
    baseline: MetricsRow
    ours_method: str
    baseline_method: str
    dates: List[datetime.date]
    excluded: List[datetime.date]

    def to_dict(self) -> Dict[str, Any]:
        return {
            self.ours_method: self.ours.to_dict(),
            self.baseline_method: self.baseline.to_dict(),
            "shared_dates": len(self.dates),
            "excluded_dates": [d.isoformat() for d in self.excluded],
        }


def compare_with_baseline(ours: EvaluationReport, baseline_preds: Mapping[datetime.date, StormClass],
                          truth: Mapping[datetime.date, StormClass],
                          baseline_method: str = "SWPC") -> BaselineComparison:
    """
    Score our predictions and the baseline's over the dates both cover.

    Test dates the baseline has no prediction for are listed in ``excluded``.

    Raises:
        EvaluationError: if no test date has a baseline prediction
    """
    test_dates = sorted(ours.predictions)
    shared = [d for d in test_dates if d in baseline_preds and d in truth]
    excluded = [d for d in test_dates if d not in shared]
    if not shared:
        raise EvaluationError("baseline covers none of the test dates")
    if excluded:
        logger.warning(f"Baseline has no prediction for {len(excluded)} of {len(test_dates)} test dates; "
                       f"comparing on {len(shared)}")

    truth_list = [truth[d] for d in shared]
    return BaselineComparison(
        ours=classification_metrics([ours.predictions[d] for d in shared], truth_list),
        baseline=classification_metrics([baseline_preds[d] for d in shared], truth_list),
        ours_method=ours.method,
        baseline_method=baseline_method,
        dates=shared,
        excluded=excluded,
    )
