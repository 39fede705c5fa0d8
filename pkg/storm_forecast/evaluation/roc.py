from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np
import pandas as pd

from ..errors import EvaluationError
from ..models.storm import StormClass


def positive_mask(labels: Sequence) -> np.ndarray:
    """True where the label is storm; accepts StormClass values, bools or 0/1."""
    return np.array([lab.is_storm if isinstance(lab, StormClass) else bool(lab) for lab in labels], dtype=bool)


@dataclass(frozen=True)
class RocCurve:
    """(fpr, tpr) points for thresholds in descending order, from (0, 0) to (1, 1)."""
    points: List[Tuple[float, float]]
    thresholds: List[float]
    auc: float

    @property
    def fpr(self) -> List[float]:
        return [p[0] for p in self.points]

    @property
    def tpr(self) -> List[float]:
        return [p[1] for p in self.points]

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(self.points, columns=["fpr", "tpr"])


def roc_curve(scores: Sequence[float], labels: Sequence) -> RocCurve:
    """
    ROC curve over the distinct score values, highest first.

    Samples sharing a score enter the curve together as one step, so tied
    scores contribute a diagonal segment. The AUC is the trapezoidal area
    under the points.

    Raises:
        EvaluationError: if the lengths differ or only one class is present
    """
    scores = np.asarray(scores, dtype=np.float64)
    positive = positive_mask(labels)
    if len(scores) != len(positive):
        raise EvaluationError(f"{len(scores)} scores for {len(positive)} labels")
    if not np.all(np.isfinite(scores)):
        raise EvaluationError("scores must be finite")
    n_pos = int(positive.sum())
    n_neg = len(positive) - n_pos
    if n_pos == 0 or n_neg == 0:
        raise EvaluationError("ROC needs both classes in the labels")

    order = np.argsort(-scores, kind="mergesort")
    scores, positive = scores[order], positive[order]
    # last index of every run of equal scores
    run_ends = np.flatnonzero(np.diff(scores) != 0)
    run_ends = np.append(run_ends, len(scores) - 1)

    tp = np.concatenate(([0], np.cumsum(positive)[run_ends]))
    fp = np.concatenate(([0], np.cumsum(~positive)[run_ends]))

    # trapezoids on integer counts, one division at the end
    area_twice = int(np.sum(np.diff(fp) * (tp[1:] + tp[:-1])))
    auc = area_twice / (2.0 * n_pos * n_neg)

    points = [(f / n_neg, t / n_pos) for f, t in zip(fp.tolist(), tp.tolist())]
    thresholds = [float("inf")] + scores[run_ends].tolist()
    return RocCurve(points=points, thresholds=thresholds, auc=auc)
