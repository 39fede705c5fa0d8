from .stats import CorrelationReport, correlate_with_silso, mean_signed_difference, pearson
from .roc import RocCurve, positive_mask, roc_curve
from .metrics import (
    BaselineComparison,
    ClassMetrics,
    ConfusionCounts,
    EvaluationReport,
    MetricsRow,
    classification_metrics,
    compare_with_baseline,
    evaluate_predictions,
)
from .report import render_table, write_correlation, write_reports

__all__ = [
    "CorrelationReport",
    "correlate_with_silso",
    "mean_signed_difference",
    "pearson",
    "RocCurve",
    "positive_mask",
    "roc_curve",
    "BaselineComparison",
    "ClassMetrics",
    "ConfusionCounts",
    "EvaluationReport",
    "MetricsRow",
    "classification_metrics",
    "compare_with_baseline",
    "evaluate_predictions",
    "render_table",
    "write_correlation",
    "write_reports",
]
