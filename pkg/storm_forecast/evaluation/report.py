"""
Report files: ``evaluation.json`` (machine readable), ``evaluation.txt`` (the
comparison grid as a text table) and ``roc.csv`` (``fpr,tpr`` points).
"""

import json
import logging
import os
from typing import Any, Dict, List, Optional

from ..features.store import atomic_write_text
from ..models.storm import StormClass
from .metrics import BaselineComparison, EvaluationReport, MetricsRow
from .stats import CorrelationReport

logger = logging.getLogger(__name__)

_CLASS_TITLES = {StormClass.NO_STORM: "No Storm", StormClass.STORM: "Storm"}


def _cell(value: Optional[float]) -> str:
    return "n/a" if value is None else f"{value:.2f}"


def _grid_rows(method: str, row: MetricsRow, auc: Optional[float]) -> List[List[str]]:
    rows = []
    for k, cls in enumerate((StormClass.NO_STORM, StormClass.STORM)):
        m = row.for_class(cls)
        rows.append([method if k == 0 else "", _CLASS_TITLES[cls], _cell(m.precision), _cell(m.recall),
                     str(m.support),
                     _cell(row.accuracy) if k == 0 else "",
                     _cell(row.balanced_accuracy) if k == 0 else "",
                     _cell(auc) if k == 0 else ""])
    return rows


def render_table(report: EvaluationReport, comparison: Optional[BaselineComparison] = None) -> str:
    """Text grid: one block of rows per method, one row per class."""
    header = ["Method", "Class", "Precision", "Recall", "Support", "Accuracy", "Balanced", "AUC"]
    rows = _grid_rows(report.method, report.metrics, report.auc)
    if comparison is not None:
        rows += _grid_rows(f"{comparison.ours_method} (shared dates)", comparison.ours, None)
        rows += _grid_rows(comparison.baseline_method, comparison.baseline, None)

    widths = [max(len(header[c]), *(len(r[c]) for r in rows)) for c in range(len(header))]
    lines = ["  ".join(h.ljust(w) for h, w in zip(header, widths)).rstrip(),
             "  ".join("-" * w for w in widths)]
    lines += ["  ".join(v.ljust(w) for v, w in zip(r, widths)).rstrip() for r in rows]

    c = report.metrics.confusion
    lines.append("")
    lines.append(f"Confusion (storm positive): tp={c.tp} fp={c.fp} tn={c.tn} fn={c.fn}")
    lines.append("Accuracy = fraction correct = support-weighted recall; Balanced = mean per-class recall")
    if comparison is not None:
        lines.append(f"Baseline comparison over {len(comparison.dates)} shared dates "
                     f"({len(comparison.excluded)} test dates without a baseline prediction)")
    return "\n".join(lines) + "\n"


def report_payload(report: EvaluationReport, comparison: Optional[BaselineComparison] = None) -> Dict[str, Any]:
    payload = report.to_dict()
    payload["predictions"] = {d.isoformat(): report.predictions[d].value for d in sorted(report.predictions)}
    payload["scores"] = {d.isoformat(): report.scores[d] for d in sorted(report.scores)}
    if comparison is not None:
        payload["baseline_comparison"] = comparison.to_dict()
    return payload


def _dump_json(payload: Dict[str, Any]) -> str:
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def write_reports(directory: str, report: EvaluationReport,
                  comparison: Optional[BaselineComparison] = None) -> List[str]:
    """Write the three report files into ``directory`` and return their paths."""
    os.makedirs(directory, exist_ok=True)
    paths = [os.path.join(directory, name) for name in ("evaluation.json", "evaluation.txt", "roc.csv")]
    atomic_write_text(paths[0], _dump_json(report_payload(report, comparison)))
    atomic_write_text(paths[1], render_table(report, comparison))
    if report.roc is not None:
        atomic_write_text(paths[2], report.roc.to_frame().to_csv(index=False, lineterminator="\n"))
    else:
        paths.pop()
    logger.info(f"Wrote evaluation reports to {directory}")
    return paths


def write_correlation(directory: str, corr: CorrelationReport, provenance: Dict[str, Any]) -> str:
    path = os.path.join(directory, "correlation.json")
    payload = corr.to_dict()
    payload["provenance"] = provenance
    atomic_write_text(path, _dump_json(payload))
    logger.info(f"Wrote correlation report to {path}")
    return path
