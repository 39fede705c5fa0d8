"""
CSV stores for the two cache boundaries of the pipeline.

``FeatureStore`` holds the per-day extraction results
(``date,sunspots,regions``), the expensive image-processing output.
``DatasetStore`` holds the assembled labeled examples
(``date,<five features>,label`` with label 1 = storm, 0 = no storm).
Writes go to a temporary file that is renamed over the target, so a crash
never leaves a half-written CSV behind.
"""

import datetime
import logging
import os
from typing import Iterable, List

import pandas as pd

from ..errors import FeatureError
from ..models.storm import StormClass
from .records import FEATURE_NAMES, DailySunspotRecord, FeatureVector, LabeledExample

logger = logging.getLogger(__name__)

RECORD_COLUMNS = ["date", "sunspots", "regions"]
DATASET_COLUMNS = ["date", *FEATURE_NAMES, "label"]


def atomic_write_text(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    tmp_path = os.path.join(directory, f".{os.path.basename(path)}.tmp")
    with open(tmp_path, "w", newline="") as f:
        f.write(text)
    os.replace(tmp_path, path)


def _read_csv(path: str, columns: List[str]) -> pd.DataFrame:
    try:
        frame = pd.read_csv(path, dtype={"date": str})
    except (OSError, ValueError) as e:
        raise FeatureError(f"could not read {path}: {e}", e)
    missing = [c for c in columns if c not in frame.columns]
    if missing:
        raise FeatureError(f"{path}: missing columns {', '.join(missing)}")
    return frame


def records_to_frame(records: Iterable[DailySunspotRecord]) -> pd.DataFrame:
    rows = [(r.date.isoformat(), r.sunspots, r.regions) for r in sorted(records, key=lambda r: r.date)]
    return pd.DataFrame(rows, columns=RECORD_COLUMNS)


def dataset_to_frame(examples: Iterable[LabeledExample]) -> pd.DataFrame:
    rows = []
    for e in sorted(examples, key=lambda e: e.date):
        rows.append([e.date.isoformat(), *(int(v) for v in e.features.values), e.label.as_int()])
    return pd.DataFrame(rows, columns=DATASET_COLUMNS)


def dataset_csv_text(examples: Iterable[LabeledExample]) -> str:
    return dataset_to_frame(examples).to_csv(index=False, lineterminator="\n")


class FeatureStore:
    """Per-day sunspot records on disk, keyed by date."""

    def __init__(self, path: str):
        self.path = path

    def exists(self) -> bool:
        return os.path.exists(self.path)

    def load(self) -> List[DailySunspotRecord]:
        """All stored records in date order; an absent file is an empty store."""
        if not self.exists():
            return []
        frame = _read_csv(self.path, RECORD_COLUMNS)
        records = []
        for row in frame.itertuples(index=False):
            try:
                records.append(DailySunspotRecord(date=datetime.date.fromisoformat(row.date),
                                                  sunspots=int(row.sunspots), regions=int(row.regions)))
            except (TypeError, ValueError) as e:
                raise FeatureError(f"{self.path}: bad row {tuple(row)}", e)
        return sorted(records, key=lambda r: r.date)

    def dates(self) -> set:
        return {r.date for r in self.load()}

    def save(self, records: Iterable[DailySunspotRecord]) -> None:
        frame = records_to_frame(records)
        atomic_write_text(self.path, frame.to_csv(index=False, lineterminator="\n"))
        logger.info(f"Wrote {len(frame)} daily records to {self.path}")

    def merge(self, new_records: Iterable[DailySunspotRecord]) -> List[DailySunspotRecord]:
        """Add ``new_records`` to the stored ones (new wins on the same date) and save."""
        merged = {r.date: r for r in self.load()}
        for r in new_records:
            merged[r.date] = r
        records = sorted(merged.values(), key=lambda r: r.date)
        self.save(records)
        return records


class DatasetStore:
    """Assembled labeled examples on disk."""

    def __init__(self, path: str):
        self.path = path

    def load(self) -> List[LabeledExample]:
        if not os.path.exists(self.path):
            raise FeatureError(f"dataset file not found: {self.path}")
        frame = _read_csv(self.path, DATASET_COLUMNS)
        examples = []
        for row in frame.itertuples(index=False):
            try:
                values = tuple(float(getattr(row, name)) for name in FEATURE_NAMES)
                examples.append(LabeledExample(date=datetime.date.fromisoformat(row.date),
                                               features=FeatureVector(values),
                                               label=StormClass.from_int(row.label)))
            except (TypeError, ValueError) as e:
                raise FeatureError(f"{self.path}: bad row {tuple(row)}", e)
        return sorted(examples, key=lambda e: e.date)

    def save(self, examples: Iterable[LabeledExample]) -> None:
        examples = list(examples)
        atomic_write_text(self.path, dataset_csv_text(examples))
        logger.info(f"Wrote {len(examples)} examples to {self.path}")
