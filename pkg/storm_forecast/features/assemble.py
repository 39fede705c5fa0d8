"""
Turns the per-day extraction series and the Kp history into labeled samples.

Example d uses the counts of days d-1 and d, the storm status of day d-1 as
a binary feature, and is labeled with the storm status of day d+1.
"""

import datetime
import logging
from typing import Dict, List, Optional, Sequence

from ..errors import FeatureError
from ..ingest.records import KpDay, label_day
from .records import DailySunspotRecord, FeatureVector, LabeledExample

logger = logging.getLogger(__name__)

ONE_DAY = datetime.timedelta(days=1)


def _index_by_date(items, kind: str) -> Dict[datetime.date, object]:
    indexed = {}
    for item in items:
        if item.date is None:
            raise FeatureError(f"{kind} without a date cannot be assembled")
        if item.date in indexed:
            logger.warning(f"Duplicate {kind} for {item.date}; keeping the later one")
        indexed[item.date] = item
    return indexed


def assemble_examples(records: Sequence[DailySunspotRecord], kp: Sequence[KpDay],
                      skipped: Optional[List[datetime.date]] = None) -> List[LabeledExample]:
    """
    Build one LabeledExample per day that has all its dependencies.

    Args:
        records: Daily sunspot records
        kp: Daily Kp records
        skipped: If given, receives the record dates that were skipped

    Returns:
        List[LabeledExample]: examples in increasing date order
    """
    by_date = _index_by_date(records, "sunspot record")
    kp_by_date = _index_by_date(kp, "Kp day")

    examples = []
    n_skipped = 0
    for day in sorted(by_date):
        previous, following = day - ONE_DAY, day + ONE_DAY
        missing = []
        if previous not in by_date:
            missing.append(f"record {previous}")
        if previous not in kp_by_date:
            missing.append(f"Kp {previous}")
        if following not in kp_by_date:
            missing.append(f"Kp {following}")
        if missing:
            n_skipped += 1
            if skipped is not None:
                skipped.append(day)
            logger.warning(f"Skipping {day}: missing {', '.join(missing)}")
            continue

        prev_storm = label_day(kp_by_date[previous]).is_storm
        features = FeatureVector.from_records(by_date[previous], prev_storm, by_date[day])
        examples.append(LabeledExample(day, features, label_day(kp_by_date[following])))

    logger.info(f"Assembled {len(examples)} examples from {len(by_date)} days ({n_skipped} skipped)")
    return examples


def wolf_proxy(r: DailySunspotRecord) -> int:
    """Wolf-style sunspot number 10R + S without the observer constant."""
    return 10 * r.regions + r.sunspots
