import logging
import math
from typing import List, Sequence, Tuple

import numpy as np

from ..errors import LearningError
from ..features.records import LabeledExample
from ..models.storm import StormClass
from .config import SplitConfig

logger = logging.getLogger(__name__)


def holdout_count(n: int, fraction: float) -> int:
    """Per-class test size: nearest integer to n * fraction, at least 1, leaving at least 1 to train."""
    return min(n - 1, max(1, math.floor(n * fraction + 0.5)))


def stratified_split(examples: Sequence[LabeledExample],
                     cfg: SplitConfig) -> Tuple[List[LabeledExample], List[LabeledExample]]:
    """
    Hold out ``cfg.test_fraction`` of every class, chosen by a seeded shuffle.

    Returns:
        (train, test), each in date order

    Raises:
        LearningError: if a class is absent or has fewer than 2 members
    """
    rng = np.random.default_rng(cfg.seed)
    train, test = [], []
    for cls in (StormClass.NO_STORM, StormClass.STORM):
        members = [e for e in examples if e.label is cls]
        if len(members) < 2:
            raise LearningError(f"class '{cls.value}' has {len(members)} examples; at least 2 are needed to split")
        n_test = holdout_count(len(members), cfg.test_fraction)
        order = rng.permutation(len(members))
        test.extend(members[i] for i in order[:n_test])
        train.extend(members[i] for i in order[n_test:])
        logger.debug(f"Split class {cls.value}: {len(members) - n_test} train, {n_test} test")

    train.sort(key=lambda e: e.date)
    test.sort(key=lambda e: e.date)
    return train, test
