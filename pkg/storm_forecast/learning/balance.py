import logging
from dataclasses import dataclass
from typing import List, Sequence, Tuple

from ..features.records import LabeledExample
from ..models.storm import StormClass
from .config import SmoteConfig
from .smote import smote

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ClassBalance:
    storm: int
    no_storm: int

    @property
    def total(self) -> int:
        return self.storm + self.no_storm

    @property
    def minority(self) -> StormClass:
        return StormClass.STORM if self.storm <= self.no_storm else StormClass.NO_STORM

    def count(self, cls: StormClass) -> int:
        return self.storm if cls is StormClass.STORM else self.no_storm

    def describe(self) -> str:
        if not self.total:
            return "0 examples"
        return (f"{self.total} examples: no_storm {self.no_storm} ({100.0 * self.no_storm / self.total:.1f}%), "
                f"storm {self.storm} ({100.0 * self.storm / self.total:.1f}%)")

    def to_dict(self) -> dict:
        return {"storm": self.storm, "no_storm": self.no_storm}

    @classmethod
    def of(cls, examples: Sequence[LabeledExample]) -> "ClassBalance":
        storm = sum(1 for e in examples if e.label is StormClass.STORM)
        return cls(storm=storm, no_storm=len(examples) - storm)


def oversample(train: Sequence[LabeledExample],
               cfg: SmoteConfig) -> Tuple[List[LabeledExample], ClassBalance, ClassBalance]:
    """
    Grow the minority class of ``train`` with SMOTE.

    Returns:
        (authentic + synthetic examples, balance before, balance after)
    """
    before = ClassBalance.of(train)
    minority_class = before.minority
    minority = [e.features for e in train if e.label is minority_class]
    majority_count = before.total - len(minority)

    synthetic = [LabeledExample(None, v, minority_class) for v in smote(minority, majority_count, cfg)]
    balanced = list(train) + synthetic
    after = ClassBalance.of(balanced)
    logger.info(f"Class balance before SMOTE: {before.describe()}")
    logger.info(f"Class balance after SMOTE: {after.describe()}")
    return balanced, before, after
