"""
Min-max standardization of feature vectors: (x - min) / (max - min) per
feature, fitted on one set of examples and applied to any other.
"""

import logging
from dataclasses import dataclass
from typing import Any, Dict, Sequence, Tuple, Union

import numpy as np

from ..errors import FeatureError
from .records import FEATURE_NAMES, N_FEATURES, FeatureVector, LabeledExample, feature_matrix

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Scaler:
    mins: Tuple[float, ...]
    maxs: Tuple[float, ...]

    def __post_init__(self):
        mins = tuple(float(v) for v in self.mins)
        maxs = tuple(float(v) for v in self.maxs)
        if len(mins) != N_FEATURES or len(maxs) != N_FEATURES:
            raise FeatureError(f"scaler needs {N_FEATURES} min/max pairs, got {len(mins)}/{len(maxs)}")
        for name, lo, hi in zip(FEATURE_NAMES, mins, maxs):
            if lo > hi:
                raise FeatureError(f"scaler min > max for {name}: {lo} > {hi}")
        object.__setattr__(self, "mins", mins)
        object.__setattr__(self, "maxs", maxs)

    @property
    def degenerate(self) -> Tuple[bool, ...]:
        """Features that were constant over the fitting set."""
        return tuple(lo == hi for lo, hi in zip(self.mins, self.maxs))

    def transform_array(self, X: np.ndarray) -> np.ndarray:
        mins = np.asarray(self.mins)
        spans = np.asarray(self.maxs) - mins
        safe = np.where(spans > 0, spans, 1.0)
        return np.where(spans > 0, (np.asarray(X, dtype=np.float64) - mins) / safe, 0.0)

    def to_dict(self) -> Dict[str, Any]:
        return {"mins": list(self.mins), "maxs": list(self.maxs)}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "Scaler":
        return cls(mins=tuple(data["mins"]), maxs=tuple(data["maxs"]))


def _vectors(items: Sequence[Union[LabeledExample, FeatureVector]]):
    return [item.features if isinstance(item, LabeledExample) else item for item in items]


def fit_scaler(examples: Sequence[Union[LabeledExample, FeatureVector]]) -> Scaler:
    """Per-feature min and max over ``examples`` (raw, unscaled vectors).

    Raises:
        FeatureError: if ``examples`` holds fewer than two vectors.
    """
    vectors = _vectors(examples)
    if not vectors:
        raise FeatureError("cannot fit a scaler on an empty set")
    if len(vectors) < 2:
        raise FeatureError(f"a scaler needs at least 2 examples, got {len(vectors)}")
    if any(v.scaled for v in vectors):
        raise FeatureError("scaler must be fitted on raw feature vectors")

    X = feature_matrix(vectors)
    scaler = Scaler(mins=tuple(X.min(axis=0)), maxs=tuple(X.max(axis=0)))
    flat = [name for name, d in zip(FEATURE_NAMES, scaler.degenerate) if d]
    if flat:
        logger.warning(f"Constant features over {len(vectors)} fitting examples map to 0: {', '.join(flat)}")
    return scaler


def transform(s: Scaler, v: FeatureVector) -> FeatureVector:
    """Scale one raw vector. Values outside the fitted range are not clipped."""
    if v.scaled:
        raise FeatureError("feature vector is already scaled")
    return FeatureVector(tuple(s.transform_array(v.as_array())), scaled=True)


def transform_examples(s: Scaler, examples: Sequence[LabeledExample]):
    return [LabeledExample(e.date, transform(s, e.features), e.label) for e in examples]
