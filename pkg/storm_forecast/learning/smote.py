"""
SMOTE oversampling of the minority (storm) class.

Each synthetic point is x + u * (x_nn - x): x is a minority sample taken
round-robin over a seeded permutation of the minority set, x_nn one of its
k nearest minority neighbours (Euclidean, itself excluded) and u uniform in
[0, 1). Binary columns are rounded back to {0, 1} after interpolation.
"""

import logging
import math
from dataclasses import dataclass
from typing import List, Sequence

import numpy as np
from sklearn.neighbors import NearestNeighbors

from ..errors import LearningError
from ..features.records import PREV_STORM_INDEX, FeatureVector, feature_matrix
from .config import SmoteConfig

logger = logging.getLogger(__name__)


class RoundRobinSampler:
    """Cycles through a fixed order of sample indices."""

    def __init__(self, order: Sequence[int]):
        if len(order) == 0:
            raise LearningError("round-robin order must not be empty")
        self.order = list(order)
        self.current_index = 0

    def next_index(self) -> int:
        index = self.order[self.current_index]
        self.current_index = (self.current_index + 1) % len(self.order)
        return index


@dataclass(frozen=True, eq=False)
class SyntheticPoint:
    vector: np.ndarray
    base_index: int
    neighbor_index: int
    u: float


def synthetic_count(minority_count: int, majority_count: int, target_ratio: float) -> int:
    """Points needed to grow the minority to ceil(target_ratio * majority_count)."""
    return max(0, math.ceil(target_ratio * majority_count) - minority_count)


class Smote:
    """
    Args:
        k_neighbors: Neighbours considered per base sample
        seed: Seed of the base permutation, neighbour choice and u draws
        binary_columns: Columns rounded to {0, 1} after interpolation
    """

    def __init__(self, k_neighbors: int = 5, seed: int = 0, binary_columns: Sequence[int] = ()):
        self.k_neighbors = k_neighbors
        self.seed = seed
        self.binary_columns = list(binary_columns)
        self.X = None
        self.neighbors = None

    def fit(self, X: np.ndarray) -> "Smote":
        """Find the k nearest minority neighbours of every minority sample."""
        X = np.asarray(X, dtype=np.float64)
        n = X.shape[0]
        if n <= self.k_neighbors:
            raise LearningError(
                f"SMOTE needs more minority samples than k_neighbors={self.k_neighbors}, got {n}")

        knn = NearestNeighbors(n_neighbors=self.k_neighbors + 1, algorithm="brute").fit(X)
        _, indices = knn.kneighbors(X)
        neighbors = np.empty((n, self.k_neighbors), dtype=int)
        for i, row in enumerate(indices):
            # a duplicate may be returned before the point itself
            others = [j for j in row if j != i]
            neighbors[i] = others[:self.k_neighbors]

        self.X = X
        self.neighbors = neighbors
        return self

    def sample(self, n_samples: int) -> List[SyntheticPoint]:
        if self.X is None:
            raise LearningError("Smote.sample called before fit")
        rng = np.random.default_rng(self.seed)
        bases = RoundRobinSampler(rng.permutation(len(self.X)))

        points = []
        for _ in range(n_samples):
            i = bases.next_index()
            j = int(self.neighbors[i, rng.integers(self.k_neighbors)])
            u = float(rng.random())
            vector = self.X[i] + u * (self.X[j] - self.X[i])
            for col in self.binary_columns:
                vector[col] = float(np.round(vector[col]))
            points.append(SyntheticPoint(vector=vector, base_index=int(i), neighbor_index=j, u=u))
        return points


def smote(minority: Sequence[FeatureVector], majority_count: int, cfg: SmoteConfig) -> List[FeatureVector]:
    """
    Synthetic minority vectors that bring the minority to
    ceil(target_ratio * majority_count).

    Raises:
        LearningError: if the minority has no more than k_neighbors samples
    """
    n_new = synthetic_count(len(minority), majority_count, cfg.target_ratio)
    if n_new == 0:
        logger.info(f"Minority already at target ({len(minority)} >= {cfg.target_ratio} x {majority_count}); "
                    f"no synthetic points")
        return []

    sampler = Smote(k_neighbors=cfg.k_neighbors, seed=cfg.seed, binary_columns=[PREV_STORM_INDEX])
    sampler.fit(feature_matrix(minority))
    synthetic = [FeatureVector(tuple(p.vector), scaled=minority[0].scaled) for p in sampler.sample(n_new)]
    logger.info(f"SMOTE generated {len(synthetic)} synthetic points from {len(minority)} minority samples")
    return synthetic
