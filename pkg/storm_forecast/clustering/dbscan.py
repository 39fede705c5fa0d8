"""
DBSCAN over edge pixels: groups active-sunspot edges into active regions.

The neighbourhood N_eps(p) is the closed ball {q : dist(p, q) <= eps} and
includes p itself. A point is core when |N_eps(p)| >= min_pts. Points are
visited in input order, and a border point reachable from several clusters
stays with the first cluster that reaches it.
"""

import logging
import math
import os
from collections import deque
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np
import pandas as pd
from scipy.spatial import cKDTree

from ..errors import ClusteringError
from ..imaging.raster import BinaryImage

logger = logging.getLogger(__name__)

NOISE = -1
_UNVISITED = -2


@dataclass(frozen=True)
class Point2D:
    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ClusteringError(f"point coordinates must be finite, got ({self.x}, {self.y})")


@dataclass(frozen=True)
class DbscanParams:
    """eps in pixels at the working resolution; min_pts counts the point itself."""
    eps: float = 10.0
    min_pts: int = 5

    def __post_init__(self):
        if not self.eps > 0:
            raise ClusteringError(f"eps must be > 0, got {self.eps}")
        if self.min_pts < 1:
            raise ClusteringError(f"min_pts must be >= 1, got {self.min_pts}")

    def to_dict(self) -> dict:
        return {"eps": self.eps, "min_pts": self.min_pts}


@dataclass(frozen=True, eq=False)
class ClusterLabeling:
    """Per-point cluster id in [0, n_clusters) or NOISE, plus the core flags."""
    labels: np.ndarray
    n_clusters: int
    core: np.ndarray

    def __len__(self) -> int:
        return len(self.labels)

    def noise_count(self) -> int:
        return int(np.sum(self.labels == NOISE))


PointInput = Union[Sequence[Point2D], np.ndarray]


def as_coordinates(points: PointInput) -> np.ndarray:
    """(n, 2) float array from Point2D objects or an existing array."""
    if isinstance(points, np.ndarray):
        coords = np.asarray(points, dtype=np.float64)
        if coords.size == 0:
            return np.empty((0, 2))
        if coords.ndim != 2 or coords.shape[1] != 2:
            raise ClusteringError(f"expected an (n, 2) coordinate array, got shape {coords.shape}")
        if not np.all(np.isfinite(coords)):
            raise ClusteringError("point coordinates must be finite")
        return coords
    return np.array([(p.x, p.y) for p in points], dtype=np.float64).reshape(-1, 2)


def dbscan(points: PointInput, params: DbscanParams) -> ClusterLabeling:
    """Label every point with a cluster id or NOISE."""
    coords = as_coordinates(points)
    n = len(coords)
    if n == 0:
        return ClusterLabeling(labels=np.empty(0, dtype=int), n_clusters=0, core=np.empty(0, dtype=bool))

    # the tree only speeds up the queries; results equal an exhaustive search
    tree = cKDTree(coords)
    neighbourhoods = tree.query_ball_point(coords, r=params.eps, return_sorted=True)
    core = np.fromiter((len(nb) >= params.min_pts for nb in neighbourhoods), dtype=bool, count=n)

    labels = np.full(n, _UNVISITED, dtype=int)
    n_clusters = 0
    for seed in range(n):
        if labels[seed] != _UNVISITED:
            continue
        if not core[seed]:
            labels[seed] = NOISE
            continue

        cluster_id = n_clusters
        n_clusters += 1
        labels[seed] = cluster_id
        queue = deque([seed])
        while queue:
            p = queue.popleft()
            for q in neighbourhoods[p]:
                if labels[q] == NOISE:
                    # noise is never core, so it joins as a border point
                    labels[q] = cluster_id
                elif labels[q] == _UNVISITED:
                    labels[q] = cluster_id
                    if core[q]:
                        queue.append(q)

    logger.debug(f"DBSCAN eps={params.eps} min_pts={params.min_pts}: {n} points, "
                 f"{n_clusters} clusters, {int(np.sum(labels == NOISE))} noise")
    return ClusterLabeling(labels=labels, n_clusters=n_clusters, core=core)


def count_regions(labeling: ClusterLabeling) -> int:
    """Number of active sunspot regions (noise excluded)."""
    return labeling.n_clusters


def edge_points(edges: BinaryImage) -> np.ndarray:
    """Coordinates (x, y) of all edge pixels, in row-major scan order."""
    ys, xs = np.nonzero(edges.bits)
    return np.column_stack((xs, ys)).astype(np.float64)


def dump_labels_csv(coords: np.ndarray, labeling: ClusterLabeling, path: str) -> None:
    """Debug dump: one ``x,y,label`` row per point (noise is -1)."""
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    coords = np.asarray(coords)
    frame = pd.DataFrame({"x": coords[:, 0].astype(int), "y": coords[:, 1].astype(int),
                          "label": np.asarray(labeling.labels, dtype=int)})
    frame.to_csv(path, index=False, lineterminator="\n")
