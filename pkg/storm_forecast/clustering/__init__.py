from .dbscan import (
    NOISE,
    ClusterLabeling,
    DbscanParams,
    Point2D,
    as_coordinates,
    count_regions,
    dbscan,
    dump_labels_csv,
    edge_points,
)

__all__ = [
    "NOISE",
    "ClusterLabeling",
    "DbscanParams",
    "Point2D",
    "as_coordinates",
    "count_regions",
    "dbscan",
    "dump_labels_csv",
    "edge_points",
]
