import datetime
import logging
import os
from typing import Optional

from ..clustering import DbscanParams, count_regions, dbscan, dump_labels_csv, edge_points
from ..imaging import CannyParams, GrayImage, canny_stages, count_sunspots, find_contours, solar_disk_mask
from ..imaging.contours import DEFAULT_MIN_PERIMETER
from ..imaging.debug import dump_stages
from .records import DailySunspotRecord

logger = logging.getLogger(__name__)


def extract_features(img: GrayImage, canny_params: CannyParams, db_params: DbscanParams,
                     day: Optional[datetime.date] = None, debug_dir: Optional[str] = None,
                     min_perimeter: int = DEFAULT_MIN_PERIMETER) -> DailySunspotRecord:
    """
    Count active sunspots and active regions on one solar image.

    Sunspots are the external contours of the Canny edge map; regions are the
    DBSCAN clusters of the same edge pixels.

    Args:
        img: Grayscale solar image at the working resolution
        canny_params: Edge detection settings
        db_params: Clustering settings
        day: Date of the record (None for ad-hoc images)
        debug_dir: If set, per-stage rasters and cluster labels are written here

    Returns:
        DailySunspotRecord: the day's counts

    Raises:
        ImagingError: if no solar disk is found on the image
    """
    disk = solar_disk_mask(img)
    stages = canny_stages(img, canny_params, disk=disk)

    contours = find_contours(stages.edges)
    sunspots = count_sunspots(contours, min_perimeter)

    points = edge_points(stages.edges)
    labeling = dbscan(points, db_params)
    regions = count_regions(labeling)

    record = DailySunspotRecord(date=day, sunspots=sunspots, regions=regions)
    if not record.is_consistent():
        logger.warning(f"{day}: {regions} regions but only {sunspots} sunspots")

    if debug_dir:
        target = os.path.join(debug_dir, day.isoformat()) if day else debug_dir
        dump_stages(stages, target)
        dump_labels_csv(points, labeling, os.path.join(target, "clusters.csv"))

    logger.debug(f"{day}: {len(contours)} contours, {sunspots} sunspots, "
                 f"{labeling.n_clusters} regions from {len(points)} edge pixels")
    return record
