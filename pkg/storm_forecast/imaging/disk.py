import logging
import math

import numpy as np
from scipy import ndimage
from skimage.filters import threshold_otsu

from ..errors import ImagingError
from .raster import GrayImage, SolarDisk

logger = logging.getLogger(__name__)

# Minimum max-min intensity spread for an image to contain a disk at all.
MIN_DISK_CONTRAST = 50.0


def solar_disk_mask(img: GrayImage) -> SolarDisk:
    """
    Locate the solar disk so its limb can be excluded from edge counts.

    The largest 8-connected region above Otsu's threshold is taken as the
    disk; dark sunspots inside it are filled before measuring, so the radius
    is sqrt(area / pi) of the whole disk and the center is its centroid.

    Raises:
        ImagingError: "empty image", or "no solar disk detected" when the
            image has no usable contrast.
    """
    if img.is_empty():
        raise ImagingError("empty image")

    pixels = img.pixels
    if float(pixels.max() - pixels.min()) < MIN_DISK_CONTRAST:
        raise ImagingError("no solar disk detected")

    threshold = threshold_otsu(pixels)
    bright = pixels > threshold
    labels, n_regions = ndimage.label(bright, structure=np.ones((3, 3), dtype=bool))
    if n_regions == 0:
        raise ImagingError("no solar disk detected")

    sizes = np.bincount(labels.ravel())
    sizes[0] = 0
    largest = int(np.argmax(sizes))
    region = ndimage.binary_fill_holes(labels == largest)

    ys, xs = np.nonzero(region)
    area = float(ys.size)
    disk = SolarDisk(center_x=float(xs.mean()), center_y=float(ys.mean()),
                     radius=math.sqrt(area / math.pi))
    logger.debug(f"Solar disk: otsu={threshold:.1f}, regions={n_regions}, "
                 f"center=({disk.center_x:.1f}, {disk.center_y:.1f}), radius={disk.radius:.1f}")
    return disk
