"""
Canny edge detection on solar images.

Stages: Gaussian smoothing, 3x3 Sobel gradient, non-maximum suppression on
four quantized directions, hysteresis thresholding, then masking of the
solar limb so the disk boundary itself never counts as a sunspot edge.
Every convolution replicates the border pixels.
"""

import logging
import math
from typing import Optional

import numpy as np
from scipy import ndimage

from ..errors import ImagingError
from .disk import solar_disk_mask
from .raster import BinaryImage, CannyParams, CannyStages, GradientField, GrayImage, SolarDisk

logger = logging.getLogger(__name__)

SOBEL_X = np.array([[-1.0, 0.0, 1.0],
                    [-2.0, 0.0, 2.0],
                    [-1.0, 0.0, 1.0]])
SOBEL_Y = SOBEL_X.T

EIGHT_CONNECTED = np.ones((3, 3), dtype=bool)


def gaussian_kernel(sigma: float) -> np.ndarray:
    """Normalized 1-D Gaussian with radius ceil(3 * sigma)."""
    radius = int(math.ceil(3.0 * sigma))
    x = np.arange(-radius, radius + 1, dtype=np.float64)
    kernel = np.exp(-(x * x) / (2.0 * sigma * sigma))
    return kernel / kernel.sum()


def gaussian_smooth(img: GrayImage, sigma: float) -> GrayImage:
    """Convolve with a normalized 2-D Gaussian (applied as two 1-D passes)."""
    if img.is_empty():
        raise ImagingError("empty image")
    if not sigma > 0:
        raise ImagingError(f"sigma must be > 0, got {sigma}")

    kernel = gaussian_kernel(sigma)
    smoothed = ndimage.correlate1d(img.pixels, kernel, axis=0, mode="nearest")
    smoothed = ndimage.correlate1d(smoothed, kernel, axis=1, mode="nearest")
    # a convex combination can overshoot the range by one ulp
    return GrayImage(np.clip(smoothed, 0.0, 255.0))


def sobel_gradient(img: GrayImage) -> GradientField:
    """Edge gradient G(P) = sqrt(Gx^2 + Gy^2) and direction atan(Gy / Gx)."""
    if img.width < 3 or img.height < 3:
        raise ImagingError(f"image {img.width}x{img.height} is smaller than the 3x3 Sobel kernel")

    gx = ndimage.correlate(img.pixels, SOBEL_X, mode="nearest")
    gy = ndimage.correlate(img.pixels, SOBEL_Y, mode="nearest")
    magnitude = np.sqrt(gx * gx + gy * gy)

    # atan(Gy/Gx) folded into (-pi/2, pi/2]; Gx == 0 gives pi/2
    direction = np.arctan2(gy, gx)
    direction = np.where(direction > math.pi / 2, direction - math.pi, direction)
    direction = np.where(direction <= -math.pi / 2, direction + math.pi, direction)
    return GradientField(magnitude=magnitude, direction=direction)


def nonmax_suppress(g: GradientField) -> GrayImage:
    """Keep a pixel's magnitude iff it is >= both neighbours along its gradient.

    Directions are quantized to 0, 45, 90 and 135 degrees. Rows grow
    downwards, so a positive angle points towards (x+1, y+1).
    """
    mag = g.magnitude
    if mag.size == 0:
        return GrayImage(mag.copy(), bounded=False)

    padded = np.pad(mag, 1, mode="edge")
    center = padded[1:-1, 1:-1]
    left, right = padded[1:-1, :-2], padded[1:-1, 2:]
    up, down = padded[:-2, 1:-1], padded[2:, 1:-1]
    up_left, down_right = padded[:-2, :-2], padded[2:, 2:]
    up_right, down_left = padded[:-2, 2:], padded[2:, :-2]

    degrees = np.degrees(g.direction) % 180.0
    horizontal = (degrees < 22.5) | (degrees >= 157.5)
    diagonal = (degrees >= 22.5) & (degrees < 67.5)
    vertical = (degrees >= 67.5) & (degrees < 112.5)
    anti_diagonal = (degrees >= 112.5) & (degrees < 157.5)

    keep = np.zeros(mag.shape, dtype=bool)
    keep |= horizontal & (center >= left) & (center >= right)
    keep |= diagonal & (center >= up_left) & (center >= down_right)
    keep |= vertical & (center >= up) & (center >= down)
    keep |= anti_diagonal & (center >= up_right) & (center >= down_left)

    return GrayImage(np.where(keep, center, 0.0), bounded=False)


def hysteresis_threshold(mag: GrayImage, low: float, high: float) -> BinaryImage:
    """Strong pixels (>= high) plus weak pixels (>= low) 8-connected to one."""
    if not 0 < low <= high:
        raise ImagingError(f"hysteresis thresholds must satisfy 0 < low <= high, got low={low}, high={high}")

    weak = mag.pixels >= low
    strong = mag.pixels >= high
    labels, n_components = ndimage.label(weak, structure=EIGHT_CONNECTED)
    keep = np.zeros(n_components + 1, dtype=bool)
    keep[labels[strong]] = True
    keep[0] = False
    return BinaryImage(keep[labels])


def limb_mask(shape, disk, margin_fraction: float) -> np.ndarray:
    """True strictly inside the disk, excluding the margin band at the limb."""
    height, width = shape
    yy, xx = np.mgrid[0:height, 0:width]
    distance = np.hypot(xx - disk.center_x, yy - disk.center_y)
    return distance < disk.radius * (1.0 - margin_fraction)


def canny_stages(img: GrayImage, params: CannyParams, disk: Optional[SolarDisk] = None) -> CannyStages:
    """Run the whole chain and keep every intermediate raster.

    ``disk`` skips disk detection when the caller has already located it.
    """
    smoothed = gaussian_smooth(img, params.smoothing_sigma)
    gradient = sobel_gradient(smoothed)
    suppressed = nonmax_suppress(gradient)
    thresholded = hysteresis_threshold(suppressed, params.low_threshold, params.high_threshold)

    if thresholded.count() == 0:
        # nothing to mask, so the disk is not needed
        return CannyStages(smoothed, gradient, suppressed, thresholded, edges=thresholded)

    if disk is None:
        disk = solar_disk_mask(img)
    inside = limb_mask(img.shape, disk, params.disk_margin_fraction)
    edges = BinaryImage(thresholded.bits & inside)
    logger.debug(f"Canny kept {edges.count()} of {thresholded.count()} edge pixels after limb masking "
                 f"(disk at ({disk.center_x:.1f}, {disk.center_y:.1f}), r={disk.radius:.1f})")
    return CannyStages(smoothed, gradient, suppressed, thresholded, edges=edges, disk=disk)


def canny(img: GrayImage, params: CannyParams) -> BinaryImage:
    """Binary edge map of the solar disk interior."""
    return canny_stages(img, params).edges
