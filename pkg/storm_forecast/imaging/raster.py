"""
Raster containers for the solar disk and its edge / contour maps.

All containers are immutable: the backing numpy arrays are made read-only
on construction, so images can be shared freely between threads and worker
processes.
"""

from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from ..errors import ImagingError


def _frozen(array: np.ndarray, dtype) -> np.ndarray:
    out = np.array(array, dtype=dtype, copy=True)
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class GrayImage:
    """Row-major intensity raster, shape (height, width).

    Intensity images (``bounded=True``) hold values in [0, 255] as float64 so
    smoothing does not quantize. Gradient-magnitude rasters reuse this type
    with ``bounded=False``: they only need to be finite and non-negative.
    """
    pixels: np.ndarray
    bounded: bool = True

    def __post_init__(self):
        pixels = np.asarray(self.pixels, dtype=np.float64)
        if pixels.ndim != 2:
            raise ImagingError(f"expected a 2-D raster, got shape {pixels.shape}")
        if pixels.size and not np.all(np.isfinite(pixels)):
            raise ImagingError("raster contains non-finite values")
        if pixels.size:
            low, high = float(pixels.min()), float(pixels.max())
            if low < 0.0 or (self.bounded and high > 255.0):
                limit = "[0, 255]" if self.bounded else "[0, inf)"
                raise ImagingError(f"intensity out of range {limit}: min={low}, max={high}")
        object.__setattr__(self, "pixels", _frozen(pixels, np.float64))

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def shape(self) -> Tuple[int, int]:
        return self.pixels.shape

    def is_empty(self) -> bool:
        return self.pixels.size == 0

    @classmethod
    def filled(cls, width: int, height: int, value: float) -> "GrayImage":
        return cls(np.full((height, width), float(value)))


@dataclass(frozen=True, eq=False)
class GradientField:
    """Per-pixel Sobel magnitude G(P) >= 0 and direction theta in (-pi/2, pi/2]."""
    magnitude: np.ndarray
    direction: np.ndarray

    def __post_init__(self):
        magnitude = np.asarray(self.magnitude, dtype=np.float64)
        direction = np.asarray(self.direction, dtype=np.float64)
        if magnitude.shape != direction.shape or magnitude.ndim != 2:
            raise ImagingError(
                f"gradient magnitude {magnitude.shape} and direction {direction.shape} must be matching 2-D arrays")
        if magnitude.size and magnitude.min() < 0:
            raise ImagingError("gradient magnitude must be non-negative")
        object.__setattr__(self, "magnitude", _frozen(magnitude, np.float64))
        object.__setattr__(self, "direction", _frozen(direction, np.float64))

    @property
    def height(self) -> int:
        return self.magnitude.shape[0]

    @property
    def width(self) -> int:
        return self.magnitude.shape[1]

    @property
    def shape(self) -> Tuple[int, int]:
        return self.magnitude.shape


@dataclass(frozen=True, eq=False)
class BinaryImage:
    """Per-pixel boolean raster; True marks an edge / foreground pixel."""
    bits: np.ndarray

    def __post_init__(self):
        bits = np.asarray(self.bits)
        if bits.ndim != 2:
            raise ImagingError(f"expected a 2-D binary raster, got shape {bits.shape}")
        object.__setattr__(self, "bits", _frozen(bits != 0, bool))

    @property
    def height(self) -> int:
        return self.bits.shape[0]

    @property
    def width(self) -> int:
        return self.bits.shape[1]

    @property
    def shape(self) -> Tuple[int, int]:
        return self.bits.shape

    def count(self) -> int:
        return int(self.bits.sum())


@dataclass(frozen=True)
class Contour:
    """One closed outer boundary as ordered (x, y) pixel coordinates."""
    points: List[Tuple[int, int]]
    is_external: bool = True

    def __post_init__(self):
        if not self.points:
            raise ImagingError("contour must contain at least one point")

    @property
    def perimeter(self) -> int:
        return len(self.points)

    def is_closed(self) -> bool:
        """Consecutive points (wrapping around) are 8-connected."""
        pts = self.points
        for (x0, y0), (x1, y1) in zip(pts, pts[1:] + pts[:1]):
            if max(abs(x1 - x0), abs(y1 - y0)) > 1:
                return False
        return True


@dataclass(frozen=True)
class CannyParams:
    """Canny settings. Thresholds are in Sobel gradient units; high defaults
    to twice the low threshold.
    """
    smoothing_sigma: float = 0.5
    low_threshold: float = 300.0
    high_threshold: float = 600.0
    disk_margin_fraction: float = 0.02

    def __post_init__(self):
        if not self.smoothing_sigma > 0:
            raise ImagingError(f"smoothing_sigma must be > 0, got {self.smoothing_sigma}")
        if not 0 < self.low_threshold <= self.high_threshold:
            raise ImagingError(
                f"thresholds must satisfy 0 < low <= high, got low={self.low_threshold}, high={self.high_threshold}")
        if not 0 <= self.disk_margin_fraction < 1:
            raise ImagingError(f"disk_margin_fraction must be in [0, 1), got {self.disk_margin_fraction}")

    def to_dict(self) -> dict:
        return {
            "smoothing_sigma": self.smoothing_sigma,
            "low_threshold": self.low_threshold,
            "high_threshold": self.high_threshold,
            "disk_margin_fraction": self.disk_margin_fraction,
        }


@dataclass(frozen=True)
class SolarDisk:
    center_x: float
    center_y: float
    radius: float

    def as_tuple(self) -> Tuple[float, float, float]:
        return self.center_x, self.center_y, self.radius


@dataclass
class CannyStages:
    """Intermediate rasters kept for debug dumps."""
    smoothed: GrayImage
    gradient: GradientField
    suppressed: GrayImage
    thresholded: BinaryImage
    edges: BinaryImage
    disk: Optional[SolarDisk] = None
