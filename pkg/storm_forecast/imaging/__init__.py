from .raster import (
    BinaryImage,
    CannyParams,
    CannyStages,
    Contour,
    GradientField,
    GrayImage,
    SolarDisk,
)
from .canny import (
    canny,
    canny_stages,
    gaussian_smooth,
    hysteresis_threshold,
    nonmax_suppress,
    sobel_gradient,
)
from .disk import solar_disk_mask
from .contours import count_sunspots, find_contours

__all__ = [
    "BinaryImage",
    "CannyParams",
    "CannyStages",
    "Contour",
    "GradientField",
    "GrayImage",
    "SolarDisk",
    "canny",
    "canny_stages",
    "gaussian_smooth",
    "hysteresis_threshold",
    "nonmax_suppress",
    "sobel_gradient",
    "solar_disk_mask",
    "count_sunspots",
    "find_contours",
]
