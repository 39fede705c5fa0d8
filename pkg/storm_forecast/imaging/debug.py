import logging
import os

import numpy as np
from PIL import Image

from .raster import CannyStages

logger = logging.getLogger(__name__)


def _to_uint8(pixels: np.ndarray, rescale: bool) -> np.ndarray:
    if rescale:
        peak = float(pixels.max()) if pixels.size else 0.0
        pixels = pixels * (255.0 / peak) if peak > 0 else pixels
    return np.clip(np.rint(pixels), 0, 255).astype(np.uint8)


def dump_stages(stages: CannyStages, directory: str) -> None:
    """Write every Canny stage as an 8-bit grayscale image into ``directory``.

    Magnitude rasters are rescaled to 0-255 for viewing; the final edge map
    is written both as PNG and PGM.
    """
    os.makedirs(directory, exist_ok=True)
    rasters = {
        "smoothed.png": _to_uint8(stages.smoothed.pixels, rescale=False),
        "magnitude.png": _to_uint8(stages.gradient.magnitude, rescale=True),
        "suppressed.png": _to_uint8(stages.suppressed.pixels, rescale=True),
        "binary.png": stages.edges.bits.astype(np.uint8) * 255,
    }
    for name, array in rasters.items():
        Image.fromarray(array).save(os.path.join(directory, name))
    Image.fromarray(rasters["binary.png"]).save(os.path.join(directory, "binary.pgm"))
    logger.debug(f"Dumped Canny stages to {directory}")
