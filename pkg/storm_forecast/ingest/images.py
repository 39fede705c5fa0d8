import logging
import os

import numpy as np
from PIL import Image, UnidentifiedImageError

from ..errors import ImageLoadError, UnsupportedImageFormat
from ..imaging.raster import GrayImage
from .records import WORKING_SIZE

logger = logging.getLogger(__name__)

SUPPORTED_FORMATS = ("PNG", "JPEG")
LUMA_WEIGHTS = np.array([0.299, 0.587, 0.114])


def _to_gray(image: Image.Image) -> np.ndarray:
    """Float intensities in [0, 255]; color via 0.299 R + 0.587 G + 0.114 B."""
    if image.mode in ("L", "LA"):
        return np.asarray(image.getchannel(0), dtype=np.float64)
    if image.mode in ("I;16", "I;16B", "I;16L", "I"):
        pixels = np.asarray(image, dtype=np.float64)
        peak = 65535.0 if image.mode != "I" or pixels.max() > 255 else 255.0
        return np.clip(pixels * (255.0 / peak), 0.0, 255.0)
    if image.mode == "1":
        return np.asarray(image, dtype=np.float64) * 255.0
    rgb = np.asarray(image.convert("RGB"), dtype=np.float64)
    return rgb @ LUMA_WEIGHTS


def resample_area(pixels: np.ndarray, size: int) -> np.ndarray:
    """Area-weighted resampling to size x size.

    Integer downscale factors average exact pixel blocks; other sizes use
    Pillow's box filter on a float image.
    """
    height, width = pixels.shape
    if (height, width) == (size, size):
        return pixels
    if height % size == 0 and width % size == 0:
        fy, fx = height // size, width // size
        return pixels.reshape(size, fy, size, fx).mean(axis=(1, 3))
    resized = Image.fromarray(pixels.astype(np.float32)).resize((size, size), Image.Resampling.BOX)
    return np.clip(np.asarray(resized, dtype=np.float64), 0.0, 255.0)


def load_image(path: str, working_size: int = WORKING_SIZE) -> GrayImage:
    """
    Decode a PNG or JPEG solar image into a working-size grayscale raster.

    Raises:
        ImageLoadError: missing, unreadable, truncated or corrupt file
        UnsupportedImageFormat: the file decodes but is neither PNG nor JPEG
    """
    if not os.path.exists(path):
        raise ImageLoadError(path, "file not found")
    try:
        with Image.open(path) as image:
            if image.format not in SUPPORTED_FORMATS:
                raise UnsupportedImageFormat(path, image.format or "unknown")
            image.load()
            pixels = _to_gray(image)
    except UnidentifiedImageError as e:
        raise ImageLoadError(path, "not a decodable image", e)
    except (OSError, SyntaxError, ValueError) as e:
        raise ImageLoadError(path, f"corrupt or truncated image ({e})", e)

    if pixels.shape != (working_size, working_size):
        logger.debug(f"Resampling {path} from {pixels.shape[1]}x{pixels.shape[0]} to {working_size}x{working_size}")
        pixels = resample_area(pixels, working_size)
    return GrayImage(pixels)
