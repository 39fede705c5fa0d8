import datetime
import logging
import os
import re
from typing import Dict, List, Optional, Tuple

from .records import ImageManifest

logger = logging.getLogger(__name__)

# flat layout: YYYYMMDD_anything.png / .jpg / .jpeg
_FLAT_NAME = re.compile(r"^(\d{4})(\d{2})(\d{2})_.*\.(png|jpe?g)$", re.IGNORECASE)
# cache layout written by fetch_sdo: YYYY/MMDD.png
_CACHE_YEAR = re.compile(r"^\d{4}$")
_CACHE_NAME = re.compile(r"^(\d{2})(\d{2})\.png$", re.IGNORECASE)


def cache_path(cache_dir: str, day: datetime.date) -> str:
    return os.path.join(cache_dir, f"{day.year:04d}", f"{day.month:02d}{day.day:02d}.png")


def _make_date(year: str, month: str, day: str) -> Optional[datetime.date]:
    try:
        return datetime.date(int(year), int(month), int(day))
    except ValueError:
        return None


def build_manifest(directory: str) -> ImageManifest:
    """
    Index the day images in ``directory``.

    Both ``YYYYMMDD_*.{png,jpg}`` files at the top level and the cache layout
    ``YYYY/MMDD.png`` are recognized. When several files name the same day
    the lexicographically first relative path wins.
    """
    manifest = ImageManifest()
    if not os.path.isdir(directory):
        logger.warning(f"Image directory {directory} does not exist; empty manifest")
        return manifest

    candidates: Dict[datetime.date, List[Tuple[str, str]]] = {}
    ignored = 0
    for name in sorted(os.listdir(directory)):
        full = os.path.join(directory, name)
        if os.path.isdir(full) and _CACHE_YEAR.match(name):
            for inner in sorted(os.listdir(full)):
                match = _CACHE_NAME.match(inner)
                day = _make_date(name, *match.groups()) if match else None
                if day is None or not os.path.isfile(os.path.join(full, inner)):
                    ignored += 1
                    continue
                candidates.setdefault(day, []).append((f"{name}/{inner}", os.path.join(full, inner)))
            continue

        match = _FLAT_NAME.match(name)
        day = _make_date(*match.groups()[:3]) if match else None
        if day is None or not os.path.isfile(full):
            ignored += 1
            continue
        candidates.setdefault(day, []).append((name, full))

    for day in sorted(candidates):
        files = sorted(candidates[day])
        if len(files) > 1:
            logger.warning(f"{len(files)} images for {day}; keeping {files[0][0]}, ignoring "
                           f"{', '.join(rel for rel, _ in files[1:])}")
        manifest.entries[day] = files[0][1]

    manifest.ignored = ignored
    if ignored:
        logger.info(f"Ignored {ignored} unrelated entries in {directory}")
    logger.info(f"Manifest of {directory}: {len(manifest)} days")
    return manifest
