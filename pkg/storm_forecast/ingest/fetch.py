"""
Download of daily SDO/HMI flattened-intensitygram browse images.

The archive is laid out by date: ``{base_url}/YYYY/MM/DD/`` lists files named
``YYYYMMDD_HHMMSS_<size>_HMIIF.jpg``. For every day the image taken in the
00:00 UTC minute is used; without one, the latest image of the preceding
two hours (from the previous day's listing). Downloads are converted to PNG
and stored as ``cache_dir/YYYY/MMDD.png``; cached days are never requested
again.
"""

import datetime
import io
import logging
import os
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import List, Optional, Tuple

import httpx
from PIL import Image

from ..errors import IngestError
from .manifest import cache_path
from .records import ImageManifest

logger = logging.getLogger(__name__)

DEFAULT_BASE_URL = "https://sdo.gsfc.nasa.gov/assets/img/browse"
DEFAULT_WINDOW_HOURS = 2.0
DEFAULT_CONCURRENCY = 4
DEFAULT_TIMEOUT = 30.0

_IMAGE_NAME = re.compile(r"(\d{8})_(\d{6})_[A-Za-z0-9]+_HMIIF\.jpg")


@dataclass(frozen=True)
class ArchiveImage:
    taken_at: datetime.datetime
    name: str

    @property
    def day(self) -> datetime.date:
        return self.taken_at.date()


class SdoArchive:
    """Read access to a date-organized SDO browse archive."""

    def __init__(self, base_url: str, client: httpx.Client):
        self.base_url = base_url.rstrip("/")
        self.client = client

    def _day_url(self, day: datetime.date) -> str:
        return f"{self.base_url}/{day.year:04d}/{day.month:02d}/{day.day:02d}/"

    def list_day(self, day: datetime.date) -> List[ArchiveImage]:
        """HMIIF images in the day's directory listing; an absent directory lists nothing."""
        url = self._day_url(day)
        try:
            response = self.client.get(url)
            if response.status_code == 404:
                return []
            response.raise_for_status()
        except httpx.HTTPError as e:
            raise IngestError(f"listing {url} failed: {e}", e)

        images = set()
        for match in _IMAGE_NAME.finditer(response.text):
            try:
                taken_at = datetime.datetime.strptime(f"{match.group(1)}_{match.group(2)}", "%Y%m%d_%H%M%S")
            except ValueError:
                continue
            images.add(ArchiveImage(taken_at, match.group(0)))
        return sorted(images, key=lambda im: (im.taken_at, im.name))

    def download(self, image: ArchiveImage) -> bytes:
        url = self._day_url(image.day) + image.name
        try:
            response = self.client.get(url)
            response.raise_for_status()
        except httpx.HTTPError as e:
            raise IngestError(f"download of {url} failed: {e}", e)
        return response.content

    def select_image(self, day: datetime.date, window_hours: float = DEFAULT_WINDOW_HOURS) -> Optional[ArchiveImage]:
        """The 00:00 image of ``day``, else the latest one within ``window_hours`` before midnight."""
        midnight = datetime.datetime.combine(day, datetime.time())
        on_time = [im for im in self.list_day(day)
                   if im.day == day and im.taken_at < midnight + datetime.timedelta(minutes=1)]
        if on_time:
            return on_time[0]

        earliest = midnight - datetime.timedelta(hours=window_hours)
        earlier = [im for im in self.list_day(day - datetime.timedelta(days=1))
                   if earliest <= im.taken_at < midnight]
        return earlier[-1] if earlier else None


def _write_png(data: bytes, path: str) -> None:
    """Decode the downloaded image and store it as PNG via a temp file and rename."""
    directory = os.path.dirname(path)
    tmp_path = os.path.join(directory, f".{os.path.basename(path)}.tmp")
    try:
        with Image.open(io.BytesIO(data)) as image:
            image.load()
            os.makedirs(directory, exist_ok=True)
            image.save(tmp_path, format="PNG")
    except (OSError, SyntaxError, ValueError) as e:
        if os.path.exists(tmp_path):
            os.remove(tmp_path)
        raise IngestError(f"downloaded image for {path} could not be decoded: {e}", e)
    os.replace(tmp_path, path)


def _fetch_day(archive: SdoArchive, day: datetime.date, cache_dir: str,
               window_hours: float) -> Tuple[datetime.date, Optional[str], Optional[str]]:
    """(day, cached path or None, failure reason or None)."""
    try:
        image = archive.select_image(day, window_hours)
        if image is None:
            return day, None, f"no HMIIF image at 00:00 or within {window_hours:g} h before"
        path = cache_path(cache_dir, day)
        _write_png(archive.download(image), path)
        logger.debug(f"{day}: cached {image.name}")
        return day, path, None
    except IngestError as e:
        return day, None, e.message


def date_range_days(start: datetime.date, end: datetime.date) -> List[datetime.date]:
    if end < start:
        raise IngestError(f"empty date range {start}..{end}")
    return [start + datetime.timedelta(days=k) for k in range((end - start).days + 1)]


def fetch_sdo(date_range: Tuple[datetime.date, datetime.date], cache_dir: str,
              base_url: str = DEFAULT_BASE_URL, offline: bool = False,
              window_hours: float = DEFAULT_WINDOW_HOURS, concurrency: int = DEFAULT_CONCURRENCY,
              transport: Optional[httpx.BaseTransport] = None, timeout: float = DEFAULT_TIMEOUT) -> ImageManifest:
    """
    Make sure every day of ``date_range`` (inclusive) has a cached image.

    Args:
        date_range: (first day, last day)
        cache_dir: Root of the ``YYYY/MMDD.png`` cache
        base_url: Archive root
        offline: Never touch the network; only cached days are returned
        window_hours: How far before midnight a substitute image may be
        concurrency: Downloads in flight
        transport: httpx transport override (tests inject a mock here)

    Returns:
        ImageManifest: cached days in ``entries``, failed days in ``gaps``

    Raises:
        IngestError: offline with no cached image anywhere in the range
    """
    days = date_range_days(*date_range)
    manifest = ImageManifest()
    missing = []
    for day in days:
        path = cache_path(cache_dir, day)
        if os.path.isfile(path):
            manifest.entries[day] = path
        else:
            missing.append(day)
    logger.info(f"{len(days) - len(missing)} of {len(days)} days already cached in {cache_dir}")

    if offline:
        if not manifest.entries:
            raise IngestError(f"offline and no cached images for {days[0]}..{days[-1]} in {cache_dir}")
        manifest.gaps = missing
        if missing:
            logger.warning(f"Offline: {len(missing)} uncached days left as gaps")
        return manifest

    if missing:
        with httpx.Client(transport=transport, timeout=timeout, follow_redirects=True) as client:
            archive = SdoArchive(base_url, client)
            with ThreadPoolExecutor(max_workers=max(1, concurrency)) as pool:
                outcomes = list(pool.map(lambda d: _fetch_day(archive, d, cache_dir, window_hours), missing))
        for day, path, reason in outcomes:
            if path is not None:
                manifest.entries[day] = path
            else:
                manifest.gaps.append(day)
                logger.warning(f"{day}: {reason}")

    logger.info(f"Fetch finished: {len(manifest)} days available, {len(manifest.gaps)} gaps")
    return manifest
