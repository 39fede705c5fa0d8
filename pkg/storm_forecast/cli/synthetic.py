"""
Deterministic synthetic solar corpus for desk-scale runs.

Each day gets a bright disk on a black sky with ``k`` dark circular spots
arranged in ``g`` compact groups. The day after a spotty day (k >= 5) is a
storm day in the accompanying Kp file, so the planted signal is learnable.
"""

import datetime
import logging
import math
import os
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np
from PIL import Image

from ..ingest.kp import format_kp_day
from ..ingest.records import KpDay, SilsoRecord, snap_kp
from ..ingest.silso import format_silso_record

logger = logging.getLogger(__name__)

DISK_INTENSITY = 200
SPOT_INTENSITY = 20
DISK_RADIUS_FRACTION = 0.42
SPOT_RADIUS = 9
# centre-to-centre distance of neighbouring spots within one group
SPOT_SPACING = 24
GROUP_COLUMNS = 3
MAX_GROUPS = 4
STORM_SPOTS = 5
STORM_DAY_FRACTION = 0.25

Spot = Tuple[float, float, float]


def group_centres(size: int, n_groups: int) -> List[Tuple[float, float]]:
    """Group centres on a circle of half the disk radius, evenly spaced."""
    centre = (size - 1) / 2.0
    ring = 0.5 * DISK_RADIUS_FRACTION * size
    return [(centre + ring * math.cos(2.0 * math.pi * j / n_groups - math.pi / 2.0),
             centre + ring * math.sin(2.0 * math.pi * j / n_groups - math.pi / 2.0))
            for j in range(n_groups)]


def plan_spots(size: int, n_spots: int, n_groups: int) -> List[Spot]:
    """
    Place ``n_spots`` spots in ``n_groups`` groups (round-robin).

    Spots of one group sit on a small grid ``SPOT_SPACING`` apart, close
    enough for their edges to cluster together; groups are far apart.
    """
    if n_spots == 0:
        return []
    n_groups = max(1, min(n_groups, n_spots, MAX_GROUPS))
    members: List[List[int]] = [[] for _ in range(n_groups)]
    for k in range(n_spots):
        members[k % n_groups].append(k)

    spots = []
    for (cx, cy), group in zip(group_centres(size, n_groups), members):
        rows = math.ceil(len(group) / GROUP_COLUMNS)
        for slot in range(len(group)):
            row, col = divmod(slot, GROUP_COLUMNS)
            columns_in_row = min(GROUP_COLUMNS, len(group) - row * GROUP_COLUMNS)
            dx = (col - (columns_in_row - 1) / 2.0) * SPOT_SPACING
            dy = (row - (rows - 1) / 2.0) * SPOT_SPACING
            spots.append((cx + dx, cy + dy, float(SPOT_RADIUS)))
    return spots


def render_sun(size: int, spots: List[Spot]) -> np.ndarray:
    """uint8 (size, size) raster of the disk with the given dark spots."""
    centre = (size - 1) / 2.0
    yy, xx = np.ogrid[0:size, 0:size]
    pixels = np.zeros((size, size), dtype=np.uint8)
    radius = DISK_RADIUS_FRACTION * size
    pixels[(xx - centre) ** 2 + (yy - centre) ** 2 <= radius ** 2] = DISK_INTENSITY
    for x, y, r in spots:
        pixels[(xx - x) ** 2 + (yy - y) ** 2 <= r ** 2] = SPOT_INTENSITY
    return pixels


def save_png(pixels: np.ndarray, path: str) -> None:
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    Image.fromarray(pixels, mode="L").save(path, format="PNG")


def _kp_day(rng: np.random.Generator, day: datetime.date, storm: bool) -> KpDay:
    values = [snap_kp(v) for v in rng.integers(0, 10, size=8) / 3.0]
    if storm:
        values[int(rng.integers(0, 8))] = snap_kp(float(rng.choice([16, 17, 18, 20])) / 3.0)
    return KpDay(day, tuple(values))


@dataclass
class SyntheticCorpus:
    """Paths and ground truth of a generated corpus."""
    image_dir: str
    kp_path: str
    silso_path: Optional[str]
    spots: Dict[datetime.date, int] = field(default_factory=dict)
    groups: Dict[datetime.date, int] = field(default_factory=dict)

    @property
    def storm_days(self) -> List[datetime.date]:
        """Days whose Kp file entry is a storm (the day after a spotty day)."""
        return sorted(d + datetime.timedelta(days=1) for d, k in self.spots.items() if k >= STORM_SPOTS)


def generate_corpus(out_dir: str, days: int = 60, size: int = 1024, seed: int = 0,
                    start: datetime.date = datetime.date(2015, 1, 1),
                    with_silso: bool = True) -> SyntheticCorpus:
    """
    Write ``days`` day images, a Kp file covering one extra day, and optionally
    a SILSO file into ``out_dir``.

    Layout: ``images/YYYYMMDD_synthetic.png``, ``kp.txt``, ``silso.csv``.
    """
    if days < 3:
        raise ValueError(f"a corpus needs at least 3 days, got {days}")
    rng = np.random.default_rng(seed)
    dates = [start + datetime.timedelta(days=k) for k in range(days)]

    n_spotty = max(2, round(STORM_DAY_FRACTION * days))
    spotty = set(int(k) for k in rng.choice(days, size=n_spotty, replace=False))

    corpus = SyntheticCorpus(image_dir=os.path.join(out_dir, "images"),
                             kp_path=os.path.join(out_dir, "kp.txt"),
                             silso_path=os.path.join(out_dir, "silso.csv") if with_silso else None)
    for k, day in enumerate(dates):
        n_spots = int(rng.integers(STORM_SPOTS, 9)) if k in spotty else int(rng.integers(0, STORM_SPOTS))
        n_groups = int(rng.integers(1, min(n_spots, MAX_GROUPS) + 1)) if n_spots else 0
        corpus.spots[day] = n_spots
        corpus.groups[day] = n_groups
        path = os.path.join(corpus.image_dir, f"{day:%Y%m%d}_synthetic.png")
        save_png(render_sun(size, plan_spots(size, n_spots, n_groups)), path)

    kp_lines = ["# synthetic Kp, storm on the day after a day with >= 5 spots"]
    for k in range(days + 1):
        day = start + datetime.timedelta(days=k)
        storm = k >= 1 and (k - 1) in spotty
        kp_lines.append(format_kp_day(_kp_day(rng, day, storm)))
    _write_lines(corpus.kp_path, kp_lines)

    if with_silso:
        silso_lines = []
        for day in dates:
            number = 10 * corpus.groups[day] + corpus.spots[day] + int(rng.integers(0, 3))
            silso_lines.append(format_silso_record(SilsoRecord(day, float(number))))
        _write_lines(corpus.silso_path, silso_lines)

    logger.info(f"Synthetic corpus: {days} days at {size}x{size} in {out_dir}, "
                f"{len(corpus.storm_days)} storm days")
    return corpus


def _write_lines(path: str, lines: List[str]) -> None:
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w", newline="\n") as f:
        f.write("\n".join(lines) + "\n")
