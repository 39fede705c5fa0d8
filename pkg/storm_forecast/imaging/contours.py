"""
Topological contour analysis of binary edge maps.

Outer borders are traced with Suzuki-Abe border following. A raster scan
meets every 8-connected component first at its top-left pixel, and that is
where the outer border of the component starts; labeling the components
finds those pixels without a Python-level scan of the whole image. Hole
borders are not traced.
"""

from typing import List, Tuple

import numpy as np
from scipy import ndimage

from .raster import BinaryImage, Contour

DEFAULT_MIN_PERIMETER = 4

# (row, col) offsets in clockwise order on screen (rows grow downwards),
# starting east.
_NEIGHBOURS = [(0, 1), (1, 1), (1, 0), (1, -1), (0, -1), (-1, -1), (-1, 0), (-1, 1)]
_WEST = 4


def _direction(src: Tuple[int, int], dst: Tuple[int, int]) -> int:
    return _NEIGHBOURS.index((dst[0] - src[0], dst[1] - src[1]))


def _follow_border(mask: np.ndarray, start: Tuple[int, int]) -> List[Tuple[int, int]]:
    """Trace the outer border of the component containing ``start``.

    ``mask`` is zero-padded by one pixel and holds only this component;
    ``start`` is its first pixel in raster order, so its west neighbour is 0.
    Returns (row, col) points in the padded frame.
    """
    def occupied(pixel, k):
        dr, dc = _NEIGHBOURS[k % 8]
        return mask[pixel[0] + dr, pixel[1] + dc]

    # look clockwise from the west neighbour for the first foreground pixel
    first = None
    for step in range(8):
        k = (_WEST + step) % 8
        if occupied(start, k):
            dr, dc = _NEIGHBOURS[k]
            first = (start[0] + dr, start[1] + dc)
            break
    if first is None:
        return [start]

    points = [start]
    previous, current = first, start
    while True:
        # counterclockwise around current, starting after previous
        back = _direction(current, previous)
        nxt = None
        for step in range(1, 9):
            k = (back - step) % 8
            if occupied(current, k):
                dr, dc = _NEIGHBOURS[k]
                nxt = (current[0] + dr, current[1] + dc)
                break
        if nxt == start and current == first:
            break
        points.append(nxt)
        previous, current = current, nxt
    return points


def find_contours(edges: BinaryImage) -> List[Contour]:
    """External contour of every 8-connected foreground component.

    Contours come out in raster order of their starting pixel; points are
    (x, y) image coordinates.
    """
    bits = edges.bits
    if bits.size == 0 or not bits.any():
        return []

    labels, n_components = ndimage.label(bits, structure=np.ones((3, 3), dtype=bool))
    slices = ndimage.find_objects(labels)

    contours = []
    for label_id, box in enumerate(slices, start=1):
        rows, cols = box
        component = np.pad(labels[box] == label_id, 1)
        nonzero = np.flatnonzero(component)
        start = divmod(int(nonzero[0]), component.shape[1])
        traced = _follow_border(component, start)
        # back to (x, y) in the full image, undoing the pad
        points = [(c - 1 + cols.start, r - 1 + rows.start) for r, c in traced]
        contours.append((points[0][1], points[0][0], Contour(points=points, is_external=True)))

    contours.sort(key=lambda item: (item[0], item[1]))
    return [contour for _, _, contour in contours]


def count_sunspots(contours: List[Contour], min_perimeter: int = DEFAULT_MIN_PERIMETER) -> int:
    """Number of contours whose perimeter (point count) reaches ``min_perimeter``."""
    return sum(1 for contour in contours if contour.perimeter >= min_perimeter)
