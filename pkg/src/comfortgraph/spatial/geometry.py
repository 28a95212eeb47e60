"""Planar polygon helpers: area, simplicity, boundary-inclusive containment."""

from __future__ import annotations

from typing import Sequence

import numpy as np

EPS = 1e-9

Point = tuple[float, float]


def polygon_area(poly: Sequence[Point]) -> float:
    """Signed shoelace area (positive for counter-clockwise rings)."""
    pts = np.asarray(poly, dtype=float)
    x, y = pts[:, 0], pts[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))


def _orient(a, b, c) -> float:
    return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])


def _on_segment(a, b, p) -> bool:
    return (min(a[0], b[0]) - EPS <= p[0] <= max(a[0], b[0]) + EPS
            and min(a[1], b[1]) - EPS <= p[1] <= max(a[1], b[1]) + EPS)


def _segments_intersect(a, b, c, d) -> bool:
    o1, o2, o3, o4 = _orient(a, b, c), _orient(a, b, d), _orient(c, d, a), _orient(c, d, b)
    if ((o1 > EPS and o2 < -EPS) or (o1 < -EPS and o2 > EPS)) and \
       ((o3 > EPS and o4 < -EPS) or (o3 < -EPS and o4 > EPS)):
        return True
    if abs(o1) <= EPS and _on_segment(a, b, c):
        return True
    if abs(o2) <= EPS and _on_segment(a, b, d):
        return True
    if abs(o3) <= EPS and _on_segment(c, d, a):
        return True
    if abs(o4) <= EPS and _on_segment(c, d, b):
        return True
    return False


def is_simple(poly: Sequence[Point]) -> bool:
    """True when no two non-adjacent edges touch and no edge is degenerate."""
    n = len(poly)
    if n < 3:
        return False
    edges = [(poly[i], poly[(i + 1) % n]) for i in range(n)]
    for a, b in edges:
        if abs(a[0] - b[0]) <= EPS and abs(a[1] - b[1]) <= EPS:
            return False
    for i in range(n):
        for j in range(i + 1, n):
            if j == i + 1 or (i == 0 and j == n - 1):
                continue
            if _segments_intersect(*edges[i], *edges[j]):
                return False
    return True


def point_in_polygon(x: float, y: float, poly: Sequence[Point]) -> bool:
    """Even-odd ray casting; points on an edge count as inside."""
    n = len(poly)
    inside = False
    for i in range(n):
        x1, y1 = poly[i - 1]
        x2, y2 = poly[i]
        # boundary
        if abs(_orient((x1, y1), (x2, y2), (x, y))) <= EPS and _on_segment((x1, y1), (x2, y2), (x, y)):
            return True
        if (y1 > y) != (y2 > y):
            xi = x1 + (y - y1) * (x2 - x1) / (y2 - y1)
            if x < xi:
                inside = not inside
    return inside


def points_in_polygon(xy: np.ndarray, poly: Sequence[Point]) -> np.ndarray:
    """Vectorised :func:`point_in_polygon` over an (n, 2) array."""
    xy = np.asarray(xy, dtype=float)
    x, y = xy[:, 0], xy[:, 1]
    inside = np.zeros(len(xy), dtype=bool)
    boundary = np.zeros(len(xy), dtype=bool)
    n = len(poly)
    for i in range(n):
        x1, y1 = poly[i - 1]
        x2, y2 = poly[i]
        cross = (x2 - x1) * (y - y1) - (y2 - y1) * (x - x1)
        within = ((np.minimum(x1, x2) - EPS <= x) & (x <= np.maximum(x1, x2) + EPS)
                  & (np.minimum(y1, y2) - EPS <= y) & (y <= np.maximum(y1, y2) + EPS))
        boundary |= (np.abs(cross) <= EPS) & within
        straddle = (y1 > y) != (y2 > y)
        if y2 != y1:
            xi = x1 + (y - y1) * (x2 - x1) / (y2 - y1)
            inside ^= straddle & (x < xi)
    return inside | boundary


def centroid(poly: Sequence[Point]) -> Point:
    pts = np.asarray(poly, dtype=float)
    a = polygon_area(poly)
    x, y = pts[:, 0], pts[:, 1]
    xn, yn = np.roll(x, -1), np.roll(y, -1)
    cr = x * yn - xn * y
    return float(((x + xn) * cr).sum() / (6 * a)), float(((y + yn) * cr).sum() / (6 * a))
