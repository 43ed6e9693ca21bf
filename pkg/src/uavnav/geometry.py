"""Prism-obstacle geometry: footprint tests and exact segment clipping.

Obstacles are vertical prisms over convex counter-clockwise polygons in the
unit square.  A movement segment is clipped against each prism analytically
(Cyrus-Beck against the footprint half-planes, plus the z slab), so the
crash depth is exact up to floating point.
"""

from __future__ import annotations

import numpy as np

from .errors import ShapeError

# Intervals shorter than this along the segment parameter are grazing
# contacts, not penetrations.
_GRAZE_TOL = 1e-12


class Obstacle:
    """Vertical prism over a convex CCW polygon, footprint in the unit square."""

    def __init__(self, base_polygon, height):
        poly = np.asarray(base_polygon, dtype=float)
        if poly.ndim != 2 or poly.shape[1] != 2 or poly.shape[0] < 3:
            raise ShapeError(f"base_polygon must be (k>=3, 2), got {poly.shape}")
        if not np.all(np.isfinite(poly)):
            raise ValueError("base_polygon has non-finite vertices")
        if not (0.0 < height <= 1.0):
            raise ValueError(f"height must be in (0, 1], got {height}")
        if poly.min() < 0.0 or poly.max() > 1.0:
            raise ValueError("obstacle footprint must lie inside the unit square")

        edges = np.roll(poly, -1, axis=0) - poly
        nxt = np.roll(edges, -1, axis=0)
        crosses = edges[:, 0] * nxt[:, 1] - edges[:, 1] * nxt[:, 0]
        area2 = float(np.sum(poly[:, 0] * np.roll(poly[:, 1], -1)
                             - np.roll(poly[:, 0], -1) * poly[:, 1]))
        if area2 <= 0.0:
            raise ValueError("base_polygon vertices must be counter-clockwise")
        if np.any(crosses < -1e-12):
            raise ValueError("base_polygon must be convex")

        self.base_polygon = poly
        self.height = float(height)
        self._edges = edges  # directed CCW edge vectors

    def footprint_contains(self, x, y):
        """True if (x, y) is inside or on the boundary of the base polygon."""
        rel_x = x - self.base_polygon[:, 0]
        rel_y = y - self.base_polygon[:, 1]
        cross = self._edges[:, 0] * rel_y - self._edges[:, 1] * rel_x
        return bool(np.all(cross >= -1e-12))

    def contains(self, point):
        """True if the 3D point lies in the prism volume (boundary inclusive)."""
        x, y, z = point
        return 0.0 <= z <= self.height and self.footprint_contains(x, y)

    def clip_segment(self, p0, p1):
        """Intersect the segment p0 + t*(p1-p0), t in [0,1], with the prism.

        Returns (t_lo, t_hi) of the overlapping parameter interval, or None
        if the segment misses the prism.
        """
        d = p1 - p0
        t_lo, t_hi = 0.0, 1.0

        # z slab: 0 <= z0 + t*dz <= height
        for c0, c1 in ((p0[2], d[2]), (self.height - p0[2], -d[2])):
            # constraint c0 + t*c1 >= 0
            if abs(c1) < 1e-300:
                if c0 < 0.0:
                    return None
                continue
            t = -c0 / c1
            if c1 > 0.0:
                t_lo = max(t_lo, t)
            else:
                t_hi = min(t_hi, t)

        # footprint half-planes: cross(edge, p(t) - v) >= 0
        verts = self.base_polygon
        ex, ey = self._edges[:, 0], self._edges[:, 1]
        c0 = ex * (p0[1] - verts[:, 1]) - ey * (p0[0] - verts[:, 0])
        c1 = ex * d[1] - ey * d[0]
        for k in range(len(verts)):
            if abs(c1[k]) < 1e-300:
                if c0[k] < 0.0:
                    return None
                continue
            t = -c0[k] / c1[k]
            if c1[k] > 0.0:
                t_lo = max(t_lo, t)
            else:
                t_hi = min(t_hi, t)

        if t_hi - t_lo <= 0.0:
            return None
        return (t_lo, t_hi)


def point_in_any_obstacle(point, obstacles):
    return any(obs.contains(point) for obs in obstacles)


def _merged_intervals(p0, p1, obstacles):
    intervals = []
    for obs in obstacles:
        hit = obs.clip_segment(p0, p1)
        if hit is not None and hit[1] - hit[0] > _GRAZE_TOL:
            intervals.append(hit)
    if not intervals:
        return []
    intervals.sort()
    merged = [list(intervals[0])]
    for lo, hi in intervals[1:]:
        if lo <= merged[-1][1]:
            merged[-1][1] = max(merged[-1][1], hi)
        else:
            merged.append([lo, hi])
    return merged


def crash_depth(p0, p1, obstacles):
    """Total length of the segment p0->p1 lying inside the obstacle union."""
    p0 = np.asarray(p0, dtype=float)
    p1 = np.asarray(p1, dtype=float)
    merged = _merged_intervals(p0, p1, obstacles)
    if not merged:
        return 0.0
    seg_len = float(np.linalg.norm(p1 - p0))
    return seg_len * sum(hi - lo for lo, hi in merged)


def first_entry(p0, p1, obstacles):
    """Segment parameter t at which p0->p1 first enters an obstacle, or None.

    Grazing contacts (zero-measure overlap) do not count as entries.
    """
    p0 = np.asarray(p0, dtype=float)
    p1 = np.asarray(p1, dtype=float)
    merged = _merged_intervals(p0, p1, obstacles)
    if not merged:
        return None
    return merged[0][0]
