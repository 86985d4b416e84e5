"""Minimum enclosing circle of planar points (Welzl-style incremental build).

Used for the compactness metric: the enclosing vertical cylinder of a
mechanism is the minimum enclosing circle of the characteristic points'
horizontal projections. Point counts are tiny (a handful per mechanism), but
the algorithm is the expected-linear-time incremental one so it also copes
with diagnostic point clouds.
"""

from __future__ import annotations

import random
from typing import Optional, Sequence

Point = tuple[float, float]
Circle = tuple[float, float, float]  # center x, center y, radius

_EPS = 1e-12


def min_enclosing_circle(points: Sequence[Point]) -> Circle:
    """Smallest circle containing every point.

    Deterministic: the internal shuffle uses a fixed seed. Raises ValueError
    on an empty input; a single point yields a zero-radius circle.
    """
    pts = [(float(x), float(y)) for x, y in points]
    if not pts:
        raise ValueError("need at least one point")
    shuffled = list(pts)
    random.Random(0x5EED).shuffle(shuffled)

    circle: Optional[Circle] = None
    for i, p in enumerate(shuffled):
        if circle is None or not _inside(circle, p):
            circle = _with_one_boundary(shuffled[: i + 1], p)
    assert circle is not None
    return circle


def _with_one_boundary(points: Sequence[Point], p: Point) -> Circle:
    circle: Circle = (p[0], p[1], 0.0)
    for i, q in enumerate(points):
        if not _inside(circle, q):
            if circle[2] == 0.0:
                circle = _diameter(p, q)
            else:
                circle = _with_two_boundary(points[: i + 1], p, q)
    return circle


def _with_two_boundary(points: Sequence[Point], p: Point, q: Point) -> Circle:
    base = _diameter(p, q)
    left: Optional[Circle] = None
    right: Optional[Circle] = None
    px, py = p
    qx, qy = q
    for r in points:
        if _inside(base, r):
            continue
        cross = _cross(px, py, qx, qy, r[0], r[1])
        c = circumcircle(p, q, r)
        if c is None:
            continue
        if cross > 0.0 and (
            left is None
            or _cross(px, py, qx, qy, c[0], c[1]) > _cross(px, py, qx, qy, left[0], left[1])
        ):
            left = c
        elif cross < 0.0 and (
            right is None
            or _cross(px, py, qx, qy, c[0], c[1]) < _cross(px, py, qx, qy, right[0], right[1])
        ):
            right = c
    if left is None and right is None:
        return base
    if left is None:
        return right  # type: ignore[return-value]
    if right is None:
        return left
    return left if left[2] <= right[2] else right


def _diameter(p: Point, q: Point) -> Circle:
    cx = (p[0] + q[0]) / 2.0
    cy = (p[1] + q[1]) / 2.0
    r = max(_dist(cx, cy, *p), _dist(cx, cy, *q))
    return (cx, cy, r)


def circumcircle(p: Point, q: Point, r: Point) -> Optional[Circle]:
    """Circle through three points; None when they are (near) collinear."""
    ox = (min(p[0], q[0], r[0]) + max(p[0], q[0], r[0])) / 2.0
    oy = (min(p[1], q[1], r[1]) + max(p[1], q[1], r[1])) / 2.0
    ax, ay = p[0] - ox, p[1] - oy
    bx, by = q[0] - ox, q[1] - oy
    cx, cy = r[0] - ox, r[1] - oy
    d = (ax * (by - cy) + bx * (cy - ay) + cx * (ay - by)) * 2.0
    if abs(d) <= _EPS:
        return None
    ux = ox + ((ax * ax + ay * ay) * (by - cy) + (bx * bx + by * by) * (cy - ay)
               + (cx * cx + cy * cy) * (ay - by)) / d
    uy = oy + ((ax * ax + ay * ay) * (cx - bx) + (bx * bx + by * by) * (ax - cx)
               + (cx * cx + cy * cy) * (bx - ax)) / d
    radius = max(_dist(ux, uy, *p), _dist(ux, uy, *q), _dist(ux, uy, *r))
    return (ux, uy, radius)


def _inside(circle: Circle, p: Point) -> bool:
    cx, cy, r = circle
    return _dist(cx, cy, *p) <= r * (1.0 + _EPS) + _EPS


def _dist(x0: float, y0: float, x1: float, y1: float) -> float:
    return ((x1 - x0) ** 2 + (y1 - y0) ** 2) ** 0.5


def _cross(x0, y0, x1, y1, x2, y2) -> float:
    return (x1 - x0) * (y2 - y0) - (y1 - y0) * (x2 - x0)
