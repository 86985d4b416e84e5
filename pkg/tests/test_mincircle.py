import math
import random

import pytest
from hypothesis import given, settings, strategies as st

from ankleopt.mincircle import circumcircle, min_enclosing_circle


def brute_force_mec(points):
    """O(n^3) oracle: best circle through every pair (as diameter) and every
    triple that still encloses all points."""
    best = None
    n = len(points)
    for i in range(n):
        for j in range(i, n):
            if i == j:
                cand = (points[i][0], points[i][1], 0.0)
            else:
                cx = (points[i][0] + points[j][0]) / 2.0
                cy = (points[i][1] + points[j][1]) / 2.0
                r = math.dist(points[i], points[j]) / 2.0
                cand = (cx, cy, r)
            if _encloses(cand, points) and (best is None or cand[2] < best[2]):
                best = cand
            for k in range(j + 1, n):
                circ = circumcircle(points[i], points[j], points[k])
                if circ is None:
                    continue
                if _encloses(circ, points) and (best is None or circ[2] < best[2]):
                    best = circ
    return best


def _encloses(circle, points, tol=1e-7):
    cx, cy, r = circle
    return all(math.hypot(px - cx, py - cy) <= r + tol for px, py in points)


def test_empty_input_rejected():
    with pytest.raises(ValueError):
        min_enclosing_circle([])


def test_single_point():
    assert min_enclosing_circle([(3.0, -4.0)]) == (3.0, -4.0, 0.0)


def test_coincident_points_radius_zero():
    pts = [(2.0, 5.0)] * 6
    cx, cy, r = min_enclosing_circle(pts)
    assert (cx, cy) == (2.0, 5.0)
    assert r == 0.0


def test_two_point_diameter():
    cx, cy, r = min_enclosing_circle([(-10.0, 0.0), (10.0, 0.0)])
    assert abs(cx) < 1e-12 and abs(cy) < 1e-12
    assert r == 10.0


def test_collinear_points():
    pts = [(float(x), 2.0 * x) for x in range(-5, 6)]
    cx, cy, r = min_enclosing_circle(pts)
    # diameter spans the extreme pair
    assert r == math.dist((-5.0, -10.0), (5.0, 10.0)) / 2.0
    assert abs(cx) < 1e-9 and abs(cy) < 1e-9


def test_equilateral_triangle_circumcircle():
    s = 2.0
    pts = [(0.0, 0.0), (s, 0.0), (s / 2, s * math.sqrt(3) / 2)]
    _, _, r = min_enclosing_circle(pts)
    assert abs(r - s / math.sqrt(3)) < 1e-12


def test_matches_brute_force_on_random_sets():
    rng = random.Random(1234)
    for trial in range(60):
        n = rng.randint(3, 12)
        pts = [(rng.uniform(-50, 50), rng.uniform(-50, 50)) for _ in range(n)]
        got = min_enclosing_circle(pts)
        want = brute_force_mec(pts)
        assert abs(got[2] - want[2]) < 1e-7, f"trial {trial}: {got} vs {want}"
        assert _encloses(got, pts)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.tuples(st.floats(-100, 100), st.floats(-100, 100)),
                min_size=1, max_size=20))
def test_encloses_all_points_and_is_deterministic(pts):
    circle = min_enclosing_circle(pts)
    assert _encloses(circle, pts)
    assert min_enclosing_circle(list(pts)) == circle


def test_interior_points_do_not_change_circle():
    pts = [(-10.0, 0.0), (10.0, 0.0), (0.0, 3.0), (1.0, -2.0), (-4.0, 1.0)]
    base = min_enclosing_circle([(-10.0, 0.0), (10.0, 0.0)])
    assert min_enclosing_circle(pts) == base
