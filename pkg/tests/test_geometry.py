import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from probeplan.errors import DegenerateLine, PointInsideCircle
from probeplan.geometry import (
    Circle,
    CircularSector,
    Point,
    Segment,
    circle_seg_intersect,
    cyc_diff,
    norm_angle,
    perpendicular_foot,
    sector_contains,
    sector_point_class,
    sector_seg_intersect,
    seg_seg_intersect,
    seg_seg_proper,
    tangent_points,
)

# ---------------------------------------------------------------------------
# independent oracle for sector membership: pure angle-interval arithmetic,
# no shared code with the implementation


def oracle_in_sector(sector, p, slack=0.0):
    """Closed-sector membership via explicit angle normalization."""
    wx, wy = p.x - sector.apex.x, p.y - sector.apex.y
    r = math.hypot(wx, wy)
    if r > sector.radius + slack:
        return False
    if r == 0.0:
        return True
    a_t = math.atan2(sector.to_t.y, sector.to_t.x)
    b = math.atan2(wy, wx)
    rel = (b - a_t) % (2 * math.pi)  # CCW offset from the to_t edge
    if sector.sweep >= 0:
        return rel <= sector.sweep + slack or rel >= 2 * math.pi - slack
    return rel >= 2 * math.pi + sector.sweep - slack or rel <= slack


def sample_sector_points(sector, k, rng):
    pts = []
    a_t = math.atan2(sector.to_t.y, sector.to_t.x)
    for _ in range(k):
        ang = a_t + rng.random() * sector.sweep
        rad = math.sqrt(rng.random()) * sector.radius
        pts.append(
            Point(
                sector.apex.x + rad * math.cos(ang),
                sector.apex.y + rad * math.sin(ang),
            )
        )
    return pts


# ---------------------------------------------------------------------------
# seg_seg_intersect


def test_seg_seg_proper_cross():
    res = seg_seg_intersect(
        Segment(Point(0, 0), Point(2, 0)), Segment(Point(1, -1), Point(1, 1))
    )
    assert res.kind == "proper"
    assert math.isclose(res.point.x, 1.0) and abs(res.point.y) < 1e-12


def test_seg_seg_touch_at_shared_endpoint():
    res = seg_seg_intersect(
        Segment(Point(0, 0), Point(1, 0)), Segment(Point(1, 0), Point(2, 1))
    )
    assert res.kind == "touch"
    assert math.isclose(res.point.x, 1.0) and math.isclose(res.point.y, 0.0)


def test_seg_seg_parallel_disjoint():
    res = seg_seg_intersect(
        Segment(Point(0, 0), Point(1, 0)), Segment(Point(0, 1), Point(1, 1))
    )
    assert res.kind == "none"


def test_seg_seg_t_junction_is_touch():
    res = seg_seg_intersect(
        Segment(Point(0, 0), Point(2, 0)), Segment(Point(1, 0), Point(1, 1))
    )
    assert res.kind == "touch"


def test_seg_seg_collinear_overlap():
    res = seg_seg_intersect(
        Segment(Point(0, 0), Point(2, 0)), Segment(Point(1, 0), Point(3, 0))
    )
    assert res.kind == "overlap"
    res2 = seg_seg_intersect(
        Segment(Point(0, 0), Point(1, 0)), Segment(Point(1, 0), Point(3, 0))
    )
    assert res2.kind == "touch"
    res3 = seg_seg_intersect(
        Segment(Point(0, 0), Point(1, 0)), Segment(Point(1.5, 0), Point(3, 0))
    )
    assert res3.kind == "none"


@given(
    st.tuples(*[st.floats(-10, 10) for _ in range(8)]).filter(
        lambda v: math.hypot(v[0] - v[2], v[1] - v[3]) > 1e-3
        and math.hypot(v[4] - v[6], v[5] - v[7]) > 1e-3
    )
)
@settings(max_examples=300, deadline=None)
def test_seg_seg_symmetry(v):
    s1 = Segment(Point(v[0], v[1]), Point(v[2], v[3]))
    s2 = Segment(Point(v[4], v[5]), Point(v[6], v[7]))
    assert seg_seg_intersect(s1, s2).kind == seg_seg_intersect(s2, s1).kind
    assert seg_seg_proper(s1, s2) == seg_seg_proper(s2, s1)
    assert seg_seg_proper(s1, s2) == (seg_seg_intersect(s1, s2).kind == "proper")


# ---------------------------------------------------------------------------
# circle_seg_intersect


def test_circle_diameter_chord():
    pts = circle_seg_intersect(
        Circle(Point(0, 0), 1.0), Segment(Point(-2, 0), Point(2, 0))
    )
    assert len(pts) == 2
    assert math.isclose(pts[0].x, -1.0, abs_tol=1e-12)
    assert math.isclose(pts[1].x, 1.0, abs_tol=1e-12)


def test_circle_separated_segment():
    assert (
        circle_seg_intersect(Circle(Point(0, 0), 1.0), Segment(Point(0, 2), Point(2, 2)))
        == []
    )


def test_circle_tangent_line_single_point():
    pts = circle_seg_intersect(
        Circle(Point(0, 0), 1.0), Segment(Point(1, -1), Point(1, 1))
    )
    assert len(pts) == 1
    assert math.isclose(pts[0].x, 1.0) and abs(pts[0].y) < 1e-9


def test_circle_seg_residuals_fuzz():
    rng = random.Random(7)
    for _ in range(2000):
        c = Circle(Point(rng.uniform(-5, 5), rng.uniform(-5, 5)), rng.uniform(0.1, 4))
        s = Segment(
            Point(rng.uniform(-8, 8), rng.uniform(-8, 8)),
            Point(rng.uniform(-8, 8), rng.uniform(-8, 8)),
        )
        if math.hypot(s.p.x - s.q.x, s.p.y - s.q.y) < 1e-6:
            continue
        for z in circle_seg_intersect(c, s):
            assert abs(math.hypot(z.x - c.center.x, z.y - c.center.y) - c.radius) < 1e-7
            # z must sit on the segment
            dx, dy = s.q.x - s.p.x, s.q.y - s.p.y
            u = ((z.x - s.p.x) * dx + (z.y - s.p.y) * dy) / (dx * dx + dy * dy)
            px, py = s.p.x + u * dx, s.p.y + u * dy
            assert math.hypot(z.x - px, z.y - py) < 1e-7
            assert -1e-7 <= u <= 1 + 1e-7


# ---------------------------------------------------------------------------
# tangent_points


def test_tangent_points_analytic():
    pts = tangent_points(Circle(Point(0, 0), 1.0), Point(2, 0))
    assert len(pts) == 2
    assert math.isclose(pts[0].x, 0.5, abs_tol=1e-12)
    assert math.isclose(pts[0].y, math.sqrt(3) / 2, abs_tol=1e-12)
    assert math.isclose(pts[1].y, -math.sqrt(3) / 2, abs_tol=1e-12)


def test_tangent_point_on_circle():
    pts = tangent_points(Circle(Point(0, 0), 1.0), Point(1, 0))
    assert len(pts) == 1
    assert math.isclose(pts[0].x, 1.0)


def test_tangent_point_inside_raises():
    with pytest.raises(PointInsideCircle):
        tangent_points(Circle(Point(0, 0), 1.0), Point(0, 0))


def test_tangent_residuals_fuzz():
    rng = random.Random(11)
    for _ in range(2000):
        c = Circle(Point(rng.uniform(-5, 5), rng.uniform(-5, 5)), rng.uniform(0.1, 3))
        p = Point(rng.uniform(-20, 20), rng.uniform(-20, 20))
        if math.hypot(p.x - c.center.x, p.y - c.center.y) <= c.radius + 1e-6:
            continue
        for q in tangent_points(c, p):
            assert abs(math.hypot(q.x - c.center.x, q.y - c.center.y) - c.radius) < 1e-9
            orth = (q.x - p.x) * (q.x - c.center.x) + (q.y - p.y) * (q.y - c.center.y)
            assert abs(orth) < 1e-7


# ---------------------------------------------------------------------------
# perpendicular_foot


def test_foot_horizontal_line():
    foot, d = perpendicular_foot(Point(0, 0), (Point(0, 1), Point(1, 1)))
    assert math.isclose(foot.x, 0.0, abs_tol=1e-12) and math.isclose(foot.y, 1.0)
    assert math.isclose(d, 1.0)


def test_foot_vertical_line():
    foot, d = perpendicular_foot(Point(0, 0), (Point(1, 0), Point(1, 1)))
    assert math.isclose(foot.x, 1.0) and abs(foot.y) < 1e-12
    assert math.isclose(d, 1.0)


def test_foot_point_on_line():
    foot, d = perpendicular_foot(Point(0.5, 0.5), (Point(0, 0), Point(1, 1)))
    assert d < 1e-12
    assert math.isclose(foot.x, 0.5) and math.isclose(foot.y, 0.5)


def test_foot_degenerate_line():
    with pytest.raises(DegenerateLine):
        perpendicular_foot(Point(0, 0), (Point(1, 1), Point(1, 1)))


# ---------------------------------------------------------------------------
# sectors
#
# Quarter sector used by the frozen examples: apex (0,1), radius 1,
# to_t = (0,-1) (toward the origin), sweep +pi/2 (tip starts at (1,1)).

QUARTER = CircularSector(Point(0, 1), 1.0, Point(0, -1), math.pi / 2)


def test_sector_contains_frozen_examples():
    # frozen from oracle_in_sector(QUARTER, p)
    assert oracle_in_sector(QUARTER, Point(0.6, 0.4))
    assert sector_contains(QUARTER, Point(0.6, 0.4))
    assert not oracle_in_sector(QUARTER, Point(-0.5, 0.5))
    assert not sector_contains(QUARTER, Point(-0.5, 0.5))


def test_sector_boundary_is_not_contained():
    # on the bt edge
    assert sector_point_class(QUARTER, Point(0, 0.5)) == "boundary"
    assert not sector_contains(QUARTER, Point(0, 0.5))
    # on the arc
    z = Point(math.cos(-math.pi / 4), 1 + math.sin(-math.pi / 4))
    assert sector_point_class(QUARTER, z) == "boundary"
    # apex
    assert sector_point_class(QUARTER, Point(0, 1)) == "boundary"
    # well outside
    assert sector_point_class(QUARTER, Point(-1, 1)) == "outside"


def test_sector_seg_coincident_with_radius_is_grazing():
    # collinear with the bt bounding radius: grazing, not proper
    assert not sector_seg_intersect(QUARTER, Segment(Point(0, 0), Point(0, 1)))
    assert not sector_seg_intersect(QUARTER, Segment(Point(0, -0.5), Point(0, 2)))


def test_sector_seg_interior_overlap():
    assert sector_seg_intersect(QUARTER, Segment(Point(0.3, 0.5), Point(0.4, 0.6)))
    # crossing the bt edge transversally
    assert sector_seg_intersect(QUARTER, Segment(Point(-0.5, 0.5), Point(0.5, 0.5)))
    # crossing the arc into the wedge
    assert sector_seg_intersect(QUARTER, Segment(Point(0.5, 0.2), Point(1.5, 0.2)))
    # passing through the apex into the interior
    assert sector_seg_intersect(QUARTER, Segment(Point(-0.5, 1.5), Point(0.5, 0.5)))


def test_sector_seg_outside():
    assert not sector_seg_intersect(QUARTER, Segment(Point(-1, 0), Point(-1, 2)))
    assert not sector_seg_intersect(QUARTER, Segment(Point(1.2, 1.2), Point(2, 2)))


def test_sector_seg_matches_point_sampling():
    rng = random.Random(3)
    for trial in range(300):
        apex = Point(rng.uniform(-2, 2), rng.uniform(-2, 2))
        radius = rng.uniform(0.3, 2.0)
        ang = rng.uniform(0, 2 * math.pi)
        sweep = rng.uniform(-math.pi / 2, math.pi / 2)
        sector = CircularSector(
            apex, radius, Point(math.cos(ang), math.sin(ang)), sweep
        )
        s = Segment(
            Point(rng.uniform(-4, 4), rng.uniform(-4, 4)),
            Point(rng.uniform(-4, 4), rng.uniform(-4, 4)),
        )
        # dense sampling along the segment, strictly-inside oracle
        hit = False
        for i in range(1, 400):
            u = i / 400.0
            z = Point(s.p.x + u * (s.q.x - s.p.x), s.p.y + u * (s.q.y - s.p.y))
            if oracle_in_sector(sector, z, slack=-1e-6):
                hit = True
                break
        got = sector_seg_intersect(sector, s)
        if hit:
            assert got, (sector, s)
        if not got:
            # allow the sampler to have grazed within tolerance
            assert not any(
                oracle_in_sector(
                    sector,
                    Point(
                        s.p.x + (i / 997.0) * (s.q.x - s.p.x),
                        s.p.y + (i / 997.0) * (s.q.y - s.p.y),
                    ),
                    slack=-1e-4,
                )
                for i in range(1, 997)
            ), (sector, s, trial)


@given(st.data())
@settings(max_examples=200, deadline=None)
def test_sector_contains_agrees_with_angle_oracle(data):
    apex = Point(
        data.draw(st.floats(-3, 3)), data.draw(st.floats(-3, 3))
    )
    radius = data.draw(st.floats(0.2, 3.0))
    ang = data.draw(st.floats(0, 2 * math.pi))
    sweep = data.draw(st.floats(-math.pi / 2, math.pi / 2))
    sector = CircularSector(apex, radius, Point(math.cos(ang), math.sin(ang)), sweep)
    p = Point(data.draw(st.floats(-7, 7)), data.draw(st.floats(-7, 7)))
    if sector_contains(sector, p):
        assert oracle_in_sector(sector, p, slack=1e-7)
        assert math.hypot(p.x - apex.x, p.y - apex.y) <= radius + 1e-9


def test_sampled_interior_points_are_contained():
    rng = random.Random(5)
    sector = QUARTER
    for p in sample_sector_points(sector, 200, rng):
        cls = sector_point_class(sector, p)
        assert cls in ("inside", "boundary")


# ---------------------------------------------------------------------------
# angles


def test_norm_angle_range():
    for a in [-7.0, -math.pi, 0.0, math.pi, 6.5, 12.0, -1e-12]:
        v = norm_angle(a)
        assert 0.0 <= v < 2 * math.pi


def test_cyc_diff_signs():
    assert math.isclose(cyc_diff(0.1, 0.0), 0.1)
    assert math.isclose(cyc_diff(0.0, 0.1), -0.1)
    assert math.isclose(cyc_diff(0.1, 2 * math.pi - 0.1), 0.2, abs_tol=1e-12)
    assert cyc_diff(math.pi, 0.0) == pytest.approx(math.pi)
