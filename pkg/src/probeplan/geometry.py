"""Planar primitives and epsilon-relaxed predicates.

Everything downstream (scene validation, feasibility, sweep planners,
configuration space) is built on the types and predicates here.  The
numeric model is double precision with one absolute tolerance ``EPS``
(configurable per call): all "strict" tests require a margin of at least
``eps`` in length units, all grazing contact (touches, tangencies,
collinear overlap with a boundary) is classified as non-proper.
"""

from __future__ import annotations

import math
from typing import NamedTuple, Optional

from .errors import DegenerateLine, PointInsideCircle

EPS = 1e-9

TWO_PI = 2.0 * math.pi


class Point(NamedTuple):
    x: float
    y: float


class Segment(NamedTuple):
    p: Point
    q: Point


class Line(NamedTuple):
    """Oriented line through ``p`` toward ``q`` (direction matters)."""

    p: Point
    q: Point


class Circle(NamedTuple):
    center: Point
    radius: float


class Arc(NamedTuple):
    """Arc of ``circle`` from bearing ``start``, signed ``sweep`` radians."""

    circle: Circle
    start: float
    sweep: float


class CircularSector(NamedTuple):
    """Region swept by the probe tip segment rotating about its hinge.

    ``apex`` is the hinge, ``radius`` the tip length, ``to_t`` the unit
    direction from the apex to the target and ``sweep`` the signed angle
    from ``to_t`` to the pre-rotation tip direction (positive = CCW).
    """

    apex: Point
    radius: float
    to_t: Point
    sweep: float


class SegIntersection(NamedTuple):
    kind: str  # "none" | "touch" | "proper" | "overlap"
    point: Optional[Point]


# ---------------------------------------------------------------------------
# vector helpers


def sub(a: Point, b: Point) -> Point:
    return Point(a.x - b.x, a.y - b.y)


def add(a: Point, b: Point) -> Point:
    return Point(a.x + b.x, a.y + b.y)


def scale(a: Point, k: float) -> Point:
    return Point(a.x * k, a.y * k)


def dot(a: Point, b: Point) -> float:
    return a.x * b.x + a.y * b.y


def cross(a: Point, b: Point) -> float:
    return a.x * b.y - a.y * b.x


def norm(a: Point) -> float:
    return math.hypot(a.x, a.y)


def dist(a: Point, b: Point) -> float:
    return math.hypot(a.x - b.x, a.y - b.y)


def unit(a: Point) -> Point:
    n = norm(a)
    if n == 0.0:
        raise DegenerateLine("zero vector has no direction")
    return Point(a.x / n, a.y / n)


def perp(a: Point) -> Point:
    """Rotate by +90 degrees."""
    return Point(-a.y, a.x)


def rotate(a: Point, angle: float) -> Point:
    c, s = math.cos(angle), math.sin(angle)
    return Point(c * a.x - s * a.y, s * a.x + c * a.y)


def norm_angle(a: float) -> float:
    """Normalize to [0, 2*pi)."""
    a = math.fmod(a, TWO_PI)
    if a < 0.0:
        a += TWO_PI
    if a >= TWO_PI:  # fmod can land exactly on 2*pi after the add
        a -= TWO_PI
    return a


def angle_of(a: Point) -> float:
    """Bearing of a vector, normalized to [0, 2*pi)."""
    return norm_angle(math.atan2(a.y, a.x))


def cyc_diff(a: float, b: float) -> float:
    """Signed cyclic difference a - b, reduced to (-pi, pi]."""
    d = math.fmod(a - b, TWO_PI)
    if d <= -math.pi:
        d += TWO_PI
    elif d > math.pi:
        d -= TWO_PI
    return d


def seg_len(s: Segment) -> float:
    return dist(s.p, s.q)


def line_side(line: Line, x: Point, eps: float = EPS) -> int:
    """-1 / 0 / +1 by signed perpendicular distance of x from the line.

    +1 means x is to the left of the oriented direction p->q; |distance|
    within eps reports 0.
    """
    d = sub(line.q, line.p)
    n = norm(d)
    if n <= eps:
        raise DegenerateLine("line defined by coincident points")
    v = cross(d, sub(x, line.p)) / n
    if v > eps:
        return 1
    if v < -eps:
        return -1
    return 0


def signed_line_dist(line: Line, x: Point) -> float:
    d = sub(line.q, line.p)
    n = norm(d)
    if n == 0.0:
        raise DegenerateLine("line defined by coincident points")
    return cross(d, sub(x, line.p)) / n


def project_param(a: Point, b: Point, x: Point) -> float:
    """Parameter of the projection of x onto line(a, b); a -> 0, b -> 1."""
    d = sub(b, a)
    den = dot(d, d)
    if den == 0.0:
        raise DegenerateLine("projection onto a point")
    return dot(sub(x, a), d) / den


def point_seg_dist(x: Point, s: Segment) -> float:
    u = project_param(s.p, s.q, x)
    if u <= 0.0:
        return dist(x, s.p)
    if u >= 1.0:
        return dist(x, s.q)
    return dist(x, add(s.p, scale(sub(s.q, s.p), u)))


# ---------------------------------------------------------------------------
# segment/segment intersection


def seg_seg_intersect(s1: Segment, s2: Segment, eps: float = EPS) -> SegIntersection:
    """Classify the intersection of two segments.

    "proper" means a transversal interior-interior crossing with margin
    eps on all four endpoint-to-line distances; "touch" a single contact
    point within eps (endpoint on endpoint, endpoint on interior, or a
    near-miss within eps); "overlap" a collinear overlap of positive
    length.  The returned point witnesses the contact (for "overlap" the
    midpoint of the shared portion).
    """
    p1, q1 = s1
    p2, q2 = s2
    r = sub(q1, p1)
    s = sub(q2, p2)
    lr = norm(r)
    ls = norm(s)
    if lr == 0.0 or ls == 0.0:
        raise DegenerateLine("degenerate segment")
    denom = cross(r, s)
    # signed perpendicular distances, in length units
    d_p2 = cross(r, sub(p2, p1)) / lr
    d_q2 = cross(r, sub(q2, p1)) / lr
    d_p1 = cross(s, sub(p1, p2)) / ls
    d_q1 = cross(s, sub(q1, p2)) / ls

    if (
        (d_p2 > eps and d_q2 < -eps or d_p2 < -eps and d_q2 > eps)
        and (d_p1 > eps and d_q1 < -eps or d_p1 < -eps and d_q1 > eps)
    ):
        t = cross(sub(p2, p1), s) / denom
        return SegIntersection("proper", add(p1, scale(r, t)))

    if abs(d_p2) <= eps and abs(d_q2) <= eps:
        # collinear (within tolerance): project s2 onto s1's axis
        u0 = project_param(p1, q1, p2) * lr
        u1 = project_param(p1, q1, q2) * lr
        lo, hi = min(u0, u1), max(u0, u1)
        lo = max(lo, 0.0)
        hi = min(hi, lr)
        if hi - lo > eps:
            mid = add(p1, scale(unit(r), (lo + hi) / 2.0))
            return SegIntersection("overlap", mid)
        if hi - lo >= -eps:
            mid = add(p1, scale(unit(r), (lo + hi) / 2.0))
            return SegIntersection("touch", mid)
        return SegIntersection("none", None)

    # not proper, not collinear-overlapping: touch iff the segments come
    # within eps of each other
    best = None
    best_d = math.inf
    for x, seg in ((p1, s2), (q1, s2), (p2, s1), (q2, s1)):
        d = point_seg_dist(x, seg)
        if d < best_d:
            best_d = d
            best = x
    if denom != 0.0:
        # interior-interior crossing point, if both params are in range,
        # can be closer than any endpoint (barely-nonproper crossings)
        t = cross(sub(p2, p1), s) / denom
        u = cross(sub(p2, p1), r) / denom
        if -0.5 <= t <= 1.5 and -0.5 <= u <= 1.5:
            z = add(p1, scale(r, t))
            d = max(point_seg_dist(z, s1), point_seg_dist(z, s2))
            if d < best_d:
                best_d = d
                best = z
    if best_d <= eps:
        return SegIntersection("touch", best)
    return SegIntersection("none", None)


def seg_seg_proper(s1: Segment, s2: Segment, eps: float = EPS) -> bool:
    """Fast boolean: do the segments cross transversally with margin eps?

    Matches the "proper" branch of seg_seg_intersect (the feasibility
    kernel uses the same arithmetic).
    """
    p1, q1 = s1
    p2, q2 = s2
    r = sub(q1, p1)
    s = sub(q2, p2)
    lr = norm(r)
    ls = norm(s)
    if lr == 0.0 or ls == 0.0:
        return False
    d_p2 = cross(r, sub(p2, p1)) / lr
    d_q2 = cross(r, sub(q2, p1)) / lr
    if not (d_p2 > eps and d_q2 < -eps or d_p2 < -eps and d_q2 > eps):
        return False
    d_p1 = cross(s, sub(p1, p2)) / ls
    d_q1 = cross(s, sub(q1, p2)) / ls
    return d_p1 > eps and d_q1 < -eps or d_p1 < -eps and d_q1 > eps


# ---------------------------------------------------------------------------
# circle constructions


def circle_seg_intersect(c: Circle, s: Segment, eps: float = EPS) -> list[Point]:
    """Intersection points of a circle with a segment, ordered along s.

    A supporting line within eps of tangency yields the single tangent
    point (when it lies on the segment).  Endpoints within eps of the
    circle count as intersections.
    """
    d = sub(s.q, s.p)
    ln = norm(d)
    if ln == 0.0:
        raise DegenerateLine("degenerate segment")
    # distance from center to the supporting line decides tangency
    h = abs(cross(d, sub(c.center, s.p))) / ln
    if h > c.radius + eps:
        return []
    u_foot = project_param(s.p, s.q, c.center)
    if h >= c.radius - eps:
        # tangent (or near-tangent): single point at the foot
        if -eps / ln <= u_foot <= 1.0 + eps / ln:
            return [add(s.p, scale(d, min(max(u_foot, 0.0), 1.0)))]
        return []
    half = math.sqrt(max(c.radius * c.radius - h * h, 0.0)) / ln
    out = []
    for u in (u_foot - half, u_foot + half):
        if -eps / ln <= u <= 1.0 + eps / ln:
            out.append(add(s.p, scale(d, min(max(u, 0.0), 1.0))))
    return out


def tangent_points(c: Circle, p: Point, eps: float = EPS) -> list[Point]:
    """Tangent contact points on circle c for tangent lines through p."""
    d = dist(p, c.center)
    if d < c.radius - eps:
        raise PointInsideCircle(
            f"point at distance {d:.6g} inside circle of radius {c.radius:.6g}"
        )
    if d <= c.radius + eps:
        # on the circle: the tangent line touches at p itself
        e = unit(sub(p, c.center))
        return [add(c.center, scale(e, c.radius))]
    e = unit(sub(p, c.center))
    along = c.radius * c.radius / d
    off = c.radius * math.sqrt(max(d * d - c.radius * c.radius, 0.0)) / d
    base = add(c.center, scale(e, along))
    n = perp(e)
    return [add(base, scale(n, off)), add(base, scale(n, -off))]


def perpendicular_foot(t: Point, line_through: tuple[Point, Point], eps: float = EPS):
    """Foot of the perpendicular from t onto the supporting line.

    Returns (foot, distance).
    """
    a, b = line_through
    if dist(a, b) <= eps:
        raise DegenerateLine("line through coincident points")
    u = project_param(a, b, t)
    foot = add(a, scale(sub(b, a), u))
    return foot, dist(t, foot)


# ---------------------------------------------------------------------------
# circular sector predicates
#
# The sector's closed region is {z : |z-apex| <= radius, bearing(z-apex)
# between to_t and to_t rotated by sweep}.  "Proper" overlap means having
# a point strictly inside (margin eps); boundary grazing does not count.


def _sector_edges(sector: CircularSector) -> tuple[Point, Point, float]:
    """Unit edge directions (e_lo, e_hi) with CCW order lo->hi, plus |sweep|."""
    e_t = sector.to_t
    e_c = rotate(e_t, sector.sweep)
    if sector.sweep >= 0.0:
        return e_t, e_c, sector.sweep
    return e_c, e_t, -sector.sweep


def sector_point_class(sector: CircularSector, p: Point, eps: float = EPS) -> str:
    """Classify p as "inside" (strict), "boundary", or "outside"."""
    w = sub(p, sector.apex)
    r = norm(w)
    if r > sector.radius + eps:
        return "outside"
    e_lo, e_hi, sweep = _sector_edges(sector)
    if sweep > math.pi:
        raise ValueError("sector sweep beyond pi is not supported")
    c_lo = cross(e_lo, w)  # >0 means CCW of the low edge
    c_hi = cross(w, e_hi)
    if r < sector.radius - eps and r > eps and c_lo > eps and c_hi > eps:
        return "inside"
    inside_loose = r <= sector.radius + eps and (
        (
            c_lo >= -eps
            and c_hi >= -eps
            # excludes the anti-parallel ray when the wedge is near-degenerate
            and (dot(e_lo, w) > -eps or dot(e_hi, w) > -eps)
        )
        or r <= eps
    )
    return "boundary" if inside_loose else "outside"


def sector_contains(sector: CircularSector, p: Point, eps: float = EPS) -> bool:
    """True iff p lies strictly inside the sector (grazing is not enough)."""
    return sector_point_class(sector, p, eps) == "inside"


def _edge_cross_blocks(sector: CircularSector, e: Point, s: Segment, eps: float) -> bool:
    """Does s properly cross the radius edge along unit direction e, at a
    point where the sector has positive local thickness?"""
    _, _, sweep = _sector_edges(sector)
    edge = Segment(sector.apex, add(sector.apex, scale(e, sector.radius)))
    p1, q1 = edge
    r = sub(q1, p1)
    sv = sub(s.q, s.p)
    lr = sector.radius
    ls = norm(sv)
    if ls == 0.0:
        return False
    d_p2 = cross(r, sub(s.p, p1)) / lr
    d_q2 = cross(r, sub(s.q, p1)) / lr
    if not (d_p2 > eps and d_q2 < -eps or d_p2 < -eps and d_q2 > eps):
        return False
    d_p1 = cross(sv, sub(p1, s.p)) / ls
    d_q1 = cross(sv, sub(q1, s.p)) / ls
    if not (d_p1 > eps and d_q1 < -eps or d_p1 < -eps and d_q1 > eps):
        return False
    denom = cross(r, sv)
    t = cross(sub(s.p, p1), sv) / denom  # position along the edge, 0..1
    z_r = t * lr
    if z_r >= lr - eps:  # crossing at the arc corner: grazing
        return False
    # local angular thickness of the wedge at that radius
    return sweep * z_r > eps


def sector_seg_intersect(sector: CircularSector, s: Segment, eps: float = EPS) -> bool:
    """True iff segment s has a point strictly inside the sector.

    Grazing contact (endpoint on the boundary, tangency to the arc,
    collinear overlap with an edge) returns False.
    """
    if sector_point_class(sector, s.p, eps) == "inside":
        return True
    if sector_point_class(sector, s.q, eps) == "inside":
        return True
    e_lo, e_hi, sweep = _sector_edges(sector)
    if _edge_cross_blocks(sector, e_lo, s, eps):
        return True
    if _edge_cross_blocks(sector, e_hi, s, eps):
        return True
    # transversal arc crossings with bearing strictly inside the wedge
    d = sub(s.q, s.p)
    ln = norm(d)
    if ln == 0.0:
        return False
    h = abs(cross(d, sub(sector.apex, s.p))) / ln
    if h < sector.radius - eps:
        u_foot = project_param(s.p, s.q, sector.apex)
        half = math.sqrt(max(sector.radius**2 - h * h, 0.0)) / ln
        for u in (u_foot - half, u_foot + half):
            if u <= eps / ln or u >= 1.0 - eps / ln:
                continue  # crossing at a segment endpoint: grazing
            z = add(s.p, scale(d, u))
            w = sub(z, sector.apex)
            if cross(e_lo, w) > eps and cross(w, e_hi) > eps and dot(e_lo, w) > 0.0:
                return True
    # segment passing through the apex into the wedge interior
    d_apex = point_seg_dist(sector.apex, s)
    if d_apex <= eps:
        u = min(max(project_param(s.p, s.q, sector.apex), 0.0), 1.0)
        for sign, limit in ((1.0, 1.0 - u), (-1.0, u)):
            reach = limit * ln
            if reach <= eps:
                continue
            w = scale(d, sign / ln)  # unit direction from the apex along s
            depth = min(reach, sector.radius)
            if (
                cross(e_lo, w) * depth > eps
                and cross(w, e_hi) * depth > eps
                and sweep * depth > eps
            ):
                return True
    return False
