"""Trajectory model and the exact feasibility oracle.

A trajectory inserts the straight probe ``a-b-c`` along a line from the
enclosing circle until the elbow ``b`` reaches its final spot, then
rotates the end link ``bc`` (length ``r``) around ``b`` until ``c``
lands on the target ``t``.  The motion is collision-free iff the
inserted segment and the rotation-swept circular sector avoid all
obstacle interiors; grazing contact is allowed.
"""

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

from .errors import ForbiddenPair
from .geometry import (
    EPS,
    CircularSector,
    Point,
    Segment,
    add,
    angle_of,
    cross,
    cyc_diff,
    dist,
    norm_angle,
    scale,
    sector_seg_intersect,
    seg_seg_proper,
    sub,
    unit,
)


class Trajectory(NamedTuple):
    b: Point
    theta_S: float
    theta_C: float
    direction: str  # "CW" | "CCW": rotation sense of bc toward t
    r: float


@dataclass(frozen=True)
class FeasibilityReport:
    feasible: bool
    stage: Optional[str] = None  # "insertion" | "sector"
    blocker_index: Optional[int] = None

    def to_json(self):
        return {
            "feasible": self.feasible,
            "stage": self.stage,
            "blocker_index": self.blocker_index,
        }


def band_halfwidth(r, R):
    """Largest |theta_C - theta_S| for which b stays reachable."""
    return math.acos(min(max(r / R, -1.0), 1.0))


def make_trajectory(scene, theta_S, theta_C, r, eps=EPS):
    """Build the final pose for entry angle theta_S and elbow angle theta_C.

    Raises ForbiddenPair when r is outside (0, R] or the cyclic angle gap
    exceeds acos(r/R): then no straight insertion can put b at theta_C
    while entering at theta_S.
    """
    if not (r > 0.0) or r > scene.R + eps:
        raise ForbiddenPair("link length %r not in (0, R]" % r)
    delta = cyc_diff(theta_C, theta_S)
    if abs(delta) > band_halfwidth(r, scene.R) + eps:
        raise ForbiddenPair(
            "theta_C is %.6f rad outside the reachable band" % abs(delta)
        )
    b = Point(
        scene.t.x + r * math.cos(theta_C), scene.t.y + r * math.sin(theta_C)
    )
    direction = "CCW" if delta >= 0.0 else "CW"
    return Trajectory(
        b=b,
        theta_S=norm_angle(theta_S),
        theta_C=norm_angle(theta_C),
        direction=direction,
        r=float(r),
    )


def trajectory_parts(scene, traj):
    """Entry point a, pre-rotation tip c_mid, and the swept sector."""
    t, R = scene.t, scene.R
    a = Point(
        t.x + R * math.cos(traj.theta_S), t.y + R * math.sin(traj.theta_S)
    )
    b = traj.b
    dab = dist(a, b)
    if dab < 1e-15:
        cd = Point(0.0, 0.0)
    else:
        cd = scale(sub(b, a), 1.0 / dab)
    c_mid = add(b, scale(cd, traj.r))
    to_t = unit(sub(t, b))
    # signed angle from to_t to the pre-rotation tip direction
    ang = math.atan2(cross(to_t, cd), to_t.x * cd.x + to_t.y * cd.y)
    sector = CircularSector(apex=b, radius=traj.r, to_t=to_t, sweep=ang)
    return a, c_mid, sector


def rotation_angle(scene, traj):
    """Angle the end link turns through, in [0, pi/2]."""
    _, _, sector = trajectory_parts(scene, traj)
    return abs(sector.sweep)


def is_feasible(scene, traj, eps=EPS):
    """Exact collision test for one trajectory.

    Checks the inserted segment [a, c_mid] first, then the swept sector;
    reports the smallest blocking obstacle index per stage.  Grazing
    contact does not block.
    """
    a, c_mid, sector = trajectory_parts(scene, traj)
    ins = Segment(a, c_mid)
    for i, s in enumerate(scene.segments):
        if seg_seg_proper(ins, s, eps):
            return FeasibilityReport(False, "insertion", i)
    for i, s in enumerate(scene.segments):
        if sector_seg_intersect(sector, s, eps):
            return FeasibilityReport(False, "sector", i)
    return FeasibilityReport(True)


def _subtended(t, s):
    """Closed bearing interval of segment s seen from t, width < pi."""
    fp = angle_of(sub(s.p, t))
    fq = angle_of(sub(s.q, t))
    d = cyc_diff(fq, fp)
    if d >= 0.0:
        return fp, d
    return fq, -d


def sees_to_infinity(scene, eps=EPS):
    """Whether some ray from t escapes all obstacles.

    Merges the closed bearing intervals the segments subtend at t; any
    leftover gap wider than eps yields (True, gap midpoint bearing).
    """
    if not scene.segments:
        return True, 0.0
    spans = []
    for s in scene.segments:
        start, width = _subtended(scene.t, s)
        start = norm_angle(start)
        end = start + width
        if end > 2.0 * math.pi:
            spans.append((start, 2.0 * math.pi))
            spans.append((0.0, end - 2.0 * math.pi))
        else:
            spans.append((start, end))
    spans.sort()
    # walk the circle, tracking the farthest covered bearing
    covered = 0.0
    for lo, hi in spans:
        if lo > covered + eps:
            return True, norm_angle(0.5 * (covered + lo))
        covered = max(covered, hi)
    if covered < 2.0 * math.pi - eps:
        return True, norm_angle(0.5 * (covered + 2.0 * math.pi))
    return False, None
