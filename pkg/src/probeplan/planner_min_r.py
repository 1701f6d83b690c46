"""Minimum end-link length planners.

Two independent algorithms find the smallest ``r`` for which some
feasible trajectory exists.  ``min_r_enumerate`` generates every
extremal pose suggested by pairs of obstacle endpoints and verifies
them in bulk with the batched kernel.  ``min_r_pipeline`` walks each
admissible insertion line outward from the perpendicular foot of the
target, maintaining the swept sector with the shooting queries, and
keeps the best elbow over all lines.  Both return the same value; the
enumeration is the simpler reference, the pipeline the structured one.

An extremal pose is labelled by how it is pinned down:

* ``"I"``   -- elbow at the perpendicular foot (end link turns a quarter);
* ``"II"``  -- probe tip touches an obstacle segment;
* ``"III"`` -- rotation arc passes through an obstacle endpoint or is
  tangent to an obstacle segment;
* ``"IV"``  -- elbow coincides with an obstacle endpoint;
* ``"V"``   -- elbow-to-target segment passes through an obstacle endpoint.

``anchors`` record what the pose is pinned against: obstacle endpoints
as points, obstacle segments by index.
"""

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import (
    DegenerateLine,
    ForbiddenPair,
    PlannerError,
    ValidationError,
)
from .feasibility import (
    Trajectory,
    is_feasible,
    make_trajectory,
    sees_to_infinity,
)
from .geometry import (
    EPS,
    Point,
    Segment,
    add,
    angle_of,
    cross,
    dist,
    dot,
    norm,
    norm_angle,
    scale,
    seg_seg_proper,
    sub,
    unit,
)
from .kernels import batch_feasible
from .queries import (
    _AFrame,
    _arc_floor_candidates,
    insertion_frame,
    radius_intersects,
    radius_shoot,
    sector_empty,
)


@dataclass(frozen=True)
class ExtremalCandidate:
    """One extremal pose: its pin-down label, what it leans on, and the
    trajectory realizing it."""

    kind: str  # "I" | "II" | "III" | "IV" | "V"
    anchors: tuple  # Points (obstacle endpoints) and ints (segment indexes)
    direction: str  # "CW" | "CCW"
    r: float
    traj: Trajectory


def _anchor_json(a):
    if isinstance(a, Point):
        return [a.x, a.y]
    return int(a)


@dataclass(frozen=True)
class MinRResult:
    r_min: Optional[float]
    witness: Optional[Trajectory]
    candidate: Optional[ExtremalCandidate]
    infeasible: bool

    def to_json(self):
        if self.infeasible:
            return {
                "feasible": False,
                "r_min": None,
                "theta_S": None,
                "theta_C": None,
                "direction": None,
                "case": None,
                "anchors": None,
            }
        return {
            "feasible": True,
            "r_min": self.r_min,
            "theta_S": self.witness.theta_S,
            "theta_C": self.witness.theta_C,
            "direction": self.witness.direction,
            "case": self.candidate.kind,
            "anchors": [_anchor_json(a) for a in self.candidate.anchors],
        }


# ---------------------------------------------------------------------------
# shared construction helpers


def _endpoints(scene):
    """Distinct obstacle endpoints in deterministic order."""
    seen = {}
    for s in scene.segments:
        for w in (s.p, s.q):
            seen.setdefault((w.x, w.y), w)
    return list(seen.values())


def _require_enclosed(scene):
    open_, _ = sees_to_infinity(scene)
    if open_:
        raise ValidationError(
            "target sees past every obstacle; no minimum link length exists"
        )


def _flip(frame):
    """Same insertion line walked from the opposite end."""
    return _AFrame(
        b0=frame.b0,
        xhat=scale(frame.xhat, -1.0),
        yhat=frame.yhat,
        d0=frame.d0,
    )


def _pair_frames(scene, eps=EPS):
    """Admissible insertion lines through two obstacle endpoints.

    Yields (u, v, frame, eta_v, eta_R): v is the inner anchor (closer to
    the perpendicular foot of t), u the outer one, and eta measures how
    far the elbow has retreated from the foot against the insertion
    direction.  A line qualifies when both anchors sit behind the foot,
    the stretch of line the probe's long link can occupy is free of
    proper crossings, and the foot is strictly between the target and
    the enclosing circle.
    """
    pts = _endpoints(scene)
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            p, q = pts[i], pts[j]
            try:
                frame = insertion_frame(scene.t, (p, q), eps)
            except DegenerateLine:
                continue
            if frame.d0 >= scene.R - eps:
                continue
            xp = frame.to_frame(p).x
            xq = frame.to_frame(q).x
            if xp > -eps or xq > -eps:
                if xp < eps or xq < eps:
                    continue  # anchors straddle the foot (or sit on it)
                frame = _flip(frame)
                xp, xq = -xp, -xq
            eta_p, eta_q = -xp, -xq
            if eta_p <= eta_q:
                v, u, eta_v = p, q, eta_p
            else:
                v, u, eta_v = q, p, eta_q
            eta_R = math.sqrt(scene.R * scene.R - frame.d0 * frame.d0)
            occupied = Segment(frame.elbow(eta_R), frame.b0)
            if any(seg_seg_proper(occupied, s, eps) for s in scene.segments):
                continue
            yield u, v, frame, eta_v, eta_R


def _a_trajectory(scene, frame, eta, eta_R, eps=EPS):
    """Final pose with the elbow eta behind the foot of this line."""
    a = frame.elbow(eta_R)
    b = frame.elbow(eta)
    try:
        return make_trajectory(
            scene,
            angle_of(sub(a, scene.t)),
            angle_of(sub(b, scene.t)),
            frame.radius_at(eta),
            eps,
        )
    except ForbiddenPair:
        return None


def _seg_end(scene, i, k):
    s = scene.segments[i]
    return s.p if k == 0 else s.q


_EVENT_KIND = {"start": "I", "tip": "II", "dip": "II", "arc": "III",
               "tangent": "III"}


def _event_label(scene, u, v, tag, i, k):
    kind = _EVENT_KIND[tag]
    if tag == "start":
        return kind, (u, v)
    if tag in ("dip", "arc"):
        return kind, (u, v, _seg_end(scene, i, k))
    return kind, (u, v, i)


def _b_pose(scene, b, pivot, kind, anchors, eps=EPS):
    """Pose with the elbow at b and the long link through pivot.

    Returns None when the geometry cannot close: pivot behind the elbow,
    entry point unreachable, or the turn exceeding a quarter.
    """
    r = dist(scene.t, b)
    if r <= eps or r > scene.R + eps:
        return None
    d = sub(pivot, b)
    dn = norm(d)
    if dn <= eps:
        return None
    d = scale(d, 1.0 / dn)
    w = sub(b, scene.t)
    bc = dot(d, w)
    disc = bc * bc - (dot(w, w) - scene.R * scene.R)
    if disc <= 0.0:
        return None
    s = -bc + math.sqrt(disc)
    if s <= dn - eps:
        return None  # pivot would stick out past the entry point
    a = add(b, scale(d, s))
    try:
        traj = make_trajectory(
            scene,
            angle_of(sub(a, scene.t)),
            angle_of(sub(b, scene.t)),
            r,
            eps,
        )
    except ForbiddenPair:
        return None
    return ExtremalCandidate(kind, anchors, traj.direction, r, traj)


def _collinear_with_t(t, u, v, tol=1e-12):
    a = unit(sub(u, t))
    b = unit(sub(v, t))
    return abs(cross(a, b)) <= tol


# ---------------------------------------------------------------------------
# candidate enumeration


def _all_candidates(scene, eps=EPS):
    """Every extremal pose, both rotation senses."""
    t = scene.t
    for u, v, frame, eta_v, eta_R in _pair_frames(scene, eps):
        segs_frame = [
            (frame.to_frame(s.p), frame.to_frame(s.q)) for s in scene.segments
        ]
        for eta, tag, i, k in _arc_floor_candidates(frame, segs_frame, eps):
            if eta > eta_v + 1e-12:
                continue
            kind, anchors = _event_label(scene, u, v, tag, i, k)
            traj = _a_trajectory(scene, frame, eta, eta_R, eps)
            if traj is None:
                continue
            yield ExtremalCandidate(
                kind, anchors, traj.direction, frame.radius_at(eta), traj
            )
    pts = _endpoints(scene)
    for vi, v in enumerate(pts):
        rv = dist(t, v)
        if rv <= eps:
            continue
        what = scale(sub(v, t), 1.0 / rv)
        for ui, u in enumerate(pts):
            if ui == vi or _collinear_with_t(t, u, v):
                continue
            cand = _b_pose(scene, v, u, "IV", (u, v), eps)
            if cand is not None:
                yield cand
            for wi in range(ui + 1, len(pts)):
                w = pts[wi]
                if wi == vi:
                    continue
                den = cross(sub(w, u), what)
                if abs(den) <= 1e-15:
                    continue
                rho = cross(sub(w, u), sub(u, t)) / den
                if rho < rv - 1e-12 or rho > scene.R + eps:
                    continue
                b = add(t, scale(what, rho))
                pivot = u if dist(u, b) >= dist(w, b) else w
                other = w if pivot is u else u
                tau = dot(sub(other, b), unit(sub(pivot, b)))
                if tau <= eps:
                    continue  # endpoints on opposite sides of the elbow
                cand = _b_pose(scene, b, pivot, "V", (u, w, v), eps)
                if cand is not None:
                    yield cand


def enumerate_candidates(scene, direction, eps=EPS):
    """Every extremal pose rotating in the given direction.

    Minimal feasible trajectories are pinned by obstacle contacts, so
    the true minimum always appears in this stream: poses I-III arise
    while sliding the elbow along a two-endpoint insertion line, poses
    IV-V from resting the elbow on (or sighting it past) an endpoint.
    Pairs that coincide or line up with the target are skipped.
    """
    if direction not in ("CW", "CCW"):
        raise ValueError("direction must be 'CW' or 'CCW'")
    _require_enclosed(scene)
    return [c for c in _all_candidates(scene, eps) if c.direction == direction]


def min_r_enumerate(scene, eps=EPS):
    """Reference planner: enumerate extremal poses, verify in bulk, and
    return the smallest feasible one (re-checked exactly)."""
    _require_enclosed(scene)
    cands = list(_all_candidates(scene, eps))
    if not cands:
        return MinRResult(None, None, None, True)
    th_s = np.array([c.traj.theta_S for c in cands])
    th_c = np.array([c.traj.theta_C for c in cands])
    rr = np.array([c.r for c in cands])
    mask = batch_feasible(
        scene.seg_array, scene.t.x, scene.t.y, scene.R, th_s, th_c, rr, eps
    )
    for idx in np.argsort(rr, kind="stable"):
        if not mask[idx]:
            continue
        c = cands[idx]
        if is_feasible(scene, c.traj, eps).feasible:
            return MinRResult(c.r, c.traj, c, False)
    return MinRResult(None, None, None, True)


# ---------------------------------------------------------------------------
# sweep pipeline


def _first_tip_crossing(scene, frame, segs_frame, eps=EPS):
    """Nearest proper crossing of [foot, foot + d0] along the insertion
    line, as (xi, segment index); None when the stretch ahead is clear."""
    d0 = frame.d0
    best = None
    for i, (p, q) in enumerate(segs_frame):
        if (p.y > eps and q.y < -eps) or (p.y < -eps and q.y > eps):
            xi = p.x + (q.x - p.x) * p.y / (p.y - q.y)
            if eps < xi < d0 - eps and (best is None or xi < best[0]):
                best = (xi, i)
    return best


def _radar_next(scene, frame, eta_from, cap, eps=EPS):
    """First elbow beyond eta_from where the elbow-target segment sweeps
    onto an obstacle endpoint, capped at the inner anchor.

    The segment from t to the retreating elbow turns like a radar hand;
    successive bearing shots give the endpoints it could hit, and the
    first one that really lies between elbow and target stops the sweep.
    Returns (eta, endpoint-or-None).
    """
    t = scene.t
    d0 = frame.d0
    handed = cross(frame.xhat, frame.yhat)
    sweep_dir = "CCW" if handed > 0.0 else "CW"
    sign = 1.0 if handed > 0.0 else -1.0
    line = (frame.b0, frame.to_world(Point(1.0, 0.0)))
    alpha0 = angle_of(sub(frame.elbow(eta_from), t))
    span = norm_angle(
        sign * (angle_of(sub(frame.elbow(cap), t)) - alpha0)
    )
    alpha = alpha0
    for _ in range(4 * scene.n + 8):
        w = radius_shoot(scene, line, alpha, eps, sweep_dir)
        if w is None:
            break
        off = norm_angle(sign * (angle_of(sub(w, t)) - alpha0))
        if off >= span - 1e-12:
            break
        wf = frame.to_frame(w)
        if wf.x < -eps and -d0 + eps < wf.y < -eps:
            eta_w = -d0 * wf.x / (d0 + wf.y)
            if (
                eta_from - 1e-12 < eta_w <= cap + 1e-12
                and dist(t, w) <= frame.radius_at(eta_w) + eps
            ):
                return min(eta_w, cap), w
        alpha = angle_of(sub(w, t))
    return cap, None


def _sweep_ray(scene, u, v, frame, eta_v, eta_R, eps=EPS, r_stop=None):
    """Smallest feasible elbow on one insertion line, or None.

    Stages: try the foot pose; give up if the foot-to-target segment is
    crossed (it stays inside the sector forever); retreat the elbow past
    the nearest tip blocker; give up if the new elbow-to-target segment
    is crossed (the crossing point never leaves the sector); sweep the
    elbow-to-target radar to the first endpoint it meets; then scan all
    boundary-contact elbows up to the inner anchor for the earliest
    empty sector.  Blockers leave the sector only at those contacts, so
    the earliest empty one is the exact per-line minimum; elbows past
    r_stop cannot improve on the caller's best and are skipped.
    """
    t = scene.t
    d0 = frame.d0
    if sector_empty(scene, frame.sector(0.0), eps):
        traj = _a_trajectory(scene, frame, 0.0, eta_R, eps)
        if traj is not None:
            return d0, "I", (u, v), traj
        return None
    if radius_intersects(scene, angle_of(sub(frame.b0, t)), d0, eps):
        return None
    segs_frame = [
        (frame.to_frame(s.p), frame.to_frame(s.q)) for s in scene.segments
    ]
    hit = _first_tip_crossing(scene, frame, segs_frame, eps)
    if hit is None:
        eta1 = 0.0
    else:
        xi, _ = hit
        eta1 = (d0 * d0 - xi * xi) / (2.0 * xi)
    if eta1 > eta_v + 1e-12:
        return None
    b1 = frame.elbow(eta1)
    if radius_intersects(
        scene, angle_of(sub(b1, t)), frame.radius_at(eta1), eps
    ):
        return None
    eta2, w_hit = _radar_next(scene, frame, eta1, eta_v, eps)
    events = []
    if hit is not None:
        events.append((eta1, "II", (u, v, hit[1])))
    for eta, tag, i, k in _arc_floor_candidates(frame, segs_frame, eps):
        if tag == "start" or eta <= eta1 + 1e-12 or eta > eta_v + 1e-12:
            continue
        kind, anchors = _event_label(scene, u, v, tag, i, k)
        events.append((eta, kind, anchors))
    if w_hit is not None:
        events.append((eta2, "V", (u, v, w_hit)))
    events.append((eta_v, "IV", (u, v)))
    events.sort(key=lambda ev: ev[0])
    for eta, kind, anchors in events:
        if r_stop is not None and frame.radius_at(eta) >= r_stop:
            return None
        if sector_empty(scene, frame.sector(eta), eps):
            traj = _a_trajectory(scene, frame, eta, eta_R, eps)
            if traj is None:
                continue
            return frame.radius_at(eta), kind, anchors, traj
    return None


def min_r_pipeline(scene, eps=EPS):
    """Structured planner: per-line sweeps driven by the shooting
    queries, pruned by the best length found so far."""
    _require_enclosed(scene)
    rays = sorted(_pair_frames(scene, eps), key=lambda pr: pr[2].d0)
    best = None
    for u, v, frame, eta_v, eta_R in rays:
        if best is not None and frame.d0 >= best[0]:
            break
        res = _sweep_ray(
            scene, u, v, frame, eta_v, eta_R, eps,
            r_stop=None if best is None else best[0],
        )
        if res is not None and (best is None or res[0] < best[0]):
            best = res
    if best is None:
        return MinRResult(None, None, None, True)
    r, kind, anchors, traj = best
    if not is_feasible(scene, traj, eps).feasible:
        raise PlannerError("pipeline winner failed the exact feasibility check")
    cand = ExtremalCandidate(kind, anchors, traj.direction, r, traj)
    return MinRResult(r, traj, cand, False)
