"""Every feasible link length, reported as a union of closed intervals.

Feasible lengths form closed intervals whose ends are poses pinned by
obstacle contacts.  Two families of elbow motions trace them out:

- line runs: the elbow slides along a two-endpoint insertion line from
  the first empty-sector pose up to the first endpoint passage of the
  elbow-target segment (or the inner anchor), exactly as in the
  minimum-length sweep;
- ray walks: the elbow moves outward along the ray from the target
  through an obstacle endpoint while the long link pivots around an
  anchor endpoint, so the final pose keeps that endpoint resting on the
  elbow-target link.

Along a ray, feasibility can only flip where some contact configuration
occurs: the pivoting link line sweeps onto an obstacle endpoint, the
probe tip lands on a segment, the growing arc reaches an endpoint or a
tangency, or a segment meets the elbow-target stretch.  All of those
elbow positions have closed forms, so the walk tests each event pose
and each gap between consecutive events and emits the maximal feasible
stretches.  Blocked stretches may separate several runs on one ray,
which is what makes the domain disconnected.  Every reported interval
end carries an exactly verified witness trajectory.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ForbiddenPair, PointInsideCircle
from .feasibility import Trajectory, is_feasible, make_trajectory
from .geometry import EPS, add, angle_of, cross, dist, dot, norm, scale, sub
from .kernels import batch_feasible
from .planner_min_r import (
    _a_trajectory,
    _endpoints,
    _first_tip_crossing,
    _pair_frames,
    _radar_next,
    _require_enclosed,
)
from .queries import _arc_floor_candidates, _pivot_candidates, \
    radius_intersects, sector_empty


@dataclass(frozen=True)
class RInterval:
    """One maximal run of feasible link lengths, closed at both ends."""

    lo: float
    hi: float
    lo_witness: Trajectory
    hi_witness: Trajectory
    provenance: tuple

    def to_json(self):
        kind, *anchors = self.provenance
        return {
            "lo": self.lo,
            "hi": self.hi,
            "lo_witness": _traj_json(self.lo_witness),
            "hi_witness": _traj_json(self.hi_witness),
            "provenance": {
                "kind": kind,
                "anchors": [[p.x, p.y] for p in anchors],
            },
        }


@dataclass(frozen=True)
class RDomain:
    """Sorted, merged feasible-length intervals plus sweep counters."""

    intervals: tuple
    diagnostics: dict = field(default_factory=dict)

    def to_json(self):
        return {"intervals": [iv.to_json() for iv in self.intervals]}

    @property
    def r_min(self):
        return self.intervals[0].lo if self.intervals else None

    @property
    def r_max(self):
        return self.intervals[-1].hi if self.intervals else None


def _traj_json(traj):
    return {
        "theta_S": traj.theta_S,
        "theta_C": traj.theta_C,
        "r": traj.r,
        "direction": traj.direction,
    }


def _pose_through(scene, b, pivot, eps=EPS):
    """Trajectory with elbow b whose long link passes through pivot,
    or None when no valid pose exists there."""
    d = sub(pivot, b)
    ld = norm(d)
    if ld < eps:
        return None
    d = scale(d, 1.0 / ld)
    w = sub(b, scene.t)
    r = norm(w)
    if r < eps or r > scene.R + eps:
        return None
    dw = dot(d, w)
    disc = dw * dw - (dot(w, w) - scene.R * scene.R)
    if disc <= 0.0:
        return None
    s = -dw + math.sqrt(disc)
    if s <= ld - eps:
        return None  # entry would fall short of the pivot
    a = add(b, scale(d, s))
    try:
        return make_trajectory(
            scene, angle_of(sub(a, scene.t)), angle_of(w), r, eps
        )
    except (ForbiddenPair, PointInsideCircle):
        return None


# ---------------------------------------------------------------------------
# ray walks: elbow outward along the ray through an obstacle endpoint,
# long link pivoting around an anchor endpoint


def _ray_nodes(scene, anchor, what, rho_cap, eps):
    """Sorted elbow positions in (0, rho_cap] where feasibility can
    flip, ending with the quarter-turn cap itself."""
    t = scene.t
    rhos = [
        rho
        for rho, _tag, _i in _pivot_candidates(
            scene, t, what, anchor, rho_cap, eps
        )
    ]
    for s in scene.segments:
        for q in (s.p, s.q):
            den = cross(sub(q, anchor), what)
            if abs(den) < 1e-14:
                continue
            rhos.append(cross(sub(q, anchor), sub(anchor, t)) / den)
    rhos = sorted(r for r in rhos if eps < r < rho_cap - 1e-12)
    nodes = []
    for r in rhos:
        if not nodes or r - nodes[-1] > 1e-10 * (1.0 + r):
            nodes.append(r)
    nodes.append(rho_cap)
    return nodes


def _batch_flags(scene, anchor, what, rhos, eps):
    """Kernel feasibility of the anchored poses with elbows at rhos."""
    t, R = scene.t, scene.R
    rho = np.asarray(rhos, dtype=np.float64)
    bx = t.x + rho * what.x
    by = t.y + rho * what.y
    dx = anchor.x - bx
    dy = anchor.y - by
    ld = np.hypot(dx, dy)
    ld_g = np.where(ld > 1e-12, ld, 1.0)
    dx /= ld_g
    dy /= ld_g
    dw = dx * (bx - t.x) + dy * (by - t.y)
    disc = dw * dw - (rho * rho - R * R)
    s = -dw + np.sqrt(np.maximum(disc, 0.0))
    valid = (ld > 1e-12) & (disc > 0.0) & (s > ld - eps) & (rho > eps)
    ax = bx + s * dx
    ay = by + s * dy
    th_s = np.arctan2(ay - t.y, ax - t.x)
    th_c = np.full(rho.shape, math.atan2(what.y, what.x))
    mask = batch_feasible(scene.seg_array, t.x, t.y, R, th_s, th_c, rho, eps)
    return mask & valid


def _walk_ray(scene, anchor, w, eps, diagnostics, rho_from=None):
    """Maximal feasible runs of the anchored family along the ray
    through w, each as (lo, hi, lo_traj, hi_traj).

    Event poses are tested individually and the gaps between
    consecutive events at their midpoints; feasibility is constant on
    each gap, so the union of the surviving closed stretches is exact.
    The walk covers the elbow-at-or-beyond-w stretch, where w actually
    rests on the elbow-target link; rho_from overrides the start for
    junction continuations.
    """
    t = scene.t
    lw = dist(t, w)
    if lw < eps or dist(anchor, w) < eps:
        return
    if rho_from is None:
        rho_from = lw
    what = scale(sub(w, t), 1.0 / lw)
    a_t = sub(anchor, t)
    if abs(cross(what, a_t)) <= eps:
        return  # anchor on the ray line: no pivoting family
    rho_cap = dot(what, a_t)
    if rho_cap <= eps or rho_from > rho_cap + eps:
        return
    nodes = _ray_nodes(scene, anchor, what, rho_cap, eps)
    nodes = [rho_from] + [r for r in nodes if r > rho_from + 1e-12]
    rhos = []
    is_node = []
    for i, r in enumerate(nodes):
        rhos.append(r)
        is_node.append(True)
        if i + 1 < len(nodes):
            rhos.append(0.5 * (r + nodes[i + 1]))
            is_node.append(False)
    feas = _batch_flags(scene, anchor, what, rhos, eps)
    m = len(rhos)
    i = 0
    while i < m:
        if not feas[i]:
            i += 1
            continue
        j = i
        while j + 1 < m and feas[j + 1]:
            j += 1
        run = _verify_run(
            scene, anchor, what, rhos, is_node, i, j, eps, diagnostics
        )
        if run is not None:
            yield run
        i = j + 1


def _verify_run(scene, anchor, what, rhos, is_node, i, j, eps, diagnostics):
    """Exactly verified (lo, hi, lo_traj, hi_traj) for the feasible
    stretch rhos[i..j], or None when no end pose survives."""
    t = scene.t
    if not is_node[i] and i + 1 <= j:
        i += 1  # leading gap was feasible but its node was not: ragged
        diagnostics["ragged_ends"] = diagnostics.get("ragged_ends", 0) + 1
    if not is_node[j] and j - 1 >= i:
        j -= 1
        diagnostics["ragged_ends"] = diagnostics.get("ragged_ends", 0) + 1
    lo_traj = hi_traj = None
    while i <= j:
        lo_traj = _exact_pose(scene, anchor, what, rhos[i], eps)
        if lo_traj is not None:
            break
        diagnostics["ragged_ends"] = diagnostics.get("ragged_ends", 0) + 1
        i += 1
    while j >= i:
        hi_traj = _exact_pose(scene, anchor, what, rhos[j], eps)
        if hi_traj is not None:
            break
        diagnostics["ragged_ends"] = diagnostics.get("ragged_ends", 0) + 1
        j -= 1
    if lo_traj is None or hi_traj is None:
        diagnostics["dropped"] = diagnostics.get("dropped", 0) + 1
        return None
    return rhos[i], rhos[j], lo_traj, hi_traj


def _exact_pose(scene, anchor, what, rho, eps):
    traj = _pose_through(scene, add(scene.t, scale(what, rho)), anchor, eps)
    if traj is None or not is_feasible(scene, traj, eps).feasible:
        return None
    return traj


def _ray_intervals(scene, anchor, w, eps, diagnostics, rho_from=None):
    """RIntervals of the anchored family on the ray through w.  A run
    whose low end rests the elbow on w itself is an endpoint start; any
    other run continues a passage junction."""
    lw = dist(scene.t, w)
    runs = 0
    for lo, hi, lo_traj, hi_traj in _walk_ray(
        scene, anchor, w, eps, diagnostics, rho_from
    ):
        kind = "ScenarioB" if abs(lo - lw) <= 1e-9 * (1.0 + lw) else "A6s"
        runs += 1
        yield RInterval(lo, hi, lo_traj, hi_traj, (kind, anchor, w))
    if runs > 2:
        diagnostics["rays_gt2_runs"] = diagnostics.get("rays_gt2_runs", 0) + 1


def scenario_b_interval(scene, u, v, direction, eps=EPS):
    """Feasible lengths with the elbow starting on endpoint v and the
    long link through u, following the elbow outward along the ray
    through v; None when that start pose is invalid, blocked, or
    rotates the other way.

    Only the run containing |vt| is reported here; later runs on the
    same ray are junction continuations surfaced by the domain sweep.
    """
    lw = dist(scene.t, v)
    for iv in _ray_intervals(scene, u, v, eps, {}):
        if iv.provenance[0] != "ScenarioB":
            continue
        if abs(iv.lo - lw) > 1e-9 * (1.0 + lw):
            return None
        return iv if iv.lo_witness.direction == direction else None
    return None


# ---------------------------------------------------------------------------
# line runs, reusing the minimum-length sweep stages


def _a_run(scene, u, v, frame, eta_v, eta_R, eps):
    """Line-sweep interval for one valid insertion line, plus the
    passage endpoint that ends it (None when it ends at the inner
    anchor).  Returns (lo_eta, hi_eta, w_hit) or None when the line
    hosts no feasible elbow."""
    t = scene.t
    start_clear = sector_empty(scene, frame.sector(0.0), eps)
    if start_clear:
        eta1 = 0.0
    else:
        if radius_intersects(scene, angle_of(sub(frame.b0, t)), frame.d0, eps):
            return None
        segs_frame = [
            (frame.to_frame(s.p), frame.to_frame(s.q)) for s in scene.segments
        ]
        hit = _first_tip_crossing(scene, frame, segs_frame, eps)
        eta1 = 0.0 if hit is None else (
            (frame.d0 ** 2 - hit[0] ** 2) / (2.0 * hit[0])
        )
        if eta1 > eta_v + 1e-12:
            return None
        b1 = frame.elbow(eta1)
        if radius_intersects(
            scene, angle_of(sub(b1, t)), frame.radius_at(eta1), eps
        ):
            return None
    eta2, w_hit = _radar_next(scene, frame, eta1, eta_v, eps)
    if not sector_empty(scene, frame.sector(eta2), eps):
        return None
    if start_clear or sector_empty(scene, frame.sector(eta1), eps):
        return eta1, eta2, w_hit
    events = sorted(
        eta
        for eta, tag, _i, _k in _arc_floor_candidates(frame, segs_frame, eps)
        if tag != "start" and eta1 - 1e-12 < eta <= eta2 + 1e-12
    )
    for eta in events:
        if sector_empty(scene, frame.sector(eta), eps):
            return eta, eta2, w_hit
    return eta2, eta2, w_hit


def _a_intervals_from_frame(
    scene, u, v, frame, eta_v, eta_R, eps, diagnostics, junctions=None
):
    run = _a_run(scene, u, v, frame, eta_v, eta_R, eps)
    if run is None:
        return
    lo_eta, hi_eta, w_hit = run
    lo_traj = _a_trajectory(scene, frame, lo_eta, eta_R, eps)
    hi_traj = _a_trajectory(scene, frame, hi_eta, eta_R, eps)
    if lo_traj is None or not is_feasible(scene, lo_traj, eps).feasible:
        diagnostics["dropped"] = diagnostics.get("dropped", 0) + 1
        return
    if hi_traj is None or not is_feasible(scene, hi_traj, eps).feasible:
        hi_eta, hi_traj = lo_eta, lo_traj
    yield RInterval(
        frame.radius_at(lo_eta),
        frame.radius_at(hi_eta),
        lo_traj,
        hi_traj,
        ("ScenarioA", u, v),
    )
    if w_hit is not None and junctions is not None:
        junctions.append((u, v, w_hit, frame.radius_at(hi_eta)))


def scenario_a_intervals(scene, u, v, direction, eps=EPS):
    """Feasible-length runs for the insertion line through u and v: the
    line run, then any continuations walking the ray of the passage
    endpoint that stopped it; empty when the pair hosts no valid line
    or rotates the other way."""
    diagnostics = {}
    out = []
    for pu, pv, frame, eta_v, eta_R in _pair_frames(scene, eps):
        if {pu, pv} != {u, v}:
            continue
        junctions = []
        for iv in _a_intervals_from_frame(
            scene, pu, pv, frame, eta_v, eta_R, eps, diagnostics, junctions
        ):
            if iv.lo_witness.direction == direction:
                out.append(iv)
        for ju, jv, w_hit, rho0 in junctions:
            for anchor in (ju, jv):
                for iv in _ray_intervals(
                    scene, anchor, w_hit, eps, diagnostics, rho_from=rho0
                ):
                    if iv.lo_witness.direction == direction:
                        out.append(iv)
        break
    return out


def _merge(intervals, eps):
    """Sort and merge runs whose gap is at most eps; a survivor keeps
    the witnesses of its extreme pieces and the provenance of its
    lowest one."""
    ivs = sorted(intervals, key=lambda iv: (iv.lo, iv.hi))
    out = []
    for iv in ivs:
        if out and iv.lo <= out[-1].hi + eps:
            last = out[-1]
            if iv.hi > last.hi:
                out[-1] = RInterval(
                    last.lo, iv.hi, last.lo_witness, iv.hi_witness,
                    last.provenance,
                )
        else:
            out.append(iv)
    return out


def compute_r_domain(scene, eps=EPS):
    """Union of the line runs and of the ray walks over every ordered
    pair of obstacle endpoints, merged into disjoint closed intervals.

    The full ray walks subsume the junction continuations of the line
    runs: a continuation lives on the ray through its passage endpoint,
    anchored at one of the line's endpoints, and the walk of that ray
    reports every feasible run on it.
    """
    _require_enclosed(scene)
    diagnostics = {"lines": 0, "rays": 0, "raw_intervals": 0}
    raw = []
    for u, v, frame, eta_v, eta_R in _pair_frames(scene, eps):
        diagnostics["lines"] += 1
        raw.extend(
            _a_intervals_from_frame(
                scene, u, v, frame, eta_v, eta_R, eps, diagnostics
            )
        )
    pts = _endpoints(scene)
    for v in pts:
        for u in pts:
            if u == v:
                continue
            diagnostics["rays"] += 1
            raw.extend(_ray_intervals(scene, u, v, eps, diagnostics))
    diagnostics["raw_intervals"] = len(raw)
    diagnostics["pieces"] = tuple(raw)
    return RDomain(tuple(_merge(raw, eps)), diagnostics)
