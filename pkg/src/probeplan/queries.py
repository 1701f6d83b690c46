"""Point-location and critical-event queries used by the planners.

Six query families over a fixed scene:

* ``sector_empty``        -- is a circular sector at the target clear?
* ``radius_intersects``   -- does a radius of circle(t, r) cross an obstacle?
  (linear scan, plus an exact radial lower-envelope backend)
* ``radius_shoot``        -- next obstacle endpoint by bearing, one side of a line
* ``arc_shoot``           -- first clear elbow position along an insertion line
* ``slope_shoot``         -- next endpoint swept by a line pivoting around a point
* ``pivot_sector_shoot``  -- farthest elbow along a ray before the swept
  sector hits an obstacle

Scan backends answer by per-obstacle closed forms plus a min/max
reduction; nothing is sampled.
"""

import bisect
import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateLine, InvalidSector, NoFeasiblePoint
from .geometry import (
    EPS,
    TWO_PI,
    CircularSector,
    Point,
    Segment,
    add,
    angle_of,
    cross,
    dist,
    dot,
    norm,
    norm_angle,
    perp,
    perpendicular_foot,
    scale,
    sector_seg_intersect,
    seg_seg_proper,
    sub,
    unit,
)

# ---------------------------------------------------------------------------
# Subproblem 1: sector emptiness


def sector_empty(scene, sector, eps=EPS):
    """True iff no obstacle segment properly overlaps the sector.

    The sector's arc must start at the target (apex + radius*to_t = t)
    and sweep at most a quarter turn; anything else raises InvalidSector.
    """
    if abs(sector.sweep) > math.pi / 2 + 1e-9:
        raise InvalidSector("sweep %.6f exceeds a quarter turn" % sector.sweep)
    tip = add(sector.apex, scale(sector.to_t, sector.radius))
    if dist(tip, scene.t) > 1e-6 * max(1.0, scene.R):
        raise InvalidSector("sector arc does not start at the target")
    for s in scene.segments:
        if sector_seg_intersect(sector, s, eps):
            return False
    return True


# ---------------------------------------------------------------------------
# Subproblem 2: radius intersection (scan + radial envelope)


def _ray_seg_dist(t, u, s, slack=0.0):
    """Distance along ray t + d*u (d >= 0) to segment s, or inf."""
    e = sub(s.q, s.p)
    den = cross(u, e)
    w = sub(s.p, t)
    if abs(den) < 1e-15:
        # parallel; collinear overlap contributes its nearest point
        if abs(cross(u, w)) > 1e-12 * max(1.0, norm(w)):
            return math.inf
        cands = [dot(w, u), dot(sub(s.q, t), u)]
        cands = [c for c in cands if c >= -slack]
        if not cands:
            return math.inf
        lo = min(cands)
        if lo < 0.0 and max(dot(w, u), dot(sub(s.q, t), u)) >= 0.0:
            return 0.0
        return lo
    d = cross(w, e) / den
    tau = cross(w, u) / den
    if d < -slack or tau < -slack or tau > 1.0 + slack:
        return math.inf
    return d


@dataclass(frozen=True)
class EnvelopeRadial:
    """Radial lower envelope of ray-to-obstacle distances around t.

    Bearings of segment endpoints cut [0, 2pi) into pieces; inside a
    piece the set of segments the ray crosses is constant (segments only
    enter or leave a ray at endpoint bearings, since proper crossings
    between obstacles are banned), so each piece stores that set sorted
    by distance with the winner first.
    """

    t: Point
    segments: tuple
    breakpoints: tuple         # sorted bearings in [0, 2pi)
    pieces: tuple              # per gap: tuple of segment indices by distance

    def piece_at(self, theta):
        th = norm_angle(theta)
        i = bisect.bisect_right(self.breakpoints, th) - 1
        if i < 0:
            i = len(self.breakpoints) - 1
        return i

    def near_breakpoint(self, theta, band=1e-9):
        th = norm_angle(theta)
        for bp in self.breakpoints:
            d = abs(th - bp)
            if min(d, TWO_PI - d) <= band:
                return True
        return False


def build_envelope(scene):
    bset = set()
    for s in scene.segments:
        bset.add(norm_angle(angle_of(sub(s.p, scene.t))))
        bset.add(norm_angle(angle_of(sub(s.q, scene.t))))
    bps = sorted(bset)
    if not bps:
        return EnvelopeRadial(scene.t, tuple(scene.segments), (), ((),))
    pieces = []
    m = len(bps)
    for i in range(m):
        lo = bps[i]
        hi = bps[(i + 1) % m] + (TWO_PI if i == m - 1 else 0.0)
        mid = 0.5 * (lo + hi)
        u = Point(math.cos(mid), math.sin(mid))
        hits = []
        for k, s in enumerate(scene.segments):
            d = _ray_seg_dist(scene.t, u, s)
            if math.isfinite(d):
                hits.append((d, k))
        hits.sort()
        pieces.append(tuple(k for _, k in hits))
    return EnvelopeRadial(scene.t, tuple(scene.segments), tuple(bps), tuple(pieces))


def envelope_value(env, theta):
    """Exact distance from t along bearing theta to the nearest obstacle."""
    u = Point(math.cos(theta), math.sin(theta))
    if env.near_breakpoint(theta) or not env.breakpoints:
        idxs = range(len(env.segments))
    else:
        idxs = env.pieces[env.piece_at(theta)]
    best = math.inf
    for k in idxs:
        best = min(best, _ray_seg_dist(env.t, u, env.segments[k]))
    return best


def radius_intersects(scene_or_env, theta, r, eps=EPS):
    """True iff the length-r radius of circle(t, r) at bearing theta
    properly crosses an obstacle.  Accepts a Scene (linear scan) or an
    EnvelopeRadial (piece lookup); both give identical answers.
    """
    if isinstance(scene_or_env, EnvelopeRadial):
        env = scene_or_env
        t = env.t
        probe = Segment(
            t, Point(t.x + r * math.cos(theta), t.y + r * math.sin(theta))
        )
        if env.near_breakpoint(theta):
            idxs = range(len(env.segments))
        else:
            idxs = env.pieces[env.piece_at(theta)]
        return any(
            seg_seg_proper(probe, env.segments[k], eps) for k in idxs
        )
    scene = scene_or_env
    t = scene.t
    probe = Segment(
        t, Point(t.x + r * math.cos(theta), t.y + r * math.sin(theta))
    )
    return any(seg_seg_proper(probe, s, eps) for s in scene.segments)


# ---------------------------------------------------------------------------
# Subproblem 3: next endpoint by bearing on one side of a line


def radius_shoot(scene, L, alpha, eps=EPS, direction="CCW"):
    """Endpoint strictly on t's side of L with the smallest bearing
    cyclically after alpha (strictly, by more than eps).  Ties go to the
    smallest obstacle index.  None when no endpoint qualifies.

    direction picks the sense in which "after" is measured around t;
    the default keeps the counterclockwise sweep.
    """
    t = scene.t
    lp, lq = L
    ev = sub(lq, lp)
    le = norm(ev)
    if le < 1e-15:
        raise DegenerateLine("query line has no direction")
    side_t = cross(ev, sub(t, lp)) / le
    if abs(side_t) <= eps:
        raise DegenerateLine("target lies on the query line")
    sign = 1.0 if direction == "CCW" else -1.0
    best = None
    for i, s in enumerate(scene.segments):
        for w in (s.p, s.q):
            side_w = cross(ev, sub(w, lp)) / le
            if side_w * side_t <= 0 or abs(side_w) <= eps:
                continue
            rel = sub(w, t)
            if norm(rel) <= eps:
                continue
            off = norm_angle(sign * (angle_of(rel) - alpha))
            if off <= eps or off >= TWO_PI - eps:
                continue
            key = (off, i)
            if best is None or key < best[0]:
                best = (key, w)
    return None if best is None else best[1]


# ---------------------------------------------------------------------------
# Subproblem 4: first clear elbow along an insertion line


@dataclass(frozen=True)
class _AFrame:
    """Insertion-line frame: origin at the foot of t on L, x along the
    insertion direction, y so that t = (0, -d0)."""

    b0: Point
    xhat: Point
    yhat: Point
    d0: float

    def to_frame(self, p):
        w = sub(p, self.b0)
        return Point(dot(w, self.xhat), dot(w, self.yhat))

    def to_world(self, p):
        return Point(
            self.b0.x + p.x * self.xhat.x + p.y * self.yhat.x,
            self.b0.y + p.x * self.xhat.y + p.y * self.yhat.y,
        )

    def elbow(self, eta):
        return self.to_world(Point(-eta, 0.0))

    def radius_at(self, eta):
        return math.hypot(eta, self.d0)

    def sector(self, eta):
        b = self.elbow(eta)
        to_t = unit(sub(self.to_world(Point(0.0, -self.d0)), b))
        tip = self.xhat
        ang = math.atan2(cross(to_t, tip), dot(to_t, tip))
        return CircularSector(b, self.radius_at(eta), to_t, ang)


def insertion_frame(t, L, eps=EPS):
    """Build the foot frame for insertion line L (oriented along the
    probe's direction of travel); raises DegenerateLine when t is on L.
    """
    lp, lq = L
    foot, d0 = perpendicular_foot(t, (lp, lq), eps)
    if d0 <= eps:
        raise DegenerateLine("target lies on the insertion line")
    xhat = unit(sub(lq, lp))
    yhat = scale(sub(foot, t), 1.0 / d0)
    return _AFrame(b0=foot, xhat=xhat, yhat=yhat, d0=d0)


def _arc_floor_candidates(frame, segs_frame, eps=EPS):
    """Closed-form exit events: eta values where a blocker can leave the
    sector (through the moving tip, the growing arc, or a tangency).

    Each event is (eta, tag, seg_index, end_index) so callers can tell
    what touched the boundary; end_index is 0/1 for endpoint events and
    -1 for the rest.
    """
    d0 = frame.d0
    out = [(0.0, "start", -1, -1)]
    for i, (p, q) in enumerate(segs_frame):
        # crossings of the insertion line: blocker leaves when the tip
        # retreats past the crossing's x coordinate xi
        if (p.y > eps and q.y < -eps) or (p.y < -eps and q.y > eps):
            xi = p.x + (q.x - p.x) * p.y / (p.y - q.y)
            if eps < xi < d0 - eps:
                out.append(((d0 * d0 - xi * xi) / (2.0 * xi), "tip", i, -1))
        for k, (w, o) in enumerate(((p, q), (q, p))):
            # endpoint resting on the line with the segment dipping below
            if abs(w.y) <= eps and o.y < -eps and eps < w.x < d0 - eps:
                out.append(
                    ((d0 * d0 - w.x * w.x) / (2.0 * w.x), "dip", i, k)
                )
            # endpoint expelled through the growing arc
            if w.y < -eps and w.x > eps:
                ww = w.x * w.x + w.y * w.y
                if ww < d0 * d0:
                    out.append(((d0 * d0 - ww) / (2.0 * w.x), "arc", i, k))
        # tangency of the arc with the segment's supporting line
        e = sub(q, p)
        le = norm(e)
        if le < 1e-15:
            continue
        n = perp(scale(e, 1.0 / le))
        c_s = dot(n, p)
        a2 = n.x * n.x - 1.0
        a1 = 2.0 * n.x * c_s
        a0 = c_s * c_s - d0 * d0
        roots = []
        if abs(a2) < 1e-14:
            if abs(a1) > 1e-14:
                roots.append(-a0 / a1)
        else:
            disc = a1 * a1 - 4.0 * a2 * a0
            if disc >= 0.0:
                sq = math.sqrt(disc)
                roots.append((-a1 + sq) / (2.0 * a2))
                roots.append((-a1 - sq) / (2.0 * a2))
        for eta in roots:
            if eta <= eps:
                continue
            b = Point(-eta, 0.0)
            z = add(b, scale(n, c_s - dot(n, b)))
            tau = dot(sub(z, p), e) / (le * le)
            if -0.01 <= tau <= 1.01 and z.y <= eps:
                out.append((eta, "tangent", i, -1))
    return out


def arc_shoot(scene, L, eps=EPS):
    """Closest elbow b* to the foot of t on L (retreating against the
    insertion direction) whose swept sector is obstacle-free.

    Exits of per-obstacle blocking are enumerated in closed form; the
    smallest candidate with an empty sector is exact because each
    obstacle blocks a single contiguous stretch of elbow positions.
    Raises NoFeasiblePoint when no elbow up to the circle radius works.
    """
    frame = insertion_frame(scene.t, L, eps)
    d0 = frame.d0
    if d0 > scene.R + eps:
        raise NoFeasiblePoint("insertion line passes farther than R from t")
    # quick exact dead check: anything properly crossing [b0, t] blocks
    # the sector at every elbow position
    bt = Segment(frame.b0, scene.t)
    for s in scene.segments:
        if seg_seg_proper(bt, s, eps):
            raise NoFeasiblePoint("segment permanently blocks the sweep")
    segs_frame = [
        (frame.to_frame(s.p), frame.to_frame(s.q)) for s in scene.segments
    ]
    eta_R = math.sqrt(max(scene.R * scene.R - d0 * d0, 0.0))
    cands = sorted(
        {ev[0] for ev in _arc_floor_candidates(frame, segs_frame, eps)
         if 0.0 <= ev[0] <= eta_R + 1e-12}
    )
    for eta in cands:
        sec = frame.sector(eta)
        if not any(sector_seg_intersect(sec, s, eps) for s in scene.segments):
            return frame.elbow(eta), frame.radius_at(eta)
    raise NoFeasiblePoint("sector blocked for every elbow position up to R")


# ---------------------------------------------------------------------------
# Subproblem 5: next endpoint swept by a line pivoting around u


def slope_shoot(scene, u, L, v, eps=EPS):
    """Endpoint q above L whose line through u is the next the pivoting
    insertion line meets after passing v.

    Slopes are measured in the frame where L is horizontal and t sits at
    the origin with the foot of u at positive x; a candidate counts only
    if its line through u meets the segment from t to that foot.
    """
    t = scene.t
    lp, lq = L
    foot, h = perpendicular_foot(u, (lp, lq), eps)
    if h <= eps:
        raise DegenerateLine("pivot point lies on the query line")
    x_u = dist(t, foot)
    if x_u <= eps:
        raise DegenerateLine("pivot point sits directly above the target")
    xhat = scale(sub(foot, t), 1.0 / x_u)
    yhat = scale(sub(u, foot), 1.0 / h)

    def fr(p):
        w = sub(p, t)
        return Point(dot(w, xhat), dot(w, yhat))

    v_f = fr(v)
    if abs(x_u - v_f.x) <= eps:
        m_v = math.inf
    else:
        m_v = h / (x_u - v_f.x) if v_f.x < x_u else -h / (v_f.x - x_u)
    best = None
    for i, s in enumerate(scene.segments):
        for w in (s.p, s.q):
            w_f = fr(w)
            if w_f.y <= eps:
                continue
            if abs(w_f.x - x_u) <= 1e-15:
                m_q = math.inf
                x_int = x_u
            elif abs(w_f.y - h) <= 1e-15:
                continue  # line through u parallel to L, never meets it
            else:
                m_q = (w_f.y - h) / (w_f.x - x_u)
                x_int = x_u + (0.0 - h) * (w_f.x - x_u) / (w_f.y - h)
            if not (-eps <= x_int <= x_u + eps):
                continue
            if not (m_q > m_v + eps):
                continue
            key = (m_q, i)
            if best is None or key < best[0]:
                best = (key, w)
    return None if best is None else best[1]


# ---------------------------------------------------------------------------
# Subproblem 6: farthest elbow along a ray before the sector hits


_CASE_RANK = {"ArcHit": 0, "EndpointOnBc": 1, "SegAtC": 2, "BtHit": 3}


def _pivot_sector(t, what, u, rho):
    b = add(t, scale(what, rho))
    tip = unit(sub(b, u))
    to_t = scale(what, -1.0)
    ang = math.atan2(cross(to_t, tip), dot(to_t, tip))
    return CircularSector(b, rho, to_t, ang)


def _pivot_candidates(scene, t, what, u, rho_cap, eps=EPS):
    """Entry events: rho values where an obstacle can first touch the
    growing pivot sector, labelled by contact type."""
    u_t = sub(u, t)
    s1 = dot(what, u_t)
    uu = dot(u_t, u_t)
    out = []
    for i, s in enumerate(scene.segments):
        for w in (s.p, s.q):
            w_t = sub(w, t)
            # endpoint reached by the growing arc
            den = dot(what, w_t)
            if den > eps:
                rho = dot(w_t, w_t) / (2.0 * den)
                out.append((rho, "ArcHit", i))
            # endpoint met by the sector's far straight edge
            den2 = cross(what, sub(w_t, u_t))
            if abs(den2) > 1e-14:
                rho = cross(u_t, w_t) / den2
                if rho > eps:
                    b = scale(what, rho)
                    g = sub(b, u_t)
                    lg = norm(g)
                    if lg > 1e-14:
                        tau = dot(sub(w_t, b), scale(g, 1.0 / lg))
                        if eps < tau < rho + eps:
                            out.append((rho, "EndpointOnBc", i))
        # segment crossing the anchored edge [t, b]
        ev = sub(s.q, s.p)
        le = norm(ev)
        if le < 1e-15:
            continue
        dp = cross(what, sub(s.p, t))
        dq = cross(what, sub(s.q, t))
        if (dp > eps and dq < -eps) or (dp < -eps and dq > eps):
            rho_x = dot(what, sub(s.p, t)) + (
                dot(what, ev) * dp / (dp - dq)
            )
            if rho_x > eps:
                out.append((rho_x, "BtHit", i))
        # arc tangent to the segment's supporting line
        n = perp(scale(ev, 1.0 / le))
        c_s = dot(n, sub(s.p, t))
        a = dot(n, what)
        for den in (a + 1.0, a - 1.0):
            if abs(den) < 1e-14:
                continue
            rho = c_s / den
            if rho <= eps:
                continue
            b = scale(what, rho)
            z = add(b, scale(n, c_s - dot(n, b)))
            tau = dot(sub(z, sub(s.p, t)), ev) / (le * le)
            if -0.01 <= tau <= 1.01:
                out.append((rho, "ArcHit", i))
        # moving tip landing on the segment
        A = dot(n, what)
        D = -c_s
        B = -dot(n, u_t)
        c3 = 2.0 * A * (D - B - s1 * A)
        c2 = D * D - 4.0 * A * D * s1 + A * A * uu - B * B
        c1 = -2.0 * s1 * D * D + 2.0 * A * D * uu
        c0 = D * D * uu
        coeffs = [c3, c2, c1, c0]
        while coeffs and abs(coeffs[0]) < 1e-13:
            coeffs.pop(0)
        if len(coeffs) >= 2:
            for root in np.roots(coeffs):
                if abs(root.imag) > 1e-9:
                    continue
                rho = float(root.real)
                if rho <= eps or rho > rho_cap + 1e-9:
                    continue
                b = scale(what, rho)
                g = sub(b, u_t)
                lg = norm(g)
                if lg < 1e-14:
                    continue
                # reject roots introduced by squaring
                if abs((rho * A + D) * lg + rho * (rho * A + B)) > 1e-6 * (
                    1.0 + rho * rho
                ):
                    continue
                z = add(b, scale(g, rho / lg))
                tau = dot(sub(z, sub(s.p, t)), ev) / (le * le)
                if -0.01 <= tau <= 1.01:
                    out.append((rho, "SegAtC", i))
    return out


def pivot_sector_shoot(scene, u, L, eps=EPS):
    """Farthest elbow b* from t along L (toward the foot of u) whose
    pivot sector stays obstacle-free; the quarter-turn pose at the foot
    caps the sweep.

    Returns (b*, case) with case naming the binding contact, or None
    when the cap is reached unconstrained.  Assumes the sectors are
    nested in |b*t|, so a binary search over the closed-form entry
    events finds the boundary exactly.  Scenes where a blocked stretch
    reopens further out violate that assumption and the returned bound
    can overshoot the first blocked stretch; callers needing the exact
    feasible runs along a ray should walk all events instead.
    """
    t = scene.t
    lp, lq = L
    foot, h = perpendicular_foot(u, (lp, lq), eps)
    if h <= eps:
        raise DegenerateLine("anchor lies on the query line")
    rho_cap = dist(t, foot)
    if rho_cap <= eps:
        raise DegenerateLine("anchor sits directly above the target")
    what = scale(sub(foot, t), 1.0 / rho_cap)
    events = [
        ev for ev in _pivot_candidates(scene, t, what, u, rho_cap, eps)
        if eps < ev[0] <= rho_cap + 1e-12
    ]
    events.sort(key=lambda ev: (ev[0], _CASE_RANK[ev[1]], ev[2]))
    rhos = sorted({ev[0] for ev in events})
    rhos.append(rho_cap)

    def empty_at(rho):
        sec = _pivot_sector(t, what, u, min(rho, rho_cap))
        return not any(
            sector_seg_intersect(sec, s, eps) for s in scene.segments
        )

    lo, hi = -1, len(rhos) - 1
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if empty_at(rhos[mid]):
            lo = mid
        else:
            hi = mid - 1
    if lo < 0:
        # blocked even at the first event; report it as the bound
        rho_star = rhos[0]
    else:
        rho_star = rhos[lo]
    if rho_star >= rho_cap - 1e-12:
        return add(t, scale(what, rho_cap)), None
    for ev in events:
        if abs(ev[0] - rho_star) <= 1e-12:
            return add(t, scale(what, rho_star)), ev[1]
    return add(t, scale(what, rho_star)), None
