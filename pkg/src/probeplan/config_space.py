"""Feasible pose space for a fixed link length.

With r fixed, a final pose is a point (theta_S, theta_C): the entry
point a = t + R*u(theta_S) on the enclosing circle and the elbow
b = t + r*u(theta_C) on the elbow circle.  Straight insertion only
parks the elbow within acos(r/R) of the entry bearing (the band), and
a pose inside the band drops out when the inserted chord crosses an
obstacle or the rotating tip sweeps onto one.  Each obstacle piece
contributes a small family of boundary curves in the pose plane:

* entry shadows -- a piece outside the elbow circle can only be hit by
  the entry chord; the chord through a fixed piece endpoint meets the
  elbow circle at a bearing that falls as the entry point advances, and
  the strip between the two endpoint shadows (clipped to the band) is
  the blocked window;
* target clips -- a piece inside the elbow circle can only be hit by
  the final link, which lies on the ray from the target at bearing
  theta_C, so the blocked window is a constant angular interval: the
  shadow of the piece seen from the target;
* sweep bounds -- a piece within sqrt(2)*r of the target caps how far
  the entry bearing may lag (or lead) the elbow bearing before the
  swept sector reaches it; one monotone bound curve per rotation sense.

``build_config_space`` collects the curves, cuts the entry circle into
slabs at curve endpoints and pairwise curve crossings, and classifies
the elbow-bearing gaps between consecutive curve cuts inside each slab
with the exact pose test, so the reported region matches ``is_feasible``
pointwise away from its boundary.  ``find_feasible`` extracts one
verified trajectory, trying cheap random probes before building
anything; when the region is a single grazing pose it falls back to
testing curve-contact candidates, so closed-set boundary witnesses are
still found.

Sweep-bound curves are stored as sampled tables and where the table
direction reverses (the near-vertical junction where the bound meets
the blocked window of the same piece) the curve is split, so every
emitted piece is monotone; split bearings are kept as breakpoints.
"""

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Optional

import numpy as np

from .errors import ForbiddenPair, PointInsideCircle
from .feasibility import band_halfwidth, is_feasible, make_trajectory
from .geometry import (
    EPS,
    TWO_PI,
    Circle,
    Point,
    Segment,
    angle_of,
    circle_seg_intersect,
    cyc_diff,
    dist,
    norm_angle,
    seg_seg_proper,
    sub,
    tangent_points,
)
from .kernels import batch_feasible

__all__ = [
    "ConfigCurve",
    "Slab",
    "ConfigSpace",
    "band_curves",
    "forbidden_curves",
    "infeasible_curves",
    "build_config_space",
    "find_feasible",
]

_ORIGIN = Point(0.0, 0.0)


@dataclass(frozen=True)
class ConfigCurve:
    """One boundary curve of the excluded pose sets, as theta_C(theta_S).

    ``domain`` is a non-wrapping [lo, hi] inside [0, 2*pi]; curves that
    wrap are emitted as two pieces.  ``eval`` maps an entry bearing in
    the domain to the curve's elbow bearing in [0, 2*pi), or None where
    the construction degenerates.  ``bound_kind`` says which allowed
    bearings the curve limits: "upper-of-theta_C" caps them from above
    (poses just past the curve in the increasing direction are
    excluded), "lower-of-theta_C" the reverse.
    """

    family: str  # BandLower|BandUpper|ForbOutside|ForbInside|InfInside|InfOutside
    domain: tuple
    bound_kind: str
    obstacle: Optional[int]
    breakpoints: tuple
    eval: Callable[[float], Optional[float]]

    def covers(self, theta_S, tol=1e-12):
        lo, hi = self.domain
        return lo - tol <= theta_S <= hi + tol


@dataclass(frozen=True)
class Slab:
    """Entry-bearing interval with a fixed feasible elbow structure.

    The combinatorial structure is constant across the slab: ``order``
    lists the cut curves in circular elbow-bearing order and
    ``gap_flags[i]`` says whether the gap that starts at ``order[i]``'s
    cut is feasible.  Membership at any entry bearing inside the slab
    re-evaluates the cut curves there.  ``feasible`` caches the gap
    arcs evaluated at the slab midline, as (lo, hi) pairs with lo in
    [0, 2*pi) and hi - lo in [0, 2*pi] (hi past 2*pi wraps) -- exact on
    the midline, representative elsewhere.
    """

    lo: float
    hi: float
    order: tuple
    gap_flags: tuple
    feasible: tuple


@dataclass(frozen=True)
class ConfigSpace:
    r: float
    curves: tuple
    slabs: tuple
    diagnostics: dict
    _memo: dict = field(default_factory=dict, repr=False, compare=False)

    def _slab_cut_values(self, slab, ts):
        key = (slab.lo, ts)
        if key in self._memo:
            return self._memo[key]
        vals = []
        for ci in slab.order:
            v = self.curves[ci].eval(ts)
            if v is None:
                vals = None
                break
            vals.append(v)
        self._memo[key] = vals
        return vals

    def feasible_at(self, theta_S, theta_C):
        """Closed-region membership of one pose.

        The cut curves of the pose's slab are re-evaluated at theta_S;
        the pose inherits the flag of the gap it falls in, and a pose
        on a cut is a member when either adjacent gap is feasible.
        """
        ts = norm_angle(theta_S)
        tc = norm_angle(theta_C)
        for slab in self.slabs:
            if not slab.lo - 1e-12 <= ts <= slab.hi + 1e-12:
                continue
            if not slab.order:
                if slab.gap_flags and slab.gap_flags[0]:
                    return True
                continue
            vals = self._slab_cut_values(slab, ts)
            if vals is None:
                continue
            k = len(vals)
            base = vals[0]
            xt = norm_angle(tc - base)
            xs = [norm_angle(v - base) for v in vals]
            xs[0] = 0.0
            for i in range(k):
                x0 = xs[i]
                x1 = xs[i + 1] if i + 1 < k else TWO_PI
                if x0 - 1e-9 <= xt <= x1 + 1e-9:
                    if slab.gap_flags[i]:
                        return True
                    prev = slab.gap_flags[i - 1]
                    nxt = slab.gap_flags[(i + 1) % k]
                    if abs(xt - x0) <= 1e-9 and prev:
                        return True
                    if abs(xt - x1) <= 1e-9 and nxt:
                        return True
        return False

    def boundary_gap(self, theta_S, theta_C):
        """Distance (radians) from the pose to the nearest cut or slab edge.

        An upper bound on the distance to the true region boundary,
        used to leave out near-boundary poses in sampled comparisons.
        """
        ts = norm_angle(theta_S)
        tc = norm_angle(theta_C)
        gap = TWO_PI
        for slab in self.slabs:
            if not slab.lo - 1e-9 <= ts <= slab.hi + 1e-9:
                continue
            gap = min(gap, abs(ts - slab.lo), abs(slab.hi - ts))
            vals = self._slab_cut_values(slab, ts)
            if vals is None:
                gap = 0.0
                continue
            for v in vals:
                gap = min(gap, abs(cyc_diff(tc, v)))
        return gap

    def to_json(self):
        return {
            "r": self.r,
            "curve_count": len(self.curves),
            "vertex_count": self.diagnostics["vertex_count"],
            "slabs": [
                {
                    "theta_S": [slab.lo, slab.hi],
                    "feasible": [[lo, hi] for lo, hi in slab.feasible],
                }
                for slab in self.slabs
            ],
        }


def _arc_contains(lo, hi, ang, tol=1e-9):
    if hi - lo >= TWO_PI - 1e-12:
        return True
    return norm_angle(ang - lo) <= (hi - lo) + tol or abs(cyc_diff(ang, lo)) <= tol


# ---------------------------------------------------------------------------
# band


def band_curves(r, R):
    """The two straight-insertion limits theta_C = theta_S -/+ acos(r/R)."""
    h = band_halfwidth(r, R)

    def lower(theta_S, _h=h):
        return norm_angle(theta_S - _h)

    def upper(theta_S, _h=h):
        return norm_angle(theta_S + _h)

    return [
        ConfigCurve("BandLower", (0.0, TWO_PI), "lower-of-theta_C", None, (), lower),
        ConfigCurve("BandUpper", (0.0, TWO_PI), "upper-of-theta_C", None, (), upper),
    ]


# ---------------------------------------------------------------------------
# obstacle pieces

def _split_at_circle(p, q, radius, eps=EPS):
    """Cut segment pq (target-centered) at the circle of given radius.

    Returns a list of (piece, inside) with every piece wholly inside or
    outside the open disk; crossing points become shared endpoints.
    """
    length = dist(p, q)
    if length < 1e-12:
        return []
    params = [0.0, 1.0]
    for x in circle_seg_intersect(Circle(_ORIGIN, radius), Segment(p, q), eps):
        params.append(max(0.0, min(1.0, dist(p, x) / length)))
    params.sort()
    out = []
    for t0, t1 in zip(params, params[1:]):
        if (t1 - t0) * length < 1e-9:
            continue
        a = Point(p.x + t0 * (q.x - p.x), p.y + t0 * (q.y - p.y))
        b = Point(p.x + t1 * (q.x - p.x), p.y + t1 * (q.y - p.y))
        tm = 0.5 * (t0 + t1)
        mid = Point(p.x + tm * (q.x - p.x), p.y + tm * (q.y - p.y))
        out.append((Segment(a, b), math.hypot(mid.x, mid.y) < radius))
    return out


def _line_circle(p, d, R):
    """Both intersections of the line p + s*d (|d| = 1) with |x| = R."""
    pd = p.x * d.x + p.y * d.y
    disc = pd * pd - (p.x * p.x + p.y * p.y - R * R)
    if disc < 0.0:
        return []
    sq = math.sqrt(disc)
    return [
        Point(p.x + s * d.x, p.y + s * d.y) for s in (-pd - sq, -pd + sq)
    ]


# ---------------------------------------------------------------------------
# entry shadows and target clips

def _shadow_eval(x, r, R):
    """Elbow bearing of the chord from a(theta_S) through the fixed
    point x, or None when the chord cannot reach the elbow circle with
    x en route (x behind the entry point or hidden behind the disk)."""
    gap2 = R * R - r * r

    def ev(theta_S):
        a = Point(R * math.cos(theta_S), R * math.sin(theta_S))
        dx = x.x - a.x
        dy = x.y - a.y
        L = math.hypot(dx, dy)
        if L < 1e-15:
            return None
        dx /= L
        dy /= L
        ad = a.x * dx + a.y * dy
        if ad >= 0.0:
            return None
        disc = ad * ad - gap2
        if disc <= 0.0:
            return None
        tau = -ad - math.sqrt(disc)
        if tau < L - 1e-12:
            return None
        return angle_of(Point(a.x + tau * dx, a.y + tau * dy))

    return ev


def _valid_arcs(ev, event_angles):
    """Maximal bearing arcs where ev is defined.

    The candidate boundaries are the closed-form event angles; validity
    is probed at the gap midpoints between consecutive events, and
    adjacent valid gaps are merged across events that do not actually
    flip validity.
    """
    evs = sorted({norm_angle(e) for e in event_angles})
    if not evs:
        return [(0.0, TWO_PI)] if ev(1.234) is not None else []
    gaps = []
    for i, lo in enumerate(evs):
        hi = evs[i + 1] if i + 1 < len(evs) else evs[0] + TWO_PI
        if hi - lo < 1e-12:
            continue
        gaps.append((lo, hi - lo, ev(norm_angle(lo + 0.5 * (hi - lo))) is not None))
    if not gaps:
        return []
    if all(flag for _, _, flag in gaps):
        return [(0.0, TWO_PI)]
    # rotate so the list starts on an invalid gap, then merge valid runs
    k = next(i for i, g in enumerate(gaps) if not g[2])
    gaps = gaps[k:] + gaps[:k]
    arcs = []
    run = None
    for lo, width, flag in gaps:
        if flag:
            if run is None:
                run = [lo, width]
            else:
                run[1] += width
        else:
            if run is not None:
                arcs.append((run[0], run[0] + run[1]))
                run = None
    if run is not None:
        arcs.append((run[0], run[0] + run[1]))
    return arcs


def _emit_pieces(family, arc, bound_kind, obstacle, breakpoints, ev):
    """Normalize one domain arc into non-wrapping ConfigCurve pieces."""
    lo, hi = arc
    width = hi - lo
    if width >= TWO_PI - 1e-12:
        return [
            ConfigCurve(family, (0.0, TWO_PI), bound_kind, obstacle, breakpoints, ev)
        ]
    lo_n = norm_angle(lo)
    hi_n = lo_n + width
    if hi_n <= TWO_PI + 1e-15:
        return [
            ConfigCurve(
                family,
                (lo_n, min(hi_n, TWO_PI)),
                bound_kind,
                obstacle,
                breakpoints,
                ev,
            )
        ]
    return [
        ConfigCurve(family, (lo_n, TWO_PI), bound_kind, obstacle, breakpoints, ev),
        ConfigCurve(
            family, (0.0, hi_n - TWO_PI), bound_kind, obstacle, breakpoints, ev
        ),
    ]


def _chord_blocks(piece, theta_S, theta_C, r, R):
    """Does the entry chord of the pose properly cross the piece?"""
    a = Point(R * math.cos(theta_S), R * math.sin(theta_S))
    b = Point(r * math.cos(theta_C), r * math.sin(theta_C))
    return seg_seg_proper(Segment(a, b), piece, 1e-12)


def _shadow_bound_kind(piece, ev, arc, r, R):
    """Label which side of the shadow curve the blocked window lies on."""
    mid = 0.5 * (arc[0] + arc[1])
    v = ev(mid)
    if v is None:
        return "upper-of-theta_C"
    for off in (1e-4, 1e-6):
        above = _chord_blocks(piece, mid, v + off, r, R)
        below = _chord_blocks(piece, mid, v - off, r, R)
        if above != below:
            # blocked above means the curve caps allowed bearings
            return "upper-of-theta_C" if above else "lower-of-theta_C"
    return "upper-of-theta_C"


def forbidden_curves(scene, r, s_index, eps=EPS):
    """Boundary curves of the entry-blocked poses for one obstacle.

    The obstacle is split at the elbow circle.  Pieces outside it can
    only meet the entry chord, and contribute one falling shadow curve
    per endpoint (an endpoint sitting on the elbow circle degenerates
    to a constant).  Pieces inside it can only meet the final link and
    contribute two constant clips at the angular shadow seen from the
    target.
    """
    R = scene.R
    s = scene.segments[s_index]
    p = Point(s.p.x - scene.t.x, s.p.y - scene.t.y)
    q = Point(s.q.x - scene.t.x, s.q.y - scene.t.y)
    out = []
    for piece, inside in _split_at_circle(p, q, r, eps):
        if inside:
            a0 = angle_of(piece.p)
            a1 = angle_of(piece.q)
            if cyc_diff(a1, a0) < 0.0:
                a0, a1 = a1, a0
            # blocked window runs from a0 up to a1 (the short way)
            for ang, kind in ((a0, "upper-of-theta_C"), (a1, "lower-of-theta_C")):
                out.append(
                    ConfigCurve(
                        "ForbInside",
                        (0.0, TWO_PI),
                        kind,
                        s_index,
                        (a0, a1),
                        (lambda theta_S, _a=ang: _a),
                    )
                )
            continue
        support = []
        try:
            d = sub(piece.q, piece.p)
            L = math.hypot(d.x, d.y)
            ud = Point(d.x / L, d.y / L)
            support = [angle_of(x) for x in _line_circle(piece.p, ud, R)]
        except ZeroDivisionError:  # pragma: no cover - filtered earlier
            pass
        for x in (piece.p, piece.q):
            rx = math.hypot(x.x, x.y)
            if rx <= r + 1e-9:
                ang = angle_of(x)
                out.append(
                    ConfigCurve(
                        "ForbOutside",
                        (0.0, TWO_PI),
                        "upper-of-theta_C",
                        s_index,
                        tuple(support),
                        (lambda theta_S, _a=ang: _a),
                    )
                )
                continue
            events = list(support)
            for g in tangent_points(Circle(_ORIGIN, r), x, eps):
                gd = sub(g, x)
                gl = math.hypot(gd.x, gd.y)
                if gl < 1e-12:
                    continue
                ugd = Point(gd.x / gl, gd.y / gl)
                events.extend(angle_of(z) for z in _line_circle(x, ugd, R))
            ev = _shadow_eval(x, r, R)
            for arc in _valid_arcs(ev, events):
                kind = _shadow_bound_kind(piece, ev, arc, r, R)
                out.extend(
                    _emit_pieces("ForbOutside", arc, kind, s_index, tuple(support), ev)
                )
    return out


# ---------------------------------------------------------------------------
# sweep bounds

def _omega_of_gamma(gamma, r, R):
    """Tip rotation angle as a function of the entry lag gamma.

    Grows from 0 (radial insertion, nothing to sweep) to pi/2 at the
    band edge, where the chord is tangent to the elbow circle.
    """
    ab = math.sqrt(R * R + r * r - 2.0 * R * r * math.cos(gamma))
    if ab < 1e-15:
        return gamma
    s = r * math.sin(gamma) / ab
    return gamma + math.asin(max(-1.0, min(1.0, s)))


@lru_cache(maxsize=8)
def _omega_table(r, R):
    """Sampled tip-rotation curve on [0, band half-width], for inversion."""
    h = band_halfwidth(r, R)
    gammas = np.linspace(0.0, h, 8193)
    ab = np.sqrt(R * R + r * r - 2.0 * R * r * np.cos(gammas))
    s = np.clip(r * np.sin(gammas) / np.maximum(ab, 1e-300), -1.0, 1.0)
    omegas = gammas + np.arcsin(s)
    assert np.all(np.diff(omegas) > 0.0)
    return gammas, omegas


def _gamma_of_omega(omega, r, R, h):
    if omega <= 0.0:
        return 0.0
    gammas, omegas = _omega_table(r, R)
    if omega >= omegas[-1] - 1e-15:
        return h
    j = int(np.searchsorted(omegas, omega))
    j = max(1, min(j, len(gammas) - 1))
    lo, hi = float(gammas[j - 1]), float(gammas[j])
    flo = float(omegas[j - 1]) - omega
    fhi = float(omegas[j]) - omega
    if flo >= 0.0:
        return lo
    if fhi <= 0.0:
        return hi
    # the curve is almost linear across one table cell, so a couple of
    # secant steps reach full precision
    x0, f0, x1, f1 = lo, flo, hi, fhi
    for _ in range(3):
        if f1 == f0:
            break
        x2 = x1 - f1 * (x1 - x0) / (f1 - f0)
        if not lo <= x2 <= hi:
            x2 = 0.5 * (x0 + x1)
        f2 = _omega_of_gamma(x2, r, R) - omega
        if f2 == 0.0:
            return x2
        x0, f0, x1, f1 = x1, f1, x2, f2
    return x1


def _delta_star(piece, theta_C, r, R, h, sense, eps=EPS):
    """Smallest entry lag at which the swept sector reaches the piece.

    The sector grows away from the final link as the lag grows, so the
    first contact happens where the rotating edge meets the angularly
    nearest point of the piece inside the tip disk; for a straight
    piece that extremum sits at an endpoint inside the disk or at a
    crossing with the disk boundary.  Returns 0.0 when the final link
    itself is properly crossed and None when even the quarter sweep at
    the band edge stays clear.  ``sense`` is +1 when the elbow leads
    the entry bearing (CCW rotation), -1 otherwise.
    """
    b = Point(r * math.cos(theta_C), r * math.sin(theta_C))
    if seg_seg_proper(Segment(b, _ORIGIN), piece, eps):
        return 0.0
    cands = []
    for x in (piece.p, piece.q):
        if dist(x, b) <= r + 1e-12:
            cands.append(x)
    cands.extend(circle_seg_intersect(Circle(b, r), piece, eps))
    if not cands:
        return None
    tx, ty = -math.cos(theta_C), -math.sin(theta_C)
    best = None
    for x in cands:
        wx = x.x - b.x
        wy = x.y - b.y
        if wx * wx + wy * wy < 1e-30:
            continue
        psi = math.atan2(tx * wy - ty * wx, tx * wx + ty * wy)
        omega = -psi if sense > 0 else psi
        if omega < -1e-9 or omega > 0.5 * math.pi + 1e-9:
            continue
        gamma = _gamma_of_omega(max(omega, 0.0), r, R, h)
        if best is None or gamma < best:
            best = gamma
    return best


def _sweep_runs(piece, r, R, h, sense, samples=512):
    """Maximal elbow-bearing runs where the sweep bound is active.

    Each run is a pair of parallel arrays (theta_C, delta_star) with
    refined endpoints; runs are found on a circular grid, so a run may
    cross the 0 bearing (theta_C values then continue past 2*pi).
    """

    def dstar(tc):
        return _delta_star(piece, tc, r, R, h, sense)

    def valid(d):
        return d is not None and d > 1e-12

    grid = [TWO_PI * i / samples for i in range(samples)]
    vals = [dstar(tc) for tc in grid]
    flags = [valid(d) for d in vals]
    if not any(flags):
        return []
    if all(flags):
        runs_idx = [list(range(samples)) + [0]]
    else:
        k = next(i for i, f in enumerate(flags) if not f)
        order = [(k + i) % samples for i in range(samples)]
        runs_idx = []
        cur = None
        for i in order:
            if flags[i]:
                if cur is None:
                    cur = []
                cur.append(i)
            else:
                if cur is not None:
                    runs_idx.append(cur)
                    cur = None
        if cur is not None:
            runs_idx.append(cur)
    step = TWO_PI / samples
    runs = []
    for idx in runs_idx:
        thc = []
        dd = []
        base = grid[idx[0]]
        prev = base
        for i in idx:
            tc = grid[i]
            # unwrap the grid bearings so each run is ascending
            while tc < prev - 1e-9:
                tc += TWO_PI
            thc.append(tc)
            dd.append(vals[i])
            prev = tc
        # refine both ends onto the validity boundary
        lo_out = thc[0] - step
        hi_out = thc[-1] + step
        if len(idx) < samples + 1:
            lo, hi = lo_out, thc[0]
            for _ in range(45):
                mid = 0.5 * (lo + hi)
                if valid(dstar(mid)):
                    hi = mid
                else:
                    lo = mid
            d_end = dstar(hi)
            if d_end is not None and hi < thc[0] - 1e-12:
                thc.insert(0, hi)
                dd.insert(0, d_end)
            lo, hi = thc[-1], hi_out
            for _ in range(45):
                mid = 0.5 * (lo + hi)
                if valid(dstar(mid)):
                    lo = mid
                else:
                    hi = mid
            d_end = dstar(lo)
            if d_end is not None and lo > thc[-1] + 1e-12:
                thc.append(lo)
                dd.append(d_end)
        runs.append((thc, dd))
    return runs


def _refine_root(fun, lo, hi, flo, fhi, iters=80, tol=1e-12):
    """Bracketed root via Illinois-weighted false position.

    Keeps a strict bracket like bisection but interpolates, halving the
    weight of a stale endpoint so a flat shelf next to a jump cannot pin
    the iterate to one side (plain secant stalls there and reports a
    bogus root).
    """
    side = 0
    for _ in range(iters):
        if hi - lo < tol:
            break
        denom = fhi - flo
        mid = (lo * fhi - hi * flo) / denom if denom != 0.0 else 0.5 * (lo + hi)
        if not lo < mid < hi:
            mid = 0.5 * (lo + hi)
        fm = fun(mid)
        if fm == 0.0:
            return mid
        if (fm < 0.0) == (flo < 0.0):
            lo, flo = mid, fm
            if side == -1:
                fhi *= 0.5
            side = -1
        else:
            hi, fhi = mid, fm
            if side == 1:
                flo *= 0.5
            side = 1
    return 0.5 * (lo + hi)


def infeasible_curves(scene, r, s_index, eps=EPS):
    """Sweep-bound curves for one obstacle, both rotation senses.

    Only pieces within sqrt(2)*r of the target can meet the swept
    sector; those are split at the elbow circle and at that outer reach
    circle, scanned over elbow bearings for the stretches where the
    first-contact lag is strictly between zero and the band half-width,
    and each monotone stretch of the resulting bound becomes one curve
    mapping entry bearing to elbow bearing.
    """
    R = scene.R
    h = band_halfwidth(r, R)
    s = scene.segments[s_index]
    p = Point(s.p.x - scene.t.x, s.p.y - scene.t.y)
    q = Point(s.q.x - scene.t.x, s.q.y - scene.t.y)
    reach = math.sqrt(2.0) * r
    out = []
    for outer, in_reach in _split_at_circle(p, q, reach, eps):
        if not in_reach:
            continue
        for piece, inside in _split_at_circle(outer.p, outer.q, r, eps):
            family = "InfInside" if inside else "InfOutside"
            # bearings where the piece's support line crosses the elbow
            # circle; the bound changes character there
            alphas = []
            d = sub(piece.q, piece.p)
            L = math.hypot(d.x, d.y)
            if L > 1e-12:
                ud = Point(d.x / L, d.y / L)
                alphas = [angle_of(z) for z in _line_circle(piece.p, ud, r)]
            for sense in (1, -1):
                for thc, dd in _sweep_runs(piece, r, R, h, sense):
                    out.extend(
                        _inf_curves_from_run(
                            piece, thc, dd, alphas, family, s_index, r, R, h, sense
                        )
                    )
    return out


def _inf_curves_from_run(piece, thc, dd, alphas, family, s_index, r, R, h, sense):
    """Split one sampled run into monotone curve pieces and wrap them."""
    gs = [tc - sense * d for tc, d in zip(thc, dd)]
    # maximal stretches with a consistent entry-bearing direction
    stretches = []
    start = 0
    direction = 0
    for i in range(1, len(gs)):
        step = gs[i] - gs[i - 1]
        d_now = 1 if step > 1e-12 else (-1 if step < -1e-12 else 0)
        if d_now == 0:
            continue
        if direction == 0:
            direction = d_now
        elif d_now != direction:
            stretches.append((start, i - 1))
            start = i - 1
            direction = d_now
    stretches.append((start, len(gs) - 1))
    kind = "upper-of-theta_C" if sense > 0 else "lower-of-theta_C"
    out = []
    for i0, i1 in stretches:
        if i1 <= i0:
            continue
        seg_thc = thc[i0 : i1 + 1]
        seg_gs = gs[i0 : i1 + 1]
        lo_g = min(seg_gs[0], seg_gs[-1])
        hi_g = max(seg_gs[0], seg_gs[-1])
        if hi_g - lo_g < 1e-12:
            continue
        breaks = [norm_angle(seg_gs[0]), norm_angle(seg_gs[-1])]
        for al in alphas:
            d_al = _delta_star(piece, al, r, R, h, sense)
            if d_al is not None and d_al > 1e-12:
                g_al = al - sense * d_al
                for k in (-1, 0, 1):
                    if lo_g <= g_al + k * TWO_PI <= hi_g:
                        breaks.append(norm_angle(g_al))
        ev = _inf_eval(piece, seg_thc, seg_gs, r, R, h, sense, lo_g, hi_g)
        out.extend(
            _emit_pieces(family, (lo_g, hi_g), kind, s_index, tuple(breaks), ev)
        )
    # A run that stops with the lag strictly inside (0, h) ends because the
    # piece leaves the swept tip disk, not because the bound met the band or
    # the final link.  The blocked set then has a vertical edge at that elbow
    # bearing, so emit a constant cut over the bearings it can shadow.
    if thc[-1] - thc[0] >= TWO_PI - 1e-9:
        return out
    for at_hi, tc_end, d_end in ((False, thc[0], dd[0]), (True, thc[-1], dd[-1])):
        if not (1e-9 < d_end < h - 1e-9):
            continue
        tc0 = norm_angle(tc_end)
        end_kind = "lower-of-theta_C" if at_hi else "upper-of-theta_C"

        def ev_const(theta_S, _v=tc0):
            return _v

        out.extend(
            _emit_pieces(
                family,
                (tc_end - h, tc_end + h),
                end_kind,
                s_index,
                (tc0,),
                ev_const,
            )
        )
    return out


def _inf_eval(piece, thc, gs, r, R, h, sense, lo_g, hi_g):
    thc_a = np.asarray(thc)
    gs_a = np.asarray(gs)

    def ev(theta_S):
        tgt = None
        for k in (-1, 0, 1):
            cand = theta_S + k * TWO_PI
            if lo_g - 1e-9 <= cand <= hi_g + 1e-9:
                tgt = cand
                break
        if tgt is None:
            return None
        diff = gs_a - tgt
        hits = np.flatnonzero(diff[:-1] * diff[1:] <= 0.0)
        if hits.size == 0:
            j = int(np.argmin(np.abs(diff)))
            return norm_angle(float(thc_a[j]))
        j = int(hits[0])

        def f(tc):
            d = _delta_star(piece, norm_angle(tc), r, R, h, sense)
            if d is None:
                d = h
            return tc - sense * d - tgt

        lo, hi = float(thc_a[j]), float(thc_a[j + 1])
        root = _refine_root(f, lo, hi, float(diff[j]), float(diff[j + 1]))
        return norm_angle(root)

    return ev


# ---------------------------------------------------------------------------
# slab assembly

def _pose_feasible(scene, r, theta_S, theta_C, eps=EPS):
    try:
        traj = make_trajectory(scene, theta_S, theta_C, r, eps)
    except (ForbiddenPair, PointInsideCircle):
        return False
    return is_feasible(scene, traj, eps).feasible


def _classify_cells(scene, r, h, theta_S, cells, eps=EPS):
    """Feasibility flag per elbow cell at one entry bearing.

    Out-of-band cells are settled analytically; in-band cell midpoints
    go through the batch kernel in one call.
    """
    mids = [norm_angle(0.5 * (lo + hi)) for lo, hi in cells]
    in_band = [abs(cyc_diff(m, theta_S)) <= h for m in mids]
    idx = [i for i, f in enumerate(in_band) if f]
    flags = [False] * len(cells)
    if idx:
        th_s = np.full(len(idx), theta_S)
        th_c = np.array([mids[i] for i in idx])
        rr = np.full(len(idx), r)
        mask = batch_feasible(
            scene.seg_array, scene.t.x, scene.t.y, scene.R, th_s, th_c, rr, eps
        )
        for k, i in enumerate(idx):
            flags[i] = bool(mask[k])
    return flags


def _merge_cells(cells, flags):
    """Union of the feasible cells as maximal closed arcs."""
    n = len(cells)
    if n == 0:
        return ()
    if all(flags):
        return ((0.0, TWO_PI),)
    if not any(flags):
        return ()
    k = next(i for i in range(n) if not flags[i])
    order = [(k + i) % n for i in range(n)]
    arcs = []
    run = None
    for i in order:
        if flags[i]:
            lo, hi = cells[i]
            width = hi - lo
            if run is None:
                run = [norm_angle(lo), width]
            else:
                run[1] += width
        else:
            if run is not None:
                arcs.append((run[0], run[0] + run[1]))
                run = None
    if run is not None:
        arcs.append((run[0], run[0] + run[1]))
    arcs.sort()
    return tuple(arcs)


def _slab_cuts(curves, cache, theta_S):
    """Valid (curve index, elbow bearing) cuts at one entry bearing."""
    key = theta_S
    got = cache.get(key)
    if got is not None:
        return got
    cuts = []
    for ci, c in enumerate(curves):
        if not c.covers(theta_S):
            continue
        v = c.eval(theta_S)
        if v is not None:
            cuts.append((ci, v))
    cache[key] = cuts
    return cuts


def build_config_space(scene, r, eps=EPS):
    """Exact slab decomposition of the feasible pose region at fixed r.

    Critical entry bearings come from curve domain endpoints, stored
    breakpoints, and pairwise curve crossings; crossings are found by
    watching the circular order of the curve cuts flip between slab
    ends and bisecting each flip.  Inside a slab the cut order is
    constant, so classifying the gaps between consecutive cuts at the
    slab midline gives the feasible elbow arcs for the whole slab.
    """
    R = scene.R
    h = band_halfwidth(r, R)
    curves = list(band_curves(r, R))
    for i in range(scene.n):
        curves.extend(forbidden_curves(scene, r, i, eps))
        curves.extend(infeasible_curves(scene, r, i, eps))

    events = {0.0}
    endpoint_vertices = 0
    for c in curves:
        lo, hi = c.domain
        for e in (lo, hi):
            events.add(norm_angle(e) if e < TWO_PI - 1e-15 else 0.0)
            endpoint_vertices += 1
        for b in c.breakpoints:
            events.add(norm_angle(b))
    evs = sorted(events)
    dedup = [evs[0]]
    for e in evs[1:]:
        if e - dedup[-1] > 1e-11:
            dedup.append(e)
    evs = dedup

    cache = {}

    def cuts_at(theta_S):
        return _slab_cuts(curves, cache, theta_S)

    # adaptive crossing refinement
    pending = []
    for i, lo in enumerate(evs):
        hi = evs[i + 1] if i + 1 < len(evs) else TWO_PI
        if hi - lo > 1e-11:
            pending.append((lo, hi))
    done = []
    crossings = []
    pair_hits = {}
    guard = 0
    while pending:
        guard += 1
        if guard > 20000:  # pragma: no cover - runaway refinement
            done.extend(pending)
            break
        lo, hi = pending.pop()
        if hi - lo < 1e-10:
            done.append((lo, hi))
            continue
        probe_lo = lo + min(1e-9, (hi - lo) * 1e-3)
        probe_hi = hi - min(1e-9, (hi - lo) * 1e-3)
        mid = 0.5 * (lo + hi)
        cuts_mid = cuts_at(mid)
        if len(cuts_mid) < 2:
            done.append((lo, hi))
            continue
        vals_lo = dict(cuts_at(probe_lo))
        vals_hi = dict(cuts_at(probe_hi))
        order = sorted(range(len(cuts_mid)), key=lambda k: norm_angle(cuts_mid[k][1]))
        split_at = None
        for pos, k in enumerate(order):
            k2 = order[(pos + 1) % len(order)]
            ci, cj = cuts_mid[k][0], cuts_mid[k2][0]
            if ci not in vals_lo or cj not in vals_lo:
                continue
            if ci not in vals_hi or cj not in vals_hi:
                continue

            def f(th, _ei=curves[ci].eval, _ej=curves[cj].eval):
                vi = _ei(th)
                vj = _ej(th)
                if vi is None or vj is None:
                    return 0.0
                return cyc_diff(vi, vj)

            f_lo = cyc_diff(vals_lo[ci], vals_lo[cj])
            f_hi = cyc_diff(vals_hi[ci], vals_hi[cj])
            # a separation below the evaluation noise floor has an
            # unreliable sign (the cuts run together there, e.g. twin
            # sweep bounds on overlapping run ends, or a probe sitting
            # just past a freshly split root): march that probe inward
            # until the gap is resolvable, or write the pair off as
            # coincident on this interval -- poses that close to a
            # boundary are classified pointwise anyway
            x_lo, x_hi = probe_lo, probe_hi
            while abs(f_lo) < 1e-8:
                x_lo = lo + (x_lo - lo) * 8.0
                if x_lo > lo + 0.25 * (hi - lo):
                    break
                f_lo = f(x_lo)
            while abs(f_hi) < 1e-8:
                x_hi = hi - (hi - x_hi) * 8.0
                if x_hi < hi - 0.25 * (hi - lo):
                    break
                f_hi = f(x_hi)
            if abs(f_lo) < 1e-8 or abs(f_hi) < 1e-8 or x_lo >= x_hi:
                continue
            if abs(f_lo) > 0.5 * math.pi or abs(f_hi) > 0.5 * math.pi:
                continue
            if (f_lo < 0.0) == (f_hi < 0.0):
                continue
            root = _refine_root(f, x_lo, x_hi, f_lo, f_hi)
            if root - lo < 1e-9 or hi - root < 1e-9:
                continue
            pair = (min(ci, cj), max(ci, cj))
            pair_hits[pair] = pair_hits.get(pair, 0) + 1
            assert pair_hits[pair] <= 2, (
                f"curve pair {pair} crossed more than expected at {root!r} "
                f"in ({lo!r}, {hi!r})"
            )
            crossings.append(root)
            split_at = root
            break
        if split_at is None:
            done.append((lo, hi))
        else:
            pending.append((lo, split_at))
            pending.append((split_at, hi))

    done.sort()
    slabs = []
    cells_tested = 0
    for lo, hi in done:
        mid = 0.5 * (lo + hi)
        cut_pairs = sorted(
            ((norm_angle(v), ci) for ci, v in cuts_at(mid)),
            key=lambda pair: pair[0],
        )
        uniq = []
        order = []
        for v, ci in cut_pairs:
            if not uniq or v - uniq[-1] > 1e-12:
                uniq.append(v)
                order.append(ci)
        if len(uniq) >= 2 and (uniq[0] + TWO_PI) - uniq[-1] <= 1e-12:
            uniq.pop()
            order.pop()
        if not uniq:
            ok = _pose_feasible(scene, r, mid, mid, eps)
            feas = ((0.0, TWO_PI),) if ok else ()
            slabs.append(Slab(lo, hi, (), (ok,), feas))
            continue
        cells = [(uniq[i], uniq[i + 1]) for i in range(len(uniq) - 1)]
        cells.append((uniq[-1], uniq[0] + TWO_PI))
        flags = _classify_cells(scene, r, h, mid, cells, eps)
        cells_tested += len(cells)
        slabs.append(
            Slab(lo, hi, tuple(order), tuple(flags), _merge_cells(cells, flags))
        )

    multi = sum(1 for v in pair_hits.values() if v > 1)
    diagnostics = {
        "vertex_count": endpoint_vertices + len(crossings),
        "crossings": len(crossings),
        "events": len(evs),
        "cells_tested": cells_tested,
        "recrossed_pairs": multi,
    }
    return ConfigSpace(r, tuple(curves), tuple(slabs), diagnostics)


# ---------------------------------------------------------------------------
# witness extraction

def _probe_random(scene, r, h, eps, seed, count=512):
    rng = np.random.default_rng(seed)
    th_s = rng.uniform(0.0, TWO_PI, count)
    th_c = th_s + rng.uniform(-h, h, count)
    rr = np.full(count, r)
    mask = batch_feasible(
        scene.seg_array, scene.t.x, scene.t.y, scene.R, th_s, th_c, rr, eps
    )
    for i in np.flatnonzero(mask):
        try:
            traj = make_trajectory(scene, float(th_s[i]), float(th_c[i]), r, eps)
        except (ForbiddenPair, PointInsideCircle):
            continue
        if is_feasible(scene, traj, eps).feasible:
            return traj
    return None


def _contact_candidates(scene, r, space, eps):
    """Poses worth testing when every open cell came back infeasible.

    A region that has shrunk to a grazing contact sits where two curves
    touch, so we test every cut at the slab boundaries and mid-lines,
    plus the closest-approach bearing of each near-tangent cut pair.
    """
    curves = space.curves
    cache = {}
    seen = set()
    abscissae = []
    for slab in space.slabs:
        abscissae.extend((slab.lo, 0.5 * (slab.lo + slab.hi), slab.hi))
    for th in abscissae:
        for _, v in _slab_cuts(curves, cache, th):
            key = (round(th, 9), round(v, 9))
            if key in seen:
                continue
            seen.add(key)
            yield th, v
    for slab in space.slabs:
        mid = 0.5 * (slab.lo + slab.hi)
        cuts = _slab_cuts(curves, cache, mid)
        if len(cuts) < 2:
            continue
        order = sorted(range(len(cuts)), key=lambda k: norm_angle(cuts[k][1]))
        for pos, k in enumerate(order):
            k2 = order[(pos + 1) % len(order)]
            ci, vi = cuts[k]
            cj, vj = cuts[k2]
            gap = abs(cyc_diff(vi, vj))
            if gap > 5e-2:
                continue
            ei, ej = curves[ci].eval, curves[cj].eval

            def g(th):
                a = ei(th)
                b = ej(th)
                if a is None or b is None:
                    return math.inf
                return abs(cyc_diff(a, b))

            lo = max(slab.lo, curves[ci].domain[0], curves[cj].domain[0])
            hi = min(slab.hi, curves[ci].domain[1], curves[cj].domain[1])
            if hi - lo < 1e-12:
                continue
            for _ in range(60):
                m1 = lo + (hi - lo) / 3.0
                m2 = hi - (hi - lo) / 3.0
                if g(m1) <= g(m2):
                    hi = m2
                else:
                    lo = m1
            th = 0.5 * (lo + hi)
            v = ei(th)
            w = ej(th)
            if v is None:
                continue
            yield th, v
            if w is not None:
                yield th, norm_angle(v + 0.5 * cyc_diff(w, v))


def find_feasible(scene, r, eps=EPS, seed=0):
    """One verified feasible trajectory at link length r, or None.

    Random in-band probes are tried first; failing that the slab
    decomposition is built and a widest-cell interior pose is
    re-verified; failing that (the region may be a single grazing
    pose) curve-contact candidates are tested exactly.
    """
    R = scene.R
    if not r > 0.0 or r > R + eps:
        return None
    h = band_halfwidth(min(r, R), R)
    traj = _probe_random(scene, r, h, eps, seed)
    if traj is not None:
        return traj
    space = build_config_space(scene, r, eps)
    picks = []
    for slab in space.slabs:
        mid_s = 0.5 * (slab.lo + slab.hi)
        for lo, hi in slab.feasible:
            width = min(slab.hi - slab.lo, hi - lo)
            picks.append((width, mid_s, norm_angle(0.5 * (lo + hi))))
    picks.sort(reverse=True)
    for _, ts, tc in picks[:64]:
        try:
            traj = make_trajectory(scene, ts, tc, r, eps)
        except (ForbiddenPair, PointInsideCircle):
            continue
        if is_feasible(scene, traj, eps).feasible:
            return traj
    for ts, tc in _contact_candidates(scene, r, space, eps):
        try:
            traj = make_trajectory(scene, ts, tc, r, eps)
        except (ForbiddenPair, PointInsideCircle):
            continue
        if is_feasible(scene, traj, eps).feasible:
            return traj
    return None
