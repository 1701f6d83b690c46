"""Obstacle scenes: validation, JSON persistence, random generation.

A scene is a set of obstacle segments around a target point ``t``, all
strictly inside an enclosing circle of radius ``R`` centered on ``t``.
Polygonal obstacles are represented by their boundary segments.
"""

import json
import math
import random
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import EmptyScene, GenerationFailed, ParseError, ValidationError
from .geometry import (
    EPS,
    Point,
    Segment,
    dist,
    point_seg_dist,
    rotate,
    seg_len,
    seg_seg_intersect,
)
from .jsonio import canonical_float, dumps


@dataclass(frozen=True)
class Scene:
    """Immutable obstacle set with target ``t`` and enclosing radius ``R``.

    Construction validates the world model: segments may share endpoints
    but never properly cross or overlap, ``t`` keeps clear of every
    segment, and all endpoints lie strictly inside ``circle(t, R)``.
    """

    segments: tuple
    t: Point
    R: float
    validate: bool = field(default=True, repr=False, compare=False)

    def __post_init__(self):
        segs = tuple(
            Segment(Point(*s[0]), Point(*s[1])) for s in self.segments
        )
        object.__setattr__(self, "segments", segs)
        object.__setattr__(self, "t", Point(*self.t))
        object.__setattr__(self, "R", float(self.R))
        if self.validate:
            _check_scene(segs, self.t, self.R)

    @cached_property
    def seg_array(self):
        """(n, 4) float64 array of segment endpoints for the kernels."""
        arr = np.empty((len(self.segments), 4), dtype=np.float64)
        for i, s in enumerate(self.segments):
            arr[i, 0] = s.p.x
            arr[i, 1] = s.p.y
            arr[i, 2] = s.q.x
            arr[i, 3] = s.q.y
        return arr

    @property
    def n(self):
        return len(self.segments)


@dataclass(frozen=True)
class SceneStats:
    n: int
    vertex_count: int
    sees_infinity: bool


def _check_scene(segments, t, R, eps=EPS):
    if not math.isfinite(R) or R <= 0.0:
        raise ValidationError("enclosing radius must be positive, got %r" % R)
    for i, s in enumerate(segments):
        for v in (s.p, s.q):
            if not (math.isfinite(v.x) and math.isfinite(v.y)):
                raise ValidationError("non-finite coordinate in segment %d" % i)
        if seg_len(s) <= eps:
            raise ValidationError("segment %d is degenerate (zero length)" % i)
        if point_seg_dist(t, s) <= eps:
            raise ValidationError("target lies on segment %d" % i)
        for v in (s.p, s.q):
            if dist(v, t) >= R:
                raise ValidationError(
                    "segment %d endpoint outside enclosing circle" % i
                )
    for i in range(len(segments)):
        for j in range(i + 1, len(segments)):
            kind = seg_seg_intersect(segments[i], segments[j], eps).kind
            if kind in ("proper", "overlap"):
                raise ValidationError(
                    "segments %d and %d cross (%s)" % (i, j, kind)
                )


def default_R(segments, t):
    """Enclosing radius: 1.05 x the farthest segment endpoint from t."""
    best = 0.0
    seen = False
    for s in segments:
        p, q = Point(*s[0]), Point(*s[1])
        best = max(best, dist(p, Point(*t)), dist(q, Point(*t)))
        seen = True
    if not seen:
        raise EmptyScene("cannot derive an enclosing radius without segments")
    return 1.05 * best


def scene_stats(scene):
    from .feasibility import sees_to_infinity

    verts = set()
    for s in scene.segments:
        verts.add((s.p.x, s.p.y))
        verts.add((s.q.x, s.q.y))
    free, _ = sees_to_infinity(scene)
    return SceneStats(
        n=len(scene.segments), vertex_count=len(verts), sees_infinity=free
    )


def load_scene(text):
    """Parse the JSON scene format; polygons become boundary segments."""
    try:
        raw = json.loads(text)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise ParseError("invalid JSON: %s" % exc) from None
    if not isinstance(raw, dict):
        raise ParseError("scene file must be a JSON object")
    for key in raw:
        if key not in ("t", "R", "segments", "polygons"):
            raise ParseError("unknown scene field %r" % key)
    try:
        t = Point(float(raw["t"][0]), float(raw["t"][1]))
        if len(raw["t"]) != 2:
            raise ParseError("t must be a 2-element array")
    except ParseError:
        raise
    except Exception:
        raise ParseError("missing or malformed field 't'") from None
    segs = []
    try:
        for pair in raw.get("segments", []):
            (px, py), (qx, qy) = pair
            segs.append(
                Segment(Point(float(px), float(py)), Point(float(qx), float(qy)))
            )
        for poly in raw.get("polygons", []):
            if len(poly) < 3:
                raise ParseError("polygons need at least 3 vertices")
            pts = [Point(float(x), float(y)) for x, y in poly]
            for a, b in zip(pts, pts[1:] + pts[:1]):
                segs.append(Segment(a, b))
    except ParseError:
        raise
    except Exception:
        raise ParseError("malformed segment or polygon entry") from None
    if "R" in raw:
        try:
            R = float(raw["R"])
        except Exception:
            raise ParseError("malformed field 'R'") from None
    else:
        R = default_R(segs, t)
    return Scene(segments=tuple(segs), t=t, R=R)


def save_scene(scene):
    """Serialize a scene deterministically (sorted keys, 12 sig digits)."""
    obj = {
        "R": scene.R,
        "segments": [
            [[s.p.x, s.p.y], [s.q.x, s.q.y]] for s in scene.segments
        ],
        "t": [scene.t.x, scene.t.y],
    }
    return dumps(obj, indent=2) + "\n"


def _canon_point(p):
    return Point(canonical_float(p.x), canonical_float(p.y))


def _pinwheel(rng, d, phi):
    """Four axis-aligned chords around the origin, rotated by phi.

    Consecutive chords overlap in bearing as seen from the origin, so
    every direction out of the origin passes through the interior of at
    least one chord: no ray escapes, even through a corner.
    """
    segs = []
    for k in range(4):
        lo = rng.uniform(0.90, 0.97)
        hi = rng.uniform(1.15, 1.35)
        a = Point(d, -lo * d)
        b = Point(d, hi * d)
        ang = phi + k * math.pi / 2.0
        segs.append(Segment(rotate(a, ang), rotate(b, ang)))
    return segs


def _clear_of(seg, others, t, margin, eps=EPS):
    if point_seg_dist(t, seg) <= margin:
        return False
    for o in others:
        if seg_seg_intersect(seg, o, eps).kind != "none":
            return False
    return True


def random_scene(seed, n, enclosing=False):
    """Deterministic random scene with ``n`` non-touching segments.

    With ``enclosing=True`` the first four segments form a ring that
    blocks every ray out of ``t`` through segment interiors; the rest is
    clutter scattered inside and around the ring.  Raises
    GenerationFailed when ``n`` cannot satisfy the request.
    """
    if n < 1:
        raise GenerationFailed("need at least one segment")
    rng = random.Random(seed)
    t = Point(0.0, 0.0)
    segs = []
    if enclosing:
        if n < 4:
            raise GenerationFailed(
                "an interior-overlapping enclosure needs at least 4 segments"
            )
        d = rng.uniform(0.6, 1.5)
        segs.extend(_pinwheel(rng, d, rng.uniform(0.0, 2.0 * math.pi)))
    else:
        d = rng.uniform(0.6, 1.5)
    margin = 0.08 * d
    tries = 0
    while len(segs) < n:
        tries += 1
        if tries > 400 * n:
            raise GenerationFailed("could not place clutter without contact")
        rad = rng.uniform(0.25 * d, 2.4 * d)
        ang = rng.uniform(0.0, 2.0 * math.pi)
        mid = Point(rad * math.cos(ang), rad * math.sin(ang))
        half = 0.5 * rng.uniform(0.1 * d, 0.55 * d)
        ori = rng.uniform(0.0, 2.0 * math.pi)
        off = Point(half * math.cos(ori), half * math.sin(ori))
        cand = Segment(
            _canon_point(Point(mid.x - off.x, mid.y - off.y)),
            _canon_point(Point(mid.x + off.x, mid.y + off.y)),
        )
        if seg_len(cand) <= 10 * EPS:
            continue
        if _clear_of(cand, segs, t, margin):
            segs.append(cand)
    segs = [Segment(_canon_point(s.p), _canon_point(s.q)) for s in segs]
    R = canonical_float(default_R(segs, t))
    return Scene(segments=tuple(segs), t=t, R=R)
