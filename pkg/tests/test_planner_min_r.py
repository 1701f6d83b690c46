import math

import numpy as np
import pytest

from probeplan.errors import ValidationError
from probeplan.feasibility import is_feasible, rotation_angle
from probeplan.geometry import Point
from probeplan.kernels import batch_feasible
from probeplan.planner_min_r import (
    _pair_frames,
    enumerate_candidates,
    min_r_enumerate,
    min_r_pipeline,
)
from probeplan.scene import Scene, Segment, default_R, random_scene


def seg(x1, y1, x2, y2):
    return Segment(Point(x1, y1), Point(x2, y2))


T = Point(0.0, 0.0)

# Box with a slot in the ceiling and a shelf hanging over the target.
# The only approach is down through the slot, squeezing between the slot
# lip (0.4, 3) and the shelf end (0.35, 0.8).  The best probe drops its
# elbow at the foot of the perpendicular from the target to the line
# through those two points, so the minimum link length is the
# point-line distance  |(0.4,3)x(0.35,0.8)| / |(0.35,0.8)-(0.4,3)|
# = 0.73 / sqrt(4.8425).
POCKET = [
    seg(-3.0, -3.0, 3.0, -3.0),
    seg(3.0, -3.0, 3.0, 3.0),
    seg(-3.0, 3.0, -3.0, -3.0),
    seg(-3.0, 3.0, -0.4, 3.0),
    seg(0.4, 3.0, 3.0, 3.0),
    seg(-1.2, 0.8, 0.35, 0.8),
]
POCKET_R_MIN = 0.73 / math.sqrt(4.8425)

# Same pocket with a horizontal bar below the target and the wall
# corners sealed (each wall end rests on another wall's interior, so no
# insertion line can thread an exact corner).  The bar blocks the
# perpendicular-foot pose; the elbow retreats up the same line until
# the probe tip exactly reaches the bar, giving
#   eta = (d0^2 - xi^2) / (2 xi),  r = hypot(eta, d0)
# with d0 the point-line distance above and xi the distance from the
# foot to where the line crosses the bar.
POCKET_BAR = [
    seg(-3.2, -3.0, 3.2, -3.0),
    seg(3.0, -3.0, 3.0, 3.2),
    seg(-3.0, -3.0, -3.0, 3.2),
    seg(-3.0, 3.0, -0.4, 3.0),
    seg(0.4, 3.0, 3.0, 3.0),
    seg(-1.2, 0.8, 0.35, 0.8),
    seg(0.1, -0.2, 0.6, -0.2),
]


def _pocket_bar_r_min():
    d0 = POCKET_R_MIN
    tau = 6.62 / 4.8425
    b0 = (0.4 - 0.05 * tau, 3.0 - 2.2 * tau)
    hit = (3.6 / 11.0, -0.2)
    xi = math.hypot(hit[0] - b0[0], hit[1] - b0[1])
    eta = (d0 * d0 - xi * xi) / (2.0 * xi)
    return math.hypot(eta, d0)


def pocket_scene(extra=()):
    segs = POCKET + list(extra)
    return Scene(segments=segs, t=T, R=default_R(segs, T))


def pocket_bar_scene():
    return Scene(segments=POCKET_BAR, t=T, R=default_R(POCKET_BAR, T))


def mirrored(scene):
    segs = [
        Segment(Point(-s.p.x, s.p.y), Point(-s.q.x, s.q.y))
        for s in scene.segments
    ]
    return Scene(segments=segs, t=Point(-scene.t.x, scene.t.y), R=scene.R)


@pytest.mark.parametrize("solver", [min_r_enumerate, min_r_pipeline])
def test_pocket_min_at_perpendicular_foot(solver):
    res = solver(pocket_scene())
    assert not res.infeasible
    assert abs(res.r_min - POCKET_R_MIN) < 1e-9
    assert res.candidate.kind == "I"
    assert res.candidate.direction == "CW"
    assert set(res.candidate.anchors) == {Point(0.4, 3.0), Point(0.35, 0.8)}
    assert is_feasible(pocket_scene(), res.witness).feasible
    assert abs(rotation_angle(pocket_scene(), res.witness) - math.pi / 2) < 1e-9


@pytest.mark.parametrize("solver", [min_r_enumerate, min_r_pipeline])
def test_pocket_bar_min_at_tip_contact(solver):
    res = solver(pocket_bar_scene())
    assert not res.infeasible
    assert abs(res.r_min - _pocket_bar_r_min()) < 1e-9
    # independent sampling oracle converged to 0.38207295 +/- 5e-8,
    # approaching from above as it must
    assert abs(res.r_min - 0.38207295) < 1e-6
    assert res.candidate.kind == "II"
    assert res.candidate.direction == "CW"
    assert Point(0.4, 3.0) in res.candidate.anchors
    assert Point(0.35, 0.8) in res.candidate.anchors
    assert 6 in res.candidate.anchors
    assert is_feasible(pocket_bar_scene(), res.witness).feasible


def test_arc_contact_scene_frozen():
    # minimum set by an obstacle endpoint sitting exactly on the sweep
    # arc; r frozen from oracle: 0.403914584 (3 seeds, spread 1.4e-8)
    sc = random_scene(21, 5, enclosing=True)
    a = min_r_enumerate(sc)
    b = min_r_pipeline(sc)
    assert abs(a.r_min - 0.403914584) < 1e-6
    assert abs(a.r_min - b.r_min) < 1e-12
    assert a.candidate.kind == "III"
    assert b.candidate.kind == "III"
    assert len(a.candidate.anchors) == 3


def test_tangency_scene_frozen():
    # minimum set by the sweep arc grazing a segment interior; r frozen
    # from oracle: 0.503185660 (3 seeds, spread 9.2e-9)
    sc = random_scene(25, 10, enclosing=True)
    a = min_r_enumerate(sc)
    b = min_r_pipeline(sc)
    assert abs(a.r_min - 0.503185660) < 1e-6
    assert abs(a.r_min - b.r_min) < 1e-12
    assert a.candidate.kind == "III"
    assert isinstance(a.candidate.anchors[-1], int)


def test_mirrored_pocket_flips_direction():
    for make in (pocket_scene, pocket_bar_scene):
        base = min_r_enumerate(make())
        mirror = min_r_enumerate(mirrored(make()))
        assert abs(base.r_min - mirror.r_min) < 1e-12
        assert base.candidate.kind == mirror.candidate.kind
        assert {base.candidate.direction, mirror.candidate.direction} == {
            "CW", "CCW",
        }


def test_infeasible_scene_detected():
    sc = random_scene(15, 16, enclosing=True)
    for solver in (min_r_enumerate, min_r_pipeline):
        res = solver(sc)
        assert res.infeasible
        assert res.r_min is None and res.witness is None
    # corroborate by sampling: no feasible config at any link length
    rng = np.random.default_rng(0)
    rs = np.repeat(np.linspace(0.01, sc.R * 0.999, 32), 50_000)
    th_s = rng.uniform(0.0, 2.0 * np.pi, rs.shape[0])
    half = np.arccos(np.clip(rs / sc.R, -1.0, 1.0))
    th_c = th_s + rng.uniform(-1.0, 1.0, rs.shape[0]) * half
    mask = batch_feasible(
        sc.seg_array, sc.t.x, sc.t.y, sc.R, th_s, th_c, rs, 1e-9
    )
    assert not mask.any()


@pytest.mark.parametrize("seed", range(20))
@pytest.mark.parametrize("n", [5, 10, 16])
def test_cross_algorithm_agreement(seed, n):
    sc = random_scene(seed, n, enclosing=True)
    a = min_r_enumerate(sc)
    b = min_r_pipeline(sc)
    assert a.infeasible == b.infeasible
    if a.infeasible:
        return
    assert abs(a.r_min - b.r_min) <= 1e-9 * max(1.0, a.r_min)
    assert a.candidate.kind == b.candidate.kind
    assert is_feasible(sc, a.witness).feasible
    assert is_feasible(sc, b.witness).feasible
    assert abs(a.witness.r - a.r_min) < 1e-12


@pytest.mark.parametrize("seed,n", [(0, 10), (7, 6), (13, 9), (3, 16)])
def test_nothing_feasible_below_minimum(seed, n):
    sc = random_scene(seed, n, enclosing=True)
    res = min_r_enumerate(sc)
    r = res.r_min - 1e-4
    rng = np.random.default_rng(seed)
    th_s = rng.uniform(0.0, 2.0 * np.pi, 1_000_000)
    half = math.acos(min(1.0, r / sc.R))
    th_c = th_s + rng.uniform(-half, half, th_s.shape[0])
    mask = batch_feasible(
        sc.seg_array, sc.t.x, sc.t.y, sc.R,
        th_s, th_c, np.full(th_s.shape, r), 1e-9,
    )
    assert not mask.any()


def _ray_pattern(scene, frame, eta_v, k=1000):
    """Feasibility of the elbow poses along one insertion line."""
    etas = np.linspace(0.0, eta_v, k)
    bx = frame.b0.x - etas * frame.xhat.x
    by = frame.b0.y - etas * frame.xhat.y
    eta_r = math.sqrt(scene.R**2 - frame.d0**2)
    ax = frame.b0.x - eta_r * frame.xhat.x
    ay = frame.b0.y - eta_r * frame.xhat.y
    th_s = np.full(k, math.atan2(ay - scene.t.y, ax - scene.t.x))
    th_c = np.arctan2(by - scene.t.y, bx - scene.t.x)
    rr = np.hypot(etas, frame.d0)
    return batch_feasible(
        scene.seg_array, scene.t.x, scene.t.y, scene.R, th_s, th_c, rr, 1e-9
    )


@pytest.mark.parametrize("seed,n", [(2, 5), (4, 8), (21, 5), (9, 12)])
def test_feasible_elbows_form_one_run_per_line(seed, n):
    sc = random_scene(seed, n, enclosing=True)
    checked = 0
    for _u, _v, frame, eta_v, _eta_r in _pair_frames(sc):
        mask = _ray_pattern(sc, frame, eta_v)
        idx = np.flatnonzero(mask)
        if idx.size:
            assert idx[-1] - idx[0] + 1 == idx.size
        checked += 1
    assert checked > 0


def test_json_shape_feasible():
    out = min_r_enumerate(pocket_bar_scene()).to_json()
    assert set(out) == {
        "feasible", "r_min", "theta_S", "theta_C",
        "direction", "case", "anchors",
    }
    assert out["feasible"] is True
    assert out["case"] == "II"
    assert out["direction"] == "CW"
    assert isinstance(out["r_min"], float)
    assert [0.4, 3.0] in out["anchors"]
    assert 6 in out["anchors"]


def test_json_shape_infeasible():
    out = min_r_enumerate(random_scene(15, 16, enclosing=True)).to_json()
    assert out["feasible"] is False
    for key in ("r_min", "theta_S", "theta_C", "direction", "case", "anchors"):
        assert out[key] is None


def test_open_scene_rejected():
    segs = [seg(1.0, -0.5, 1.0, 0.5)]
    sc = Scene(segments=segs, t=T, R=default_R(segs, T))
    for fn in (min_r_enumerate, min_r_pipeline):
        with pytest.raises(ValidationError):
            fn(sc)
    with pytest.raises(ValidationError):
        enumerate_candidates(sc, "CW")


def test_candidate_direction_argument():
    sc = pocket_scene()
    with pytest.raises(ValueError):
        enumerate_candidates(sc, "widdershins")
    cw = enumerate_candidates(sc, "CW")
    ccw = enumerate_candidates(sc, "CCW")
    assert all(c.direction == "CW" for c in cw)
    assert all(c.direction == "CCW" for c in ccw)
    assert cw and ccw


@pytest.mark.parametrize("n", [4, 8, 12, 16])
def test_candidate_count_cubic_bound(n):
    sc = random_scene(3, n, enclosing=True)
    total = len(enumerate_candidates(sc, "CW")) + len(
        enumerate_candidates(sc, "CCW")
    )
    assert total <= 64 * n**3


def test_deterministic_output():
    sc = random_scene(12, 10, enclosing=True)
    assert min_r_enumerate(sc).to_json() == min_r_enumerate(sc).to_json()
    assert min_r_pipeline(sc).to_json() == min_r_pipeline(sc).to_json()
