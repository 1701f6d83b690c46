import math
import random
import subprocess
import sys

import numpy as np
import pytest

from probeplan.feasibility import band_halfwidth, is_feasible, make_trajectory
from probeplan.kernels import backend_name, batch_feasible
from probeplan.kernels import numpy_impl
from probeplan.scene import random_scene

try:
    from probeplan.kernels import numba_impl
except ImportError:
    numba_impl = None


def sample_batch(rng, scene, m):
    th_s = np.empty(m)
    th_c = np.empty(m)
    rr = np.empty(m)
    for i in range(m):
        r = rng.uniform(0.05, 0.98) * scene.R
        band = band_halfwidth(r, scene.R)
        ts = rng.uniform(0, 2 * math.pi)
        pick = rng.random()
        if pick < 0.1:
            off = 0.0          # straight insertion
        elif pick < 0.2:
            off = band * (1 if rng.random() < 0.5 else -1)  # quarter turn
        else:
            off = rng.uniform(-band, band)
        th_s[i], th_c[i], rr[i] = ts, ts + off, r
    return th_s, th_c, rr


@pytest.mark.skipif(numba_impl is None, reason="numba not installed")
def test_backends_agree():
    rng = random.Random(99)
    for seed in range(6):
        sc = random_scene(seed, 9, enclosing=(seed % 2 == 0))
        th_s, th_c, rr = sample_batch(rng, sc, 500)
        got_np = numpy_impl.batch_feasible(
            sc.seg_array, sc.t.x, sc.t.y, sc.R, th_s, th_c, rr, 1e-9
        )
        got_nb = numba_impl.batch_feasible(
            sc.seg_array, sc.t.x, sc.t.y, sc.R, th_s, th_c, rr, 1e-9
        )
        assert np.array_equal(got_np, got_nb)


def test_kernel_matches_scalar_oracle():
    rng = random.Random(7)
    for seed in (0, 3, 5):
        sc = random_scene(seed, 8, enclosing=(seed != 3))
        th_s, th_c, rr = sample_batch(rng, sc, 250)
        got = batch_feasible(
            sc.seg_array, sc.t.x, sc.t.y, sc.R, th_s, th_c, rr, 1e-9
        )
        for i in range(len(rr)):
            tr = make_trajectory(sc, th_s[i], th_c[i], rr[i])
            assert got[i] == is_feasible(sc, tr).feasible, (
                seed, th_s[i], th_c[i], rr[i]
            )


def test_numpy_chunking(monkeypatch):
    sc = random_scene(2, 6, enclosing=True)
    rng = random.Random(3)
    th_s, th_c, rr = sample_batch(rng, sc, 700)
    whole = numpy_impl.batch_feasible(
        sc.seg_array, sc.t.x, sc.t.y, sc.R, th_s, th_c, rr, 1e-9
    )
    monkeypatch.setattr(numpy_impl, "_CHUNK", 64)
    parts = numpy_impl.batch_feasible(
        sc.seg_array, sc.t.x, sc.t.y, sc.R, th_s, th_c, rr, 1e-9
    )
    assert np.array_equal(whole, parts)


def test_backend_is_known():
    assert backend_name() in ("numba", "numpy")


def _spawn_backend(flag):
    env_line = (
        "import os; os.environ['PROBEPLAN_NUMBA'] = %r; " % flag
        if flag is not None
        else "import os; os.environ.pop('PROBEPLAN_NUMBA', None); "
    )
    code = env_line + (
        "from probeplan.kernels import backend_name; print(backend_name())"
    )
    out = subprocess.run(
        [sys.executable, "-c", code], capture_output=True, text=True
    )
    assert out.returncode == 0, out.stderr
    return out.stdout.strip()


def test_env_flag_selects_backend():
    assert _spawn_backend("0") == "numpy"
    if numba_impl is not None:
        assert _spawn_backend("1") == "numba"
        assert _spawn_backend(None) == "numba"


def test_empty_scene_all_feasible():
    th_s = np.array([0.0, 1.0])
    th_c = np.array([0.1, 1.0])
    rr = np.array([0.5, 0.7])
    segs = np.empty((0, 4))
    out = batch_feasible(segs, 0.0, 0.0, 2.0, th_s, th_c, rr, 1e-9)
    assert out.tolist() == [True, True]
