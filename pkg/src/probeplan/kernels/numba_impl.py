"""Numba JIT kernel for batched trajectory feasibility.

Scalar per-trajectory loop compiled with ``@njit``; arithmetic mirrors
``numpy_impl`` expression by expression so the two backends agree.
"""

import math

import numba
import numpy as np


@numba.njit(cache=True)
def _feasible_one(segs, tx, ty, R, th_s, th_c, r, eps):  # noqa: C901
    ax = tx + R * math.cos(th_s)
    ay = ty + R * math.sin(th_s)
    bx = tx + r * math.cos(th_c)
    by = ty + r * math.sin(th_c)
    dx = bx - ax
    dy = by - ay
    dab = math.sqrt(dx * dx + dy * dy)
    if dab < 1e-15:
        cdx = 0.0
        cdy = 0.0
    else:
        cdx = dx / dab
        cdy = dy / dab
    cmx = bx + r * cdx
    cmy = by + r * cdy
    # sector edge directions: to-target and pre-rotation tip direction
    ttx = (tx - bx) / r
    tty = (ty - by) / r
    ang = math.atan2(ttx * cdy - tty * cdx, ttx * cdx + tty * cdy)
    if ang >= 0.0:
        lox, loy = ttx, tty
        hix, hiy = cdx, cdy
    else:
        lox, loy = cdx, cdy
        hix, hiy = ttx, tty
    sweep = abs(ang)
    # insertion segment a -> c_mid
    ix = cmx - ax
    iy = cmy - ay
    lins = math.sqrt(ix * ix + iy * iy)

    n = segs.shape[0]
    for k in range(n):
        px = segs[k, 0]
        py = segs[k, 1]
        qx = segs[k, 2]
        qy = segs[k, 3]
        svx = qx - px
        svy = qy - py
        ls = math.sqrt(svx * svx + svy * svy)
        if ls < 1e-15:
            continue

        # --- insertion: proper crossing of [a, c_mid] ---
        if lins > 1e-15:
            dp = (ix * (py - ay) - iy * (px - ax)) / lins
            dq = (ix * (qy - ay) - iy * (qx - ax)) / lins
            if (dp > eps and dq < -eps) or (dp < -eps and dq > eps):
                ga = (svx * (ay - py) - svy * (ax - px)) / ls
                gc = (svx * (cmy - py) - svy * (cmx - px)) / ls
                if (ga > eps and gc < -eps) or (ga < -eps and gc > eps):
                    return False

        # --- sector: endpoint strictly inside ---
        for ex, ey in ((px, py), (qx, qy)):
            wx = ex - bx
            wy = ey - by
            rw = math.sqrt(wx * wx + wy * wy)
            if rw < r - eps and rw > eps:
                if (lox * wy - loy * wx) > eps and (wx * hiy - wy * hix) > eps:
                    return False

        # --- sector: proper crossing of a radius edge ---
        for ex, ey in ((lox, loy), (hix, hiy)):
            dp = ex * (py - by) - ey * (px - bx)
            dq = ex * (qy - by) - ey * (qx - bx)
            if (dp > eps and dq < -eps) or (dp < -eps and dq > eps):
                g0 = (svx * (by - py) - svy * (bx - px)) / ls
                g1 = (svx * (by + r * ey - py) - svy * (bx + r * ex - px)) / ls
                if (g0 > eps and g1 < -eps) or (g0 < -eps and g1 > eps):
                    den = svx * ey - svy * ex
                    if den != 0.0:
                        tau = (svx * (py - by) - svy * (px - bx)) / den
                        if tau < r - eps and sweep * tau > eps:
                            return False

        # --- sector: transversal arc crossing inside the wedge ---
        h = abs(svx * (by - py) - svy * (bx - px)) / ls
        if h < r - eps:
            ufoot = ((bx - px) * svx + (by - py) * svy) / (ls * ls)
            half = math.sqrt(max(r * r - h * h, 0.0)) / ls
            for u in (ufoot - half, ufoot + half):
                if u > eps / ls and u < 1.0 - eps / ls:
                    zx = px + u * svx
                    zy = py + u * svy
                    wx = zx - bx
                    wy = zy - by
                    if (
                        (lox * wy - loy * wx) > eps
                        and (wx * hiy - wy * hix) > eps
                        and (lox * wx + loy * wy) > 0.0
                    ):
                        return False

        # --- sector: segment through the apex into the interior ---
        u = ((bx - px) * svx + (by - py) * svy) / (ls * ls)
        if u < 0.0:
            u = 0.0
        elif u > 1.0:
            u = 1.0
        zx = px + u * svx
        zy = py + u * svy
        if math.sqrt((bx - zx) ** 2 + (by - zy) ** 2) <= eps:
            for sign in (1.0, -1.0):
                if sign > 0.0:
                    reach = (1.0 - u) * ls
                else:
                    reach = u * ls
                if reach > eps:
                    wx = sign * svx / ls
                    wy = sign * svy / ls
                    depth = min(reach, r)
                    if (
                        (lox * wy - loy * wx) * depth > eps
                        and (wx * hiy - wy * hix) * depth > eps
                        and sweep * depth > eps
                    ):
                        return False
    return True


@numba.njit(cache=True)
def batch_feasible(segs, tx, ty, R, th_s, th_c, rr, eps):
    m = th_s.shape[0]
    out = np.empty(m, dtype=np.bool_)
    for i in range(m):
        out[i] = _feasible_one(segs, tx, ty, R, th_s[i], th_c[i], rr[i], eps)
    return out
