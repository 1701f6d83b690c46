"""Pure-numpy fallback for the batched feasibility kernel.

Broadcasts trajectories x segments in chunks; arithmetic mirrors
``numba_impl._feasible_one`` expression by expression (same divisions,
same comparison margins) so the two backends return identical masks.
"""

import numpy as np

_CHUNK = 65536


def _feasible_chunk(segs, tx, ty, R, th_s, th_c, rr, eps):
    m = th_s.shape[0]
    ax = tx + R * np.cos(th_s)
    ay = ty + R * np.sin(th_s)
    bx = tx + rr * np.cos(th_c)
    by = ty + rr * np.sin(th_c)
    dx = bx - ax
    dy = by - ay
    dab = np.sqrt(dx * dx + dy * dy)
    dab_g = np.where(dab < 1e-15, 1.0, dab)
    cdx = np.where(dab < 1e-15, 0.0, dx / dab_g)
    cdy = np.where(dab < 1e-15, 0.0, dy / dab_g)
    cmx = bx + rr * cdx
    cmy = by + rr * cdy
    ttx = (tx - bx) / rr
    tty = (ty - by) / rr
    ang = np.arctan2(ttx * cdy - tty * cdx, ttx * cdx + tty * cdy)
    ccw = ang >= 0.0
    lox = np.where(ccw, ttx, cdx)
    loy = np.where(ccw, tty, cdy)
    hix = np.where(ccw, cdx, ttx)
    hiy = np.where(ccw, cdy, tty)
    sweep = np.abs(ang)
    ix = cmx - ax
    iy = cmy - ay
    lins = np.sqrt(ix * ix + iy * iy)
    lins_g = np.where(lins > 1e-15, lins, 1.0)

    px = segs[:, 0][None, :]
    py = segs[:, 1][None, :]
    qx = segs[:, 2][None, :]
    qy = segs[:, 3][None, :]
    svx = qx - px
    svy = qy - py
    ls = np.sqrt(svx * svx + svy * svy)
    seg_ok = ls >= 1e-15
    ls_g = np.where(seg_ok, ls, 1.0)

    def col(v):
        return v[:, None]

    blocked = np.zeros((m, segs.shape[0]), dtype=bool)

    # --- insertion: proper crossing of [a, c_mid] ---
    dp = (col(ix) * (py - col(ay)) - col(iy) * (px - col(ax))) / col(lins_g)
    dq = (col(ix) * (qy - col(ay)) - col(iy) * (qx - col(ax))) / col(lins_g)
    straddle1 = ((dp > eps) & (dq < -eps)) | ((dp < -eps) & (dq > eps))
    ga = (svx * (col(ay) - py) - svy * (col(ax) - px)) / ls_g
    gc = (svx * (col(cmy) - py) - svy * (col(cmx) - px)) / ls_g
    straddle2 = ((ga > eps) & (gc < -eps)) | ((ga < -eps) & (gc > eps))
    blocked |= col(lins > 1e-15) & straddle1 & straddle2

    # --- sector: endpoint strictly inside ---
    for ex, ey in ((px, py), (qx, qy)):
        wx = ex - col(bx)
        wy = ey - col(by)
        rw = np.sqrt(wx * wx + wy * wy)
        inside = (
            (rw < col(rr) - eps)
            & (rw > eps)
            & ((col(lox) * wy - col(loy) * wx) > eps)
            & ((wx * col(hiy) - wy * col(hix)) > eps)
        )
        blocked |= inside

    # --- sector: proper crossing of a radius edge ---
    for ex, ey in ((lox, loy), (hix, hiy)):
        dp = col(ex) * (py - col(by)) - col(ey) * (px - col(bx))
        dq = col(ex) * (qy - col(by)) - col(ey) * (qx - col(bx))
        s1 = ((dp > eps) & (dq < -eps)) | ((dp < -eps) & (dq > eps))
        g0 = (svx * (col(by) - py) - svy * (col(bx) - px)) / ls_g
        g1 = (
            svx * (col(by + rr * ey) - py) - svy * (col(bx + rr * ex) - px)
        ) / ls_g
        s2 = ((g0 > eps) & (g1 < -eps)) | ((g0 < -eps) & (g1 > eps))
        den = svx * col(ey) - svy * col(ex)
        den_g = np.where(den != 0.0, den, 1.0)
        tau = np.where(
            den != 0.0,
            (svx * (py - col(by)) - svy * (px - col(bx))) / den_g,
            np.inf,
        )
        blocked |= s1 & s2 & (tau < col(rr) - eps) & (col(sweep) * tau > eps)

    # --- sector: transversal arc crossing inside the wedge ---
    h = np.abs(svx * (col(by) - py) - svy * (col(bx) - px)) / ls_g
    secant = h < col(rr) - eps
    ufoot = ((col(bx) - px) * svx + (col(by) - py) * svy) / (ls_g * ls_g)
    half = np.sqrt(np.maximum(col(rr * rr) - h * h, 0.0)) / ls_g
    for u in (ufoot - half, ufoot + half):
        param_ok = (u > eps / ls_g) & (u < 1.0 - eps / ls_g)
        zx = px + u * svx
        zy = py + u * svy
        wx = zx - col(bx)
        wy = zy - col(by)
        hit = (
            secant
            & param_ok
            & ((col(lox) * wy - col(loy) * wx) > eps)
            & ((wx * col(hiy) - wy * col(hix)) > eps)
            & ((col(lox) * wx + col(loy) * wy) > 0.0)
        )
        blocked |= hit

    # --- sector: segment through the apex into the interior ---
    u = ((col(bx) - px) * svx + (col(by) - py) * svy) / (ls_g * ls_g)
    u = np.clip(u, 0.0, 1.0)
    zx = px + u * svx
    zy = py + u * svy
    near = np.sqrt((col(bx) - zx) ** 2 + (col(by) - zy) ** 2) <= eps
    for sign in (1.0, -1.0):
        if sign > 0.0:
            reach = (1.0 - u) * ls
        else:
            reach = u * ls
        wx = sign * svx / ls_g
        wy = sign * svy / ls_g
        depth = np.minimum(reach, col(rr))
        hit = (
            near
            & (reach > eps)
            & ((col(lox) * wy - col(loy) * wx) * depth > eps)
            & ((wx * col(hiy) - wy * col(hix)) * depth > eps)
            & (col(sweep) * depth > eps)
        )
        blocked |= hit

    blocked &= seg_ok
    return ~blocked.any(axis=1)


def batch_feasible(segs, tx, ty, R, th_s, th_c, rr, eps):
    segs = np.ascontiguousarray(segs, dtype=np.float64)
    th_s = np.asarray(th_s, dtype=np.float64)
    th_c = np.asarray(th_c, dtype=np.float64)
    rr = np.asarray(rr, dtype=np.float64)
    m = th_s.shape[0]
    if m <= _CHUNK:
        return _feasible_chunk(segs, tx, ty, R, th_s, th_c, rr, eps)
    out = np.empty(m, dtype=bool)
    for lo in range(0, m, _CHUNK):
        hi = min(lo + _CHUNK, m)
        out[lo:hi] = _feasible_chunk(
            segs, tx, ty, R, th_s[lo:hi], th_c[lo:hi], rr[lo:hi], eps
        )
    return out
