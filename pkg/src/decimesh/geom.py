"""Scalar geometric primitives: closest points and distances.

Hot paths run during proximity queries, so the internal kernels work on
unpacked float scalars; the public wrappers take any 3-sequences and
return numpy arrays.
"""

from __future__ import annotations

import math

import numpy as np

# Barycentric slack for the point-in-triangle test used by the exact
# intersection (distance zero) shortcut.
_INSIDE_TOL = 1e-9


def _closest_point_tri(px, py, pz, ax, ay, az, bx, by, bz, cx, cy, cz):
    """Closest point on triangle abc to p.

    Returns (qx, qy, qz, u, v, w) with q = u*a + v*b + w*c.
    """
    abx, aby, abz = bx - ax, by - ay, bz - az
    acx, acy, acz = cx - ax, cy - ay, cz - az
    apx, apy, apz = px - ax, py - ay, pz - az
    d1 = abx * apx + aby * apy + abz * apz
    d2 = acx * apx + acy * apy + acz * apz
    if d1 <= 0.0 and d2 <= 0.0:
        return ax, ay, az, 1.0, 0.0, 0.0
    bpx, bpy, bpz = px - bx, py - by, pz - bz
    d3 = abx * bpx + aby * bpy + abz * bpz
    d4 = acx * bpx + acy * bpy + acz * bpz
    if d3 >= 0.0 and d4 <= d3:
        return bx, by, bz, 0.0, 1.0, 0.0
    vc = d1 * d4 - d3 * d2
    if vc <= 0.0 and d1 >= 0.0 and d3 <= 0.0:
        denom = d1 - d3
        t = d1 / denom if denom != 0.0 else 0.0
        return ax + t * abx, ay + t * aby, az + t * abz, 1.0 - t, t, 0.0
    cpx, cpy, cpz = px - cx, py - cy, pz - cz
    d5 = abx * cpx + aby * cpy + abz * cpz
    d6 = acx * cpx + acy * cpy + acz * cpz
    if d6 >= 0.0 and d5 <= d6:
        return cx, cy, cz, 0.0, 0.0, 1.0
    vb = d5 * d2 - d1 * d6
    if vb <= 0.0 and d2 >= 0.0 and d6 <= 0.0:
        denom = d2 - d6
        t = d2 / denom if denom != 0.0 else 0.0
        return ax + t * acx, ay + t * acy, az + t * acz, 1.0 - t, 0.0, t
    va = d3 * d6 - d5 * d4
    if va <= 0.0 and (d4 - d3) >= 0.0 and (d5 - d6) >= 0.0:
        denom = (d4 - d3) + (d5 - d6)
        t = (d4 - d3) / denom if denom != 0.0 else 0.0
        qx = bx + t * (cx - bx)
        qy = by + t * (cy - by)
        qz = bz + t * (cz - bz)
        return qx, qy, qz, 0.0, 1.0 - t, t
    denom = va + vb + vc
    if denom <= 0.0:
        # Degenerate (zero-area) triangle: best of the three side segments.
        best = None
        for sxa, sya, sza, sxb, syb, szb, corner in (
            (ax, ay, az, bx, by, bz, 0),
            (bx, by, bz, cx, cy, cz, 1),
            (ax, ay, az, cx, cy, cz, 2),
        ):
            qx, qy, qz, t = _closest_point_seg(px, py, pz, sxa, sya, sza, sxb, syb, szb)
            d = (px - qx) ** 2 + (py - qy) ** 2 + (pz - qz) ** 2
            if best is None or d < best[0]:
                if corner == 0:
                    uvw = (1.0 - t, t, 0.0)
                elif corner == 1:
                    uvw = (0.0, 1.0 - t, t)
                else:
                    uvw = (1.0 - t, 0.0, t)
                best = (d, qx, qy, qz, uvw)
        _, qx, qy, qz, (u, v, w) = best
        return qx, qy, qz, u, v, w
    inv = 1.0 / denom
    v = vb * inv
    w = vc * inv
    qx = ax + abx * v + acx * w
    qy = ay + aby * v + acy * w
    qz = az + abz * v + acz * w
    return qx, qy, qz, 1.0 - v - w, v, w


def _closest_point_seg(px, py, pz, ax, ay, az, bx, by, bz):
    """Closest point on segment ab to p; returns (qx, qy, qz, t)."""
    abx, aby, abz = bx - ax, by - ay, bz - az
    denom = abx * abx + aby * aby + abz * abz
    if denom == 0.0:
        return ax, ay, az, 0.0
    t = ((px - ax) * abx + (py - ay) * aby + (pz - az) * abz) / denom
    if t < 0.0:
        t = 0.0
    elif t > 1.0:
        t = 1.0
    return ax + t * abx, ay + t * aby, az + t * abz, t


def _segment_segment(p1x, p1y, p1z, q1x, q1y, q1z, p2x, p2y, p2z, q2x, q2y, q2z):
    """Closest points of two segments; returns (d2, c1x..c1z, c2x..c2z)."""
    d1x, d1y, d1z = q1x - p1x, q1y - p1y, q1z - p1z
    d2x, d2y, d2z = q2x - p2x, q2y - p2y, q2z - p2z
    rx, ry, rz = p1x - p2x, p1y - p2y, p1z - p2z
    a = d1x * d1x + d1y * d1y + d1z * d1z
    e = d2x * d2x + d2y * d2y + d2z * d2z
    f = d2x * rx + d2y * ry + d2z * rz
    if a == 0.0 and e == 0.0:
        s = t = 0.0
    elif a == 0.0:
        s = 0.0
        t = min(max(f / e, 0.0), 1.0)
    else:
        c = d1x * rx + d1y * ry + d1z * rz
        if e == 0.0:
            t = 0.0
            s = min(max(-c / a, 0.0), 1.0)
        else:
            b = d1x * d2x + d1y * d2y + d1z * d2z
            denom = a * e - b * b
            s = min(max((b * f - c * e) / denom, 0.0), 1.0) if denom > 0.0 else 0.0
            t = (b * s + f) / e
            if t < 0.0:
                t = 0.0
                s = min(max(-c / a, 0.0), 1.0)
            elif t > 1.0:
                t = 1.0
                s = min(max((b - c) / a, 0.0), 1.0)
    c1x, c1y, c1z = p1x + d1x * s, p1y + d1y * s, p1z + d1z * s
    c2x, c2y, c2z = p2x + d2x * t, p2y + d2y * t, p2z + d2z * t
    dx, dy, dz = c1x - c2x, c1y - c2y, c1z - c2z
    return dx * dx + dy * dy + dz * dz, c1x, c1y, c1z, c2x, c2y, c2z


def _segment_triangle_distance2(px, py, pz, qx, qy, qz, ax, ay, az, bx, by, bz, cx, cy, cz):
    """Squared distance between segment pq and triangle abc.

    Returns (d2, sx, sy, sz, tx, ty, tz) with s on the segment and t on
    the triangle.  A segment piercing the triangle yields exactly 0.
    """
    abx, aby, abz = bx - ax, by - ay, bz - az
    acx, acy, acz = cx - ax, cy - ay, cz - az
    nx = aby * acz - abz * acy
    ny = abz * acx - abx * acz
    nz = abx * acy - aby * acx
    nn = nx * nx + ny * ny + nz * nz
    if nn > 0.0:
        sp = nx * (px - ax) + ny * (py - ay) + nz * (pz - az)
        sq = nx * (qx - ax) + ny * (qy - ay) + nz * (qz - az)
        if sp * sq <= 0.0 and (sp != 0.0 or sq != 0.0):
            t = sp / (sp - sq)
            ix = px + t * (qx - px)
            iy = py + t * (qy - py)
            iz = pz + t * (qz - pz)
            # Barycentric inside test for the plane intersection point.
            u = (nx * ((by - iy) * (cz - iz) - (bz - iz) * (cy - iy))
                 + ny * ((bz - iz) * (cx - ix) - (bx - ix) * (cz - iz))
                 + nz * ((bx - ix) * (cy - iy) - (by - iy) * (cx - ix))) / nn
            v = (nx * ((cy - iy) * (az - iz) - (cz - iz) * (ay - iy))
                 + ny * ((cz - iz) * (ax - ix) - (cx - ix) * (az - iz))
                 + nz * ((cx - ix) * (ay - iy) - (cy - iy) * (ax - ix))) / nn
            if u >= -_INSIDE_TOL and v >= -_INSIDE_TOL and (1.0 - u - v) >= -_INSIDE_TOL:
                return 0.0, ix, iy, iz, ix, iy, iz
    best = None
    for sxa, sya, sza, sxb, syb, szb in (
        (ax, ay, az, bx, by, bz),
        (bx, by, bz, cx, cy, cz),
        (cx, cy, cz, ax, ay, az),
    ):
        d2, c1x, c1y, c1z, c2x, c2y, c2z = _segment_segment(
            px, py, pz, qx, qy, qz, sxa, sya, sza, sxb, syb, szb
        )
        if best is None or d2 < best[0]:
            best = (d2, c1x, c1y, c1z, c2x, c2y, c2z)
    for ex, ey, ez in ((px, py, pz), (qx, qy, qz)):
        tx, ty, tz, _, _, _ = _closest_point_tri(ex, ey, ez, ax, ay, az, bx, by, bz, cx, cy, cz)
        dx, dy, dz = ex - tx, ey - ty, ez - tz
        d2 = dx * dx + dy * dy + dz * dz
        if d2 < best[0]:
            best = (d2, ex, ey, ez, tx, ty, tz)
    return best


def closest_point_on_triangle(p, a, b, c):
    """Closest point on triangle (a, b, c) to point p.

    Returns (point, bary) as numpy arrays, point = bary @ [a, b, c].
    """
    qx, qy, qz, u, v, w = _closest_point_tri(
        float(p[0]), float(p[1]), float(p[2]),
        float(a[0]), float(a[1]), float(a[2]),
        float(b[0]), float(b[1]), float(b[2]),
        float(c[0]), float(c[1]), float(c[2]),
    )
    return np.array([qx, qy, qz]), np.array([u, v, w])


def closest_point_on_segment(p, a, b):
    """Closest point on segment (a, b) to p; returns (point, t)."""
    qx, qy, qz, t = _closest_point_seg(
        float(p[0]), float(p[1]), float(p[2]),
        float(a[0]), float(a[1]), float(a[2]),
        float(b[0]), float(b[1]), float(b[2]),
    )
    return np.array([qx, qy, qz]), t


def segment_segment_distance(p1, q1, p2, q2):
    """Distance between two segments; returns (dist, c1, c2)."""
    d2, c1x, c1y, c1z, c2x, c2y, c2z = _segment_segment(
        float(p1[0]), float(p1[1]), float(p1[2]),
        float(q1[0]), float(q1[1]), float(q1[2]),
        float(p2[0]), float(p2[1]), float(p2[2]),
        float(q2[0]), float(q2[1]), float(q2[2]),
    )
    return math.sqrt(d2), np.array([c1x, c1y, c1z]), np.array([c2x, c2y, c2z])


def triangle_triangle_distance(t1, t2):
    """Minimum distance between two closed triangles.

    Parameters are (3, 3) arrays of corner positions.  Returns
    (dist, p1, p2) where p1 on t1 and p2 on t2 realize the distance;
    intersecting triangles give exactly 0.  Candidates are the three
    edges of each triangle against the other (which covers the nine
    edge-edge pairs, the six vertex-triangle pairs, and piercing).
    """
    a1x, a1y, a1z = float(t1[0][0]), float(t1[0][1]), float(t1[0][2])
    b1x, b1y, b1z = float(t1[1][0]), float(t1[1][1]), float(t1[1][2])
    c1x, c1y, c1z = float(t1[2][0]), float(t1[2][1]), float(t1[2][2])
    a2x, a2y, a2z = float(t2[0][0]), float(t2[0][1]), float(t2[0][2])
    b2x, b2y, b2z = float(t2[1][0]), float(t2[1][1]), float(t2[1][2])
    c2x, c2y, c2z = float(t2[2][0]), float(t2[2][1]), float(t2[2][2])
    best = None
    for sx, sy, sz, ex, ey, ez in (
        (a1x, a1y, a1z, b1x, b1y, b1z),
        (b1x, b1y, b1z, c1x, c1y, c1z),
        (c1x, c1y, c1z, a1x, a1y, a1z),
    ):
        d2, ux, uy, uz, vx, vy, vz = _segment_triangle_distance2(
            sx, sy, sz, ex, ey, ez, a2x, a2y, a2z, b2x, b2y, b2z, c2x, c2y, c2z
        )
        if best is None or d2 < best[0]:
            best = (d2, ux, uy, uz, vx, vy, vz)
        if best[0] == 0.0:
            break
    if best[0] > 0.0:
        for sx, sy, sz, ex, ey, ez in (
            (a2x, a2y, a2z, b2x, b2y, b2z),
            (b2x, b2y, b2z, c2x, c2y, c2z),
            (c2x, c2y, c2z, a2x, a2y, a2z),
        ):
            d2, ux, uy, uz, vx, vy, vz = _segment_triangle_distance2(
                sx, sy, sz, ex, ey, ez, a1x, a1y, a1z, b1x, b1y, b1z, c1x, c1y, c1z
            )
            if d2 < best[0]:
                # Swap so p1 stays on t1.
                best = (d2, vx, vy, vz, ux, uy, uz)
            if best[0] == 0.0:
                break
    d2, p1x, p1y, p1z, p2x, p2y, p2z = best
    return math.sqrt(d2), np.array([p1x, p1y, p1z]), np.array([p2x, p2y, p2z])


def triangle_area(a, b, c) -> float:
    """Area via the cross product."""
    ab = np.asarray(b, dtype=np.float64) - np.asarray(a, dtype=np.float64)
    ac = np.asarray(c, dtype=np.float64) - np.asarray(a, dtype=np.float64)
    return 0.5 * float(np.linalg.norm(np.cross(ab, ac)))


def triangle_normal(a, b, c):
    """Unit normal, or None for a zero-area triangle."""
    ab = np.asarray(b, dtype=np.float64) - np.asarray(a, dtype=np.float64)
    ac = np.asarray(c, dtype=np.float64) - np.asarray(a, dtype=np.float64)
    n = np.cross(ab, ac)
    norm = float(np.linalg.norm(n))
    if norm == 0.0 or not math.isfinite(norm):
        return None
    return n / norm
