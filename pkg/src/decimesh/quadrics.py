"""Quadric constructions and optimal placement.

Plane, triangle, area-weighted vertex, and edge quadrics, plus the
area quadric whose summand for a segment (v_a, v_b) evaluated at x
equals twice the squared area of the triangle (v_a, v_b, x).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import Quadric, SimplicialComplex2

# Relative eigenvalue threshold separating well-conditioned solves from
# the truncated-pseudoinverse path.
CONDITION_THRESHOLD = 1e-9


@dataclass(slots=True)
class EdgeCost:
    edge_id: int
    cost: float
    position: tuple[float, float, float]
    generation: int


def plane_quadric(normal, point) -> Quadric:
    """Quadric of squared distance to the plane through point with unit normal."""
    nx, ny, nz = float(normal[0]), float(normal[1]), float(normal[2])
    norm = math.sqrt(nx * nx + ny * ny + nz * nz)
    if abs(norm - 1.0) > 1e-6:
        raise ValueError(f"plane normal must be unit length, got |n| = {norm}")
    px, py, pz = float(point[0]), float(point[1]), float(point[2])
    d = nx * px + ny * py + nz * pz
    return Quadric(
        nx * nx, nx * ny, nx * nz, ny * ny, ny * nz, nz * nz,
        -nx * d, -ny * d, -nz * d, d * d,
    )


def triangle_quadric(vi, vj, vk) -> Quadric | None:
    """Plane quadric of the triangle; None for zero area."""
    ax, ay, az = float(vi[0]), float(vi[1]), float(vi[2])
    e1x, e1y, e1z = float(vj[0]) - ax, float(vj[1]) - ay, float(vj[2]) - az
    e2x, e2y, e2z = float(vk[0]) - ax, float(vk[1]) - ay, float(vk[2]) - az
    nx = e1y * e2z - e1z * e2y
    ny = e1z * e2x - e1x * e2z
    nz = e1x * e2y - e1y * e2x
    norm = math.sqrt(nx * nx + ny * ny + nz * nz)
    if norm <= 0.0 or not math.isfinite(norm):
        return None
    nx /= norm
    ny /= norm
    nz /= norm
    d = nx * ax + ny * ay + nz * az
    return Quadric(
        nx * nx, nx * ny, nx * nz, ny * ny, ny * nz, nz * nz,
        -nx * d, -ny * d, -nz * d, d * d,
    )


def vertex_quadric(mesh: SimplicialComplex2, i: int, positions=None) -> Quadric:
    """Barycentric-area-weighted sum of one-ring triangle quadrics.

    Weight of each face is one third of its area; an isolated vertex
    yields the zero quadric.
    """
    pos = mesh.positions if positions is None else positions
    axx = axy = axz = ayy = ayz = azz = bx = by = bz = c = 0.0
    for fid in sorted(mesh.star_vertex_faces[i]):
        va, vb, vc = mesh.faces[fid]
        pa = pos[va]
        pb = pos[vb]
        pc = pos[vc]
        ax_, ay_, az_ = pa[0], pa[1], pa[2]
        e1x, e1y, e1z = pb[0] - ax_, pb[1] - ay_, pb[2] - az_
        e2x, e2y, e2z = pc[0] - ax_, pc[1] - ay_, pc[2] - az_
        nx = e1y * e2z - e1z * e2y
        ny = e1z * e2x - e1x * e2z
        nz = e1x * e2y - e1y * e2x
        norm = math.sqrt(nx * nx + ny * ny + nz * nz)
        if norm <= 0.0:
            continue
        # area / 3 = (norm / 2) / 3; fold the 1/norm^2 normalization in.
        w = norm / 6.0
        inv = 1.0 / norm
        nx *= inv
        ny *= inv
        nz *= inv
        d = nx * ax_ + ny * ay_ + nz * az_
        axx += w * nx * nx
        axy += w * nx * ny
        axz += w * nx * nz
        ayy += w * ny * ny
        ayz += w * ny * nz
        azz += w * nz * nz
        bx -= w * nx * d
        by -= w * ny * d
        bz -= w * nz * d
        c += w * d * d
    return Quadric(axx, axy, axz, ayy, ayz, azz, bx, by, bz, c)


def all_vertex_quadrics(mesh: SimplicialComplex2) -> list:
    """Vectorized vertex quadrics for every vertex (dead ones get zero)."""
    nv = len(mesh.vertex_alive)
    fids = [f for f in mesh.live_faces()]
    acc = np.zeros((nv, 10))
    if fids:
        faces = np.array([mesh.faces[f] for f in fids], dtype=np.int64)
        tris = mesh.positions[faces]
        e1 = tris[:, 1] - tris[:, 0]
        e2 = tris[:, 2] - tris[:, 0]
        n = np.cross(e1, e2)
        norm = np.linalg.norm(n, axis=1)
        keep = norm > 0.0
        faces = faces[keep]
        tris = tris[keep]
        n = n[keep]
        norm = norm[keep]
        w = norm / 6.0
        nhat = n / norm[:, None]
        d = np.einsum("ij,ij->i", nhat, tris[:, 0])
        q = np.empty((len(faces), 10))
        q[:, 0] = w * nhat[:, 0] * nhat[:, 0]
        q[:, 1] = w * nhat[:, 0] * nhat[:, 1]
        q[:, 2] = w * nhat[:, 0] * nhat[:, 2]
        q[:, 3] = w * nhat[:, 1] * nhat[:, 1]
        q[:, 4] = w * nhat[:, 1] * nhat[:, 2]
        q[:, 5] = w * nhat[:, 2] * nhat[:, 2]
        q[:, 6] = -w * nhat[:, 0] * d
        q[:, 7] = -w * nhat[:, 1] * d
        q[:, 8] = -w * nhat[:, 2] * d
        q[:, 9] = w * d * d
        for corner in range(3):
            np.add.at(acc, faces[:, corner], q)
    return [Quadric(*row) for row in acc.tolist()]


def area_quadric_summand(va, vb) -> Quadric:
    """Quadric whose value at x is 2 * area(va, vb, x)^2.

    With s = vb - va and t = va x vb this is
    (((s.s)I - s s^T) / 2, (t x s) / 2, (t.t) / 2).
    """
    ax, ay, az = float(va[0]), float(va[1]), float(va[2])
    bx_, by_, bz_ = float(vb[0]), float(vb[1]), float(vb[2])
    sx, sy, sz = bx_ - ax, by_ - ay, bz_ - az
    tx = ay * bz_ - az * by_
    ty = az * bx_ - ax * bz_
    tz = ax * by_ - ay * bx_
    ss = sx * sx + sy * sy + sz * sz
    return Quadric(
        0.5 * (ss - sx * sx), -0.5 * sx * sy, -0.5 * sx * sz,
        0.5 * (ss - sy * sy), -0.5 * sy * sz,
        0.5 * (ss - sz * sz),
        0.5 * (ty * sz - tz * sy),
        0.5 * (tz * sx - tx * sz),
        0.5 * (tx * sy - ty * sx),
        0.5 * (tx * tx + ty * ty + tz * tz),
    )


def edge_one_ring_boundary_edges(mesh: SimplicialComplex2, eid: int,
                                 rule: str = "boundary") -> list:
    """Side edges of the edge's one-ring faces selected by rule.

    "boundary": sides whose face star has size exactly 1.
    "link": sides not touching either endpoint (the full link).
    """
    i, j = mesh.edges[eid]
    star_f = mesh.star_vertex_faces
    fids = star_f[i] | star_f[j]
    side_edges = mesh.face_side_edges
    sef = mesh.star_edge_faces
    out = set()
    if rule == "boundary":
        for fid in fids:
            for se in side_edges[fid]:
                if len(sef[se]) == 1:
                    out.add(se)
    elif rule == "link":
        edges = mesh.edges
        for fid in fids:
            for se in side_edges[fid]:
                a, b = edges[se]
                if a != i and a != j and b != i and b != j:
                    out.add(se)
    else:
        raise ValueError(f"unknown area edge rule: {rule}")
    return sorted(out)


def area_quadric_for_edge(mesh: SimplicialComplex2, eid: int,
                          rule: str = "boundary", positions=None) -> Quadric:
    """Sum of area summands over the edge's one-ring boundary edges."""
    pos = mesh.positions if positions is None else positions
    axx = axy = axz = ayy = ayz = azz = qbx = qby = qbz = qc = 0.0
    for se in edge_one_ring_boundary_edges(mesh, eid, rule):
        a, b = mesh.edges[se]
        pa = pos[a]
        pb = pos[b]
        ax, ay, az = pa[0], pa[1], pa[2]
        bx_, by_, bz_ = pb[0], pb[1], pb[2]
        sx, sy, sz = bx_ - ax, by_ - ay, bz_ - az
        tx = ay * bz_ - az * by_
        ty = az * bx_ - ax * bz_
        tz = ax * by_ - ay * bx_
        ss = sx * sx + sy * sy + sz * sz
        axx += 0.5 * (ss - sx * sx)
        axy += -0.5 * sx * sy
        axz += -0.5 * sx * sz
        ayy += 0.5 * (ss - sy * sy)
        ayz += -0.5 * sy * sz
        azz += 0.5 * (ss - sz * sz)
        qbx += 0.5 * (ty * sz - tz * sy)
        qby += 0.5 * (tz * sx - tx * sz)
        qbz += 0.5 * (tx * sy - ty * sx)
        qc += 0.5 * (tx * tx + ty * ty + tz * tz)
    return Quadric(axx, axy, axz, ayy, ayz, azz, qbx, qby, qbz, qc)


def boundary_area_vertex_quadrics(mesh: SimplicialComplex2) -> list:
    """Per-vertex area quadrics for the accumulating ("memory") mode.

    Each boundary edge's summand is added to both of its endpoints, the
    usual way boundary constraint quadrics are accumulated.
    """
    nv = len(mesh.vertex_alive)
    out = [Quadric() for _ in range(nv)]
    for eid in mesh.live_edges():
        if len(mesh.star_edge_faces[eid]) == 1:
            a, b = mesh.edges[eid]
            q = area_quadric_summand(mesh.positions[a], mesh.positions[b])
            out[a] = out[a] + q
            out[b] = out[b] + q
    return out


def _symmetric_eigenvalues(axx, axy, axz, ayy, ayz, azz):
    """Eigenvalues of a symmetric 3x3 matrix, descending (trig formula)."""
    p1 = axy * axy + axz * axz + ayz * ayz
    if p1 == 0.0:
        e = sorted((axx, ayy, azz), reverse=True)
        return e[0], e[1], e[2]
    q = (axx + ayy + azz) / 3.0
    p2 = (axx - q) ** 2 + (ayy - q) ** 2 + (azz - q) ** 2 + 2.0 * p1
    p = math.sqrt(p2 / 6.0)
    inv = 1.0 / p
    b00 = (axx - q) * inv
    b11 = (ayy - q) * inv
    b22 = (azz - q) * inv
    b01 = axy * inv
    b02 = axz * inv
    b12 = ayz * inv
    detb = (
        b00 * (b11 * b22 - b12 * b12)
        - b01 * (b01 * b22 - b12 * b02)
        + b02 * (b01 * b12 - b11 * b02)
    )
    r = detb / 2.0
    r = min(1.0, max(-1.0, r))
    phi = math.acos(r) / 3.0
    e1 = q + 2.0 * p * math.cos(phi)
    e3 = q + 2.0 * p * math.cos(phi + 2.0 * math.pi / 3.0)
    e2 = 3.0 * q - e1 - e3
    return e1, e2, e3


def optimal_placement(q: Quadric, fallbacks=None, tikhonov_sigma: float = 0.0):
    """Minimize the quadric; returns (x_star, value).

    Well-conditioned systems (smallest eigenvalue magnitude at least
    1e-9 of the largest) are solved directly with one refinement step,
    and the solve is kept only if its refined residual is small against
    the system scale; rank-deficient or rejected ones use a truncated
    eigendecomposition seeded at the first fallback, projecting it onto
    the solution subspace.  The returned value never exceeds the
    quadric at any fallback.
    """
    fbs = [] if fallbacks is None else [
        (float(f[0]), float(f[1]), float(f[2])) for f in fallbacks
    ]
    axx, axy, axz = q.axx, q.axy, q.axz
    ayy, ayz, azz = q.ayy, q.ayz, q.azz
    if tikhonov_sigma:
        reg = tikhonov_sigma * tikhonov_sigma
        axx += reg
        ayy += reg
        azz += reg
    rx, ry, rz = -q.bx, -q.by, -q.bz
    e1, e2, e3 = _symmetric_eigenvalues(axx, axy, axz, ayy, ayz, azz)
    lmax = max(abs(e1), abs(e2), abs(e3))
    lmin = min(abs(e1), abs(e2), abs(e3))

    x = None
    if lmax > 0.0 and lmin >= CONDITION_THRESHOLD * lmax:
        det = (
            axx * (ayy * azz - ayz * ayz)
            - axy * (axy * azz - ayz * axz)
            + axz * (axy * ayz - ayy * axz)
        )
        if det != 0.0:
            # Adjugate columns give the inverse times det.
            i00 = ayy * azz - ayz * ayz
            i01 = axz * ayz - axy * azz
            i02 = axy * ayz - axz * ayy
            i11 = axx * azz - axz * axz
            i12 = axy * axz - axx * ayz
            i22 = axx * ayy - axy * axy
            inv = 1.0 / det
            sx = (i00 * rx + i01 * ry + i02 * rz) * inv
            sy = (i01 * rx + i11 * ry + i12 * rz) * inv
            sz = (i02 * rx + i12 * ry + i22 * rz) * inv
            # One iterative refinement step knocks the residual down.
            dx = rx - (axx * sx + axy * sy + axz * sz)
            dy = ry - (axy * sx + ayy * sy + ayz * sz)
            dz = rz - (axz * sx + ayz * sy + azz * sz)
            sx += (i00 * dx + i01 * dy + i02 * dz) * inv
            sy += (i01 * dx + i11 * dy + i12 * dz) * inv
            sz += (i02 * dx + i12 * dy + i22 * dz) * inv
            # The closed-form eigenvalues carry sqrt(eps)-level error
            # near multiple roots, so the gate can pass a numerically
            # singular matrix.  Trust the residual, not the gate.
            d2x = rx - (axx * sx + axy * sy + axz * sz)
            d2y = ry - (axy * sx + ayy * sy + ayz * sz)
            d2z = rz - (axz * sx + ayz * sy + azz * sz)
            resid = max(abs(d2x), abs(d2y), abs(d2z))
            scale = max(abs(rx), abs(ry), abs(rz),
                        lmax * max(abs(sx), abs(sy), abs(sz)))
            if (math.isfinite(sx) and math.isfinite(sy) and math.isfinite(sz)
                    and resid <= CONDITION_THRESHOLD * scale):
                x = (sx, sy, sz)
    if x is None and lmax > 0.0:
        seed = fbs[0] if fbs else (0.0, 0.0, 0.0)
        a_mat = np.array([[axx, axy, axz], [axy, ayy, ayz], [axz, ayz, azz]])
        w, vecs = np.linalg.eigh(a_mat)
        thresh = CONDITION_THRESHOLD * max(abs(float(w[0])), abs(float(w[2])))
        m = np.array(seed)
        r = np.array([rx, ry, rz]) - a_mat @ m
        sol = m.copy()
        for k in range(3):
            wk = float(w[k])
            if abs(wk) >= thresh and thresh > 0.0:
                vk = vecs[:, k]
                sol = sol + vk * (float(vk @ r) / wk)
        if np.isfinite(sol).all():
            x = (float(sol[0]), float(sol[1]), float(sol[2]))
    if x is None:
        # Zero matrix: the quadric is constant (b is in A's range for
        # any sum of plane/area quadrics), so any fallback does.
        x = fbs[0] if fbs else (0.0, 0.0, 0.0)

    best_x = x
    best_v = q.evaluate(x)
    for f in fbs:
        v = q.evaluate(f)
        if v < best_v:
            best_v = v
            best_x = f
    return np.array(best_x), best_v
