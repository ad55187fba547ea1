"""Build a simplicial 2-complex from a raw mesh.

Welds duplicate vertices, extracts physical edges, labels connected
components, and constructs virtual edges between nearby faces of
different components via triangle-to-triangle distances.
"""

from __future__ import annotations

import numpy as np

from .bvh import Bvh
from .core import PHYSICAL, VIRTUAL, SimplicialComplex2
from .geom import triangle_triangle_distance
from .meshio import RawMesh

DEFAULT_EPS_REL = 1e-3
DEFAULT_VIRTUAL_EDGE_CAP = 32


class UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        parent = self.parent
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            # Lower index wins so representatives are deterministic.
            if ra < rb:
                self.parent[rb] = ra
            else:
                self.parent[ra] = rb


def weld_vertices(positions, eps: float = 0.0):
    """Map duplicate vertices to representatives.

    Returns (vertex_map, representatives): vertex_map[i] is the index
    each input vertex welds to; representatives is the sorted list of
    surviving input indices.  eps = 0 welds exact duplicates only;
    eps > 0 welds transitively any pair within Euclidean distance eps
    (grid hash + union-find).  The representative of a weld group is
    its lowest input index and keeps its own position.
    """
    positions = np.asarray(positions, dtype=np.float64).reshape(-1, 3)
    n = len(positions)
    if eps < 0:
        raise ValueError("weld eps must be >= 0")
    if n == 0:
        return np.zeros(0, dtype=np.int64), []
    if eps == 0.0:
        seen: dict = {}
        vmap = np.empty(n, dtype=np.int64)
        for i in range(n):
            key = (positions[i, 0], positions[i, 1], positions[i, 2])
            first = seen.setdefault(key, i)
            vmap[i] = first
    else:
        uf = UnionFind(n)
        cell = eps
        grid: dict = {}
        keys = np.floor(positions / cell).astype(np.int64)
        for i in range(n):
            grid.setdefault((keys[i, 0], keys[i, 1], keys[i, 2]), []).append(i)
        eps2 = eps * eps
        for i in range(n):
            kx, ky, kz = keys[i]
            px, py, pz = positions[i]
            for dx in (-1, 0, 1):
                for dy in (-1, 0, 1):
                    for dz in (-1, 0, 1):
                        for j in grid.get((kx + dx, ky + dy, kz + dz), ()):
                            if j <= i:
                                continue
                            d = positions[j]
                            if (d[0] - px) ** 2 + (d[1] - py) ** 2 + (d[2] - pz) ** 2 <= eps2:
                                uf.union(i, j)
        vmap = np.array([uf.find(i) for i in range(n)], dtype=np.int64)
    reps = sorted(set(int(v) for v in vmap))
    return vmap, reps


def build_complex(raw: RawMesh, weld_eps: float = 0.0) -> SimplicialComplex2:
    """Raw mesh to simplicial 2-complex.

    Vertices within weld_eps collapse to one; physical edges come from
    face sides (plus any explicit line records); degenerate and
    duplicate faces are dropped and counted on the returned complex as
    ``n_degenerate_faces`` / ``n_duplicate_faces``.
    """
    if len(raw.faces) == 0:
        raise ValueError("nothing to simplify: mesh has no faces")
    vmap, reps = weld_vertices(raw.positions, weld_eps)
    new_index = {rep: k for k, rep in enumerate(reps)}
    mesh = SimplicialComplex2.with_positions(
        raw.positions[reps], sources=list(reps)
    )
    n_degenerate = 0
    n_duplicate = 0
    for fid in range(len(raw.faces)):
        a, b, c = raw.faces[fid]
        a = new_index[int(vmap[a])]
        b = new_index[int(vmap[b])]
        c = new_index[int(vmap[c])]
        if a == b or b == c or a == c:
            n_degenerate += 1
            continue
        key = tuple(sorted((a, b, c)))
        if key in mesh.face_map:
            n_duplicate += 1
            continue
        mesh.add_face(a, b, c, source=fid)
    for i, j in raw.lines:
        a = new_index[int(vmap[i])]
        b = new_index[int(vmap[j])]
        if a != b and mesh.edge_id(a, b) is None:
            mesh.add_edge(a, b, PHYSICAL)
    if mesh.n_live_faces == 0:
        raise ValueError("nothing to simplify: all faces degenerate or duplicate")
    mesh.n_degenerate_faces = n_degenerate
    mesh.n_duplicate_faces = n_duplicate
    return mesh


def connected_components(mesh: SimplicialComplex2, include_virtual: bool = False):
    """Per-vertex component labels from union-find over edges.

    Physical edges only by default.  Labels are the component's lowest
    vertex id.  Dead vertices keep their own id as a label.
    """
    n = len(mesh.vertex_alive)
    uf = UnionFind(n)
    for eid in mesh.live_edges():
        if include_virtual or mesh.edge_kind[eid] == PHYSICAL:
            i, j = mesh.edges[eid]
            uf.union(i, j)
    return np.array([uf.find(i) for i in range(n)], dtype=np.int64)


def triangle_distance_between_faces(mesh: SimplicialComplex2, f1: int, f2: int):
    """Distance between two live faces and its realizing points."""
    return triangle_triangle_distance(mesh.face_points(f1), mesh.face_points(f2))


def _nearest_face_vertex(mesh, fid, point):
    """Face corner nearest to a point; ties go to the lowest index."""
    a, b, c = mesh.faces[fid]
    px, py, pz = float(point[0]), float(point[1]), float(point[2])
    best_v = -1
    best_d = None
    for v in sorted((a, b, c)):
        p = mesh.positions[v]
        d = (p[0] - px) ** 2 + (p[1] - py) ** 2 + (p[2] - pz) ** 2
        if best_d is None or d < best_d:
            best_d = d
            best_v = v
    return best_v


def candidate_virtual_pairs_brute(mesh, labels, eps: float):
    """O(F^2) reference enumeration of qualifying face pairs."""
    fids = sorted(mesh.live_faces())
    out = []
    for i in range(len(fids)):
        fa = fids[i]
        la = labels[mesh.faces[fa][0]]
        for j in range(i + 1, len(fids)):
            fb = fids[j]
            if labels[mesh.faces[fb][0]] == la:
                continue
            dist, p1, p2 = triangle_distance_between_faces(mesh, fa, fb)
            if dist <= eps:
                out.append((dist, fa, fb, p1, p2))
    return out


def candidate_virtual_pairs_bvh(mesh, labels, eps: float):
    """BVH-accelerated enumeration; same result set as brute force."""
    fids = sorted(mesh.live_faces())
    tri = np.stack([mesh.face_points(f) for f in fids])
    face_labels = np.array([labels[mesh.faces[f][0]] for f in fids], dtype=np.int64)
    tree = Bvh(tri, face_ids=np.asarray(fids, dtype=np.int64), labels=face_labels)
    out = []
    for ia, ib in tree.cross_component_pairs(eps):
        fa, fb = fids[ia], fids[ib]
        if fa > fb:
            fa, fb = fb, fa
        dist, p1, p2 = triangle_distance_between_faces(mesh, fa, fb)
        if dist <= eps:
            out.append((dist, fa, fb, p1, p2))
    return out


def select_virtual_edges(mesh, labels, candidates, cap: int = DEFAULT_VIRTUAL_EDGE_CAP):
    """Turn qualifying face pairs into a deduplicated vertex-pair list.

    One vertex pair per face pair: the corner of each face nearest the
    realizing closest points.  Pairs already connected by any live edge
    are skipped; duplicates keep their nearest-distance instance; a cap
    per vertex lets nearest edges win.  Deterministic: candidates are
    processed sorted by (distance, vertex pair, face pair).
    """
    picked = []
    for dist, fa, fb, p1, p2 in candidates:
        va = _nearest_face_vertex(mesh, fa, p1)
        vb = _nearest_face_vertex(mesh, fb, p2)
        if va == vb:
            continue
        i, j = (va, vb) if va < vb else (vb, va)
        picked.append((dist, i, j, fa, fb))
    picked.sort(key=lambda t: (t[0], t[1], t[2], t[3], t[4]))
    degree: dict = {}
    seen_pairs: set = set()
    out = []
    for dist, i, j, fa, fb in picked:
        if (i, j) in seen_pairs:
            continue
        seen_pairs.add((i, j))
        if labels[i] == labels[j]:
            continue
        if mesh.edge_id(i, j) is not None:
            continue
        if degree.get(i, 0) >= cap or degree.get(j, 0) >= cap:
            continue
        degree[i] = degree.get(i, 0) + 1
        degree[j] = degree.get(j, 0) + 1
        out.append((i, j))
    return out


def build_virtual_edges(mesh: SimplicialComplex2, labels, eps: float,
                        cap: int = DEFAULT_VIRTUAL_EDGE_CAP,
                        brute_force: bool = False) -> list:
    """Add virtual edges between components; returns the new edge ids.

    For every pair of faces from different components whose triangle
    distance is at most eps, the corner of each face nearest the
    realizing points is selected and the pair is connected by a virtual
    edge, subject to deduplication and the per-vertex cap.
    """
    if eps <= 0:
        raise ValueError("virtual edge eps must be > 0")
    if mesh.n_live_faces == 0:
        return []
    enumerate_pairs = (
        candidate_virtual_pairs_brute if brute_force else candidate_virtual_pairs_bvh
    )
    candidates = enumerate_pairs(mesh, labels, eps)
    pairs = select_virtual_edges(mesh, labels, candidates, cap=cap)
    return [mesh.add_edge(i, j, VIRTUAL) for i, j in pairs]
