"""Greedy vertex-pair collapse decimation.

Edges are prioritized by a hybrid metric: an accumulating ("memory")
edge quadric plus a weighted area quadric recomputed from the current
mesh ("memoryless").  Collapses rewrite incident simplices, remove
degenerates and duplicates, and append reversible records so the
sequence can be replayed in either direction.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from heapq import heapify, heappop, heappush

from .build import (
    DEFAULT_EPS_REL,
    DEFAULT_VIRTUAL_EDGE_CAP,
    build_virtual_edges,
    connected_components,
)
from .core import PHYSICAL, CollapseRecord, SimplicialComplex2, _face_key
from .quadrics import (
    EdgeCost,
    all_vertex_quadrics,
    area_quadric_for_edge,
    boundary_area_vertex_quadrics,
    optimal_placement,
    vertex_quadric,
)


@dataclass
class DecimationConfig:
    """Knobs for one decimation run.

    Exactly one of target_face_count / target_ratio picks the stopping
    point.  Accumulation modes: "memory" carries summed quadrics through
    collapses, "memoryless" recomputes from the current mesh.
    """

    target_face_count: int | None = None
    target_ratio: float | None = None
    eps_rel: float = DEFAULT_EPS_REL
    virtual_edge_cap: int = DEFAULT_VIRTUAL_EDGE_CAP
    area_weight: float = 1.0
    edge_quadric_mode: str = "memory"
    area_quadric_mode: str = "memoryless"
    area_edge_rule: str = "boundary"
    enable_virtual_edges: bool = True
    preserve_topology: bool = False
    record_history: bool = True
    debug_validate: bool = False
    seed: int = 0
    tikhonov_sigma: float = 0.0

    def check(self) -> None:
        if self.target_face_count is not None and self.target_ratio is not None:
            raise ValueError("set either target_face_count or target_ratio, not both")
        if self.target_face_count is not None and self.target_face_count < 0:
            raise ValueError("target_face_count must be >= 0")
        if self.target_ratio is not None and not (0.0 <= self.target_ratio <= 1.0):
            raise ValueError("target_ratio must be in [0, 1]")
        if self.area_weight < 0:
            raise ValueError("area_weight must be >= 0")
        for mode in (self.edge_quadric_mode, self.area_quadric_mode):
            if mode not in ("memory", "memoryless"):
                raise ValueError(f"unknown accumulation mode: {mode}")
        if self.area_edge_rule not in ("boundary", "link"):
            raise ValueError(f"unknown area edge rule: {self.area_edge_rule}")

    def resolve_target(self, n_faces: int) -> int:
        if self.target_face_count is not None:
            return self.target_face_count
        ratio = 0.1 if self.target_ratio is None else self.target_ratio
        return int(n_faces * ratio)


@dataclass
class DecimationResult:
    mesh: SimplicialComplex2
    history: list = field(default_factory=list)
    cost_log: list = field(default_factory=list)
    target_reached: bool = True
    n_collapses: int = 0
    n_virtual_edges: int = 0
    timings: dict = field(default_factory=dict)


def collapse_edge(mesh: SimplicialComplex2, eid: int, position) -> CollapseRecord:
    """Collapse the edge's vertex pair into its lower-id endpoint.

    The survivor moves to ``position``; every edge and face touching
    the removed vertex is rewritten, degenerates are deleted, and
    duplicates merge (a merged edge stays physical if either copy
    was).  Dead edges raise; stale queue entries are the caller's
    problem.  Returns a record that vertex_split inverts exactly.
    """
    if not mesh.edge_alive[eid]:
        raise ValueError(f"edge {eid} is not alive")
    i, j = mesh.edges[eid]
    pos = mesh.positions
    record = CollapseRecord(
        edge_id=eid,
        vertex_kept=i,
        vertex_removed=j,
        position_kept_before=(float(pos[i, 0]), float(pos[i, 1]), float(pos[i, 2])),
        position_removed_before=(float(pos[j, 0]), float(pos[j, 1]), float(pos[j, 2])),
        position_after=(float(position[0]), float(position[1]), float(position[2])),
    )
    faces_j = sorted(mesh.star_vertex_faces[j])
    edges_j = sorted(mesh.star_vertex_edges[j])
    edge_snaps = record.edge_snaps
    face_snaps = record.face_snaps
    for e in edges_j:
        edge_snaps.append((e, mesh.edges[e], mesh.edge_kind[e]))
    for f in faces_j:
        face_snaps.append((f, mesh.faces[f]))

    # Faces go offline while the edge map is still intact, then edges.
    for f in faces_j:
        mesh._unregister_face(f)
    for e in edges_j:
        mesh._unregister_edge(e)

    edge_map = mesh.edge_map
    for e in edges_j:
        a, b = mesh.edges[e]
        k = a if b == j else b
        if k == i:
            # The collapsed edge itself.
            mesh.edge_alive[e] = False
            mesh.n_live_edges -= 1
            continue
        key = (i, k) if i < k else (k, i)
        existing = edge_map.get(key)
        if existing is not None:
            # Merge into the surviving edge; it dies holding its old tuple.
            mesh.edge_alive[e] = False
            mesh.n_live_edges -= 1
            if mesh.edge_kind[e] == PHYSICAL and mesh.edge_kind[existing] != PHYSICAL:
                edge_snaps.append((existing, mesh.edges[existing], mesh.edge_kind[existing]))
                mesh.edge_kind[existing] = PHYSICAL
        else:
            mesh.edges[e] = key
            mesh._register_edge(e)

    face_map = mesh.face_map
    for f in faces_j:
        a, b, c = mesh.faces[f]
        ra = i if a == j else a
        rb = i if b == j else b
        rc = i if c == j else c
        if ra == rb or rb == rc or ra == rc:
            mesh.face_alive[f] = False
            mesh.n_live_faces -= 1
            continue
        if _face_key(ra, rb, rc) in face_map:
            mesh.face_alive[f] = False
            mesh.n_live_faces -= 1
            continue
        mesh.faces[f] = (ra, rb, rc)
        mesh._register_face(f)

    mesh.vertex_alive[j] = False
    mesh.n_live_vertices -= 1
    pos[i] = record.position_after
    return record


def vertex_split(mesh: SimplicialComplex2, record: CollapseRecord) -> None:
    """Undo one collapse, restoring connectivity and positions exactly."""
    j = record.vertex_removed
    if mesh.vertex_alive[j]:
        raise ValueError("record does not match the mesh state")
    for f, _ in record.face_snaps:
        if mesh.face_alive[f]:
            mesh._unregister_face(f)
    for e, _, _ in record.edge_snaps:
        if mesh.edge_alive[e]:
            mesh._unregister_edge(e)
    for e, tup, kind in record.edge_snaps:
        if not mesh.edge_alive[e]:
            mesh.edge_alive[e] = True
            mesh.n_live_edges += 1
        mesh.edges[e] = tup
        mesh.edge_kind[e] = kind
    for f, tup in record.face_snaps:
        if not mesh.face_alive[f]:
            mesh.face_alive[f] = True
            mesh.n_live_faces += 1
        mesh.faces[f] = tup
    for e, _, _ in record.edge_snaps:
        mesh._register_edge(e)
    for f, _ in record.face_snaps:
        mesh._register_face(f)
    mesh.vertex_alive[j] = True
    mesh.n_live_vertices += 1
    mesh.positions[record.vertex_kept] = record.position_kept_before
    mesh.positions[j] = record.position_removed_before


def replay(mesh: SimplicialComplex2, history) -> None:
    """Apply a collapse history forward."""
    for rec in history:
        collapse_edge(mesh, rec.edge_id, rec.position_after)


def _triangle_normal_scalar(pa, pb, pc):
    e1x, e1y, e1z = pb[0] - pa[0], pb[1] - pa[1], pb[2] - pa[2]
    e2x, e2y, e2z = pc[0] - pa[0], pc[1] - pa[1], pc[2] - pa[2]
    nx = e1y * e2z - e1z * e2y
    ny = e1z * e2x - e1x * e2z
    nz = e1x * e2y - e1y * e2x
    return nx, ny, nz


def collapse_allowed(mesh: SimplicialComplex2, eid: int, position, positions=None) -> bool:
    """Topology-preserving validity: link condition plus flip rejection.

    Virtual-edge collapses are rejected outright (they merge
    components).  The link condition compares the common edge-neighbor
    vertices of the endpoints against the apex set of the edge's faces,
    and rejects any shared link edge: a pair (a, b) carrying faces with
    both endpoints.  Finally, surviving incident faces must not rotate
    their normal by more than 90 degrees when the survivor moves.
    """
    pos = mesh.positions if positions is None else positions
    if mesh.edge_kind[eid] != PHYSICAL:
        return False
    i, j = mesh.edges[eid]
    edges = mesh.edges
    ni = {edges[e][0] if edges[e][1] == i else edges[e][1]
          for e in mesh.star_vertex_edges[i]}
    nj = {edges[e][0] if edges[e][1] == j else edges[e][1]
          for e in mesh.star_vertex_edges[j]}
    apexes = set()
    for f in mesh.star_edge_faces[eid]:
        for v in mesh.faces[f]:
            if v != i and v != j:
                apexes.add(v)
    if (ni & nj) - {i, j} != apexes:
        return False
    for f in mesh.star_vertex_faces[i]:
        a, b, c = mesh.faces[f]
        if a == j or b == j or c == j:
            continue
        u, v = [w for w in (a, b, c) if w != i]
        if _face_key(j, u, v) in mesh.face_map:
            return False
    x = (float(position[0]), float(position[1]), float(position[2]))
    for keep, other in ((i, j), (j, i)):
        for f in mesh.star_vertex_faces[keep]:
            a, b, c = mesh.faces[f]
            if a == other or b == other or c == other:
                continue
            pa, pb, pc = pos[a], pos[b], pos[c]
            n0 = _triangle_normal_scalar(pa, pb, pc)
            moved = [pa, pb, pc]
            moved[(a, b, c).index(keep)] = x
            n1 = _triangle_normal_scalar(moved[0], moved[1], moved[2])
            if n0[0] * n1[0] + n0[1] * n1[1] + n0[2] * n1[2] < 0.0:
                return False
    return True


def edge_cost(mesh: SimplicialComplex2, vertex_quadrics, eid: int,
              cfg: DecimationConfig, area_vertex_quadrics=None,
              positions=None, generation: int = 0) -> EdgeCost:
    """Hybrid cost of collapsing one edge.

    Edge quadric: stored per-vertex sums in memory mode, fresh one-ring
    recomputation in memoryless mode.  Area quadric: recomputed from
    the current mesh in memoryless mode (the default), stored
    per-vertex sums in memory mode.  The combined quadric is minimized
    jointly; negative floating-point noise clamps to zero.
    """
    pos = mesh.positions if positions is None else positions
    i, j = mesh.edges[eid]
    if cfg.edge_quadric_mode == "memory":
        q = vertex_quadrics[i] + vertex_quadrics[j]
    else:
        q = vertex_quadric(mesh, i, pos) + vertex_quadric(mesh, j, pos)
    lam = cfg.area_weight
    if lam > 0.0:
        if cfg.area_quadric_mode == "memoryless":
            qa = area_quadric_for_edge(mesh, eid, cfg.area_edge_rule, pos)
        else:
            qa = area_vertex_quadrics[i] + area_vertex_quadrics[j]
        q = q + (qa if lam == 1.0 else qa.scaled(lam))
    pi = pos[i]
    pj = pos[j]
    fallbacks = (
        (0.5 * (pi[0] + pj[0]), 0.5 * (pi[1] + pj[1]), 0.5 * (pi[2] + pj[2])),
        (pi[0], pi[1], pi[2]),
        (pj[0], pj[1], pj[2]),
    )
    x, value = optimal_placement(q, fallbacks, cfg.tikhonov_sigma)
    cost = value if value > 0.0 else 0.0
    return EdgeCost(eid, cost, (float(x[0]), float(x[1]), float(x[2])), generation)


def update_quadrics_after_collapse(vertex_quadrics, record: CollapseRecord,
                                   cfg: DecimationConfig,
                                   mesh: SimplicialComplex2 | None = None,
                                   area_vertex_quadrics=None) -> None:
    """Refresh stored quadrics for the surviving vertex."""
    i = record.vertex_kept
    j = record.vertex_removed
    if cfg.edge_quadric_mode == "memory":
        vertex_quadrics[i] = vertex_quadrics[i] + vertex_quadrics[j]
    else:
        vertex_quadrics[i] = vertex_quadric(mesh, i)
    if area_vertex_quadrics is not None and cfg.area_quadric_mode == "memory":
        area_vertex_quadrics[i] = area_vertex_quadrics[i] + area_vertex_quadrics[j]


def decimate(mesh: SimplicialComplex2, cfg: DecimationConfig | None = None) -> DecimationResult:
    """Run the greedy collapse loop in place.

    Builds virtual edges (unless disabled), seeds the lazy priority
    queue with every live edge, then pops the cheapest collapse until
    the face target is met or the queue runs dry.  Returns the mutated
    mesh plus history, per-collapse costs, and per-phase timings.
    """
    cfg = cfg or DecimationConfig()
    cfg.check()
    timings = {"virtual_edges": 0.0, "collapses": 0.0}
    n_virtual = 0
    if cfg.enable_virtual_edges:
        t0 = time.perf_counter()
        labels = connected_components(mesh)
        eps = cfg.eps_rel * mesh.bbox_diagonal()
        if eps > 0.0:
            n_virtual = len(build_virtual_edges(mesh, labels, eps,
                                                cap=cfg.virtual_edge_cap))
        timings["virtual_edges"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    target = cfg.resolve_target(mesh.n_live_faces)
    pos_list = mesh.positions.tolist()
    lam = cfg.area_weight
    memory_edge = cfg.edge_quadric_mode == "memory"
    memoryless_area = cfg.area_quadric_mode == "memoryless"
    vqs = all_vertex_quadrics(mesh) if memory_edge else None
    area_vqs = None
    if lam > 0.0 and not memoryless_area:
        area_vqs = boundary_area_vertex_quadrics(mesh)
    # Stale queue entries are invalidated by generation counters; in
    # modes with memoryless terms a popped entry is additionally
    # re-verified against a fresh recomputation, so the cost actually
    # used is always a function of the current mesh.
    revalidate = (lam > 0.0 and memoryless_area) or not memory_edge
    track_status = lam > 0.0 and memoryless_area

    gen = [0] * len(mesh.edges)
    heap = []
    for eid in mesh.live_edges():
        ec = edge_cost(mesh, vqs, eid, cfg, area_vqs, pos_list)
        heap.append((ec.cost, eid, 0, ec.position))
    heapify(heap)

    history: list = []
    cost_log: list = []
    n_collapses = 0
    sve = mesh.star_vertex_edges
    svf = mesh.star_vertex_faces
    sef = mesh.star_edge_faces
    edges = mesh.edges

    while mesh.n_live_faces > target and heap:
        cost, eid, g, xpos = heappop(heap)
        if g != gen[eid] or not mesh.edge_alive[eid]:
            continue
        if revalidate:
            ec = edge_cost(mesh, vqs, eid, cfg, area_vqs, pos_list)
            if ec.cost != cost or ec.position != xpos:
                gen[eid] += 1
                heappush(heap, (ec.cost, eid, gen[eid], ec.position))
                continue
        if cfg.preserve_topology and not collapse_allowed(mesh, eid, xpos, pos_list):
            continue
        i, j = edges[eid]
        status_before = None
        if track_status:
            status_before = {}
            for f in svf[j]:
                for se in mesh.face_side_edges[f]:
                    a, b = edges[se]
                    if a != i and a != j and b != i and b != j:
                        status_before[se] = len(sef[se]) == 1
        record = collapse_edge(mesh, eid, xpos)
        pos_list[i] = list(record.position_after)
        if memory_edge:
            vqs[i] = vqs[i] + vqs[j]
        if area_vqs is not None:
            area_vqs[i] = area_vqs[i] + area_vqs[j]
        cost_log.append(cost)
        n_collapses += 1
        if cfg.record_history:
            history.append(record)
        if cfg.debug_validate:
            mesh.validate()

        recost = set(sve[i])
        if status_before:
            for se, was_boundary in status_before.items():
                if not mesh.edge_alive[se]:
                    continue
                if (len(sef[se]) == 1) != was_boundary:
                    a, b = edges[se]
                    recost |= sve[a]
                    recost |= sve[b]
                    for f in sef[se]:
                        for v in mesh.faces[f]:
                            if v != a and v != b:
                                recost |= sve[v]
        for e in sorted(recost):
            if not mesh.edge_alive[e]:
                continue
            gen[e] += 1
            ec = edge_cost(mesh, vqs, e, cfg, area_vqs, pos_list)
            heappush(heap, (ec.cost, e, gen[e], ec.position))

    timings["collapses"] = time.perf_counter() - t0
    return DecimationResult(
        mesh=mesh,
        history=history,
        cost_log=cost_log,
        target_reached=mesh.n_live_faces <= target,
        n_collapses=n_collapses,
        n_virtual_edges=n_virtual,
        timings=timings,
    )
