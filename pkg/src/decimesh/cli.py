"""Command-line front end: simplify meshes, compare meshes.

Exit codes: 0 success, 1 on I/O or parse failure, 2 when simplify
ends before reaching its face target.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

from .build import DEFAULT_EPS_REL, DEFAULT_VIRTUAL_EDGE_CAP, build_complex
from .decimate import DecimationConfig, decimate
from .metrics import (
    DEFAULT_METRIC_SAMPLES,
    ColoredSurface,
    chamfer_ms,
    hausdorff,
    texture_chamfer,
)
from .meshio import load_mesh, save_mesh
from .texture import (
    DEFAULT_ATLAS_MAX,
    DEFAULT_GUTTER,
    DEFAULT_SAMPLES_PER_EDGE,
    save_mesh_colors,
    transfer_texture,
)

REPORT_SCHEMA = 1


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="decimesh",
        description="Robust simplification for triangle meshes in the wild.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simplify", help="decimate a mesh, optionally rebaking its texture")
    p.add_argument("input")
    p.add_argument("-o", "--output", required=True)
    target = p.add_mutually_exclusive_group()
    target.add_argument("--target-faces", type=int, default=None)
    target.add_argument("--ratio", type=float, default=None)
    p.add_argument("--epsilon-rel", type=float, default=DEFAULT_EPS_REL,
                   help="virtual-edge distance threshold, fraction of bbox diagonal")
    p.add_argument("--virtual-edge-cap", type=int, default=DEFAULT_VIRTUAL_EDGE_CAP)
    p.add_argument("--area-weight", type=float, default=1.0)
    p.add_argument("--edge-acc", choices=("memory", "memoryless"), default="memory")
    p.add_argument("--area-acc", choices=("memory", "memoryless"), default="memoryless")
    p.add_argument("--area-edge-rule", choices=("boundary", "link"), default="boundary")
    p.add_argument("--no-virtual-edges", action="store_true")
    p.add_argument("--preserve-topology", action="store_true")
    p.add_argument("--weld-eps", type=float, default=0.0)
    p.add_argument("--texture", action="store_true",
                   help="transfer colors and bake a fresh atlas")
    p.add_argument("--samples-per-edge", type=int, default=DEFAULT_SAMPLES_PER_EDGE)
    p.add_argument("--gutter", type=int, default=DEFAULT_GUTTER)
    p.add_argument("--atlas-max", type=int, default=DEFAULT_ATLAS_MAX)
    p.add_argument("--mesh-colors", default=None,
                   help="also dump raw per-face sample colors to this path")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--report", default=None, help="write a JSON run report here")
    p.add_argument("--verbose", action="store_true")

    m = sub.add_parser("metrics", help="compare two meshes")
    m.add_argument("input_a")
    m.add_argument("input_b")
    m.add_argument("--samples", type=int, default=DEFAULT_METRIC_SAMPLES)
    m.add_argument("--seed", type=int, default=0)
    m.add_argument("--normalize", action="store_true",
                   help="divide distances by the union bbox diagonal")
    m.add_argument("--weld-eps", type=float, default=0.0)
    m.add_argument("--report", default=None)
    m.add_argument("--verbose", action="store_true")
    return parser


def _dump_report(report: dict, path: str | None, to_stdout: bool) -> None:
    text = json.dumps(report, indent=2, sort_keys=True)
    if to_stdout:
        print(text)
    if path:
        with open(path, "w") as fh:
            fh.write(text + "\n")


def run_simplify(args) -> int:
    try:
        raw = load_mesh(args.input)
        mesh = build_complex(raw, weld_eps=args.weld_eps)
    except (OSError, ValueError) as exc:
        print(f"decimesh: {exc}", file=sys.stderr)
        return 1
    cfg = DecimationConfig(
        target_face_count=args.target_faces,
        target_ratio=args.ratio,
        eps_rel=args.epsilon_rel,
        virtual_edge_cap=args.virtual_edge_cap,
        area_weight=args.area_weight,
        edge_quadric_mode=args.edge_acc,
        area_quadric_mode=args.area_acc,
        area_edge_rule=args.area_edge_rule,
        enable_virtual_edges=not args.no_virtual_edges,
        preserve_topology=args.preserve_topology,
        seed=args.seed,
    )
    try:
        cfg.check()
    except ValueError as exc:
        print(f"decimesh: {exc}", file=sys.stderr)
        return 1

    input_faces = mesh.n_live_faces
    input_vertices = mesh.n_live_vertices
    target = cfg.resolve_target(input_faces)
    result = decimate(mesh, cfg)

    texture_stats = None
    uvs = None
    atlas = None
    t_tex0 = time.perf_counter()
    if args.texture:
        layout, atlas, uvs, samples, texture_stats = transfer_texture(
            mesh, result.history, raw,
            r=args.samples_per_edge, gutter=args.gutter, atlas_max=args.atlas_max)
        texture_stats["atlas_size"] = [layout.width, layout.height]
    result.timings["texture"] = time.perf_counter() - t_tex0 if args.texture else 0.0

    compact, _, _, f_old = mesh.compacted()
    try:
        save_mesh(compact, args.output, uvs=uvs, texture=atlas)
    except (OSError, ValueError) as exc:
        print(f"decimesh: {exc}", file=sys.stderr)
        return 1
    if args.texture and args.mesh_colors:
        compact_of = {int(old): new for new, old in enumerate(f_old)}
        save_mesh_colors(args.mesh_colors, samples, args.samples_per_edge,
                         face_id_map=compact_of)

    report = {
        "schema": REPORT_SCHEMA,
        "command": "simplify",
        "input": args.input,
        "output": args.output,
        "input_faces": input_faces,
        "input_vertices": input_vertices,
        "output_faces": mesh.n_live_faces,
        "output_vertices": mesh.n_live_vertices,
        "target_faces": target,
        "target_reached": result.target_reached,
        "n_collapses": result.n_collapses,
        "n_virtual_edges": result.n_virtual_edges,
        "dropped_degenerate_faces": mesh.n_degenerate_faces,
        "dropped_duplicate_faces": mesh.n_duplicate_faces,
        "timings": result.timings,
        "texture": texture_stats,
        "config": {
            "target_faces": args.target_faces,
            "ratio": args.ratio,
            "epsilon_rel": args.epsilon_rel,
            "virtual_edge_cap": args.virtual_edge_cap,
            "area_weight": args.area_weight,
            "edge_acc": args.edge_acc,
            "area_acc": args.area_acc,
            "area_edge_rule": args.area_edge_rule,
            "virtual_edges": not args.no_virtual_edges,
            "preserve_topology": args.preserve_topology,
            "weld_eps": args.weld_eps,
            "texture": args.texture,
            "samples_per_edge": args.samples_per_edge,
            "gutter": args.gutter,
            "atlas_max": args.atlas_max,
            "seed": args.seed,
        },
    }
    _dump_report(report, args.report, to_stdout=args.verbose)
    if not args.verbose:
        print(f"{args.input}: {input_faces} -> {mesh.n_live_faces} faces "
              f"(target {target})")
    return 0 if result.target_reached else 2


def run_metrics(args) -> int:
    try:
        raw_a = load_mesh(args.input_a)
        raw_b = load_mesh(args.input_b)
        surf_a = ColoredSurface.from_raw(raw_a, weld_eps=args.weld_eps)
        surf_b = ColoredSurface.from_raw(raw_b, weld_eps=args.weld_eps)
    except (OSError, ValueError) as exc:
        print(f"decimesh: {exc}", file=sys.stderr)
        return 1
    tex = None
    if surf_a.has_colors and surf_b.has_colors:
        tex = texture_chamfer(surf_a, surf_b, n=args.samples, seed=args.seed)
    report = {
        "schema": REPORT_SCHEMA,
        "command": "metrics",
        "input_a": args.input_a,
        "input_b": args.input_b,
        "hausdorff": hausdorff(surf_a.mesh, surf_b.mesh, n=args.samples,
                               seed=args.seed, normalize=args.normalize),
        "chamfer_ms": chamfer_ms(surf_a.mesh, surf_b.mesh, n=args.samples,
                                 seed=args.seed, normalize=args.normalize),
        "texture_chamfer": tex,
        "N": args.samples,
        "seed": args.seed,
        "normalization": "unit_diagonal" if args.normalize else "none",
    }
    _dump_report(report, args.report, to_stdout=True)
    return 0


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    if args.command == "simplify":
        return run_simplify(args)
    return run_metrics(args)


if __name__ == "__main__":
    sys.exit(main())
