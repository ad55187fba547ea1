"""decimesh: robust simplification for triangle meshes in the wild.

Decimates arbitrary triangle soups (non-manifold, multi-component,
textured) as simplicial 2-complexes: vertex-pair collapses ordered by
a hybrid quadric metric, virtual edges that let nearby components
merge, and texture transfer onto the simplified mesh through the
collapse history.
"""

from .build import (
    build_complex,
    build_virtual_edges,
    connected_components,
    weld_vertices,
)
from .core import (
    PHYSICAL,
    VIRTUAL,
    CollapseRecord,
    Quadric,
    SimplicialComplex2,
)
from .decimate import (
    DecimationConfig,
    DecimationResult,
    collapse_allowed,
    collapse_edge,
    decimate,
    edge_cost,
    replay,
    update_quadrics_after_collapse,
    vertex_split,
)
from .metrics import (
    ColoredSurface,
    PointCloudSample,
    chamfer_ms,
    hausdorff,
    sample_surface,
    texture_chamfer,
)
from .meshio import RawMesh, TextureImage, load_mesh, save_mesh, save_raw_mesh
from .quadrics import (
    EdgeCost,
    all_vertex_quadrics,
    area_quadric_for_edge,
    area_quadric_summand,
    optimal_placement,
    plane_quadric,
    triangle_quadric,
    vertex_quadric,
)
from .texture import (
    AtlasLayout,
    SurfaceSample,
    bake_atlas,
    resolve_colors,
    sample_mesh_colors,
    successive_project,
    transfer_texture,
)

__version__ = "0.1.0"

__all__ = [
    "PHYSICAL",
    "VIRTUAL",
    "AtlasLayout",
    "CollapseRecord",
    "ColoredSurface",
    "DecimationConfig",
    "DecimationResult",
    "EdgeCost",
    "PointCloudSample",
    "Quadric",
    "RawMesh",
    "SimplicialComplex2",
    "SurfaceSample",
    "TextureImage",
    "all_vertex_quadrics",
    "area_quadric_for_edge",
    "area_quadric_summand",
    "bake_atlas",
    "build_complex",
    "build_virtual_edges",
    "chamfer_ms",
    "collapse_allowed",
    "collapse_edge",
    "connected_components",
    "decimate",
    "edge_cost",
    "hausdorff",
    "load_mesh",
    "optimal_placement",
    "plane_quadric",
    "replay",
    "resolve_colors",
    "sample_mesh_colors",
    "sample_surface",
    "save_mesh",
    "save_raw_mesh",
    "successive_project",
    "texture_chamfer",
    "transfer_texture",
    "triangle_quadric",
    "update_quadrics_after_collapse",
    "vertex_quadric",
    "vertex_split",
    "weld_vertices",
]
