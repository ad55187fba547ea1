"""Tour of the quadric machinery: plane error, placement, area penalty.

Run with: python3 demos/01_quadric_basics.py
"""

import numpy as np

from decimesh import (
    Quadric,
    area_quadric_summand,
    build_complex,
    optimal_placement,
    plane_quadric,
    vertex_quadric,
)
from decimesh import shapes


def main():
    rng = np.random.default_rng(0)

    print("== plane quadric ==")
    n = np.array([0.0, 0.0, 1.0])
    q = plane_quadric(n, (0.0, 0.0, 2.0))
    for z in (2.0, 2.5, 0.0):
        x = (0.3, -1.2, z)
        print(f"  E{x} = {q.evaluate(x):.6f}  (squared distance to z=2 plane)")

    print("\n== summing quadrics finds the intersection ==")
    # Three orthogonal planes through (1, 2, 3): the sum's minimum is
    # the single point on all of them.
    q3 = Quadric()
    p0 = (1.0, 2.0, 3.0)
    for axis in range(3):
        nv = np.zeros(3)
        nv[axis] = 1.0
        q3 = q3 + plane_quadric(nv, p0)
    x, val = optimal_placement(q3, [(0.0, 0.0, 0.0)])
    print(f"  minimizer {np.round(x, 6)}  value {val:.2e}")

    print("\n== degenerate systems fall back gracefully ==")
    # A single plane pins only one direction; the solver projects the
    # first fallback onto the plane instead of inventing a point.
    q1 = plane_quadric(np.array([0.0, 0.0, 1.0]), (0.0, 0.0, 1.0))
    seed = (7.0, -4.0, 9.0)
    x, val = optimal_placement(q1, [seed])
    print(f"  seed {seed} lands at {np.round(x, 6)}  value {val:.2e}")

    print("\n== vertex quadrics on a mesh ==")
    mesh = build_complex(shapes.icosphere(subdiv=1))
    v = 0
    qv = vertex_quadric(mesh, v)
    on = mesh.positions[v]
    off = on * 1.1
    print(f"  at the vertex itself:   {qv.evaluate(on):.2e}")
    print(f"  10% off the surface:    {qv.evaluate(off):.2e}")

    print("\n== area penalty ==")
    # The summand for a boundary edge grows with the triangle the
    # moved vertex would sweep: twice the squared area.
    va = np.array([0.0, 0.0, 0.0])
    vb = np.array([1.0, 0.0, 0.0])
    qa = area_quadric_summand(va, vb)
    for y in (0.1, 1.0, 3.0):
        x = (0.5, y, 0.0)
        print(f"  apex height {y:>4}: E = {qa.evaluate(x):.4f}")
    del rng


if __name__ == "__main__":
    main()
