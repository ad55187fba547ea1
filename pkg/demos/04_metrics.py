"""Measuring simplification error: geometric and color distances.

Run with: python3 demos/04_metrics.py
"""

import numpy as np

from decimesh import (
    ColoredSurface,
    DecimationConfig,
    build_complex,
    chamfer_ms,
    decimate,
    hausdorff,
    texture_chamfer,
)
from decimesh import shapes


def main():
    print("== sanity: two parallel squares, 0.25 apart ==")
    raw_a, raw_b = shapes.lifted_square_pair(d=0.25)
    a, b = build_complex(raw_a), build_complex(raw_b)
    print(f"  hausdorff  = {hausdorff(a, b, n=5000)}   (exactly the lift)")
    print(f"  chamfer_ms = {chamfer_ms(a, b, n=5000)}  (exactly the lift squared)")

    print("\n== geometric error of decimation ==")
    src = build_complex(shapes.icosphere(subdiv=3))
    for ratio in (0.5, 0.1, 0.02):
        mesh = build_complex(shapes.icosphere(subdiv=3))
        decimate(mesh, DecimationConfig(target_ratio=ratio,
                                        record_history=False))
        d = hausdorff(src, mesh, n=4000)
        print(f"  keep {int(ratio * 100):>3}%: {mesh.n_live_faces:>4} faces, "
              f"hausdorff {d:.4f} (unit sphere)")

    print("\n== color distance ==")
    red = ColoredSurface.from_raw(shapes.solid_color_square((1.0, 0.0, 0.0)))
    blue = ColoredSurface.from_raw(shapes.solid_color_square((0.0, 0.0, 1.0)))
    same = ColoredSurface.from_raw(shapes.solid_color_square((1.0, 0.0, 0.0)))
    print(f"  red vs red : {texture_chamfer(red, same, n=2000):.2e}")
    print(f"  red vs blue: {texture_chamfer(red, blue, n=2000):.6f} "
          f"(sqrt(2) = {np.sqrt(2.0):.6f})")


if __name__ == "__main__":
    main()
