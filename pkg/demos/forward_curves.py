"""Sample ground-state energy curves E(v) for a few wells.

Writes one CSV per shape into demos/out/ and prints landmark values,
including the reflectionless wells where the solver can be checked
against exact integers: at v = 2, 6, 12 the sech-squared well binds at
exactly -1, -4, -9.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from specinv import (
    PurePower,
    Reciprocal,
    SechSquared,
    trajectory_samples,
    write_trajectory_csv,
)

OUT = Path(__file__).parent / "out"


def main() -> None:
    OUT.mkdir(exist_ok=True)
    vs = np.geomspace(0.1, 100.0, 40)
    shapes = {
        "sech2": SechSquared(),
        "parabola_seed": PurePower(-1.0, 1.0 / 20.0, 2.0),
        "reciprocal_seed": Reciprocal(5.0),
    }
    for name, shape in shapes.items():
        traj = trajectory_samples(shape, vs)
        es = [traj(v) for v in vs]
        path = OUT / f"curve_{name}.csv"
        write_trajectory_csv(path, vs, es)
        print(f"{name:<16} -> {path}  (E(v) over v in [0.1, 100], 40 samples)")

    sech = trajectory_samples(SechSquared(), [2.0, 6.0, 12.0])
    print("\nreflectionless checkpoints (exact: -1, -4, -9):")
    for v in (2.0, 6.0, 12.0):
        print(f"  E({v:g}) = {sech(v):+.9f}")


if __name__ == "__main__":
    main()
