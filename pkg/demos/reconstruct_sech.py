"""Reconstruct the sech-squared well from two very different guesses.

Five default-config passes starting from (a) a shifted parabola
-1 + x^2/20 and (b) the reciprocal well -1/(1 + x/5), both aimed at the
energy curve of -sech^2(x).  Writes every iterate as a polygon CSV into
demos/out/ (two columns, plot-ready) plus an error table per seed.

Takes about a minute: each pass re-solves the Schrodinger equation for
the current iterate at every coupling the envelope searches touch.
"""

from __future__ import annotations

import time
from pathlib import Path

import numpy as np

from specinv import (
    InversionConfig,
    PurePower,
    Reciprocal,
    SechSquared,
    analytic_trajectory,
    reconstruction_grid,
    run_inversion,
    save_polygonal,
    sup_error,
)

OUT = Path(__file__).parent / "out"


def reconstruct(tag: str, seed) -> None:
    target = SechSquared()
    target_F = analytic_trajectory(target)
    assert target_F is not None
    cfg = InversionConfig()  # the pinned defaults: 40 nodes on (0.2, 4], 5 passes
    nodes = np.concatenate(([cfg.x_a], reconstruction_grid(cfg)))

    t0 = time.perf_counter()
    states = run_inversion(seed, target_F, cfg, reference=target)
    elapsed = time.perf_counter() - t0

    print(f"\nseed {tag}: {elapsed:.0f}s for {cfg.iters} passes")
    print("pass  sup error on [0.2, 4]")
    print(f"{0:>4}  {sup_error(seed, target, nodes):.4f}   (seed)")
    for st, rec in zip(states[1:], states[-1].history):
        path = OUT / f"{tag}_f{st.n}.csv"
        save_polygonal(st.current, path)
        print(f"{rec.n:>4}  {rec.sup_error:.4f}   -> {path.name}")


def main() -> None:
    OUT.mkdir(exist_ok=True)
    reconstruct("parabola", PurePower(-1.0, 1.0 / 20.0, 2.0))
    reconstruct("reciprocal", Reciprocal(5.0))
    print(
        "\nBoth error sequences shrink monotonically and settle near 0.06:"
        "\nthe driver's plain fixed-point pass stalls there (see README,"
        "\n'Convergence plateau') while the shape itself is already close."
    )


if __name__ == "__main__":
    main()
