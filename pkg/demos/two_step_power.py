"""Exact two-step reconstruction between pure-power wells.

Seeding the driver with f(x) = 1 + 2|x| and pointing it at the energy
curve of x^2 lands exactly on x^2 after two passes: the intermediate
iterate is a parabola with the wrong strength, and the second pass
cancels the envelope constants that caused it.  Runs in milliseconds
(closed-form kinetics, no differential equations solved).
"""

from __future__ import annotations

import numpy as np

from specinv import (
    InversionConfig,
    PurePower,
    analytic_trajectory,
    run_inversion,
    sup_error,
)


def main() -> None:
    seed = PurePower(1.0, 2.0, 1.0)      # 1 + 2|x|
    target = PurePower(0.0, 1.0, 2.0)    # x^2
    target_F = analytic_trajectory(target)
    assert target_F is not None

    states = run_inversion(
        seed, target_F, InversionConfig(iters=2, use_closed_forms=True)
    )

    xs = np.geomspace(0.1, 2.0, 200)
    print("pass  shape                                   sup error on [0.1, 2]")
    for st in states:
        err = sup_error(st.current, target, xs)
        print(f"{st.n:>4}  {st.current!r:<46}  {err:.3e}")

    final = states[-1].current
    assert isinstance(final, PurePower)
    print(
        f"\nreconstructed: {final.a:+.12f} + {final.b:.12f} |x|^{final.q:.12f}"
        "\n(two passes suffice for any pure-power pair; try other exponents)"
    )


if __name__ == "__main__":
    main()
