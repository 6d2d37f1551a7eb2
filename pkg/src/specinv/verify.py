"""Self-check property suites exposed through the command line.

Each suite exercises an exact identity of the theory on top of the
numeric machinery, so a pass certifies solver, transforms, and
inversion wiring together rather than any single unit:

``scaling-laws``
    Shifting and scaling a shape moves its ground energy by an exact
    affine-plus-rescale law; checked with independent solver runs on
    both sides for random shift/multiplier/length triples.
``legendre-roundtrip``
    An energy curve pushed to its kinetic potential and back must
    reproduce itself; along the way the curve must stay concave and
    the kinetic potential decreasing and convex.
``eq22-identity``
    The curvatures of the two partner curves are reciprocal up to the
    factor -1/v^3; checked by finite differences on closed forms.
``power-two-step``
    A pure power seeded with any other pure power is recovered exactly
    in two passes; the first pass is insensitive to positive
    multipliers of the seed, a seed equal to the target is a fixed
    point, and iterates stay monotone.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .eigensolver import SolverOptions, ground_energy
from .inversion import InversionConfig, inversion_step, run_inversion, sup_error
from .potentials import (
    PurePower,
    Reciprocal,
    SechSquared,
    analytic_kinetic,
    analytic_trajectory,
    apply_shift_scale,
)
from .transforms import kinetic_from_trajectory, trajectory_from_kinetic

__all__ = ["CheckResult", "SuiteReport", "SUITES", "run_suite"]

_RNG_SEED = 20260816


@dataclass(frozen=True)
class CheckResult:
    """One measured quantity against its bound."""

    label: str
    measured: float
    bound: float

    @property
    def ok(self) -> bool:
        return self.measured <= self.bound

    def line(self) -> str:
        mark = "ok  " if self.ok else "FAIL"
        return f"  {mark} {self.label}: {self.measured:.3g} (bound {self.bound:.3g})"


@dataclass(frozen=True)
class SuiteReport:
    """All checks of one suite."""

    suite: str
    checks: tuple[CheckResult, ...]

    @property
    def passed(self) -> bool:
        return all(c.ok for c in self.checks)

    def lines(self) -> list[str]:
        verdict = "PASS" if self.passed else "FAIL"
        out = [c.line() for c in self.checks]
        out.append(f"[{self.suite}] {len(self.checks)} checks: {verdict}")
        return out


def suite_scaling_laws(n_triples: int = 20, opts: SolverOptions | None = None) -> SuiteReport:
    """ground(a + b f(x/t), v) == a v + ground(f, v b t^2) / t^2."""
    opts = opts or SolverOptions()
    rng = np.random.default_rng(_RNG_SEED)
    bases = [
        SechSquared(),
        PurePower(0.0, 1.0, 2.0),
        PurePower(0.0, 1.0, 1.0),
        Reciprocal(1.0),
    ]
    checks = []
    for i in range(n_triples):
        base = bases[i % len(bases)]
        a = rng.uniform(-2.0, 2.0)
        b = rng.uniform(0.5, 3.0)
        t = rng.uniform(0.5, 2.0)
        v = rng.uniform(0.5, 20.0)
        lhs = ground_energy(apply_shift_scale(base, a, b, t), v, opts)
        rhs = a * v + ground_energy(base, v * b * t * t, opts) / (t * t)
        checks.append(
            CheckResult(
                f"{type(base).__name__} a={a:+.3f} b={b:.3f} t={t:.3f} v={v:.3f}",
                abs(lhs - rhs),
                2.0 * opts.e_tol,
            )
        )
    return SuiteReport("scaling-laws", tuple(checks))


def suite_legendre_roundtrip() -> SuiteReport:
    """F -> fbar -> F is the identity on the sech^2 closed forms."""
    F = analytic_trajectory(SechSquared())
    vs = np.geomspace(0.01, 100.0, 20)

    svals, fvals = [], []
    worst_rel = 0.0
    for v in vs:
        s = F(v) - v * F.derivative(v)
        fbar_s = kinetic_from_trajectory(F, s)
        back = trajectory_from_kinetic(lambda u: kinetic_from_trajectory(F, u), v)
        worst_rel = max(worst_rel, abs(back - F(v)) / abs(F(v)))
        svals.append(s)
        fvals.append(fbar_s)
    checks = [CheckResult("round trip rel error, 20 log-spaced v in [0.01, 100]", worst_rel, 1e-6)]

    Fv = np.array([F(v) for v in vs])
    chord_gap = 0.0
    for i in range(len(vs) - 2):
        v1, v2, v3 = vs[i], vs[i + 1], vs[i + 2]
        chord = Fv[i] + (Fv[i + 2] - Fv[i]) * (v2 - v1) / (v3 - v1)
        chord_gap = max(chord_gap, chord - Fv[i + 1])
    checks.append(CheckResult("trajectory concavity (chord excess)", chord_gap, 1e-7))

    s = np.array(svals)
    fb = np.array(fvals)
    mono_gap = float(np.max(np.diff(fb))) if len(fb) > 1 else 0.0
    checks.append(CheckResult("kinetic potential decreasing (rise)", mono_gap, 0.0))
    convex_gap = 0.0
    for i in range(len(s) - 2):
        chord = fb[i] + (fb[i + 2] - fb[i]) * (s[i + 1] - s[i]) / (s[i + 2] - s[i])
        convex_gap = max(convex_gap, fb[i + 1] - chord)
    checks.append(CheckResult("kinetic potential convexity (chord deficit)", convex_gap, 1e-9))
    return SuiteReport("legendre-roundtrip", tuple(checks))


def suite_eq22_identity() -> SuiteReport:
    """F''(v) * fbar''(s(v)) == -1/v^3 at interior couplings."""
    F = analytic_trajectory(SechSquared())
    fbar = analytic_kinetic(SechSquared())
    worst_rel = 0.0
    for v in np.geomspace(0.05, 50.0, 10):
        hv = 1e-3 * v
        d2F = (F(v + hv) - 2.0 * F(v) + F(v - hv)) / (hv * hv)
        s = F(v) - v * F.derivative(v)
        hs = 1e-3 * s
        d2f = (fbar(s + hs) - 2.0 * fbar(s) + fbar(s - hs)) / (hs * hs)
        target = -1.0 / v**3
        worst_rel = max(worst_rel, abs(d2F * d2f - target) / abs(target))
    checks = (
        CheckResult("curvature product vs -1/v^3, 10 interior v", worst_rel, 1e-4),
    )
    return SuiteReport("eq22-identity", tuple(checks))


def suite_power_two_step(n_cases: int = 8) -> SuiteReport:
    """Pure-power targets are recovered exactly in two closed-form passes."""
    rng = np.random.default_rng(_RNG_SEED)
    xs = np.geomspace(0.1, 2.0, 80)
    checks = []
    for _ in range(n_cases):
        p = rng.uniform(0.5, 4.0)
        q = rng.uniform(0.5, 4.0)
        a = rng.uniform(-2.0, 2.0)
        b = rng.uniform(0.5, 3.0)
        seed = PurePower(0.0, 1.0, p)
        target = PurePower(a, b, q)
        cfg = InversionConfig(iters=2, use_closed_forms=True)
        states = run_inversion(seed, analytic_trajectory(target), cfg)
        checks.append(
            CheckResult(
                f"two-step recovery p={p:.3f} -> (a={a:+.3f}, b={b:.3f}, q={q:.3f})",
                sup_error(states[2].current, target, xs),
                1e-7,
            )
        )

    # positive multipliers of the seed cannot change the first iterate
    target = PurePower(0.0, 1.0, 2.0)
    Ft = analytic_trajectory(target)
    cfg = InversionConfig(iters=1, use_closed_forms=True)
    for mult in (0.25, 3.7):
        plain = run_inversion(PurePower(0.0, 1.0, 1.0), Ft, cfg)[1].current
        scaled = run_inversion(PurePower(0.0, mult, 1.0), Ft, cfg)[1].current
        checks.append(
            CheckResult(
                f"first iterate invariant under seed multiplier {mult}",
                sup_error(plain, scaled, xs),
                1e-9,
            )
        )

    # seeding with the target itself is a fixed point
    for shp in (PurePower(0.0, 1.0, 2.0), PurePower(-1.0, 0.7, 1.3)):
        states = run_inversion(shp, analytic_trajectory(shp), cfg)
        checks.append(
            CheckResult(
                f"fixed point at target (q={shp.q})",
                sup_error(states[1].current, shp, xs),
                1e-9,
            )
        )

    # iterates of an increasing target stay monotone on the grid
    states = run_inversion(
        PurePower(1.0, 2.0, 1.0), Ft, InversionConfig(iters=2, use_closed_forms=True)
    )
    drop = 0.0
    for st in states[1:]:
        vals = st.current(xs)
        drop = max(drop, float(np.max(np.maximum(0.0, vals[:-1] - vals[1:]))))
    checks.append(CheckResult("iterates monotone nondecreasing", drop, 1e-6))
    return SuiteReport("power-two-step", tuple(checks))


SUITES = {
    "scaling-laws": suite_scaling_laws,
    "legendre-roundtrip": suite_legendre_roundtrip,
    "eq22-identity": suite_eq22_identity,
    "power-two-step": suite_power_two_step,
}


def run_suite(name: str) -> SuiteReport:
    """Run one named suite; raises KeyError for an unknown name."""
    try:
        suite = SUITES[name]
    except KeyError:
        raise KeyError(
            f"unknown suite {name!r}; choose from {', '.join(sorted(SUITES))}"
        ) from None
    return suite()
