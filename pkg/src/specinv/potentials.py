"""Symmetric attractive potential shapes and their closed-form companions.

A shape f(x) is even, nonconstant, and nondecreasing for x > 0; the
Hamiltonian it enters is -d^2/dx^2 + v f(x) with coupling v > 0.  Five
concrete families are provided:

* PurePower       a + b |x|**q
* SechSquared     -sech(x)**2
* Reciprocal      -1 / (1 + |x|/t)
* ShiftScale      a + b f(x/t) around any inner shape
* Polygonal       piecewise-linear nodes beyond a cutoff, power-law tail
                  inside it, constant beyond the last node

For families with known spectra the module also hands out closed forms
of the three spectral companions (energy curve, kinetic potential, K
map) so numerical pipelines can be cross-checked against exact ones.
Shapes are frozen dataclasses and safe to share between threads.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .transforms import KFunction, KineticPotential

__all__ = [
    "PotentialShape",
    "PurePower",
    "SechSquared",
    "Reciprocal",
    "ShiftScale",
    "Polygonal",
    "PowerTailModel",
    "PowerConstants",
    "p_from_energy",
    "eval_potential",
    "apply_shift_scale",
    "analytic_kinetic",
    "analytic_trajectory",
    "analytic_K",
    "save_polygonal",
    "load_polygonal",
]

log = logging.getLogger(__name__)

# nondecreasing-node slack: solver noise below this is tolerated, worse
# violations are construction errors
MONOTONE_TOL = 1e-9
# agreement required between tail model and an explicit node at the cutoff
STITCH_TOL = 1e-6


def _sech(r: np.ndarray) -> np.ndarray:
    # 2 e^{-r} / (1 + e^{-2r}) never overflows; plain 1/cosh does at r ~ 710
    e = np.exp(-r)
    return 2.0 * e / (1.0 + e * e)


class PotentialShape:
    """Base class.  Subclasses implement _profile(r) for r = |x| >= 0."""

    def _profile(self, r: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def __call__(self, x):
        arr = np.asarray(x, dtype=float)
        out = self._profile(np.abs(arr))
        return float(out) if arr.ndim == 0 else out

    @property
    def floor(self) -> float:
        """f(0), the minimum of the shape."""
        return self(0.0)

    @property
    def limit(self) -> float:
        """Limiting value as x -> inf; +inf for confining shapes."""
        raise NotImplementedError

    @property
    def flat_from(self) -> float | None:
        """x beyond which the shape is exactly constant, if any."""
        return None

    @property
    def origin_kink(self) -> bool:
        """True when even reflection leaves a slope or curvature break
        at x = 0, which degrades fourth-order integrators to O(h^2)
        there; the solver compensates with mesh extrapolation."""
        return False


@dataclass(frozen=True)
class PurePower(PotentialShape):
    """a + b |x|**q with b > 0, q > 0."""

    a: float = 0.0
    b: float = 1.0
    q: float = 2.0

    def __post_init__(self):
        if not self.b > 0.0:
            raise ValueError(f"coefficient b={self.b!r} must be positive")
        if not self.q > 0.0:
            raise ValueError(f"exponent q={self.q!r} must be positive")

    def _profile(self, r):
        return self.a + self.b * r**self.q

    @property
    def limit(self) -> float:
        return math.inf

    @property
    def origin_kink(self) -> bool:
        return self.q < 2.0


@dataclass(frozen=True)
class SechSquared(PotentialShape):
    """-sech(x)**2: the textbook reflectionless well."""

    def _profile(self, r):
        return -(_sech(r) ** 2)

    @property
    def limit(self) -> float:
        return 0.0


@dataclass(frozen=True)
class Reciprocal(PotentialShape):
    """-1 / (1 + |x|/t) with width t > 0.  Slow algebraic approach to 0."""

    t: float = 5.0

    def __post_init__(self):
        if not self.t > 0.0:
            raise ValueError(f"width t={self.t!r} must be positive")

    def _profile(self, r):
        return -1.0 / (1.0 + r / self.t)

    @property
    def limit(self) -> float:
        return 0.0

    @property
    def origin_kink(self) -> bool:
        return True


@dataclass(frozen=True)
class ShiftScale(PotentialShape):
    """a + b f(x/t) around an inner shape, with b > 0, t > 0."""

    inner: PotentialShape
    a: float = 0.0
    b: float = 1.0
    t: float = 1.0

    def __post_init__(self):
        if not self.b > 0.0:
            raise ValueError(f"multiplier b={self.b!r} must be positive")
        if not self.t > 0.0:
            raise ValueError(f"length scale t={self.t!r} must be positive")

    def _profile(self, r):
        return self.a + self.b * self.inner._profile(r / self.t)

    @property
    def limit(self) -> float:
        return self.a + self.b * self.inner.limit

    @property
    def flat_from(self) -> float | None:
        inner_flat = self.inner.flat_from
        return None if inner_flat is None else self.t * inner_flat

    @property
    def origin_kink(self) -> bool:
        return self.inner.origin_kink


@dataclass(frozen=True)
class PowerTailModel:
    """Power-law model a + b |x|**q valid on [0, cutoff]."""

    a: float
    b: float
    q: float
    cutoff: float

    def __post_init__(self):
        if not self.b > 0.0:
            raise ValueError(f"tail coefficient b={self.b!r} must be positive")
        if not self.q > 0.0:
            raise ValueError(f"tail exponent q={self.q!r} must be positive")
        if not self.cutoff > 0.0:
            raise ValueError(f"cutoff={self.cutoff!r} must be positive")

    def __call__(self, r):
        return self.a + self.b * np.abs(r) ** self.q


@dataclass(frozen=True)
class Polygonal(PotentialShape):
    """Piecewise-linear shape beyond a cutoff with a power-law core.

    Inside [0, cutoff) the tail model applies; between nodes the shape
    interpolates linearly; beyond the last node it is constant.  A node
    at the cutoff carrying the tail value is inserted automatically so
    the shape is continuous by construction.  Node values must be
    nondecreasing within MONOTONE_TOL.
    """

    xs: np.ndarray
    fs: np.ndarray
    tail: PowerTailModel

    def __post_init__(self):
        xs = np.asarray(self.xs, dtype=float).copy()
        fs = np.asarray(self.fs, dtype=float).copy()
        if xs.ndim != 1 or xs.shape != fs.shape or xs.size < 1:
            raise ValueError("xs and fs must be matching 1-D arrays")
        if np.any(np.diff(xs) <= 0.0):
            raise ValueError("node positions must be strictly increasing")
        cut = self.tail.cutoff
        if xs[0] < cut - 1e-12 * max(1.0, cut):
            raise ValueError(f"first node x={xs[0]!r} lies inside the tail cutoff {cut!r}")
        joint = float(self.tail(cut))
        if math.isclose(xs[0], cut, rel_tol=1e-12, abs_tol=1e-15):
            if abs(fs[0] - joint) > STITCH_TOL:
                raise ValueError(
                    f"node at the cutoff disagrees with the tail model by "
                    f"{abs(fs[0] - joint):.3g} (> {STITCH_TOL:g})"
                )
        else:
            xs = np.concatenate(([cut], xs))
            fs = np.concatenate(([joint], fs))
        drops = np.diff(fs)
        worst = -float(drops.min()) if drops.size else 0.0
        if worst > MONOTONE_TOL:
            raise ValueError(
                f"node values decrease by {worst:.3g} (> {MONOTONE_TOL:g}); "
                "repair with isotonic projection before constructing"
            )
        xs.setflags(write=False)
        fs.setflags(write=False)
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "fs", fs)

    def _profile(self, r):
        r = np.asarray(r, dtype=float)
        out = np.interp(r, self.xs, self.fs)  # np.interp clamps both ends
        inside = r < self.tail.cutoff
        if np.any(inside):
            out = np.where(inside, self.tail(r), out)
        return out

    @property
    def limit(self) -> float:
        return float(self.fs[-1])

    @property
    def flat_from(self) -> float | None:
        return float(self.xs[-1])

    @property
    def origin_kink(self) -> bool:
        # vertex slope-jumps between nodes shrink with node spacing and
        # cost only O(h^3); the core power is what matters at the origin
        return self.tail.q < 1.5


@dataclass(frozen=True)
class PowerConstants:
    """Spectral constants of |x|**q at unit coupling.

    energy is the ground state of -d^2/dx^2 + |x|**q; p is the derived
    constant with fbar(s) = (p / sqrt(s))**q and K(x) = (p / x)**2.
    """

    q: float
    energy: float
    p: float

    def __post_init__(self):
        expected = p_from_energy(self.q, self.energy)
        if abs(self.p - expected) > 1e-10 * abs(expected):
            raise ValueError(
                f"p={self.p!r} inconsistent with energy={self.energy!r} for q={self.q!r}"
            )

    @classmethod
    def from_energy(cls, q: float, energy: float) -> "PowerConstants":
        return cls(q=q, energy=energy, p=p_from_energy(q, energy))


def p_from_energy(q: float, energy: float) -> float:
    """Ground-state p constant of |x|**q from its unit-coupling energy."""
    return (
        abs(energy) ** ((2.0 + q) / (2.0 * q))
        * (2.0 / (2.0 + q)) ** (1.0 / q)
        * (q / (2.0 + q)) ** 0.5
    )


def eval_potential(shape: PotentialShape, x):
    """f(x) for scalar or array x (reflection-symmetric in x)."""
    return shape(x)


def apply_shift_scale(shape: PotentialShape, a: float, b: float, t: float) -> PotentialShape:
    """New shape a + b f(x/t); simplifies where the algebra is exact."""
    if not b > 0.0:
        raise ValueError(f"multiplier b={b!r} must be positive")
    if not t > 0.0:
        raise ValueError(f"length scale t={t!r} must be positive")
    if a == 0.0 and b == 1.0 and t == 1.0:
        return shape
    if isinstance(shape, PurePower):
        return PurePower(a + b * shape.a, b * shape.b / t**shape.q, shape.q)
    if isinstance(shape, ShiftScale):
        return ShiftScale(shape.inner, a + b * shape.a, b * shape.b, t * shape.t)
    return ShiftScale(shape, a, b, t)


def _power_constants(q: float) -> PowerConstants:
    from .eigensolver import power_ground_energy  # deferred: solver imports us

    return power_ground_energy(q)


def analytic_kinetic(shape: PotentialShape) -> KineticPotential | None:
    """Closed-form kinetic potential, or None when the family has none."""
    if isinstance(shape, PurePower):
        a, b, q = shape.a, shape.b, shape.q
        p = _power_constants(q).p

        def fbar(s: float, a=a, b=b, q=q, p=p) -> float:
            return a + b * (p / math.sqrt(s)) ** q

        return KineticPotential(fbar, power_form=(a, b, q, p))
    if isinstance(shape, SechSquared):

        def fbar(s: float) -> float:
            return -2.0 * s / (math.sqrt(s + s * s) + s)

        return KineticPotential(fbar)
    if isinstance(shape, ShiftScale):
        inner = analytic_kinetic(shape.inner)
        if inner is None:
            return None
        a, b, t2 = shape.a, shape.b, shape.t**2

        def fbar(s: float, inner=inner, a=a, b=b, t2=t2) -> float:
            return a + b * inner(s * t2)

        power_form = None
        if inner.power_form is not None:
            ia, ib, iq, ip = inner.power_form
            # a + b [ia + ib (ip / sqrt(s t^2))**iq] is again power-form
            power_form = (a + b * ia, b * ib / shape.t**iq, iq, ip)
        return KineticPotential(fbar, power_form=power_form)
    return None


def analytic_trajectory(shape: PotentialShape):
    """Closed-form energy curve F(v) with exact derivative, or None."""
    from .eigensolver import EnergyTrajectory  # deferred: solver imports us

    if isinstance(shape, PurePower):
        a, b, q = shape.a, shape.b, shape.q
        e = _power_constants(q).energy
        w = 2.0 / (2.0 + q)

        def F(v: float, a=a, b=b, e=e, w=w) -> float:
            return a * v + e * (b * v) ** w

        def dF(v: float, a=a, b=b, e=e, w=w) -> float:
            return a + e * b * w * (b * v) ** (w - 1.0)

        return EnergyTrajectory(F, derivative=dF, kind="closed-form", source_shape=shape)
    if isinstance(shape, SechSquared):

        def F(v: float) -> float:
            return -v + math.sqrt(v + 0.25) - 0.5

        def dF(v: float) -> float:
            return -1.0 + 0.5 / math.sqrt(v + 0.25)

        return EnergyTrajectory(F, derivative=dF, kind="closed-form", source_shape=shape)
    if isinstance(shape, ShiftScale):
        inner = analytic_trajectory(shape.inner)
        if inner is None:
            return None
        a, b, t2 = shape.a, shape.b, shape.t**2

        def F(v: float, inner=inner, a=a, b=b, t2=t2) -> float:
            return a * v + inner(v * b * t2) / t2

        def dF(v: float, inner=inner, a=a, b=b, t2=t2) -> float:
            return a + b * inner.derivative(v * b * t2)

        return EnergyTrajectory(F, derivative=dF, kind="closed-form", source_shape=shape)
    return None


def analytic_K(shape: PotentialShape) -> KFunction | None:
    """Closed-form K map, or None.  Invariant under shifts and multipliers."""
    if isinstance(shape, PurePower):
        p = _power_constants(shape.q).p

        def K(x: float, p=p) -> float:
            return (p / x) ** 2

        return KFunction(K, power_p=p)
    if isinstance(shape, SechSquared):

        def K(x: float) -> float:
            # 1 / sinh(2x)^2 without overflow at large x
            e = math.exp(-4.0 * x)
            return 4.0 * e / (1.0 - e) ** 2

        return KFunction(K)
    if isinstance(shape, ShiftScale):
        inner = analytic_K(shape.inner)
        if inner is None:
            return None
        t = shape.t

        def K(x: float, inner=inner, t=t) -> float:
            return inner(x / t) / t**2

        # (1/t^2) (p t / x)^2 = (p / x)^2: the length scale cancels
        return KFunction(K, power_p=inner.power_p)
    return None


def save_polygonal(shape: Polygonal, csv_path) -> None:
    """Write nodes as an x,f CSV plus a JSON sidecar for the tail model.

    Formats at 17 significant digits so a load round-trips bit-exactly.
    """
    csv_path = Path(csv_path)
    lines = ["x,f"]
    lines += [f"{x:.17g},{f:.17g}" for x, f in zip(shape.xs, shape.fs)]
    csv_path.write_text("\n".join(lines) + "\n")
    sidecar = {
        "A": shape.tail.a,
        "B": shape.tail.b,
        "q": shape.tail.q,
        "x_a": shape.tail.cutoff,
    }
    csv_path.with_suffix(".json").write_text(json.dumps(sidecar, indent=2) + "\n")


def load_polygonal(csv_path) -> Polygonal:
    """Read a shape written by save_polygonal (CSV nodes + JSON tail)."""
    csv_path = Path(csv_path)
    rows = csv_path.read_text().strip().splitlines()
    if not rows or rows[0].strip().lower() != "x,f":
        raise ValueError(f"{csv_path}: expected header 'x,f'")
    data = np.array([[float(c) for c in row.split(",")] for row in rows[1:]])
    if data.ndim != 2 or data.shape[1] != 2 or data.shape[0] < 1:
        raise ValueError(f"{csv_path}: expected rows of x,f pairs")
    meta = json.loads(csv_path.with_suffix(".json").read_text())
    tail = PowerTailModel(a=meta["A"], b=meta["B"], q=meta["q"], cutoff=meta["x_a"])
    return Polygonal(xs=data[:, 0], fs=data[:, 1], tail=tail)
