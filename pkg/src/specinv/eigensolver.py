"""Ground-state energies of -d^2/dx^2 + v f(x) by O(h^4) shooting.

The ground state of a symmetric shape is even and node-free, so the
solver integrates outward from x = 0 with unit value and zero slope and
bisects on a two-part predicate: the trial energy lies above the ground
state when the solution acquires a node, or when the decay-matching
residual

    W(E) = psi_N - exp(-kappa h) psi_{N-1},   kappa^2 = v f(x_N) - E

turns nonpositive.  W is proportional to the coefficient of the growing
exponential wherever the potential is constant beyond the box edge, so
it resolves weakly bound states whose first node lies far outside any
affordable box; for Polygonal shapes (constant beyond the last node) the
matching is exact.

Box and mesh are chosen per solve: the box ends where the shape has
flattened to solver tolerance (finite-limit shapes) or past the turning
point by an Airy-scaled decay margin (confining shapes); the step keeps
k h small against the largest local wavenumber.  Explicit SolverOptions
override both.
"""

from __future__ import annotations

import csv
import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from numba import njit
from scipy.interpolate import PchipInterpolator

from .potentials import PotentialShape, PowerConstants, PurePower

__all__ = [
    "SolverOptions",
    "EnergyTrajectory",
    "SolverError",
    "NoConvergence",
    "DomainTooSmall",
    "ground_energy",
    "trajectory_samples",
    "power_ground_energy",
    "worker_count",
    "write_trajectory_csv",
    "read_trajectory_csv",
    "trajectory_from_csv",
]

log = logging.getLogger(__name__)

# practical coupling window for solver-backed curves; outside it the
# binding energy drowns in e_tol or the boxes become astronomical
_SOLVER_V_RANGE = (1e-7, 1e7)

_FLAT_SCAN_CAP = 300.0  # give up waiting for slow tails past this radius
_MAX_POINTS = 2_000_000
_MIN_POINTS = 2_000
_EPS = float(np.finfo(np.float64).eps)


class SolverError(Exception):
    """Base class for eigensolver failures."""


class NoConvergence(SolverError):
    """Energy bracket not located or not narrowed within max_bisections."""


class DomainTooSmall(SolverError):
    """User-fixed x_max cuts the potential off before it settles."""


@dataclass(frozen=True)
class SolverOptions:
    """Knobs for ground_energy.  None means choose automatically."""

    x_max: float | None = None
    mesh: float | None = None
    e_tol: float = 1e-9
    max_bisections: int = 200

    def __post_init__(self):
        if self.x_max is not None and not self.x_max > 0.0:
            raise ValueError(f"x_max={self.x_max!r} must be positive")
        if self.mesh is not None and not self.mesh > 0.0:
            raise ValueError(f"mesh={self.mesh!r} must be positive")
        if not self.e_tol > 0.0:
            raise ValueError(f"e_tol={self.e_tol!r} must be positive")
        if self.max_bisections < 1:
            raise ValueError(f"max_bisections={self.max_bisections!r} must be >= 1")


@njit(cache=True, nogil=True)
def _numerov_scan(pot, e, h, match):
    """Integrate psi'' = (pot - e) psi from an even start at x = 0.

    Returns (node count, W) with W = psi_N - match * psi_{N-1}.  The
    running pair is rescaled near the floating-point rails so only signs
    and the last-two-point combination survive, which is all the
    bisection predicate needs.
    """
    n = pot.shape[0]
    c = h * h / 12.0
    tp = c * (pot[0] - e)
    tc = c * (pot[1] - e)
    prev = 1.0
    cur = (1.0 + 5.0 * tp) * prev / (1.0 - tc)
    nodes = 0
    if cur == 0.0 or (cur > 0.0) != (prev > 0.0):
        nodes += 1
    for i in range(1, n - 1):
        tn = c * (pot[i + 1] - e)
        nxt = (2.0 * cur * (1.0 + 5.0 * tc) - prev * (1.0 - tp)) / (1.0 - tn)
        if nxt == 0.0 or (nxt > 0.0) != (cur > 0.0):
            nodes += 1
        prev = cur
        cur = nxt
        tp = tc
        tc = tn
        acur = abs(cur)
        if acur > 1e250:
            prev *= 1e-250
            cur *= 1e-250
        elif acur < 1e-250 and abs(prev) < 1e-250:
            prev *= 1e250
            cur *= 1e250
    return nodes, cur - match * prev


def _above_ground(pot, h, e):
    """True when the trial energy e exceeds the ground state."""
    kappa = math.sqrt(max(pot[-1] - e, 0.0))
    nodes, w = _numerov_scan(pot, e, h, math.exp(-kappa * h))
    return nodes >= 1 or w <= 0.0


def _bisect_back(f, lo, hi, rounds=40):
    """Shrink [lo, hi] with f(lo) False, f(hi) True; returns tight hi."""
    for _ in range(rounds):
        mid = 0.5 * (lo + hi)
        if f(mid):
            hi = mid
        else:
            lo = mid
    return hi


def _auto_box(shape, v, e_hi, e_tol):
    """Choose the integration radius for one solve."""
    flat = shape.flat_from
    if flat is not None:
        return flat + max(0.05 * flat, 0.2), True
    limit = shape.limit
    if math.isfinite(limit):
        # wait for the tail to settle below solver tolerance
        def settled(x):
            return v * (limit - float(shape(x))) <= e_tol

        x = 6.0
        while not settled(x) and x < _FLAT_SCAN_CAP:
            x *= 2.0
        if settled(x):
            if x > 6.0:
                x = _bisect_back(settled, x / 2.0, x, rounds=20)
            return x, True
        return None, False  # slow tail: caller falls back to doubling
    # confining: turning point at e_hi plus an Airy-scaled decay margin
    f_hi = e_hi / v
    x = 1.0
    while float(shape(x)) < f_hi and x < 1e6:
        x *= 2.0
    x_turn = _bisect_back(lambda t: float(shape(t)) >= f_hi, 0.0, x, rounds=60)
    d = max(0.01, 0.01 * x_turn)
    slope = (float(shape(x_turn + d)) - float(shape(x_turn))) / d
    margin = (52.5 / math.sqrt(max(v * slope, 1e-300))) ** (2.0 / 3.0)
    return x_turn + margin + 1.0, True


def _build_grid(shape, v, x_box, e_lo, e_hi, opts, mesh=None):
    """Uniform grid and sampled v*f on [0, x_box]; returns (pot, h)."""
    f0 = float(shape(0.0))
    spread = v * (float(shape(x_box)) - f0) + (e_hi - e_lo)
    h = mesh if mesh is not None else opts.mesh
    if h is None:
        h = min(0.025 / math.sqrt(1.0 + spread), x_box / _MIN_POINTS)
        h = max(h, x_box / _MAX_POINTS)
    n = int(math.ceil(x_box / h)) + 1
    if n > 2 * _MAX_POINTS:
        raise ValueError(f"mesh {h:g} needs {n} points on a box of {x_box:g}")
    grid = np.linspace(0.0, x_box, n)
    pot = np.ascontiguousarray(v * shape(grid), dtype=np.float64)
    return pot, float(grid[1] - grid[0])


def _solve_on_box(shape, v, x_box, opts, mesh=None):
    """Bracket and bisect the ground energy; returns (e, pot, h)."""
    f0 = float(shape(0.0))
    limit = shape.limit
    e_lo = v * f0
    if math.isfinite(limit):
        e_hi = v * limit
        pot, h = _build_grid(shape, v, x_box, e_lo, e_hi, opts, mesh)
        if not _above_ground(pot, h, e_hi):
            # binding below resolution: the state is at threshold
            log.debug("threshold-bound state at v=%g; returning v*limit", v)
            return e_hi, pot, h
    else:
        delta = max(1.0, 0.5 * abs(e_lo))
        for _ in range(64):
            e_hi = e_lo + delta
            box = x_box
            if opts.x_max is None:
                box, _ = _auto_box(shape, v, e_hi, opts.e_tol)
            pot, h = _build_grid(shape, v, box, e_lo, e_hi, opts, mesh)
            if _above_ground(pot, h, e_hi):
                break
            if opts.x_max is not None and v * float(shape(opts.x_max)) < e_hi:
                raise DomainTooSmall(
                    f"x_max={opts.x_max:g} lies inside the classically allowed "
                    f"region at v={v:g}"
                )
            delta *= 2.0
        else:
            raise NoConvergence(f"no upper energy bound found at v={v:g}")
    lo, hi = e_lo, e_hi
    for _ in range(opts.max_bisections):
        # the eps term keeps tight tolerances reachable at |E| >> 1
        tol = max(opts.e_tol, 32.0 * _EPS * (abs(lo) + abs(hi)))
        if hi - lo <= tol:
            return 0.5 * (lo + hi), pot, h
        mid = 0.5 * (lo + hi)
        if _above_ground(pot, h, mid):
            hi = mid
        else:
            lo = mid
    raise NoConvergence(
        f"bracket still {hi - lo:g} wide after {opts.max_bisections} bisections "
        f"(e_tol={opts.e_tol:g}, v={v:g})"
    )


def _solve(shape, v, x_box, opts):
    """One logical solve; counters O(h^2) origin-kink error when present.

    Shapes whose even reflection breaks at x = 0 pull fourth-order
    integrators down to O(h^2), so the solve runs at h and h/2 and the
    two results are Richardson-combined back to high order.
    """
    e, pot, h = _solve_on_box(shape, v, x_box, opts)
    if shape.origin_kink and opts.mesh is None and len(pot) < _MAX_POINTS:
        e_half, _, _ = _solve_on_box(shape, v, x_box, opts, mesh=0.5 * h)
        e = (4.0 * e_half - e) / 3.0
    return e, pot, h


def _check_domain(shape, v, x_max, e, pot, h, e_tol):
    """Raise DomainTooSmall when the state leaks past a user-fixed box.

    The leaked weight is gauged by the semiclassical decay integral
    through the forbidden region inside the box; for finite-limit shapes
    the unresolved tail variation is damped by that factor.
    """
    decay = h * float(np.sum(np.sqrt(np.maximum(pot - e, 0.0))))
    limit = shape.limit
    if math.isfinite(limit):
        gap = v * (limit - float(shape(x_max)))
        if gap * math.exp(-2.0 * min(decay, 400.0)) > max(1e3 * e_tol, 1e-12):
            raise DomainTooSmall(
                f"shape still varies by {gap / v:g} beyond x_max={x_max:g} "
                f"while the state reaches the box edge (decay integral {decay:.2f})"
            )
    elif decay < 15.0:
        raise DomainTooSmall(
            f"x_max={x_max:g} leaves only {decay:.2f} decay lengths beyond the "
            f"turning point at v={v:g}; the truncated tail moves the energy"
        )


def ground_energy(shape: PotentialShape, v: float, opts: SolverOptions | None = None) -> float:
    """Ground-state energy of -d^2/dx^2 + v f(x).

    The returned state is even and node-free by construction: the
    integration starts at x = 0 with zero slope and the bisection
    predicate rejects any trial energy whose solution has a node.
    """
    opts = opts or SolverOptions()
    if not v > 0.0:
        raise ValueError(f"coupling v={v!r} must be positive")
    f0 = float(shape(0.0))
    limit = shape.limit
    if not limit > f0:
        raise ValueError("shape must increase away from the origin")

    if opts.x_max is not None:
        e, pot, h = _solve(shape, v, opts.x_max, opts)
        _check_domain(shape, v, opts.x_max, e, pot, h, opts.e_tol)
        return e

    if math.isinf(limit):
        e, _, _ = _solve(shape, v, None, opts)
        return e

    x_box, settled = _auto_box(shape, v, v * limit, opts.e_tol)
    if settled:
        e, _, _ = _solve(shape, v, x_box, opts)
        return e

    # slow algebraic tail: grow the box until the answer stops moving
    x_box = 16.0
    energy, _, _ = _solve(shape, v, x_box, opts)
    for _ in range(9):
        x_box *= 2.0
        wider, _, _ = _solve(shape, v, x_box, opts)
        if abs(wider - energy) <= 4.0 * opts.e_tol:
            return wider
        energy = wider
    log.debug("box doubling stopped at %g with energy still moving at v=%g", x_box, v)
    return energy


class EnergyTrajectory:
    """Energy curve F(v), evaluable at any coupling in its domain.

    Wraps a closed form, a memoized solver, or a CSV interpolant.  The
    derivative is exact when the backing provides one and a guarded
    central difference otherwise.  Contract: F is concave and F(v)/v
    lies between inf f and sup f.
    """

    def __init__(self, fn, *, derivative=None, kind="closed-form",
                 source_shape=None, v_range=None, cache=False):
        self._fn = fn
        self._dfn = derivative
        self.kind = kind
        self.source_shape = source_shape
        self.v_range = v_range
        self._cache = {} if cache else None
        self.n_solves = 0

    @classmethod
    def from_solver(cls, shape: PotentialShape, opts: SolverOptions | None = None):
        opts = opts or SolverOptions()

        def fn(v: float) -> float:
            return ground_energy(shape, v, opts)

        return cls(fn, kind="solver", source_shape=shape,
                   v_range=_SOLVER_V_RANGE, cache=True)

    @classmethod
    def from_samples(cls, vs, es):
        vs = np.asarray(vs, dtype=float)
        es = np.asarray(es, dtype=float)
        if vs.ndim != 1 or vs.shape != es.shape or vs.size < 4:
            raise ValueError("need matching 1-D arrays with at least 4 samples")
        if np.any(vs <= 0.0) or np.any(np.diff(vs) <= 0.0):
            raise ValueError("couplings must be positive and strictly increasing")
        interp = PchipInterpolator(np.log(vs), es, extrapolate=False)
        slope = interp.derivative()

        def fn(v: float) -> float:
            return float(interp(math.log(v)))

        def dfn(v: float) -> float:
            return float(slope(math.log(v))) / v

        return cls(fn, derivative=dfn, kind="interpolated",
                   v_range=(float(vs[0]), float(vs[-1])))

    def __call__(self, v: float) -> float:
        if not v > 0.0:
            raise ValueError(f"coupling v={v!r} must be positive")
        if self.v_range is not None and not (
            self.v_range[0] * (1.0 - 1e-12) <= v <= self.v_range[1] * (1.0 + 1e-12)
        ):
            raise ValueError(
                f"v={v:g} outside this curve's domain [{self.v_range[0]:g}, {self.v_range[1]:g}]"
            )
        if self._cache is not None:
            hit = self._cache.get(v)
            if hit is not None:
                return hit
        try:
            e = float(self._fn(v))
        except SolverError as exc:
            raise type(exc)(f"v={v:g}: {exc}") from exc
        if self._cache is not None:
            self._cache[v] = e
            self.n_solves += 1
        return e

    def derivative(self, v: float) -> float:
        if self._dfn is not None:
            return float(self._dfn(v))
        h = min(max(1e-4 * v, 1e-6), 0.5 * v)
        up, dn = v + h, v - h
        if self.v_range is not None:
            # fall back to one-sided differences at the domain edges
            if up > self.v_range[1]:
                up = v
            if dn < self.v_range[0]:
                dn = v
        return (self(up) - self(dn)) / (up - dn)


def trajectory_samples(shape: PotentialShape, v_list, opts: SolverOptions | None = None) -> EnergyTrajectory:
    """Solver-backed energy curve, pre-solved at the given couplings.

    Couplings are solved concurrently when SPECINV_THREADS allows; the
    integration kernel releases the GIL so threads genuinely overlap.
    """
    vs = [float(v) for v in v_list]
    if not vs:
        raise ValueError("v_list must not be empty")
    if any(v <= 0.0 for v in vs):
        raise ValueError("all couplings must be positive")
    traj = EnergyTrajectory.from_solver(shape, opts)
    workers = worker_count()
    if workers > 1 and len(vs) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(traj, vs))
    else:
        for v in vs:
            traj(v)
    return traj


_POWER_CACHE: dict[float, PowerConstants] = {}


def power_ground_energy(q: float, opts: SolverOptions | None = None) -> PowerConstants:
    """Spectral constants of the unit-coupling pure power |x|**q.

    Results for default options are memoized: the tail fit's root search
    and the closed-form kinetic potentials revisit the same exponents.
    """
    q = float(q)
    if opts is None:
        hit = _POWER_CACHE.get(q)
        if hit is not None:
            return hit
    energy = ground_energy(PurePower(0.0, 1.0, q), 1.0, opts)
    constants = PowerConstants.from_energy(q, energy)
    if opts is None:
        _POWER_CACHE[q] = constants
    return constants


def worker_count() -> int:
    """Worker cap from SPECINV_THREADS (default 1: sequential)."""
    raw = os.environ.get("SPECINV_THREADS", "").strip()
    if not raw:
        return 1
    try:
        n = int(raw)
    except ValueError:
        log.warning("ignoring non-integer SPECINV_THREADS=%r", raw)
        return 1
    return max(1, n)


def write_trajectory_csv(path, vs, es) -> None:
    """Write v,E rows at 17 significant digits (bit-exact round trip)."""
    path = Path(path)
    lines = ["v,E"]
    lines += [f"{v:.17g},{e:.17g}" for v, e in zip(vs, es)]
    path.write_text("\n".join(lines) + "\n")


def read_trajectory_csv(path):
    """Read a v,E CSV; returns (vs, es) arrays."""
    path = Path(path)
    with path.open(newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or [c.strip() for c in rows[0]] != ["v", "E"]:
        raise ValueError(f"{path}: expected header 'v,E'")
    data = np.array([[float(c) for c in row] for row in rows[1:] if row])
    if data.ndim != 2 or data.shape[1] != 2:
        raise ValueError(f"{path}: expected rows of v,E pairs")
    return data[:, 0], data[:, 1]


def trajectory_from_csv(path) -> EnergyTrajectory:
    """Interpolating energy curve from a v,E CSV (needs >= 4 rows)."""
    vs, es = read_trajectory_csv(path)
    return EnergyTrajectory.from_samples(vs, es)
