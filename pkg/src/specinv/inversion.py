"""Shape reconstruction from an energy curve by fixed-point iteration.

Each pass composes two maps.  The current guess f_n, through its own
energy curve, yields the mean-kinetic-energy profile K_n(x); the target
curve's kinetic potential evaluated on that profile is the next guess:

    f_{n+1}(x) = fbar_target(K_n(x))        for x beyond a cutoff x_a.

Inside the cutoff the reconstruction uses a three-coupling power-law fit
of the target curve's strong-coupling tail, which pins the shape near
the origin where the outer iteration carries no information.  Iterates
are stored as Polygonal shapes (power core + piecewise-linear nodes) so
they can be fed back through the eigensolver.

When every shape in play has closed-form transforms, the same step can
run symbolically: power-family kinetic potentials compose with
power-family K profiles into an exact PurePower iterate, which keeps
the two-step reconstruction of one power from another exact to solver
precision.
"""

from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .eigensolver import (
    EnergyTrajectory,
    SolverError,
    SolverOptions,
    power_ground_energy,
)
from .potentials import (
    Polygonal,
    PotentialShape,
    PowerTailModel,
    PurePower,
    analytic_K,
    analytic_kinetic,
    analytic_trajectory,
)
from .transforms import (
    K_from_trajectory,
    TransformError,
    kinetic_from_trajectory,
)

__all__ = [
    "InversionConfig",
    "IterationRecord",
    "InversionState",
    "InversionAborted",
    "TailFitError",
    "NoRoot",
    "fit_power_tail",
    "inversion_step",
    "run_inversion",
    "reconstruction_grid",
    "sup_error",
]

log = logging.getLogger(__name__)

_PAVA_WARN = 1e-6


class TailFitError(Exception):
    """The three-coupling power fit of the energy tail has no solution."""


class NoRoot(TailFitError):
    """No power exponent in the searched range matches the energy tail."""


class InversionAborted(Exception):
    """An iteration failed; .states holds the completed iterations."""

    def __init__(self, message, states):
        super().__init__(message)
        self.states = states


@dataclass(frozen=True)
class InversionConfig:
    """Reconstruction recipe.

    x_a        cutoff below which the fitted power core replaces the
               pointwise reconstruction
    grid_points, grid_hi
               geometric node grid: grid_points nodes on (x_a, grid_hi]
    tail_v     three large couplings used for the power-core fit
    iters      number of fixed-point passes
    v_bracket  initial coupling window for the kinetic-profile search;
               the search widens on its own when the peak sits at
               either edge, and accepts the edge value once widening
               is exhausted (shapes that flatten toward a limit push
               the outermost maximizer to v -> 0, where the edge value
               is the correct limit)
    use_closed_forms
               run on analytic transforms where available instead of
               solver-backed curves; power-into-power steps then stay
               symbolic and exact
    stop_change
               optional early stop once successive iterates differ by
               less on the grid
    solver     eigensolver options for iterate energy curves
    """

    x_a: float = 0.2
    grid_points: int = 40
    grid_hi: float = 4.0
    tail_v: tuple[float, ...] = (1e4, 5e3, 2.5e3)
    iters: int = 5
    v_bracket: tuple[float, float] = (8e-4, 175.0)
    use_closed_forms: bool = False
    stop_change: float | None = None
    solver: SolverOptions = field(default_factory=SolverOptions)

    def __post_init__(self):
        if not self.x_a > 0.0:
            raise ValueError(f"x_a={self.x_a!r} must be positive")
        if not self.grid_hi > self.x_a:
            raise ValueError("grid_hi must exceed x_a")
        if self.grid_points < 2:
            raise ValueError("need at least two grid points")
        if self.iters < 1:
            raise ValueError("iters must be >= 1")
        if len(self.tail_v) < 3:
            raise ValueError("tail_v needs at least three couplings")
        if any(not v > 0.0 for v in self.tail_v):
            raise ValueError("tail couplings must be positive")
        lo, hi = self.v_bracket
        if not (0.0 < lo < hi):
            raise ValueError(f"v_bracket={self.v_bracket!r} must satisfy 0 < lo < hi")
        if self.stop_change is not None and not self.stop_change > 0.0:
            raise ValueError("stop_change must be positive when given")


@dataclass(frozen=True)
class IterationRecord:
    """Diagnostics of one pass."""

    n: int
    seconds: float
    stitch_jump: float
    max_violation: float
    sup_error: float | None = None


@dataclass(frozen=True)
class InversionState:
    """Shape and energy curve after n passes (n = 0 is the seed).

    history holds one IterationRecord per completed pass, so its length
    always equals n.
    """

    n: int
    current: PotentialShape
    trajectory: EnergyTrajectory
    history: tuple[IterationRecord, ...] = ()

    def __post_init__(self):
        if len(self.history) != self.n:
            raise ValueError(
                f"state n={self.n} must carry {self.n} records, "
                f"got {len(self.history)}"
            )


def reconstruction_grid(cfg: InversionConfig) -> np.ndarray:
    """Geometric node positions on (x_a, grid_hi]."""
    return np.geomspace(cfg.x_a, cfg.grid_hi, cfg.grid_points + 1)[1:]


def sup_error(shape_a, shape_b, xs) -> float:
    """Largest pointwise gap between two shapes over the given nodes."""
    xs = np.asarray(xs, dtype=float)
    return float(np.max(np.abs(shape_a(xs) - shape_b(xs))))


def _pava(values: np.ndarray) -> np.ndarray:
    """Nondecreasing projection by pooling adjacent violators."""
    vals = list(map(float, values))
    heights: list[float] = []
    weights: list[int] = []
    for y in vals:
        heights.append(y)
        weights.append(1)
        while len(heights) > 1 and heights[-2] > heights[-1]:
            h2, w2 = heights.pop(), weights.pop()
            h1, w1 = heights.pop(), weights.pop()
            heights.append((h1 * w1 + h2 * w2) / (w1 + w2))
            weights.append(w1 + w2)
    out = np.empty(len(vals))
    i = 0
    for h, w in zip(heights, weights):
        out[i : i + w] = h
        i += w
    return out


def fit_power_tail(target_F, cfg: InversionConfig, q_range=(0.1, 10.0)) -> PowerTailModel:
    """Fit F(v) ~ A v + E(q) (B v)^(2/(2+q)) at three large couplings.

    For fixed q the model is linear in (A, C) with C = E(q) B^(2/(2+q)),
    so two couplings determine them and the third closes a scalar root
    problem in q.  Returns the shape core A + B |x|**q valid on
    [0, cfg.x_a].
    """
    tail_v = cfg.tail_v
    v1, v2, v3 = (float(v) for v in tail_v[:3])
    F1, F2, F3 = target_F(v1), target_F(v2), target_F(v3)

    def coeffs(q):
        w = 2.0 / (2.0 + q)
        den = v1 * v2**w - v2 * v1**w
        if den == 0.0:
            raise TailFitError("tail couplings are degenerate")
        a = (F1 * v2**w - F2 * v1**w) / den
        c = (v1 * F2 - v2 * F1) / den
        return a, c, w

    def residual(q):
        a, c, w = coeffs(q)
        return a * v3 + c * v3**w - F3

    qs = np.geomspace(q_range[0], q_range[1], 61)
    res = np.array([residual(q) for q in qs])
    sign = np.sign(res)
    flips = np.nonzero(sign[:-1] * sign[1:] < 0)[0]
    if len(flips) == 0:
        zeros = np.nonzero(sign == 0)[0]
        if len(zeros) == 0:
            raise NoRoot(
                f"no power exponent in [{q_range[0]:g}, {q_range[1]:g}] matches "
                f"the energy tail at couplings {tuple(tail_v[:3])}"
            )
        q_star = float(qs[zeros[0]])
    else:
        i = int(flips[0])
        q_star = float(brentq(residual, qs[i], qs[i + 1], xtol=1e-13, rtol=1e-15))
    a, c, w = coeffs(q_star)
    if not c > 0.0:
        raise TailFitError(f"fitted tail has nonpositive power coefficient c={c:g}")
    energy = power_ground_energy(q_star).energy
    b = (c / energy) ** ((2.0 + q_star) / 2.0)
    return PowerTailModel(float(a), float(b), q_star, cfg.x_a)


def _target_kinetic(target_F, cfg):
    """Callable fbar of the target, analytic when allowed and known."""
    if cfg.use_closed_forms and target_F.source_shape is not None:
        fbar = analytic_kinetic(target_F.source_shape)
        if fbar is not None:
            return fbar
    return lambda s: kinetic_from_trajectory(target_F, s, clamp=True)


def _profile_K(state, cfg):
    """Callable K_n(x), analytic when allowed and known."""
    if cfg.use_closed_forms:
        K = analytic_K(state.current)
        if K is not None:
            return K
    lo, hi = cfg.v_bracket

    def K(x):
        fx = float(state.current(x))
        return K_from_trajectory(
            state.trajectory,
            fx,
            bracket=(lo, hi),
            widen_down=True,
            widen_up=True,
            boundary="accept",
        )

    return K


def _symbolic_power_step(state, target_F, cfg):
    """Exact PurePower iterate when both transform legs are power-form."""
    if not cfg.use_closed_forms:
        return None
    K = analytic_K(state.current)
    if K is None or K.power_p is None:
        return None
    if target_F.source_shape is None:
        return None
    fbar = analytic_kinetic(target_F.source_shape)
    if fbar is None or fbar.power_form is None:
        return None
    a, b, q, p = fbar.power_form
    # fbar(s) = a + b (p/sqrt(s))**q composed with K(x) = (p_n/x)**2
    return PurePower(a, b * (p / K.power_p) ** q, q)


def inversion_step(state: InversionState, target_F: EnergyTrajectory,
                   cfg: InversionConfig, reference: PotentialShape | None = None) -> InversionState:
    """One fixed-point pass; returns the next state with diagnostics."""
    t0 = time.perf_counter()
    grid = reconstruction_grid(cfg)

    new_shape = _symbolic_power_step(state, target_F, cfg)
    if new_shape is not None:
        stitch_jump = 0.0
        violation = 0.0
    else:
        fbar_t = _target_kinetic(target_F, cfg)
        K_n = _profile_K(state, cfg)
        raw = np.array([float(fbar_t(K_n(float(x)))) for x in grid])
        at_cut = float(fbar_t(K_n(cfg.x_a)))

        tail = fit_power_tail(target_F, cfg)
        stitch_jump = abs(float(tail(cfg.x_a)) - at_cut)

        fitted = _pava(raw)
        violation = float(np.max(raw - fitted)) if len(raw) else 0.0
        if violation > _PAVA_WARN:
            log.warning(
                "pass %d: monotone repair moved a node by %.3g", state.n + 1, violation
            )
        new_shape = Polygonal(grid, fitted, tail)

    traj = None
    if cfg.use_closed_forms:
        traj = analytic_trajectory(new_shape)
    if traj is None:
        traj = EnergyTrajectory.from_solver(new_shape, cfg.solver)

    sup = None
    if reference is not None:
        xs = np.concatenate(([cfg.x_a], grid))
        sup = sup_error(new_shape, reference, xs)

    record = IterationRecord(
        n=state.n + 1,
        seconds=time.perf_counter() - t0,
        stitch_jump=stitch_jump,
        max_violation=violation,
        sup_error=sup,
    )
    return InversionState(state.n + 1, new_shape, traj, state.history + (record,))


def run_inversion(seed: PotentialShape, target_F: EnergyTrajectory,
                  cfg: InversionConfig | None = None,
                  reference: PotentialShape | None = None) -> list[InversionState]:
    """Iterate from a seed shape toward the shape behind target_F.

    Returns one state per pass, seed first.  On a mid-run failure raises
    InversionAborted carrying the states completed so far.
    """
    cfg = cfg or InversionConfig()
    # a closed form, when one exists, IS the seed's energy curve;
    # solving for it numerically would only add noise
    seed_traj = analytic_trajectory(seed)
    if seed_traj is None:
        seed_traj = EnergyTrajectory.from_solver(seed, cfg.solver)

    states = [InversionState(0, seed, seed_traj)]

    for _ in range(cfg.iters):
        try:
            nxt = inversion_step(states[-1], target_F, cfg, reference)
        except (SolverError, TransformError, TailFitError, ValueError) as exc:
            raise InversionAborted(
                f"pass {states[-1].n + 1} failed: {exc}", states
            ) from exc
        prev = states[-1]
        states.append(nxt)
        if cfg.stop_change is not None:
            grid = reconstruction_grid(cfg)
            if sup_error(prev.current, nxt.current, grid) < cfg.stop_change:
                break
    return states