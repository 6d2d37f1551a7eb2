"""Dual transforms between energy curves and kinetic potentials.

For an attractive symmetric shape f the ground-state energy of
-d^2/dx^2 + v f(x) defines a concave curve F(v).  Its Legendre-type dual
is the kinetic potential fbar(s): the lowest mean value of f over
normalized states whose mean kinetic energy is s.  The pair satisfies

    fbar(s) = F'(v),        s = F(v) - v F'(v),
    F(v)    = min_{s>0} { s + v fbar(s) }.

The third object is the K map, K(x) = fbar^{-1}(f(x)), recoverable from
F alone through a derivative-free maximization

    K(x) = max_{v>0} { F(v) - v f(x) },

which is what makes reconstruction of f from F practical.  This module
implements the three directions plus the envelope approximation for
transformed shapes g(f(x)).

Energy curves are duck-typed: any callable F(v) works, and an exact
``derivative`` attribute is used when present (central differences
otherwise).  All 1-D searches run on a log-v (or log-s) axis because the
interesting couplings span many decades.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple

from scipy.optimize import brentq

__all__ = [
    "KineticPotential",
    "KFunction",
    "EnvelopeResult",
    "TransformError",
    "SOutOfRange",
    "BracketFailure",
    "BoundaryMaximum",
    "kinetic_from_trajectory",
    "trajectory_from_kinetic",
    "K_from_trajectory",
    "envelope_trajectory",
]

# widest coupling / kinetic-energy windows any search is allowed to touch
_V_FLOOR, _V_CEIL = 1e-13, 1e13
_S_FLOOR, _S_CEIL = 1e-12, 1e12

_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


class TransformError(Exception):
    """Base class for transform failures."""


class SOutOfRange(TransformError):
    """Requested mean kinetic energy is outside the achievable range."""


class BracketFailure(TransformError):
    """A 1-D search could not bracket an interior extremum."""


class BoundaryMaximum(TransformError):
    """K-search maximum stayed on the bracket edge after widening."""


@dataclass(frozen=True)
class KineticPotential:
    """Kinetic potential fbar(s) with provenance.

    fn evaluates fbar at s > 0.  Contract: strictly decreasing, convex,
    range inside [inf f, sup f].  power_form, when set, records that
    fbar(s) = a + b (p / sqrt(s))**q as the tuple (a, b, q, p); the
    inversion driver uses it to compose power-law steps exactly.
    """

    fn: Callable[[float], float]
    provenance: str = "closed-form"  # or "transformed-from-trajectory"
    power_form: tuple[float, float, float, float] | None = None

    def __call__(self, s: float) -> float:
        return self.fn(s)


@dataclass(frozen=True)
class KFunction:
    """K map x -> fbar^{-1}(f(x)).  Decreasing on x > 0.

    power_p, when set, records K(x) = (power_p / x)**2.
    """

    fn: Callable[[float], float]
    provenance: str = "closed-form"
    power_p: float | None = None

    def __call__(self, x: float) -> float:
        return self.fn(x)


class EnvelopeResult(NamedTuple):
    value: float
    bound: str | None  # "lower", "upper", or None


def _derivative(F, v: float) -> float:
    """F'(v): exact when F carries one, else guarded central difference."""
    exact = getattr(F, "derivative", None)
    if exact is not None:
        return exact(v)
    h = min(max(1e-4 * v, 1e-6), 0.5 * v)
    return (F(v + h) - F(v - h)) / (2.0 * h)


def _v_window(F) -> tuple[float, float]:
    """Coupling window a search may probe, clipped to F's own domain."""
    lo, hi = _V_FLOOR, _V_CEIL
    rng = getattr(F, "v_range", None)
    if rng is not None:
        lo, hi = max(lo, rng[0]), min(hi, rng[1])
    return lo, hi


def _golden_max_log(f, lo: float, hi: float, rel_tol: float = 1e-10):
    """Golden-section maximum of f on [lo, hi], iterating in log space.

    Returns (argmax, max).  The log axis makes rel_tol a relative width
    in the original variable.
    """
    a, b = math.log(lo), math.log(hi)
    x1 = b - _INVPHI * (b - a)
    x2 = a + _INVPHI * (b - a)
    f1 = f(math.exp(x1))
    f2 = f(math.exp(x2))
    best_x, best_f = (x1, f1) if f1 >= f2 else (x2, f2)
    while (b - a) > rel_tol:
        if f1 >= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - _INVPHI * (b - a)
            f1 = f(math.exp(x1))
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + _INVPHI * (b - a)
            f2 = f(math.exp(x2))
        if f1 > best_f:
            best_x, best_f = x1, f1
        if f2 > best_f:
            best_x, best_f = x2, f2
    return math.exp(best_x), best_f


def _scan_log(f, lo: float, hi: float, n: int, skip_errors=()):
    """Evaluate f on n log-spaced points of [lo, hi] (endpoints included).

    Exceptions listed in skip_errors mark the point as unusable (-inf).
    Returns (points, values).
    """
    step = (math.log(hi) - math.log(lo)) / (n - 1)
    xs, vals = [], []
    for i in range(n):
        x = math.exp(math.log(lo) + i * step)
        try:
            vals.append(f(x))
        except skip_errors:
            vals.append(-math.inf)
        xs.append(x)
    return xs, vals


def kinetic_from_trajectory(F, s: float, *, clamp: bool = False) -> float:
    """fbar(s) recovered from the energy curve F.

    Solves s = F(v) - v F'(v) for the coupling v (the right side is
    increasing in v) and returns F'(v).  With clamp=True an s outside
    the achievable window returns the value at the nearest window edge
    instead of raising SOutOfRange; the inversion driver opts in for
    deep-tail grid points where the target approaches its asymptote.
    """
    v_lo, v_hi = _v_window(F)

    def mean_kinetic(v: float) -> float:
        return F(v) - v * _derivative(F, v)

    if not s > 0.0:
        if clamp:
            return _derivative(F, v_lo)
        raise SOutOfRange(f"mean kinetic energy s={s!r} must be positive")

    lo = hi = min(max(1.0, 16.0 * v_lo), v_hi)
    s_lo = s_hi = mean_kinetic(lo)
    while s_lo > s:
        if lo <= v_lo * (1.0 + 1e-12):
            if clamp:
                return _derivative(F, lo)
            raise SOutOfRange(f"s={s:g} below achievable range (>= {s_lo:g})")
        lo = max(lo / 16.0, v_lo)
        s_lo = mean_kinetic(lo)
    while s_hi < s:
        if hi >= v_hi * (1.0 - 1e-12):
            if clamp:
                return _derivative(F, hi)
            raise SOutOfRange(f"s={s:g} above achievable range (<= {s_hi:g})")
        hi = min(hi * 16.0, v_hi)
        s_hi = mean_kinetic(hi)
    if lo == hi:  # landed exactly on s at the first probe
        return _derivative(F, lo)
    v_star = brentq(lambda v: mean_kinetic(v) - s, lo, hi, rtol=1e-13, maxiter=256)
    return _derivative(F, v_star)


def trajectory_from_kinetic(fbar, v: float, *, rel_tol: float = 1e-10) -> float:
    """F(v) = min over s > 0 of { s + v fbar(s) }.

    Derivative-free: a coarse log scan locates the convex objective's
    trough, golden-section refines it.  Raises BracketFailure when the
    minimum sticks to the search window edge.
    """
    if not v > 0.0:
        raise ValueError(f"coupling v={v!r} must be positive")

    def neg_objective(s: float) -> float:
        try:
            return -(s + v * fbar(s))
        except SOutOfRange:
            return -math.inf

    n = 49
    xs, vals = _scan_log(neg_objective, _S_FLOOR, _S_CEIL, n)
    k = max(range(n), key=lambda i: vals[i])
    if not math.isfinite(vals[k]):
        raise BracketFailure("kinetic potential not evaluable on the search window")
    if k == 0 or k == n - 1:
        raise BracketFailure(
            f"minimum of s + v*fbar(s) stuck at window edge s={xs[k]:g} (v={v:g})"
        )
    s_star, neg_best = _golden_max_log(neg_objective, xs[k - 1], xs[k + 1], rel_tol)
    return min(-neg_best, -vals[k])


def K_from_trajectory(
    F,
    f_x: float,
    *,
    bracket: tuple[float, float] = (8e-4, 175.0),
    widen_down: bool = True,
    widen_up: bool = True,
    widen_factor: float = 8.0,
    max_widen: int = 16,
    boundary: str = "error",
    full_output: bool = False,
):
    """K at a point: max over v > 0 of { F(v) - v f_x }.

    f_x is the shape value at the point of interest; the maximum value
    equals the mean kinetic energy s with fbar(s) = f_x.  The search is
    golden-section on log v, with the default bracket widened
    geometrically whenever the scan maximum lands on an edge.  When
    widening is exhausted (or disabled on that side), boundary="error"
    raises BoundaryMaximum and boundary="accept" returns the edge value;
    the inversion driver accepts the low edge, where targets that
    approach an asymptote push the maximizer toward v -> 0.

    full_output=True returns (s, v_at_max).
    """
    if boundary not in ("error", "accept"):
        raise ValueError(f"boundary={boundary!r} not in ('error', 'accept')")
    v_floor, v_ceil = _v_window(F)
    lo, hi = bracket
    if not (0.0 < lo < hi):
        raise ValueError(f"bad bracket {bracket!r}")
    lo, hi = max(lo, v_floor), min(hi, v_ceil)

    def gain(v: float) -> float:
        return F(v) - v * f_x

    n = 25
    for _ in range(max_widen):
        xs, vals = _scan_log(gain, lo, hi, n)
        k = max(range(n), key=lambda i: vals[i])
        if k == 0 and widen_down and lo > v_floor * (1.0 + 1e-12):
            lo = max(lo / widen_factor, v_floor)
        elif k == n - 1 and widen_up and hi < v_ceil * (1.0 - 1e-12):
            hi = min(hi * widen_factor, v_ceil)
        else:
            break
    else:
        xs, vals = _scan_log(gain, lo, hi, n)
        k = max(range(n), key=lambda i: vals[i])

    if k == 0 or k == n - 1:
        exhausted = (k == 0 and (not widen_down or lo <= v_floor * (1.0 + 1e-12))) or (
            k == n - 1 and (not widen_up or hi >= v_ceil * (1.0 - 1e-12))
        )
        if not exhausted or boundary == "error":
            raise BoundaryMaximum(
                f"max of F(v) - v*f_x stayed at v={xs[k]:g} for f_x={f_x:g}; "
                "shape value outside the representable range"
            )
        return (vals[k], xs[k]) if full_output else vals[k]

    v_star, s = _golden_max_log(gain, xs[k - 1], xs[k + 1])
    if vals[k] > s:
        v_star, s = xs[k], vals[k]
    return (s, v_star) if full_output else s


def envelope_trajectory(seed_fbar, g, v: float, *, convexity: str | None = None):
    """Envelope approximation for a transformed shape g(f(x)).

    Approximates the transformed shape's kinetic potential by
    g(seed_fbar(s)) and minimizes s + v * g(seed_fbar(s)).  When g is
    declared "convex" the result is a lower bound on the true energy,
    "concave" an upper bound; None leaves the result untagged.  Exact
    whenever g is affine.
    """
    if convexity not in (None, "convex", "concave"):
        raise ValueError(f"convexity={convexity!r} not in (None, 'convex', 'concave')")
    value = trajectory_from_kinetic(lambda s: g(seed_fbar(s)), v)
    bound = {None: None, "convex": "lower", "concave": "upper"}[convexity]
    return EnvelopeResult(value, bound)
