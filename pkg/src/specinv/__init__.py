"""Ground-state energy curves of one-dimensional Schrodinger operators,
and the reconstruction of a potential's shape from such a curve.

The package treats the family H = -d^2/dx^2 + v f(x) on the line, where
f is a symmetric attractive shape and v > 0 a coupling strength.  Three
layers build on each other:

``potentials``
    Shape families (pure powers, sech^2, reciprocal, shift/scale
    wrappers, stitched polygons) with their closed-form energy curves,
    kinetic potentials, and K profiles where those are known.
``eigensolver``
    A Numerov shooting solver for the even ground state, energy-curve
    sampling with caching, and the pure-power spectral constants.
``transforms``
    The Legendre-style pair linking an energy curve F(v) to its kinetic
    potential fbar(s), plus the derivative-free envelope forms used to
    evaluate either side from sampled data.
``inversion``
    The fixed-point reconstruction f_{n+1} = fbar_target(K_n(x)) that
    recovers a shape from a target energy curve, with the small-x
    power-law fit that pins the region the iteration cannot see.

The command-line front end lives in ``specinv.cli`` (installed as the
``specinv`` script), and ``specinv.verify`` bundles the self-check
property suites the CLI exposes.
"""

from .eigensolver import (
    DomainTooSmall,
    EnergyTrajectory,
    NoConvergence,
    SolverError,
    SolverOptions,
    ground_energy,
    power_ground_energy,
    read_trajectory_csv,
    trajectory_from_csv,
    trajectory_samples,
    worker_count,
    write_trajectory_csv,
)
from .inversion import (
    InversionAborted,
    InversionConfig,
    InversionState,
    IterationRecord,
    NoRoot,
    TailFitError,
    fit_power_tail,
    inversion_step,
    reconstruction_grid,
    run_inversion,
    sup_error,
)
from .potentials import (
    Polygonal,
    PotentialShape,
    PowerConstants,
    PowerTailModel,
    PurePower,
    Reciprocal,
    SechSquared,
    ShiftScale,
    analytic_K,
    analytic_kinetic,
    analytic_trajectory,
    apply_shift_scale,
    eval_potential,
    load_polygonal,
    p_from_energy,
    save_polygonal,
)
from .transforms import (
    BoundaryMaximum,
    BracketFailure,
    EnvelopeResult,
    KFunction,
    KineticPotential,
    SOutOfRange,
    TransformError,
    K_from_trajectory,
    envelope_trajectory,
    kinetic_from_trajectory,
    trajectory_from_kinetic,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # potentials
    "PotentialShape",
    "PurePower",
    "SechSquared",
    "Reciprocal",
    "ShiftScale",
    "Polygonal",
    "PowerTailModel",
    "PowerConstants",
    "eval_potential",
    "apply_shift_scale",
    "analytic_kinetic",
    "analytic_trajectory",
    "analytic_K",
    "p_from_energy",
    "save_polygonal",
    "load_polygonal",
    # eigensolver
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
    # transforms
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
    # inversion
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
