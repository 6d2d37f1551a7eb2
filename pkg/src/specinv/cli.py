"""Command-line driver: forward solves, inversion runs, self checks.

Exit codes: 0 success, 1 usage error or failed self check, 2 runtime
failure (solver or inversion step), with diagnostics on stderr.  Data
files are deterministic: values at 17 significant digits, no
timestamps, so identical invocations produce byte-identical CSVs.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict
from pathlib import Path

from .eigensolver import (
    EnergyTrajectory,
    SolverError,
    SolverOptions,
    trajectory_from_csv,
    trajectory_samples,
)
from .inversion import (
    InversionAborted,
    InversionConfig,
    reconstruction_grid,
    run_inversion,
    sup_error,
)
from .potentials import (
    Polygonal,
    PotentialShape,
    PurePower,
    Reciprocal,
    SechSquared,
    analytic_trajectory,
    save_polygonal,
)
from .verify import SUITES, run_suite

__all__ = ["main", "parse_shape"]

_ALIASES = {
    "osc20": lambda: PurePower(-1.0, 1.0 / 20.0, 2.0),
    "recip5": lambda: Reciprocal(5.0),
}


def parse_shape(spec: str) -> PotentialShape:
    """Build a shape from `name[:param,param,...]` mini-grammar.

    Accepted: `sech2`, `power:A,B,q`, `recip:t`, and the seed aliases
    `osc20` (-1 + x^2/20) and `recip5` (-1/(1+x/5)).
    """
    name, _, argstr = spec.partition(":")
    name = name.strip().lower()
    args = [float(tok) for tok in argstr.split(",") if tok.strip()] if argstr else []
    if name in _ALIASES:
        if args:
            raise ValueError(f"alias {name!r} takes no parameters")
        return _ALIASES[name]()
    if name == "sech2":
        if args:
            raise ValueError("sech2 takes no parameters")
        return SechSquared()
    if name == "power":
        if len(args) != 3:
            raise ValueError("power takes exactly A,B,q")
        return PurePower(*args)
    if name == "recip":
        if len(args) != 1:
            raise ValueError("recip takes exactly t")
        return Reciprocal(args[0])
    raise ValueError(
        f"unknown shape {spec!r}; use sech2, power:A,B,q, recip:t, osc20, recip5"
    )


class _Parser(argparse.ArgumentParser):
    """argparse flavor whose usage failures exit 1 instead of 2."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _build_parser() -> _Parser:
    parser = _Parser(prog="specinv", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    fwd = sub.add_parser("forward", help="sample an energy curve E(v) for a shape")
    fwd.add_argument("--shape", required=True, help="shape spec, e.g. sech2 or power:0,1,2")
    fwd.add_argument("--v", required=True, help="comma-separated positive couplings")
    fwd.add_argument("--out", default="-", help="output CSV path ('-' = stdout)")
    fwd.add_argument("--x-max", type=float, default=None, help="fixed domain truncation")
    fwd.add_argument("--mesh", type=float, default=None, help="fixed integration step")
    fwd.add_argument("--e-tol", type=float, default=1e-9, help="eigenvalue tolerance")

    inv = sub.add_parser("invert", help="reconstruct a shape from a target energy curve")
    inv.add_argument("--seed", required=True, help="starting shape spec")
    inv.add_argument("--target", default=None, help="target shape spec (closed-form curve)")
    inv.add_argument("--trajectory-csv", default=None, help="target curve as a v,E CSV")
    inv.add_argument("--iters", type=int, default=5, help="number of passes")
    inv.add_argument("--xa", type=float, default=0.2, help="power-core cutoff")
    inv.add_argument("--grid", default="40", help="node count N or N,XHI (default 40,4)")
    inv.add_argument("--v-bracket", default="0.0008,175", help="initial K-search window LO,HI")
    inv.add_argument("--out", default=".", help="output directory")
    inv.add_argument("--e-tol", type=float, default=1e-9, help="eigenvalue tolerance")

    ver = sub.add_parser("verify", help="run a property self-check suite")
    ver.add_argument("suite", help="one of: " + ", ".join(sorted(SUITES)))
    return parser


def _parse_couplings(parser, text: str) -> list[float]:
    toks = [tok for tok in text.split(",") if tok.strip()]
    if not toks:
        parser.error("--v needs at least one coupling")
    try:
        vs = [float(tok) for tok in toks]
    except ValueError:
        parser.error(f"could not parse couplings from {text!r}")
    if any(not v > 0.0 for v in vs):
        parser.error("all couplings must be positive")
    return vs


def _parse_pair(parser, text: str, flag: str) -> tuple[float, float]:
    try:
        lo, hi = (float(tok) for tok in text.split(","))
    except ValueError:
        parser.error(f"{flag} needs LO,HI, got {text!r}")
    return lo, hi


def _cmd_forward(parser, args) -> int:
    try:
        shape = parse_shape(args.shape)
    except ValueError as exc:
        parser.error(str(exc))
    vs = _parse_couplings(parser, args.v)
    opts = SolverOptions(x_max=args.x_max, mesh=args.mesh, e_tol=args.e_tol)
    try:
        traj = trajectory_samples(shape, vs, opts)
        rows = [(v, traj(v)) for v in vs]
    except SolverError as exc:
        print(f"specinv forward: solver failed: {exc}", file=sys.stderr)
        return 2
    text = "v,E\n" + "".join(f"{v:.17g},{e:.17g}\n" for v, e in rows)
    if args.out == "-":
        sys.stdout.write(text)
    else:
        Path(args.out).write_text(text)
    return 0


def _write_iterations(states, out_dir: Path) -> None:
    for st in states[1:]:
        if isinstance(st.current, Polygonal):
            save_polygonal(st.current, out_dir / f"f{st.n}.csv")


def _cmd_invert(parser, args) -> int:
    if (args.target is None) == (args.trajectory_csv is None):
        parser.error("give exactly one of --target or --trajectory-csv")
    try:
        seed = parse_shape(args.seed)
    except ValueError as exc:
        parser.error(str(exc))

    grid_parts = args.grid.split(",")
    try:
        grid_points = int(grid_parts[0])
        grid_hi = float(grid_parts[1]) if len(grid_parts) > 1 else 4.0
    except ValueError:
        parser.error(f"--grid needs N or N,XHI, got {args.grid!r}")
    v_lo, v_hi = _parse_pair(parser, args.v_bracket, "--v-bracket")

    reference = None
    if args.target is not None:
        try:
            reference = parse_shape(args.target)
        except ValueError as exc:
            parser.error(str(exc))
        target_F = analytic_trajectory(reference)
        if target_F is None:
            target_F = EnergyTrajectory.from_solver(reference, SolverOptions(e_tol=args.e_tol))
    else:
        try:
            target_F = trajectory_from_csv(args.trajectory_csv)
        except (OSError, ValueError) as exc:
            print(f"specinv invert: bad trajectory CSV: {exc}", file=sys.stderr)
            return 2

    try:
        cfg = InversionConfig(
            x_a=args.xa,
            grid_points=grid_points,
            grid_hi=grid_hi,
            iters=args.iters,
            v_bracket=(v_lo, v_hi),
            solver=SolverOptions(e_tol=args.e_tol),
        )
    except ValueError as exc:
        parser.error(str(exc))

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)

    aborted = None
    try:
        states = run_inversion(seed, target_F, cfg, reference=reference)
    except InversionAborted as exc:
        aborted = str(exc)
        states = exc.states
    _write_iterations(states, out_dir)

    grid = reconstruction_grid(cfg)
    seed_error = sup_error(seed, reference, grid) if reference is not None else None
    summary = {
        "seed": args.seed,
        "target": args.target if args.target is not None else args.trajectory_csv,
        "config": {
            "x_a": cfg.x_a,
            "grid_points": cfg.grid_points,
            "grid_hi": cfg.grid_hi,
            "tail_v": list(cfg.tail_v),
            "iters": cfg.iters,
            "v_bracket": list(cfg.v_bracket),
            "e_tol": cfg.solver.e_tol,
        },
        "seed_sup_error": seed_error,
        "iterations": [asdict(rec) for rec in states[-1].history],
        "aborted": aborted,
    }
    (out_dir / "summary.json").write_text(json.dumps(summary, indent=2) + "\n")
    if aborted is not None:
        print(f"specinv invert: {aborted}", file=sys.stderr)
        return 2
    return 0


def _cmd_verify(parser, args) -> int:
    try:
        report = run_suite(args.suite)
    except KeyError as exc:
        parser.error(exc.args[0])
    for line in report.lines():
        print(line)
    return 0 if report.passed else 1


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "forward":
            return _cmd_forward(parser, args)
        if args.command == "invert":
            return _cmd_invert(parser, args)
        return _cmd_verify(parser, args)
    except SystemExit as exc:
        # argparse exits on usage errors and --help; surface the code as
        # a return value so embedders never see the interpreter die
        if exc.code is None:
            return 0
        return exc.code if isinstance(exc.code, int) else 1


if __name__ == "__main__":
    raise SystemExit(main())
