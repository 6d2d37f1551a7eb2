"""Ground-state solver: exact oracles, scaling laws, and the trajectory cache.

Independent oracles used below:

* reflectionless wells  f = -sech^2  at v = l(l+1): ground energy -l^2
  (closed form, l = 1, 2, 3).
* parabola f = x^2: E(v) = sqrt(v) exactly.
* linear well f = |x|: the even ground state satisfies Ai'(-E) = 0, so
  E is the magnitude of the first zero of Ai' (scipy.special.ai_zeros).
* dense matrix: a second discretization (central differences +
  scipy.linalg.eigh_tridiagonal) agrees with the shooting solver.
* width/shift composition: E_g(v) = a v + E(v b t^2)/t^2 for
  g = a + b f(./t).
"""

from __future__ import annotations

import math

import numpy as np
import pytest
import scipy.linalg
import scipy.special

from specinv import (
    DomainTooSmall,
    EnergyTrajectory,
    NoConvergence,
    PurePower,
    Reciprocal,
    SechSquared,
    ShiftScale,
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

pytestmark = pytest.mark.usefixtures("warm_solver")


# -------------------------------------------------------------- exact oracles


@pytest.mark.parametrize("v,expected", [(2.0, -1.0), (6.0, -4.0), (12.0, -9.0)])
def test_reflectionless_wells(v, expected):
    assert ground_energy(SechSquared(), v) == pytest.approx(expected, abs=1e-6)


@pytest.mark.parametrize("v", [0.25, 1.0, 4.0, 100.0])
def test_parabola_sqrt_law(v):
    assert ground_energy(PurePower(0.0, 1.0, 2.0), v) == pytest.approx(
        math.sqrt(v), abs=1e-7
    )


def test_linear_well_airy():
    # even ground state of -psi'' + |x| psi: first zero of Ai'
    a_prime = scipy.special.ai_zeros(1)[1][0]
    constants = power_ground_energy(1.0)
    assert constants.energy == pytest.approx(-a_prime, abs=1e-8)
    assert constants.p == pytest.approx(0.3958011247, abs=1e-7)


def test_parabola_constants():
    constants = power_ground_energy(2.0)
    assert constants.energy == pytest.approx(1.0, abs=1e-9)
    assert constants.p == pytest.approx(0.5, abs=1e-9)


def test_power_constant_cache():
    first = power_ground_energy(2.0)
    second = power_ground_energy(2.0)
    assert second is first  # memoized for default options
    assert power_ground_energy(2.0, SolverOptions(e_tol=1e-7)) is not first


def test_strong_parabola():
    # -psi'' + 4 x^2 psi: ground energy 2 exactly
    assert ground_energy(PurePower(0.0, 4.0, 2.0), 1.0) == pytest.approx(2.0, abs=1e-7)


def test_dense_matrix_cross_check():
    # independent discretization: central differences on a fixed box
    shape = Reciprocal(5.0)
    v = 40.0
    L, n = 25.0, 16000
    xs = np.linspace(-L, L, n)
    h = xs[1] - xs[0]
    diag = 2.0 / h**2 + v * np.asarray(shape(xs))
    off = np.full(n - 1, -1.0 / h**2)
    e_dense = scipy.linalg.eigh_tridiagonal(
        diag, off, select="i", select_range=(0, 0)
    )[0][0]
    e_shoot = ground_energy(shape, v)
    assert e_shoot == pytest.approx(e_dense, abs=5e-5)


def test_shift_scale_energy_law():
    # E_g(v) = a v + E(v b t^2) / t^2
    inner = SechSquared()
    a, b, t = -0.3, 2.0, 1.7
    g = ShiftScale(inner, a=a, b=b, t=t)
    v = 3.0
    lhs = ground_energy(g, v)
    rhs = a * v + ground_energy(inner, v * b * t * t) / t**2
    assert lhs == pytest.approx(rhs, abs=2e-9)


# ------------------------------------------------------------------ validation


def test_rejects_bad_couplings():
    with pytest.raises(ValueError):
        ground_energy(SechSquared(), 0.0)
    with pytest.raises(ValueError):
        ground_energy(SechSquared(), -1.0)


def test_solver_options_validation():
    with pytest.raises(ValueError):
        SolverOptions(e_tol=0.0)
    with pytest.raises(ValueError):
        SolverOptions(x_max=-1.0)
    with pytest.raises(ValueError):
        SolverOptions(mesh=0.0)
    with pytest.raises(ValueError):
        SolverOptions(max_bisections=0)


def test_domain_too_small():
    # a box of radius 1 cannot hold the v=2 bound state's tail
    with pytest.raises(DomainTooSmall):
        ground_energy(SechSquared(), 2.0, SolverOptions(x_max=1.0))


def test_no_convergence():
    with pytest.raises(NoConvergence):
        ground_energy(SechSquared(), 2.0, SolverOptions(max_bisections=3))


def test_solver_errors_are_solvererror():
    assert issubclass(DomainTooSmall, SolverError)
    assert issubclass(NoConvergence, SolverError)


# --------------------------------------------------------------- trajectories


def test_trajectory_caches_solves():
    traj = EnergyTrajectory.from_solver(SechSquared())
    assert traj.n_solves == 0
    e1 = traj(2.0)
    assert traj.n_solves == 1
    e2 = traj(2.0)
    assert traj.n_solves == 1  # served from cache
    assert e2 == e1


def test_trajectory_samples_presolves():
    vs = [0.5, 2.0, 6.0]
    traj = trajectory_samples(SechSquared(), vs)
    assert traj.n_solves == len(vs)
    for v in vs:
        traj(v)
    assert traj.n_solves == len(vs)


def test_trajectory_samples_validation():
    with pytest.raises(ValueError):
        trajectory_samples(SechSquared(), [])
    with pytest.raises(ValueError):
        trajectory_samples(SechSquared(), [1.0, -2.0])


def test_trajectory_concavity():
    # F(v) is concave: chords lie below the curve
    traj = EnergyTrajectory.from_solver(SechSquared())
    vs = np.geomspace(0.5, 40.0, 9)
    es = np.array([traj(v) for v in vs])
    for i in range(len(vs) - 2):
        v_lo, v_mid, v_hi = vs[i], vs[i + 1], vs[i + 2]
        w = (v_mid - v_lo) / (v_hi - v_lo)
        chord = (1 - w) * es[i] + w * es[i + 2]
        assert es[i + 1] >= chord - 1e-9


def test_trajectory_bounds():
    # inf f <= F(v)/v <= sup f
    traj = EnergyTrajectory.from_solver(SechSquared())
    for v in (0.5, 3.0, 20.0):
        ratio = traj(v) / v
        assert -1.0 - 1e-9 <= ratio <= 0.0 + 1e-9


def test_trajectory_derivative_matches_closed_form(sech_F):
    traj = EnergyTrajectory.from_solver(SechSquared())
    for v in (1.0, 4.0, 20.0):
        assert traj.derivative(v) == pytest.approx(sech_F.derivative(v), abs=2e-5)


def test_trajectory_domain_enforced():
    vs = np.geomspace(1.0, 10.0, 6)
    es = np.sqrt(vs)
    traj = EnergyTrajectory.from_samples(vs, es)
    assert traj(2.5) == pytest.approx(math.sqrt(2.5), abs=1e-3)
    with pytest.raises(ValueError):
        traj(0.5)
    with pytest.raises(ValueError):
        traj(20.0)


def test_from_samples_accuracy(sech_F):
    vs = np.geomspace(0.1, 100.0, 60)
    es = np.array([sech_F(v) for v in vs])
    traj = EnergyTrajectory.from_samples(vs, es)
    for v in (0.3, 2.0, 6.0, 12.0, 70.0):
        assert traj(v) == pytest.approx(sech_F(v), rel=1e-4, abs=1e-5)
        assert traj.derivative(v) == pytest.approx(sech_F.derivative(v), rel=5e-3)


def test_from_samples_needs_enough_rows():
    with pytest.raises(ValueError):
        EnergyTrajectory.from_samples([1.0, 2.0], [1.0, 1.4])


# ----------------------------------------------------------------- CSV and env


def test_csv_round_trip(tmp_path):
    vs = np.geomspace(0.1, 100.0, 8)
    es = np.sqrt(vs)
    path = tmp_path / "traj.csv"
    write_trajectory_csv(path, vs, es)
    vs2, es2 = read_trajectory_csv(path)
    np.testing.assert_array_equal(vs2, vs)
    np.testing.assert_array_equal(es2, es)
    assert path.read_text().splitlines()[0] == "v,E"


def test_trajectory_from_csv(tmp_path, sech_F):
    vs = np.geomspace(0.5, 50.0, 40)
    es = np.array([sech_F(v) for v in vs])
    path = tmp_path / "traj.csv"
    write_trajectory_csv(path, vs, es)
    traj = trajectory_from_csv(path)
    assert traj(6.0) == pytest.approx(-4.0, abs=2e-4)
    assert traj.v_range == (pytest.approx(0.5), pytest.approx(50.0))


def test_read_csv_rejects_bad_header(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("a,b\n1,2\n")
    with pytest.raises(ValueError):
        read_trajectory_csv(path)


def test_worker_count(monkeypatch):
    monkeypatch.delenv("SPECINV_THREADS", raising=False)
    assert worker_count() == 1
    monkeypatch.setenv("SPECINV_THREADS", "4")
    assert worker_count() == 4
    monkeypatch.setenv("SPECINV_THREADS", "0")
    assert worker_count() == 1
    monkeypatch.setenv("SPECINV_THREADS", "rubbish")
    assert worker_count() == 1


def test_threaded_sampling_matches_sequential(monkeypatch):
    vs = [0.7, 2.0, 5.0, 11.0]
    monkeypatch.delenv("SPECINV_THREADS", raising=False)
    seq = trajectory_samples(SechSquared(), vs)
    monkeypatch.setenv("SPECINV_THREADS", "2")
    par = trajectory_samples(SechSquared(), vs)
    for v in vs:
        assert par(v) == seq(v)
