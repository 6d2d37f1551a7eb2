"""Shared fixtures: a warmed-up solver and frequently used closed forms."""

from __future__ import annotations

import sys

import pytest

from specinv import (
    EnergyTrajectory,
    PurePower,
    SechSquared,
    analytic_trajectory,
    ground_energy,
)


@pytest.fixture(scope="session")
def warm_solver() -> None:
    """Trigger JIT compilation once so timed tests measure physics, not compilers."""
    ground_energy(PurePower(0.0, 1.0, 2.0), 1.0)


@pytest.fixture(scope="session")
def sech_F() -> EnergyTrajectory:
    """Closed-form ground-state energy curve of the sech-squared well."""
    F = analytic_trajectory(SechSquared())
    assert F is not None
    return F


@pytest.fixture(scope="session")
def sqrt_F() -> EnergyTrajectory:
    """Closed-form curve of the unit parabola: E(v) = sqrt(v)."""
    F = analytic_trajectory(PurePower(0.0, 1.0, 2.0))
    assert F is not None
    return F


def pytest_terminal_summary(terminalreporter):
    """Echo the acceptance-criteria lines after the run, capture or not."""
    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    lines = getattr(mod, "ACCEPTANCE_LINES", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
