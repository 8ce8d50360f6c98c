import sys

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from dnlslab.grid import SpectralGrid
from dnlslab.soliton import kappa0

settings.register_profile(
    "dnlslab", deadline=None, max_examples=25, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("dnlslab")


def gaussian_field(grid, rng, bumps=3, width=(0.6, 1.4), spread=3.0, twist=2.0):
    """Smooth localized complex field: a few Gaussians with random chirps.

    Its spectrum is negligible far below the Nyquist wavenumber of the grids
    used in the tests, so it counts as band-limited.
    """
    x = grid.x
    u = np.zeros_like(x, dtype=complex)
    for _ in range(bumps):
        a = rng.normal() + 1j * rng.normal()
        x0 = rng.uniform(-spread, spread)
        w = rng.uniform(*width)
        kap = rng.uniform(-twist, twist)
        u += a * np.exp(-(((x - x0) / w) ** 2) + 1j * kap * x)
    return u


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def degenerate():
    """kappa0 data for the quintic coefficients used throughout the tests."""
    return {b: kappa0(b) for b in (0.0, 0.5, 1.0)}


@pytest.fixture(scope="session")
def grid40():
    return SpectralGrid(40.0, 1024)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
