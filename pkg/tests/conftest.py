"""Shared fixtures for corner-map, mesh and command-line tests."""

# Standard library imports
import sys
from pathlib import Path

# Add project root to path
sys.path.insert(0, str(Path(__file__).parent.parent))

# Third-party imports
import numpy as np  # noqa: E402
import pytest  # noqa: E402

# Local imports
from src.corners.corner_model import CornerConfig  # noqa: E402
from src.corners.harmonic_map import (  # noqa: E402
    HarmonicCornerMap,
    conformal_arc_samples,
    fit_map_from_arc,
)
from src.corners.settings import reset_settings  # noqa: E402

SETTINGS_ENV = (
    "CORNERS_N_TERMS",
    "CORNERS_QUAD_PANELS",
    "CORNERS_ASYM_RADIUS_FRACTION",
    "CORNERS_SAMPLES_PER_DECADE",
    "CORNERS_BISECTION_TOL",
    "WINSLOW_RELAXATION",
    "WINSLOW_TOLERANCE",
    "WINSLOW_ITER_FACTOR",
    "CORNERS_LOG_LEVEL",
    "CORNERS_OUTPUT_DIR",
)


@pytest.fixture(autouse=True)
def default_settings(monkeypatch):
    """Run every test with the built-in numerical defaults."""
    for key in SETTINGS_ENV:
        monkeypatch.delenv(key, raising=False)
    reset_settings()
    yield
    reset_settings()


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240611)


@pytest.fixture
def acute_map() -> HarmonicCornerMap:
    """beta = 0.5 with unequal side speeds, so phi_star != 0."""
    cfg = CornerConfig(beta=0.5, sigma_plus=1.5, sigma_minus=0.8)
    return HarmonicCornerMap.from_coefficients(cfg, [0.9, 0.3, -0.1], [1.1, -0.2, 0.05])


@pytest.fixture
def reentrant_map() -> HarmonicCornerMap:
    """beta = 1.5 with unequal side speeds."""
    cfg = CornerConfig(beta=1.5, sigma_plus=1.0, sigma_minus=0.7)
    return HarmonicCornerMap.from_coefficients(cfg, [0.8, 0.25, 0.05], [1.2, -0.15, 0.02])


@pytest.fixture
def conformal_fit() -> HarmonicCornerMap:
    """Map fitted to the conformal arc data for beta = 0.5, sigma_plus = 2, sigma_minus = 1."""
    cfg = CornerConfig(beta=0.5, sigma_plus=2.0, sigma_minus=1.0)
    phi, values = conformal_arc_samples(cfg)
    return fit_map_from_arc(cfg, phi, values)
