"""Tests for environment-driven numerical settings."""

# Third-party imports
import pytest

# Local imports
from src.corners.settings import (
    Settings,
    SettingsError,
    get_settings,
    load_settings,
    reset_settings,
)


class TestLoadSettings:
    """Parsing and validation of environment values."""

    def test_defaults(self):
        """Test an empty environment yields the documented defaults."""
        settings = load_settings({})
        assert settings == Settings()
        assert settings.n_terms == 8
        assert settings.quad_panels == 2048
        assert settings.winslow_relaxation == 1.7
        assert settings.winslow_tolerance == 1e-10
        assert settings.output_dir == "out"

    def test_overrides(self):
        """Test environment values are converted to their field types."""
        settings = load_settings(
            {
                "CORNERS_N_TERMS": "12",
                "CORNERS_BISECTION_TOL": "1e-13",
                "WINSLOW_ITER_FACTOR": "50",
                "CORNERS_LOG_LEVEL": "debug",
            }
        )
        assert settings.n_terms == 12
        assert settings.bisection_tol == 1e-13
        assert settings.winslow_iter_factor == 50
        assert settings.log_level == "DEBUG"

    @pytest.mark.parametrize(
        "key,value",
        [
            ("CORNERS_N_TERMS", "eight"),
            ("CORNERS_N_TERMS", "1"),
            ("CORNERS_QUAD_PANELS", "2047"),
            ("CORNERS_ASYM_RADIUS_FRACTION", "1.5"),
            ("WINSLOW_RELAXATION", "2.0"),
            ("WINSLOW_TOLERANCE", "0"),
            ("CORNERS_LOG_LEVEL", "LOUD"),
        ],
    )
    def test_invalid_values(self, key, value):
        """Test unparsable or out-of-range values raise SettingsError."""
        with pytest.raises(SettingsError):
            load_settings({key: value})

    def test_all_problems_reported(self):
        """Test several bad values are reported together."""
        with pytest.raises(SettingsError) as excinfo:
            load_settings({"CORNERS_N_TERMS": "0", "WINSLOW_ITER_FACTOR": "0"})
        assert "CORNERS_N_TERMS" in str(excinfo.value)
        assert "WINSLOW_ITER_FACTOR" in str(excinfo.value)


class TestCachedSettings:
    """Process-wide settings cache."""

    def test_cached_until_reset(self, monkeypatch):
        """Test get_settings reads the environment once until reset."""
        monkeypatch.setenv("CORNERS_N_TERMS", "5")
        reset_settings()
        first = get_settings()
        assert first.n_terms == 5

        monkeypatch.setenv("CORNERS_N_TERMS", "6")
        assert get_settings() is first

        reset_settings()
        assert get_settings().n_terms == 6
