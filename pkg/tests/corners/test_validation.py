"""Tests for random coefficient sets and the oracle validation suite."""

# Third-party imports
import numpy as np
import pytest

# Local imports
from src.corners.validation import (
    DEFAULT_BETAS,
    Tolerances,
    ValidationReport,
    ValidationRow,
    ValidationSetupError,
    random_corner_map,
    run_validation_suite,
    validate_kit,
    well_conditioned_kit,
)


class TestRandomCornerMap:
    """Admissible random coefficient sets."""

    def test_ranges(self, rng):
        """Test drawn coefficients and speeds stay in their documented ranges."""
        for beta in (0.4, 1.6):
            for _ in range(50):
                fmap = random_corner_map(rng, beta)
                a, b = np.array(fmap.coeffs.a), np.array(fmap.coeffs.b)
                assert fmap.coeffs.n_terms == 8
                assert 0.5 <= abs(a[0]) <= 1.5
                assert 0.5 <= b[0] <= 1.5
                bounds = 0.5 * 0.5 ** np.arange(2, 9)
                assert np.all(np.abs(a[1:]) <= bounds)
                assert np.all(np.abs(b[1:]) <= bounds)
                assert 0.5 <= fmap.config.sigma_plus <= 2.0
                assert 0.5 <= fmap.config.sigma_minus <= 2.0

    def test_seed_reproducible(self):
        """Test equal seeds give equal maps."""
        first = random_corner_map(np.random.default_rng(3), 0.75)
        second = random_corner_map(np.random.default_rng(3), 0.75)
        assert first.coeffs == second.coeffs
        assert first.config == second.config

    def test_well_conditioned(self, rng):
        """Test the special constants of a conditioned draw are bounded away from zero."""
        kit = well_conditioned_kit(rng, 1.5)
        assert abs(kit.e1_star) >= 0.05
        assert abs(kit.polar_special_constant) >= 0.05

    def test_no_conditioned_draw(self, rng):
        """Test an unreachable threshold raises ValidationSetupError."""
        with pytest.raises(ValidationSetupError):
            well_conditioned_kit(rng, 0.5, min_special=1e6, attempts=3)


class TestReport:
    """Report aggregation and formatting."""

    def test_empty_report_fails(self):
        """Test a report without rows does not pass."""
        assert not ValidationReport().passed

    def test_table_and_dict(self):
        """Test failures are listed and the table ends with a summary line."""
        report = ValidationReport(
            rows=[
                ValidationRow(0.5, 0, "inverse", "theta < theta*", 0.1, 0.1, 1.0, 1.0, passed=True),
                ValidationRow(0.5, 0, "jump", "phi* +- 0.05", 3.14, 1.0, message="jump too small"),
            ],
            seed=7,
        )
        assert not report.passed
        assert [row.check for row in report.failures()] == ["jump"]

        table = report.to_table()
        assert table.splitlines()[-1] == "1/2 checks passed"
        assert "FAIL  jump too small" in table

        payload = report.to_dict()
        assert payload["seed"] == 7
        assert payload["passed"] is False
        assert payload["rows"][0]["label"] == "theta < theta*"


class TestSuite:
    """Oracle-versus-asymptote checks."""

    def test_setup_errors(self):
        """Test empty beta lists and n_sets < 1 are rejected."""
        with pytest.raises(ValidationSetupError):
            run_validation_suite(betas=(), n_sets=1)
        with pytest.raises(ValidationSetupError):
            run_validation_suite(betas=(0.5,), n_sets=0)

    def test_validate_single_kit(self, rng):
        """Test one convex coefficient set yields every check kind."""
        kit = well_conditioned_kit(rng, 0.5)
        rows = validate_kit(kit)
        checks = [row.check for row in rows]
        assert checks.count("inverse") == 3
        assert checks.count("forward") == 6
        assert checks.count("jump") == 1
        assert all(row.passed for row in rows), ValidationReport(rows=rows).to_table()

    def test_reentrant_remainder_exponent(self, rng):
        """Test off-special inverse rows at beta = 1.5 report the remainder exponent gamma = 2/3."""
        kit = well_conditioned_kit(rng, 1.5)
        assert kit.gamma == pytest.approx(2.0 / 3.0)
        rows = [row for row in validate_kit(kit) if row.check == "inverse"]
        off_special = [row for row in rows if row.label != "theta = theta*"]
        assert len(off_special) == 2
        for row in off_special:
            assert row.expected_remainder == pytest.approx(kit.gamma)
            assert row.measured_remainder is not None
            assert row.measured_remainder >= kit.gamma - Tolerances().remainder_slack
            assert row.passed, row.message

    @pytest.mark.slow
    def test_suite_passes(self):
        """Test the suite passes for one convex and one reentrant opening factor."""
        report = run_validation_suite(betas=(0.5, 1.5), n_sets=1, seed=0)
        assert report.passed, report.to_table()
        assert [row.check for row in report.rows].count("conform") == 2

    @pytest.mark.slow
    def test_default_suite_passes(self):
        """Test the full suite over the default opening factors with five sets each."""
        report = run_validation_suite(seed=0)
        assert report.passed, report.to_table()
        assert {row.beta for row in report.rows} == set(DEFAULT_BETAS)
        inverse = [row for row in report.rows if row.check == "inverse"]
        assert len(inverse) == 3 * 5 * len(DEFAULT_BETAS)
