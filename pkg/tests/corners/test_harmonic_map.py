"""Tests for series harmonic maps, their Jacobian and the arc fit."""

# Standard library imports
import math

# Third-party imports
import numpy as np
import pytest

# Local imports
from src.corners.corner_model import (
    CornerConfig,
    SectorDomainError,
    derive_params,
    half_angle,
    linear_part_q,
)
from src.corners.harmonic_map import (
    ArcSampleError,
    CoefficientConstraintError,
    DegenerateFitError,
    HarmonicCornerMap,
    SeriesCoefficients,
    basis_psi,
    conformal_arc_samples,
    discrete_laplacian_residual,
    fit_from_arc,
    fit_map_from_arc,
    sample_arc,
)
from src.corners.validation import random_corner_map


class TestSeriesCoefficients:
    """Admissibility of coefficient sets."""

    @pytest.mark.parametrize(
        "a,b",
        [
            ([1.0, 0.0], [0.0, 0.0]),
            ([1.0, 0.0], [-1.0, 0.0]),
            ([0.0, 0.0], [1.0, 0.0]),
            ([1.0, 0.0, 0.0], [1.0, 0.0]),
            ([1.0], [1.0]),
            ([1.0, float("nan")], [1.0, 0.0]),
        ],
    )
    def test_rejected(self, a, b):
        """Test b_1 <= 0, a_1 = 0, mismatched lengths, N < 2 and non-finite values."""
        with pytest.raises(CoefficientConstraintError):
            SeriesCoefficients(tuple(a), tuple(b))

    def test_padding(self):
        """Test short lists are padded with zeros to two terms."""
        coeffs = SeriesCoefficients.padded([0.5], [2.0])
        assert coeffs.a == (0.5, 0.0)
        assert coeffs.b == (2.0, 0.0)
        assert coeffs.n_terms == 2
        np.testing.assert_array_equal(coeffs.complex, [0.5 + 2.0j, 0.0])


class TestBasis:
    """Sector basis functions psi_n."""

    def test_vanishes_on_sides(self):
        """Test psi_n is exactly zero on both sides."""
        for beta in (0.3, 0.5, 1.25, 1.9):
            h = half_angle(beta)
            r = np.linspace(0.0, 1.0, 17)
            for n in range(1, 6):
                assert np.all(basis_psi(n, beta, r, -h) == 0.0)
                assert np.all(basis_psi(n, beta, r, h) == 0.0)

    def test_bisector_values(self):
        """Test psi_n(r, 0) = r^(n/beta) sin(n pi/2)."""
        assert basis_psi(1, 0.5, 0.5, 0.0) == pytest.approx(0.25)
        assert basis_psi(2, 0.5, 0.5, 0.0) == pytest.approx(0.0, abs=1e-16)
        assert basis_psi(3, 0.5, 0.5, 0.0) == pytest.approx(-(0.5**6))

    def test_invalid_index(self):
        """Test n < 1 is rejected."""
        with pytest.raises(ValueError):
            basis_psi(0, 0.5, 0.5, 0.0)


class TestEvaluate:
    """Evaluation of F = Q + sum c_n psi_n."""

    def test_boundary_reproduction(self, rng):
        """Test F = sigma_plus*r on L+ and -sigma_minus*r on L- with v = 0."""
        r = np.geomspace(1e-8, 1.0, 100)
        for beta in (0.4, 0.75, 1.25, 1.75):
            for _ in range(10):
                sigma_plus, sigma_minus = rng.uniform(0.5, 2.0, size=2)
                cfg = CornerConfig(beta, sigma_plus, sigma_minus)
                a = rng.uniform(-1.0, 1.0, 6)
                b = rng.uniform(-1.0, 1.0, 6)
                a[0], b[0] = 0.7, 1.3
                fmap = HarmonicCornerMap.from_coefficients(cfg, a, b)
                h = half_angle(beta)

                plus = fmap.evaluate(r, np.full(r.size, -h))
                minus = fmap.evaluate(r, np.full(r.size, h))
                np.testing.assert_allclose(plus.real, sigma_plus * r, rtol=1e-12)
                np.testing.assert_allclose(minus.real, -sigma_minus * r, rtol=1e-12)
                assert np.all(plus.imag == 0.0) and np.all(minus.imag == 0.0)

    def test_scalar_and_cartesian(self, acute_map):
        """Test scalar input returns complex and evaluate_xy agrees with polar evaluation."""
        w = acute_map.evaluate(0.3, 0.2)
        assert isinstance(w, complex)
        x, y = 0.3 * math.cos(0.2), 0.3 * math.sin(0.2)
        assert acute_map.evaluate_xy(x, y) == pytest.approx(w, abs=1e-15)

    def test_vertex_maps_to_origin(self, reentrant_map):
        """Test F(0) = 0."""
        assert reentrant_map.evaluate(0.0, 0.0) == 0.0

    @pytest.mark.parametrize("r,phi", [(1.1, 0.0), (0.5, 0.9), (-0.1, 0.0)])
    def test_outside_sector(self, acute_map, r, phi):
        """Test points beyond the arc or the sides raise SectorDomainError."""
        with pytest.raises(SectorDomainError):
            acute_map.evaluate(r, phi)


class TestHarmonicity:
    """Discrete Laplacian residuals."""

    @pytest.mark.parametrize("beta", [0.5, 1.5])
    def test_second_order_decay(self, rng, beta):
        """Test halving the stencil step divides the residual of an 8-term map by about 4."""
        fmap = random_corner_map(rng, beta, n_terms=8)
        coarse = fmap.harmonicity_residual(1e-2)
        fine = fmap.harmonicity_residual(5e-3)
        assert coarse < 1e-2
        assert 3.5 <= coarse / fine <= 4.5

    def test_linear_part_only(self):
        """Test Q alone is discretely harmonic up to rounding."""
        cfg = CornerConfig(1.5, 1.0, 0.4)
        d = derive_params(cfg)

        def field(r, phi):
            return linear_part_q(cfg, d, r, phi) + 0j

        assert discrete_laplacian_residual(field, cfg.beta, cfg.radius, 1e-2) < 1e-8

    def test_single_basis_function(self):
        """Test psi_3 alone has a small residual."""

        def field(r, phi):
            return 1j * basis_psi(3, 0.75, r, phi)

        assert discrete_laplacian_residual(field, 0.75, 1.0, 1e-3) < 1e-4

    def test_non_harmonic_field(self):
        """Test r^2 = x^2 + y^2 has Laplacian 4."""

        def field(r, phi):
            return np.asarray(r, dtype=float) ** 2 + 0j

        assert discrete_laplacian_residual(field, 0.5, 1.0, 1e-2) == pytest.approx(4.0, abs=1e-6)

    def test_step_too_large(self, acute_map):
        """Test a stencil step that leaves the sector is rejected."""
        with pytest.raises(ValueError):
            acute_map.harmonicity_residual(0.5)


class TestJacobian:
    """Analytic Jacobian and orientation sampling."""

    @pytest.mark.parametrize("beta", [0.5, 0.75, 1.25, 1.5])
    def test_matches_finite_differences(self, rng, beta):
        """Test the analytic Jacobian at 100 random interior points against central differences."""
        fmap = random_corner_map(rng, beta, n_terms=8)
        h = half_angle(beta)
        step = 1e-6
        for r, phi in zip(rng.uniform(0.05, 0.95, 100), rng.uniform(-0.9 * h, 0.9 * h, 100)):
            x, y = r * math.cos(phi), r * math.sin(phi)
            dx = (fmap.evaluate_xy(x + step, y) - fmap.evaluate_xy(x - step, y)) / (2.0 * step)
            dy = (fmap.evaluate_xy(x, y + step) - fmap.evaluate_xy(x, y - step)) / (2.0 * step)
            expected = np.array([[dx.real, dy.real], [dx.imag, dy.imag]])

            jac = fmap.jacobian(r, phi)
            error = np.linalg.norm(jac.matrix - expected) / np.linalg.norm(expected)
            assert error < 1e-6, f"r={r:.4f}, phi={phi:.4f}: relative error {error:.2e}"

    def test_vertex_behaviour(self, acute_map, reentrant_map):
        """Test a finite Jacobian at the vertex for beta < 1 and a singular flag for beta > 1."""
        acute = acute_map.jacobian(0.0, 0.0)
        assert not acute.singular
        assert np.all(np.isfinite(acute.matrix))

        reentrant = reentrant_map.jacobian(0.0, 0.0)
        assert reentrant.singular
        assert not reentrant.preserves_orientation

    def test_orientation_sample(self, acute_map):
        """Test the orientation sample covers the interior grid."""
        sample = acute_map.sample_orientation(n_r=8, n_phi=9)
        assert sample.n_samples == 72
        assert 0.0 <= sample.positive_fraction <= 1.0
        assert sample.orientation_preserving == (sample.positive_fraction == 1.0)


class TestArcFit:
    """Coefficient projection from arc samples."""

    def test_conformal_golden_values(self, conformal_fit):
        """Test beta = 0.5, sigma = (2, 1) conformal data gives b_1 = 1 and a_1 = -2/(3 pi)."""
        a, b = conformal_fit.coeffs.a, conformal_fit.coeffs.b
        assert b[0] == pytest.approx(1.0, abs=1e-8)
        assert a[0] == pytest.approx(-2.0 / (3.0 * math.pi), abs=1e-8)
        np.testing.assert_allclose(b[1:], 0.0, atol=1e-8)

    @pytest.mark.parametrize("n_terms", [2, 8, 16])
    def test_recovers_synthetic_coefficients(self, rng, n_terms):
        """Test fitting the arc values of an N-term series map returns its coefficients."""
        cfg = CornerConfig(0.75, 1.3, 0.6)
        decay = 0.7 ** np.arange(n_terms)
        a = rng.uniform(-0.5, 0.5, n_terms) * decay
        b = rng.uniform(-0.5, 0.5, n_terms) * decay
        a[0], b[0] = 0.7, 1.1
        fmap = HarmonicCornerMap.from_coefficients(cfg, a.tolist(), b.tolist())
        phi, values = sample_arc(fmap.evaluate, cfg)

        fitted = fit_map_from_arc(cfg, phi, values, n_terms=n_terms)
        np.testing.assert_allclose(fitted.coeffs.a, a, atol=1e-8)
        np.testing.assert_allclose(fitted.coeffs.b, b, atol=1e-8)

    def test_radius_scaling(self):
        """Test coefficients are recovered on a sector of radius 2."""
        cfg = CornerConfig(1.25, 0.9, 1.1, radius=2.0)
        a, b = [0.5, 0.1], [0.8, -0.1]
        fmap = HarmonicCornerMap.from_coefficients(cfg, a, b)
        phi, values = sample_arc(fmap.evaluate, cfg)
        coeffs = fit_from_arc(cfg, derive_params(cfg), phi, values, n_terms=2)
        np.testing.assert_allclose(coeffs.a, a, atol=1e-8)
        np.testing.assert_allclose(coeffs.b, b, atol=1e-8)

    def test_symmetric_conformal_data_is_degenerate(self):
        """Test equal side speeds give a_1 = 0, which is not admissible."""
        cfg = CornerConfig(0.5, 1.0, 1.0)
        phi, values = conformal_arc_samples(cfg)
        with pytest.raises(DegenerateFitError):
            fit_map_from_arc(cfg, phi, values)

    def test_too_few_samples(self):
        """Test fewer than 8N samples raise ArcSampleError."""
        cfg = CornerConfig(0.5, 2.0, 1.0)
        phi, values = conformal_arc_samples(cfg, n_panels=16)
        with pytest.raises(ArcSampleError):
            fit_map_from_arc(cfg, phi, values, n_terms=8)

    def test_length_mismatch(self):
        """Test angle and value arrays of different length are rejected."""
        cfg = CornerConfig(0.5, 2.0, 1.0)
        phi, values = conformal_arc_samples(cfg)
        with pytest.raises(ArcSampleError):
            fit_map_from_arc(cfg, phi, values[:-1])

    def test_angles_outside_sector(self):
        """Test sample angles beyond the sides are rejected."""
        cfg = CornerConfig(0.5, 2.0, 1.0)
        phi, values = conformal_arc_samples(cfg)
        with pytest.raises(ArcSampleError):
            fit_map_from_arc(cfg, phi * 1.1, values)

    def test_endpoint_mismatch(self):
        """Test side endpoint values must agree with sigma_plus*R and -sigma_minus*R."""
        cfg = CornerConfig(0.5, 2.0, 1.0)
        phi, values = conformal_arc_samples(cfg)
        values = values.copy()
        values[0] += 0.5
        with pytest.raises(ArcSampleError):
            fit_map_from_arc(cfg, phi, values)
