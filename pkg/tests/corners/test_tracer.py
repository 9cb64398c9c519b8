"""Tests for the curve-tracing oracle and polar test meshes."""

# Standard library imports
import math

# Third-party imports
import numpy as np
import pytest

# Local imports
from src.corners.asymptotics import AsymptoticKit, Representation, UnsupportedAngleError
from src.corners.corner_model import SectorDomainError, half_angle
from src.corners.tracer import (
    CurveKind,
    MeshKind,
    MeshSpec,
    PoorFitError,
    asymptotic_radii,
    compare_with_asymptotics,
    estimate_exit_angle,
    log_radii,
    mesh_images,
    trace_forward_family,
    trace_forward_ray,
    trace_inverse_family,
    trace_inverse_ray,
)


class TestLogRadii:
    """Log-spaced radius grids."""

    def test_default_grid(self):
        """Test five decades at 48 samples per decade, decreasing."""
        r = log_radii()
        assert r.size >= 5 * 48 + 1
        assert r[0] == pytest.approx(1e-1)
        assert r[-1] == pytest.approx(1e-6)
        assert np.all(np.diff(r) < 0.0)

    def test_invalid_range(self):
        """Test r_min >= r_max is rejected."""
        with pytest.raises(ValueError):
            log_radii(r_min_fraction=1e-1, r_max_fraction=1e-2)


class TestInverseTrace:
    """Branch-following traces of L_theta."""

    def test_roots_solve_level_equation(self, acute_map):
        """Test every traced point lies on the preimage of the ray."""
        curve = trace_inverse_ray(acute_map, 1.2, np.geomspace(1e-1, 1e-4, 31))
        assert curve.kind is CurveKind.INVERSE
        assert len(curve) == 31
        for r, phi in zip(curve.radii, curve.ordinate):
            w = acute_map.evaluate(float(r), float(phi))
            assert w.imag > 0.0
            assert math.atan2(w.imag, w.real) == pytest.approx(1.2, abs=1e-6)

    def test_side_rays_for_convex_corner(self, acute_map):
        """Test theta = 0 and pi are the sides themselves."""
        h = half_angle(0.5)
        lower = trace_inverse_ray(acute_map, 0.0)
        upper = trace_inverse_ray(acute_map, math.pi)
        assert np.all(lower.ordinate == -h)
        assert np.all(upper.ordinate == h)

        estimate = estimate_exit_angle(lower)
        assert estimate.limit_angle == -h
        assert estimate.order_estimate is None

    def test_side_rays_rejected_for_reentrant_corner(self, reentrant_map):
        """Test theta in {0, pi} is not traced when beta > 1."""
        with pytest.raises(UnsupportedAngleError):
            trace_inverse_ray(reentrant_map, 0.0)
        with pytest.raises(UnsupportedAngleError):
            trace_inverse_ray(reentrant_map, 3.5)

    @pytest.mark.parametrize("radii", [[0.0, 0.1], [1e-3, 2.0], []])
    def test_invalid_radii(self, acute_map, radii):
        """Test radii outside (0, R] are rejected."""
        with pytest.raises(ValueError):
            trace_inverse_ray(acute_map, 1.0, radii)

    def test_exit_angle_estimate(self, acute_map):
        """Test an interior theta exits along phi_star with order 1/beta - 1."""
        kit = AsymptoticKit.build(acute_map)
        curve = trace_inverse_ray(acute_map, 2.0, np.geomspace(1e-2, 1e-6, 97))
        estimate = estimate_exit_angle(curve)
        assert estimate.limit_angle == kit.phi_star
        assert estimate.order_estimate == pytest.approx(1.0, abs=0.05)
        assert estimate.decades == pytest.approx(4.0)

    def test_reentrant_exit_along_side(self, reentrant_map):
        """Test theta below theta_star exits along L+ for beta > 1."""
        kit = AsymptoticKit.build(reentrant_map)
        theta = 0.5 * kit.theta_star
        regime = kit.inverse_regime(theta)
        curve = trace_inverse_ray(reentrant_map, theta, asymptotic_radii(regime, kit))
        estimate = estimate_exit_angle(curve, min_decades=1.0)
        assert estimate.limit_angle == -half_angle(1.5)

        comparison = compare_with_asymptotics(curve, kit)
        assert comparison.remainder_consistent()


class TestForwardTrace:
    """Images of the rays arg z = phi."""

    def test_images_match_evaluation(self, reentrant_map):
        """Test forward curves carry F(r e^{i phi}) and its modulus and argument."""
        radii = np.geomspace(1e-1, 1e-3, 9)
        curve = trace_forward_ray(reentrant_map, 0.4, radii)
        expected = reentrant_map.evaluate(curve.radii, np.full(9, 0.4))
        np.testing.assert_array_equal(curve.images, expected)
        np.testing.assert_allclose(curve.parameter, np.abs(expected))
        assert curve.column_names() == ("rho", "theta")

    def test_representations(self, acute_map):
        """Test Cartesian and rotated re-expressions of the same images."""
        curve = trace_forward_ray(acute_map, 0.1, np.geomspace(1e-1, 1e-3, 9))
        cartesian = curve.as_representation(Representation.CARTESIAN)
        np.testing.assert_array_equal(cartesian.parameter, np.abs(curve.images.real))
        np.testing.assert_array_equal(cartesian.ordinate, curve.images.imag)
        assert cartesian.column_names() == ("u", "v")

        rotated = curve.as_representation(Representation.ROTATED)
        assert rotated.column_names() == ("U", "V")
        np.testing.assert_allclose(
            np.hypot(rotated.parameter, rotated.ordinate), np.abs(curve.images)
        )

    def test_inverse_curve_has_no_images(self, acute_map):
        """Test re-expressing an inverse curve raises ValueError."""
        curve = trace_inverse_ray(acute_map, 1.0, np.geomspace(1e-1, 1e-2, 5))
        with pytest.raises(ValueError):
            curve.as_representation(Representation.CARTESIAN)

    def test_outside_sector(self, acute_map):
        """Test a ray angle outside the sector is rejected."""
        with pytest.raises(SectorDomainError):
            trace_forward_ray(acute_map, 1.0)

    def test_families_match_single_traces(self, reentrant_map):
        """Test concurrent family tracing returns the individual curves in order."""
        radii = np.geomspace(1e-1, 1e-3, 13)
        thetas = [0.4, 1.2, 2.5]
        family = trace_inverse_family(reentrant_map, thetas, radii, max_workers=3)
        for theta, curve in zip(thetas, family):
            single = trace_inverse_ray(reentrant_map, theta, radii)
            np.testing.assert_array_equal(curve.ordinate, single.ordinate)

        phis = [-1.0, 0.0, 1.0]
        forward = trace_forward_family(reentrant_map, phis, radii, max_workers=2)
        assert [c.angle for c in forward] == phis


class TestEstimateExitAngle:
    """Log-log exit-angle fits."""

    def test_candidates_per_curve_kind(self, acute_map):
        """Test each curve kind offers only the limits it can reach."""
        kit = AsymptoticKit.build(acute_map)
        h = half_angle(0.5)
        radii = np.geomspace(1e-1, 1e-3, 9)
        inverse = trace_inverse_ray(acute_map, 1.0, radii)
        assert inverse.limit_candidates == pytest.approx((-h, kit.phi_star, h))

        forward = trace_forward_ray(acute_map, 0.1, radii)
        assert forward.limit_candidates == pytest.approx((0.0, kit.theta_star, math.pi))
        for representation in (Representation.CARTESIAN, Representation.ROTATED):
            assert forward.as_representation(representation).limit_candidates == (0.0,)

    def test_too_few_samples(self, acute_map):
        """Test short curves raise PoorFitError."""
        curve = trace_inverse_ray(acute_map, 1.0, np.geomspace(1e-1, 1e-4, 8))
        with pytest.raises(PoorFitError):
            estimate_exit_angle(curve)

    def test_too_few_decades(self, acute_map):
        """Test curves spanning under two decades raise PoorFitError."""
        curve = trace_inverse_ray(acute_map, 1.0, np.geomspace(1e-1, 1e-2, 40))
        with pytest.raises(PoorFitError):
            estimate_exit_angle(curve)


class TestMeshImages:
    """Polar test meshes pushed forward and pulled back."""

    def test_t_mesh(self, acute_map):
        """Test the T mesh has n_circles + n_rays polylines with side rays on the real axis."""
        images = mesh_images(acute_map, MeshSpec(MeshKind.T, n_circles=5, n_rays=8, samples=33))
        assert len(images.image) == 13
        assert len(images.source) == len(images.reference) == 13
        assert images.truncated == []

        first_ray, last_ray = images.image[5], images.image[-1]
        np.testing.assert_array_equal(first_ray[:, 1], 0.0)
        np.testing.assert_array_equal(last_ray[:, 1], 0.0)
        assert np.all(first_ray[:, 0] >= 0.0)
        assert np.all(last_ray[:, 0] <= 0.0)

    def test_xi_mesh(self, acute_map):
        """Test pulled-back circles stay inside the sector and rays start at the vertex."""
        spec = MeshSpec(MeshKind.XI, n_circles=3, n_rays=5, samples=17)
        images = mesh_images(acute_map, spec, on_error="truncate")
        assert len(images.image) == 8

        h = half_angle(0.5)
        for line in images.image[:3]:
            angles = np.arctan2(line[:, 1], line[:, 0])
            assert np.all(np.abs(angles) <= h + 1e-9)
            assert np.all(np.hypot(line[:, 0], line[:, 1]) <= 1.0)
        for line in images.image[3:]:
            np.testing.assert_array_equal(line[0], [0.0, 0.0])

        payload = images.to_dict()
        assert payload["kind"] == "xi"
        assert len(payload["labels"]) == 8

    def test_xi_scale(self, acute_map):
        """Test default circles fit inside the arc image and scale = 1 gives rho = n/5."""
        h = half_angle(0.5)
        arc = np.abs(acute_map.evaluate(np.ones(257), np.linspace(-h, h, 257)))
        spec = MeshSpec(MeshKind.XI, n_circles=5, n_rays=2, samples=17)
        images = mesh_images(acute_map, spec, on_error="truncate")
        assert images.scale == pytest.approx(0.9 * arc.min())
        assert not any(label.startswith("circle") for label in images.truncated)

        spec = MeshSpec(MeshKind.XI, n_circles=5, n_rays=2, scale=1.0, samples=17)
        images = mesh_images(acute_map, spec, on_error="truncate")
        for k, circle in enumerate(images.source[:5], start=1):
            np.testing.assert_allclose(np.hypot(circle[:, 0], circle[:, 1]), k / 5.0)

    def test_invalid_arguments(self, acute_map):
        """Test unknown error policies and degenerate specs are rejected."""
        with pytest.raises(ValueError):
            mesh_images(acute_map, MeshSpec(MeshKind.T), on_error="ignore")
        with pytest.raises(ValueError):
            mesh_images(acute_map, MeshSpec(MeshKind.T, n_rays=1))
