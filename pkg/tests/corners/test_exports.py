"""Tests for CSV tables, coefficient JSON and arc sample files."""

# Standard library imports
import json

# Third-party imports
import numpy as np
import pytest

# Local imports
from src.corners.corner_model import CornerConfig, CornerConfigError
from src.corners.harmonic_map import (
    ArcSampleError,
    CoefficientConstraintError,
    conformal_arc_samples,
    fit_map_from_arc,
)
from src.corners.exports import (
    ExportFormatError,
    load_coefficients,
    map_from_dict,
    read_arc_csv,
    read_csv,
    save_coefficients,
    write_arc_csv,
    write_csv,
    write_curve_csv,
    write_mesh_json,
)
from src.corners.tracer import MeshKind, MeshSpec, mesh_images, trace_forward_ray


class TestCsv:
    """Header-plus-rows CSV tables."""

    def test_values_reread_exactly(self, tmp_path, rng):
        """Test 17 significant digits reproduce every double."""
        x = rng.standard_normal(50) * 10.0 ** rng.integers(-12, 12, 50)
        y = np.geomspace(1e-300, 1e300, 50)
        path = write_csv(tmp_path / "nested" / "table.csv", ("x", "y"), [x, y])

        header, table = read_csv(path)
        assert header == ["x", "y"]
        np.testing.assert_array_equal(table[:, 0], x)
        np.testing.assert_array_equal(table[:, 1], y)

    def test_column_count_mismatch(self, tmp_path):
        """Test header and column counts must agree."""
        with pytest.raises(ExportFormatError):
            write_csv(tmp_path / "t.csv", ("x",), [np.zeros(2), np.zeros(2)])

    def test_unreadable_file(self, tmp_path):
        """Test missing and malformed files raise ExportFormatError."""
        with pytest.raises(ExportFormatError):
            read_csv(tmp_path / "missing.csv")
        bad = tmp_path / "bad.csv"
        bad.write_text("x,y\n1,2\n3\n", encoding="utf-8")
        with pytest.raises(ExportFormatError):
            read_csv(bad)

    def test_curve_header(self, tmp_path, reentrant_map):
        """Test curve files are named after their representation."""
        curve = trace_forward_ray(reentrant_map, 0.2, np.geomspace(1e-1, 1e-3, 5))
        header, table = read_csv(write_curve_csv(tmp_path / "curve.csv", curve))
        assert header == ["rho", "theta"]
        assert table.shape == (5, 2)


class TestCoefficients:
    """Coefficient JSON files."""

    def test_round_trip(self, tmp_path, conformal_fit):
        """Test a saved map loads with identical configuration and coefficients."""
        path = save_coefficients(tmp_path / "coefficients.json", conformal_fit)
        loaded = load_coefficients(path)
        assert loaded.config == conformal_fit.config
        assert loaded.coeffs == conformal_fit.coeffs

        data = json.loads(path.read_text(encoding="utf-8"))
        assert set(data) == {"beta", "sigma_plus", "sigma_minus", "radius", "a", "b"}

    def test_radius_defaults_to_one(self):
        """Test the radius field is optional."""
        fmap = map_from_dict(
            {"beta": 1.5, "sigma_plus": 1.0, "sigma_minus": 1.0, "a": [1.0], "b": [1.0]}
        )
        assert fmap.config.radius == 1.0
        assert fmap.coeffs.n_terms == 2

    def test_missing_field(self):
        """Test a missing field raises ExportFormatError."""
        with pytest.raises(ExportFormatError):
            map_from_dict({"beta": 0.5, "sigma_plus": 1.0, "a": [1.0], "b": [1.0]})

    def test_wrong_types(self):
        """Test non-numeric fields raise ExportFormatError."""
        with pytest.raises(ExportFormatError):
            map_from_dict(
                {"beta": "wide", "sigma_plus": 1.0, "sigma_minus": 1.0, "a": [1], "b": [1]}
            )

    def test_inadmissible_values(self):
        """Test b_1 < 0 and beta = 1 are rejected by the model checks."""
        with pytest.raises(CoefficientConstraintError):
            map_from_dict(
                {"beta": 0.5, "sigma_plus": 1.0, "sigma_minus": 1.0, "a": [1.0], "b": [-1.0]}
            )
        with pytest.raises(CornerConfigError):
            map_from_dict(
                {"beta": 1.0, "sigma_plus": 1.0, "sigma_minus": 1.0, "a": [1.0], "b": [1.0]}
            )

    def test_not_json(self, tmp_path):
        """Test invalid JSON and non-object payloads raise ExportFormatError."""
        broken = tmp_path / "broken.json"
        broken.write_text("{beta: 0.5", encoding="utf-8")
        with pytest.raises(ExportFormatError):
            load_coefficients(broken)

        listed = tmp_path / "list.json"
        listed.write_text("[1, 2]", encoding="utf-8")
        with pytest.raises(ExportFormatError):
            load_coefficients(listed)


class TestArcFiles:
    """Arc sample CSV files."""

    def test_written_samples_refit(self, tmp_path):
        """Test arc samples written to CSV fit the same coefficients."""
        cfg = CornerConfig(0.5, 2.0, 1.0)
        phi, values = conformal_arc_samples(cfg)
        path = write_arc_csv(tmp_path / "arc.csv", phi, values)

        phi_read, values_read = read_arc_csv(path)
        np.testing.assert_array_equal(phi_read, phi)
        np.testing.assert_array_equal(values_read, values)
        refit = fit_map_from_arc(cfg, phi_read, values_read)
        assert refit.coeffs == fit_map_from_arc(cfg, phi, values).coeffs

    def test_wrong_columns(self, tmp_path):
        """Test files without phi,re,im columns raise ArcSampleError."""
        path = write_csv(tmp_path / "arc.csv", ("phi", "u", "v"), [np.zeros(3)] * 3)
        with pytest.raises(ArcSampleError):
            read_arc_csv(path)
        with pytest.raises(ArcSampleError):
            read_arc_csv(tmp_path / "missing.csv")


class TestMeshJson:
    """Test-mesh polyline export."""

    def test_layers(self, tmp_path, acute_map):
        """Test the JSON file carries all three polyline layers."""
        images = mesh_images(acute_map, MeshSpec(MeshKind.T, n_circles=2, n_rays=3, samples=9))
        path = write_mesh_json(tmp_path / "mesh_t.json", images)
        data = json.loads(path.read_text(encoding="utf-8"))
        assert data["kind"] == "t"
        assert len(data["source"]) == len(data["image"]) == len(data["reference"]) == 5
        assert len(data["image"][0]) == 9
