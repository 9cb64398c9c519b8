"""Tests for SVG figure output."""

# Standard library imports
import json
import math
import xml.etree.ElementTree as ET

# Third-party imports
import pytest

# Local imports
from src.cli.commands import cmd_angles, cmd_mesh_images, resolve_map
from src.cli.run_config import RunConfig
from src.corners.asymptotics import AsymptoticKit, law_jump_summary
from src.corners.tracer import MeshKind, MeshSpec, mesh_images, trace_inverse_family
from src.mesh.domain import l_shaped_domain, unit_square_domain
from src.mesh.folds import fold_cells
from src.mesh.winslow import solve
from src.viz.svg import plot_angle_laws, plot_mesh_images, plot_traced_curves, plot_winslow_grid

SVG_NS = "{http://www.w3.org/2000/svg}"


def svg_groups(path):
    """Map the id of every named <g> element to the element."""
    root = ET.parse(path).getroot()
    return {g.get("id"): g for g in root.iter(f"{SVG_NS}g") if g.get("id")}


def path_count(group) -> int:
    return len(group.findall(f".//{SVG_NS}path"))


def piece_count(groups, kind: str) -> int:
    return sum(1 for gid in groups if gid.startswith(f"{kind}-piece-"))


class TestDeterminism:
    """Identical inputs give byte-identical files."""

    def test_angle_laws(self, tmp_path, reentrant_map):
        """Test two renderings of the angle laws are identical."""
        kit = AsymptoticKit.build(reentrant_map)
        first = plot_angle_laws(kit, tmp_path / "a.svg", n=91)
        second = plot_angle_laws(kit, tmp_path / "b.svg", n=91)
        assert first.read_bytes() == second.read_bytes()
        assert b"<svg" in first.read_bytes()

    def test_winslow_grid(self, tmp_path):
        """Test two renderings of an L-shaped grid are identical."""
        grid, report = solve(l_shaped_domain(), 9, 9, max_iters=50)
        first = plot_winslow_grid(grid, report, tmp_path / "a.svg")
        second = plot_winslow_grid(grid, report, tmp_path / "nested" / "b.svg")
        assert first.read_bytes() == second.read_bytes()

    def test_mesh_and_curves(self, tmp_path, acute_map):
        """Test mesh and curve figures are written."""
        images = mesh_images(acute_map, MeshSpec(MeshKind.XI, n_circles=2, n_rays=3, samples=9))
        mesh_path = plot_mesh_images(images, tmp_path / "mesh.svg", title="xi mesh")
        curves = trace_inverse_family(acute_map, [0.5, 1.5], [1e-2, 1e-3, 1e-4])
        curve_path = plot_traced_curves(curves, [0.0, 0.0], tmp_path / "curves.svg")
        assert mesh_path.stat().st_size > 0
        assert curve_path.stat().st_size > 0


class TestAngleLawStructure:
    """Law pieces and jump markers drawn in the angle-law figure."""

    def test_reentrant_pieces(self, tmp_path, reentrant_map):
        """Test beta = 1.5 draws two inverse pieces split at theta* and one forward piece."""
        kit = AsymptoticKit.build(reentrant_map)
        path = plot_angle_laws(kit, tmp_path / "angles.svg", n=91)
        groups = svg_groups(path)
        assert piece_count(groups, "inverse") == 2
        assert piece_count(groups, "forward") == 1
        assert {"inverse-points", "forward-points", "inverse-jump", "forward-jump"} <= set(groups)

        (_, inverse_jump), (_, forward_jump) = law_jump_summary(kit)
        assert inverse_jump[0] == kit.theta_star
        assert inverse_jump[1] == pytest.approx(math.pi * 1.5)
        assert forward_jump is None
        assert f"theta* = {kit.theta_star:.4f}" in path.read_text(encoding="utf-8")

    def test_angles_command(self, tmp_path):
        """Test the angles command figure for the default convex corner."""
        config = RunConfig(output_dir=str(tmp_path / "out"))
        cmd_angles(config)
        kit = AsymptoticKit.build(resolve_map(config))
        path = config.out / "angles.svg"
        groups = svg_groups(path)
        assert piece_count(groups, "inverse") == 1
        assert piece_count(groups, "forward") == 2

        (_, inverse_jump), (_, forward_jump) = law_jump_summary(kit)
        assert inverse_jump is None
        assert forward_jump[0] == kit.phi_star
        assert forward_jump[1] == pytest.approx(math.pi)
        assert f"phi* = {kit.phi_star:.4f}" in path.read_text(encoding="utf-8")


class TestMeshStructure:
    """Polylines drawn for the test meshes."""

    @pytest.mark.parametrize("kind", ["xi", "t"])
    def test_mesh_images_command(self, tmp_path, kind):
        """Test the default mesh draws 5 circles and 8 rays in the source panel."""
        config = RunConfig(output_dir=str(tmp_path / "out"))
        cmd_mesh_images(config)
        groups = svg_groups(config.out / f"mesh_{kind}.svg")
        assert path_count(groups["mesh-source"]) == 13

        data = json.loads((config.out / f"mesh_{kind}.json").read_text(encoding="utf-8"))
        assert len(data["source"]) == 13
        drawn = sum(1 for line in data["image"] if len(line) > 1)
        assert path_count(groups["mesh-image"]) == drawn


class TestWinslowFigure:
    """Grid lines and folded cells."""

    def test_folded_cells_filled(self, tmp_path):
        """Test each folded cell is filled and every grid line is drawn."""
        grid, report = solve(unit_square_domain(), 5, 5)
        grid.x[2, 2] += 1.5 * grid.hu
        report.fold_cells = fold_cells(grid)
        path = plot_winslow_grid(grid, report, tmp_path / "folded.svg")

        groups = svg_groups(path)
        assert path_count(groups["folded-cells"]) == len(report.fold_cells) == 2
        assert path_count(groups["grid-lines"]) == 10

    def test_fold_free_grid(self, tmp_path):
        """Test a fold-free grid has no fold layer."""
        grid, report = solve(unit_square_domain(), 5, 5)
        groups = svg_groups(plot_winslow_grid(grid, report, tmp_path / "grid.svg"))
        assert "folded-cells" not in groups
