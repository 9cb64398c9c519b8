"""
SVG figures for angle laws, traced curves, test meshes and Winslow grids.

Figures are drawn on the non-interactive Agg backend and written with a fixed
SVG hash salt and no date metadata, so the same inputs give identical files.
"""

# Standard library imports
import logging
from pathlib import Path
from typing import Iterable, Optional, Sequence, Union

# Third-party imports
import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
from matplotlib.collections import LineCollection, PolyCollection  # noqa: E402

# Local imports
from ..corners.asymptotics import (  # noqa: E402
    AsymptoticKit,
    conformal_phi_of_theta,
    conformal_theta_of_phi,
)
from ..corners.tracer import MeshImages, TracedCurve  # noqa: E402
from ..mesh.winslow import SolveReport, WinslowGrid  # noqa: E402

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

SVG_RC = {"svg.hashsalt": "corner-maps", "svg.fonttype": "none", "font.size": 9}

LAW_COLOR = "#1f4e9c"
REFERENCE_COLOR = "#999999"
MARKER_COLOR = "#c0392b"
FOLD_COLOR = "#e74c3c"


def _save(fig, path: PathLike) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with plt.rc_context(SVG_RC):
        fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
    logger.debug(f"Wrote figure {path}")
    return path


def _step_segments(law, n: int):
    """Plot points of a piecewise-constant law with breaks at the jumps."""
    xs, _ = law.tabulate(n)
    lines = []
    for piece in law.pieces:
        if piece.is_point:
            continue
        inside = (xs > piece.lower) & (xs < piece.upper)
        xs_piece = np.concatenate(([piece.lower], xs[inside], [piece.upper]))
        lines.append((xs_piece, np.full(xs_piece.size, piece.value)))
    points = [(p.lower, p.value) for p in law.pieces if p.is_point]
    return lines, points


def plot_angle_laws(kit: AsymptoticKit, path: PathLike, n: int = 361) -> Path:
    """
    Step plots of phi(theta) and theta(phi) with the conformal laws overlaid.

    Jumps are marked at theta* (inverse law) and phi* (forward law); point
    values of the laws are drawn as filled markers.
    """
    with plt.rc_context(SVG_RC):
        fig, (ax_inv, ax_fwd) = plt.subplots(1, 2, figsize=(9.0, 4.0))

        for ax, law, conformal, marker, xlabel, ylabel in (
            (ax_inv, kit.inverse_law, conformal_phi_of_theta, kit.theta_star, "theta", "phi"),
            (ax_fwd, kit.forward_law, conformal_theta_of_phi, kit.phi_star, "phi", "theta"),
        ):
            name = law.kind.value
            lines, points = _step_segments(law, n)
            for k, (xs, ys) in enumerate(lines):
                ax.plot(xs, ys, color=LAW_COLOR, linewidth=1.6, gid=f"{name}-piece-{k}")
            if points:
                px, py = zip(*points)
                ax.plot(px, py, "o", color=LAW_COLOR, markersize=4, gid=f"{name}-points")

            lo, hi = law.domain
            grid = np.linspace(lo, hi, n)
            ax.plot(
                grid,
                conformal(kit.beta, grid),
                "--",
                color=REFERENCE_COLOR,
                linewidth=1.0,
                label="conformal",
            )
            ax.axvline(marker, color=MARKER_COLOR, linestyle=":", linewidth=1.0, gid=f"{name}-jump")
            ax.annotate(
                f"{xlabel}* = {marker:.4f}",
                (marker, ax.get_ylim()[0]),
                textcoords="offset points",
                xytext=(4, 6),
                color=MARKER_COLOR,
            )
            ax.set_xlabel(xlabel)
            ax.set_ylabel(ylabel)
            ax.set_xlim(lo, hi)
            ax.grid(True, linewidth=0.3)
            ax.legend(loc="upper left", frameon=False)

        ax_inv.set_title(f"exit angle of F^-1(ray), beta = {kit.beta:g}")
        ax_fwd.set_title(f"exit angle of F(ray), beta = {kit.beta:g}")
        fig.tight_layout()
    return _save(fig, path)


def plot_traced_curves(
    curves: Sequence[TracedCurve], limits: Sequence[float], path: PathLike
) -> Path:
    """Log-log plot of |ordinate - limit| against the curve parameter."""
    with plt.rc_context(SVG_RC):
        fig, ax = plt.subplots(figsize=(5.5, 4.0))
        for curve, limit in zip(curves, limits):
            gap = np.abs(curve.ordinate - limit)
            keep = (gap > 0.0) & (np.abs(curve.parameter) > 0.0)
            if not np.any(keep):
                continue
            label = f"{curve.kind.value} {curve.angle:.4f}"
            ax.loglog(np.abs(curve.parameter[keep]), gap[keep], linewidth=1.0, label=label)
        xname, yname = curves[0].column_names() if curves else ("s", "y")
        ax.set_xlabel(xname)
        ax.set_ylabel(f"|{yname} - limit|")
        ax.grid(True, which="both", linewidth=0.3)
        ax.legend(frameon=False, fontsize=7)
        fig.tight_layout()
    return _save(fig, path)


def _polylines(ax, lines: Iterable[np.ndarray], **style) -> None:
    """One LineCollection per call; pass ``gid`` to name its SVG group."""
    segments = [line for line in lines if len(line) > 1]
    if segments:
        ax.add_collection(LineCollection(segments, **style))


def plot_mesh_images(images: MeshImages, path: PathLike, title: Optional[str] = None) -> Path:
    """Side-by-side source mesh and its image, with the conformal image dashed underneath."""
    with plt.rc_context(SVG_RC):
        fig, (ax_src, ax_img) = plt.subplots(1, 2, figsize=(9.0, 4.5))
        _polylines(ax_src, images.source, colors=LAW_COLOR, linewidths=0.9, gid="mesh-source")
        _polylines(
            ax_img,
            images.reference,
            colors=REFERENCE_COLOR,
            linewidths=0.8,
            linestyles="dashed",
            gid="mesh-reference",
        )
        _polylines(ax_img, images.image, colors=LAW_COLOR, linewidths=0.9, gid="mesh-image")
        truncated = set(images.truncated)
        for label, line in zip(images.labels, images.image):
            if label in truncated and len(line):
                ax_img.plot(line[-1, 0], line[-1, 1], "x", color=MARKER_COLOR, markersize=5)

        source_plane, image_plane = ("w", "z") if images.kind.value == "xi" else ("z", "w")
        for ax, plane in ((ax_src, source_plane), (ax_img, image_plane)):
            ax.autoscale_view()
            ax.set_aspect("equal", adjustable="datalim")
            ax.set_title(f"{plane}-plane")
            ax.plot(0.0, 0.0, "o", color=MARKER_COLOR, markersize=3)
        if title:
            fig.suptitle(title)
        fig.tight_layout()
    return _save(fig, path)


def plot_winslow_grid(grid: WinslowGrid, report: SolveReport, path: PathLike) -> Path:
    """Grid lines of a Winslow solution with folded cells filled."""
    with plt.rc_context(SVG_RC):
        fig, ax = plt.subplots(figsize=(5.5, 5.5))
        rows = [np.column_stack((grid.x[i, :], grid.y[i, :])) for i in range(grid.nx)]
        cols = [np.column_stack((grid.x[:, j], grid.y[:, j])) for j in range(grid.ny)]
        if report.fold_cells:
            quads = [
                [
                    (grid.x[i, j], grid.y[i, j]),
                    (grid.x[i + 1, j], grid.y[i + 1, j]),
                    (grid.x[i + 1, j + 1], grid.y[i + 1, j + 1]),
                    (grid.x[i, j + 1], grid.y[i, j + 1]),
                ]
                for i, j in report.fold_cells
            ]
            folds = PolyCollection(
                quads, facecolors=FOLD_COLOR, alpha=0.5, edgecolors="none", gid="folded-cells"
            )
            ax.add_collection(folds)
        _polylines(ax, rows + cols, colors=LAW_COLOR, linewidths=0.6, gid="grid-lines")
        if grid.domain is not None:
            outline = np.vstack((grid.domain.vertices, grid.domain.vertices[:1]))
            ax.plot(outline[:, 0], outline[:, 1], color=REFERENCE_COLOR, linewidth=0.8)
        ax.autoscale_view()
        ax.set_aspect("equal", adjustable="datalim")
        status = "converged" if report.converged else "not converged"
        ax.set_title(
            f"Winslow {grid.nx}x{grid.ny}: {status}, {report.iterations} sweeps, "
            f"{len(report.fold_cells)} folded"
        )
        fig.tight_layout()
    return _save(fig, path)
