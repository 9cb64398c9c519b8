"""SVG figure emitters."""

from .svg import plot_angle_laws, plot_mesh_images, plot_traced_curves, plot_winslow_grid

__all__ = [
    "plot_angle_laws",
    "plot_traced_curves",
    "plot_mesh_images",
    "plot_winslow_grid",
]
