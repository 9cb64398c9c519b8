"""Winslow meshes of planar domains with constant-speed boundary data and fold detection."""

from .domain import (
    BoundaryNodes,
    DegenerateSideError,
    DomainBoundary,
    DomainError,
    l_shaped_domain,
    load_domain,
    parameterize_boundary,
    rectangle_domain,
    save_domain,
    sector_arc_samples,
    sector_domain,
    unit_square_domain,
)
from .folds import cell_signed_areas, fold_cells, fold_locality
from .winslow import (
    CompositionReport,
    MisalignmentError,
    NotApplicableError,
    Ordering,
    SolveReport,
    WinslowDivergenceError,
    WinslowGrid,
    composition_residual,
    solve,
    transfinite_grid,
    winslow_residual,
)

__all__ = [
    # Domains
    "DomainBoundary",
    "BoundaryNodes",
    "DomainError",
    "DegenerateSideError",
    "parameterize_boundary",
    "unit_square_domain",
    "rectangle_domain",
    "l_shaped_domain",
    "sector_domain",
    "sector_arc_samples",
    "load_domain",
    "save_domain",
    # Solver
    "WinslowGrid",
    "SolveReport",
    "Ordering",
    "WinslowDivergenceError",
    "solve",
    "transfinite_grid",
    "winslow_residual",
    # Composition with corner maps
    "CompositionReport",
    "NotApplicableError",
    "MisalignmentError",
    "composition_residual",
    # Folds
    "cell_signed_areas",
    "fold_cells",
    "fold_locality",
]
