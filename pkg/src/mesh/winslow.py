"""
Winslow mesh generation on the parameter square Pi = (-1/2, 1/2) x (0, 1).

The grid x(u, v), y(u, v) is the inverse of a harmonic map and satisfies the
quasilinear system

    alpha * r_uu - 2 * beta * r_uv + gamma * r_vv = 0,    r = (x, y),
    alpha = x_v^2 + y_v^2,  beta = x_u x_v + y_u y_v,  gamma = x_u^2 + y_u^2,

with Dirichlet data from the constant-speed boundary parameterization. It is
discretized with central differences (the mixed derivative from the four
diagonal neighbours) and relaxed by SOR sweeps whose coefficients are frozen
at the start of each sweep. Arrays are indexed x[i, j] with i along u and j
along v.
"""

# Standard library imports
import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Tuple

# Third-party imports
import numpy as np

# Local imports
from ..corners.corner_model import SectorDomainError, half_angle
from ..corners.harmonic_map import HarmonicCornerMap
from ..corners.settings import get_settings
from .domain import BoundaryNodes, DomainBoundary, parameterize_boundary
from .folds import fold_cells

logger = logging.getLogger(__name__)

TAIL_WINDOW = 10
TAIL_NOISE = 0.1


class WinslowDivergenceError(Exception):
    """Raised when a sweep produces non-finite node coordinates."""

    def __init__(self, message: str, iteration: int, last_update: float):
        super().__init__(message)
        self.iteration = iteration
        self.last_update = last_update


class NotApplicableError(Exception):
    """Raised when a grid cannot be compared with a sector map."""

    pass


class MisalignmentError(Exception):
    """Raised when a grid's boundary data disagrees with the map's side data."""

    pass


class Ordering(Enum):
    """Node visiting order within a sweep."""

    RED_BLACK = "red_black"
    LEXICOGRAPHIC = "lexicographic"


@dataclass
class WinslowGrid:
    """Node coordinates over Pi; boundary rows and columns hold the Dirichlet data."""

    nx: int
    ny: int
    x: np.ndarray  # (nx, ny)
    y: np.ndarray  # (nx, ny)
    domain: Optional[DomainBoundary] = field(default=None, repr=False)

    @property
    def u(self) -> np.ndarray:
        return np.linspace(-0.5, 0.5, self.nx)

    @property
    def v(self) -> np.ndarray:
        return np.linspace(0.0, 1.0, self.ny)

    @property
    def hu(self) -> float:
        return 1.0 / (self.nx - 1)

    @property
    def hv(self) -> float:
        return 1.0 / (self.ny - 1)

    def copy(self) -> "WinslowGrid":
        return WinslowGrid(self.nx, self.ny, self.x.copy(), self.y.copy(), self.domain)

    def rows(self) -> List[Tuple[int, int, float, float]]:
        """(i, j, x, y) records in i-major order."""
        return [
            (i, j, float(self.x[i, j]), float(self.y[i, j]))
            for i in range(self.nx)
            for j in range(self.ny)
        ]


@dataclass
class SolveReport:
    """Outcome of a Winslow solve; non-convergence is reported here, never raised."""

    iterations: int
    final_update: float
    fold_cells: List[Tuple[int, int]]
    converged: bool
    initial_residual: float = 0.0
    updates: List[float] = field(default_factory=list)
    bbox_violations: List[int] = field(default_factory=list)
    ordering: str = Ordering.RED_BLACK.value
    relaxation: float = 1.7
    tolerance: float = 1e-10

    def tail_monotone(self, window: int = TAIL_WINDOW, noise: float = TAIL_NOISE) -> bool:
        """True when the last ``window`` updates never grow by more than ``noise`` (relative)."""
        tail = self.updates[-window:]
        return all(b <= a * (1.0 + noise) for a, b in zip(tail, tail[1:]))

    def to_dict(self) -> Dict[str, object]:
        return {
            "iterations": self.iterations,
            "final_update": self.final_update,
            "converged": self.converged,
            "fold_cells": [list(cell) for cell in self.fold_cells],
            "initial_residual": self.initial_residual,
            "updates": list(self.updates),
            "bbox_violations": list(self.bbox_violations),
            "tail_monotone": self.tail_monotone(),
            "ordering": self.ordering,
            "relaxation": self.relaxation,
            "tolerance": self.tolerance,
        }


def transfinite_grid(nodes: BoundaryNodes, domain: Optional[DomainBoundary] = None) -> WinslowGrid:
    """Bilinear blending of the four boundary node rows into an initial grid."""
    nx, ny = nodes.bottom.shape[0], nodes.left.shape[0]
    s = np.linspace(0.0, 1.0, nx)[:, None]
    t = np.linspace(0.0, 1.0, ny)[None, :]

    coords = []
    for c in range(2):
        bottom, top = nodes.bottom[:, c][:, None], nodes.top[:, c][:, None]
        left, right = nodes.left[:, c][None, :], nodes.right[:, c][None, :]
        p00, p10 = nodes.bottom[0, c], nodes.bottom[-1, c]
        p01, p11 = nodes.top[0, c], nodes.top[-1, c]
        corner_terms = (1.0 - s) * (1.0 - t) * p00 + s * (1.0 - t) * p10
        corner_terms = corner_terms + (1.0 - s) * t * p01 + s * t * p11
        blend = (1.0 - t) * bottom + t * top + (1.0 - s) * left + s * right - corner_terms
        coords.append(blend)

    grid = WinslowGrid(nx, ny, coords[0], coords[1], domain)
    # Pin the boundary to the parameterized nodes exactly
    for arr, c in ((grid.x, 0), (grid.y, 1)):
        arr[:, 0], arr[:, -1] = nodes.bottom[:, c], nodes.top[:, c]
        arr[0, :], arr[-1, :] = nodes.left[:, c], nodes.right[:, c]
    return grid


def _coefficients(x: np.ndarray, y: np.ndarray, hu: float, hv: float):
    x_u = (x[2:, 1:-1] - x[:-2, 1:-1]) / (2.0 * hu)
    y_u = (y[2:, 1:-1] - y[:-2, 1:-1]) / (2.0 * hu)
    x_v = (x[1:-1, 2:] - x[1:-1, :-2]) / (2.0 * hv)
    y_v = (y[1:-1, 2:] - y[1:-1, :-2]) / (2.0 * hv)
    alpha = x_v**2 + y_v**2
    beta = x_u * x_v + y_u * y_v
    gamma = x_u**2 + y_u**2
    return alpha, beta, gamma


def _gauss_seidel_target(f: np.ndarray, alpha, beta, gamma, hu: float, hv: float) -> np.ndarray:
    """Value at every interior node that zeroes its discrete equation, neighbours held fixed."""
    cu, cv = alpha / hu**2, gamma / hv**2
    cross = (f[2:, 2:] - f[:-2, 2:] - f[2:, :-2] + f[:-2, :-2]) / (4.0 * hu * hv)
    along_u = cu * (f[2:, 1:-1] + f[:-2, 1:-1])
    along_v = cv * (f[1:-1, 2:] + f[1:-1, :-2])
    numerator = along_u + along_v - 2.0 * beta * cross
    return numerator / (2.0 * (cu + cv))


def winslow_residual(grid: WinslowGrid) -> float:
    """
    Max node correction the discrete operator asks for at the current grid.

    Zero for any grid that solves the discretization exactly; affine grids
    give zero up to rounding.
    """
    if grid.nx < 3 or grid.ny < 3:
        return 0.0
    alpha, beta, gamma = _coefficients(grid.x, grid.y, grid.hu, grid.hv)
    with np.errstate(divide="ignore", invalid="ignore"):
        tx = _gauss_seidel_target(grid.x, alpha, beta, gamma, grid.hu, grid.hv)
        ty = _gauss_seidel_target(grid.y, alpha, beta, gamma, grid.hu, grid.hv)
    dx = np.abs(tx - grid.x[1:-1, 1:-1])
    dy = np.abs(ty - grid.y[1:-1, 1:-1])
    return float(max(dx.max(), dy.max()))


def _sweep_red_black(grid: WinslowGrid, relaxation: float, masks) -> float:
    alpha, beta, gamma = _coefficients(grid.x, grid.y, grid.hu, grid.hv)
    largest = 0.0
    for mask in masks:
        for arr in (grid.x, grid.y):
            target = _gauss_seidel_target(arr, alpha, beta, gamma, grid.hu, grid.hv)
            interior = arr[1:-1, 1:-1]
            delta = relaxation * (target - interior)
            interior[mask] += delta[mask]
            largest = max(largest, float(np.max(np.abs(delta[mask]), initial=0.0)))
    return largest


def _sweep_lexicographic(grid: WinslowGrid, relaxation: float) -> float:
    alpha, beta, gamma = _coefficients(grid.x, grid.y, grid.hu, grid.hv)
    hu, hv = grid.hu, grid.hv
    x, y = grid.x, grid.y
    largest = 0.0
    for j in range(1, grid.ny - 1):
        for i in range(1, grid.nx - 1):
            a, b, g = alpha[i - 1, j - 1], beta[i - 1, j - 1], gamma[i - 1, j - 1]
            cu, cv = a / hu**2, g / hv**2
            denom = 2.0 * (cu + cv)
            for arr in (x, y):
                diagonal = arr[i + 1, j + 1] - arr[i - 1, j + 1]
                diagonal += arr[i - 1, j - 1] - arr[i + 1, j - 1]
                cross = diagonal / (4.0 * hu * hv)
                along_u = cu * (arr[i + 1, j] + arr[i - 1, j])
                along_v = cv * (arr[i, j + 1] + arr[i, j - 1])
                target = (along_u + along_v - 2.0 * b * cross) / denom
                delta = relaxation * (target - arr[i, j])
                arr[i, j] += delta
                largest = max(largest, abs(delta))
    return float(largest)


def _bbox_violations(grid: WinslowGrid, lo: np.ndarray, hi: np.ndarray, slack: float) -> int:
    x, y = grid.x[1:-1, 1:-1], grid.y[1:-1, 1:-1]
    outside = (x < lo[0] - slack) | (x > hi[0] + slack) | (y < lo[1] - slack) | (y > hi[1] + slack)
    return int(np.count_nonzero(outside))


def solve(
    domain: DomainBoundary,
    nx: int,
    ny: int,
    tolerance: Optional[float] = None,
    max_iters: Optional[int] = None,
    relaxation: Optional[float] = None,
    ordering: Ordering = Ordering.RED_BLACK,
) -> Tuple[WinslowGrid, SolveReport]:
    """
    Solve the Winslow system for a domain.

    Args:
        domain: Physical domain with side map
        nx: Nodes along u (>= 3)
        ny: Nodes along v (>= 3)
        tolerance: Convergence threshold on the max node update per sweep
        max_iters: Sweep limit (default ``WINSLOW_ITER_FACTOR * max(nx, ny)``)
        relaxation: SOR factor in (0, 2)
        ordering: Red-black (vectorized per colour) or lexicographic sweeps

    Returns:
        Tuple (grid, report); the report carries the fold cells of the result

    Raises:
        ValueError: If grid sizes or solver parameters are out of range
        DegenerateSideError: If a side sub-arc has zero length
        WinslowDivergenceError: If a sweep produces NaN or infinite coordinates
    """
    settings = get_settings()
    tolerance = settings.winslow_tolerance if tolerance is None else tolerance
    relaxation = settings.winslow_relaxation if relaxation is None else relaxation
    max_iters = settings.winslow_iter_factor * max(nx, ny) if max_iters is None else max_iters
    if not 0.0 < relaxation < 2.0:
        raise ValueError(f"Relaxation must lie in (0, 2), got {relaxation}")
    if not tolerance > 0.0 or max_iters < 0:
        raise ValueError(f"Invalid tolerance {tolerance} or max_iters {max_iters}")

    nodes = parameterize_boundary(domain, nx, ny)
    grid = transfinite_grid(nodes, domain)

    boundary = nodes.all_points()
    lo, hi = boundary.min(axis=0), boundary.max(axis=0)
    slack = 1e-9 * max(1.0, float(np.max(hi - lo)))

    initial = winslow_residual(grid)
    report = SolveReport(
        iterations=0,
        final_update=initial,
        fold_cells=[],
        converged=bool(initial < tolerance),
        initial_residual=initial,
        ordering=ordering.value,
        relaxation=relaxation,
        tolerance=tolerance,
    )
    logger.debug(f"Winslow {nx}x{ny}: initial residual {initial:.3e}")

    ii, jj = np.meshgrid(np.arange(1, nx - 1), np.arange(1, ny - 1), indexing="ij")
    masks = ((ii + jj) % 2 == 0, (ii + jj) % 2 == 1)

    while not report.converged and report.iterations < max_iters:
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            if ordering is Ordering.RED_BLACK:
                update = _sweep_red_black(grid, relaxation, masks)
            else:
                update = _sweep_lexicographic(grid, relaxation)
        report.iterations += 1

        finite = np.all(np.isfinite(grid.x)) and np.all(np.isfinite(grid.y))
        if not (math.isfinite(update) and finite):
            last = report.updates[-1] if report.updates else initial
            raise WinslowDivergenceError(
                f"Winslow sweep {report.iterations} produced non-finite coordinates "
                f"(last finite update {last:.3e})",
                iteration=report.iterations,
                last_update=last,
            )

        report.updates.append(update)
        report.final_update = update
        violations = _bbox_violations(grid, lo, hi, slack)
        report.bbox_violations.append(violations)
        if violations:
            logger.debug(f"Sweep {report.iterations}: {violations} node(s) outside the bbox")
        report.converged = bool(update < tolerance)

    report.fold_cells = fold_cells(grid)
    if report.converged:
        logger.info(
            f"Winslow {nx}x{ny} converged after {report.iterations} sweeps "
            f"(update {report.final_update:.3e}, {len(report.fold_cells)} folded cells)"
        )
    else:
        logger.warning(
            f"Winslow {nx}x{ny} did not converge in {max_iters} sweeps "
            f"(last update {report.final_update:.3e})"
        )
    return grid, report


# ---------------------------------------------------------------------- composition check

NEAR_CORNER = "near_corner"
INTERIOR = "interior"


@dataclass
class CompositionReport:
    """Deviation of F(grid node) from the lattice point, overall and per region."""

    max_deviation: float
    regions: Dict[str, float]
    n_nodes: int
    skipped: int = 0


def _region_masks(u: np.ndarray, v: np.ndarray) -> Dict[str, np.ndarray]:
    eps = 1e-12
    central = np.abs(u) <= 0.25 + eps
    return {
        NEAR_CORNER: central & (v <= 0.25 + eps),
        INTERIOR: central & (v >= 0.25 - eps) & (v <= 0.75 + eps),
    }


def composition_residual(
    grid: WinslowGrid, fmap: HarmonicCornerMap, boundary_tol: float = 1e-6
) -> CompositionReport:
    """
    Evaluate F at the interior nodes of a sector grid and compare with (u, v).

    Both representations model the same boundary correspondence when the grid
    lives on :func:`src.mesh.domain.sector_domain` of the map's corner and the
    map has side speeds 1/(2R); the deviation then measures discretization
    error and shrinks under refinement.

    Raises:
        NotApplicableError: If the grid does not live on a sector domain
        MisalignmentError: If sector geometry or side speeds disagree with the map
    """
    domain = grid.domain
    if domain is None or domain.metadata.get("kind") != "sector":
        raise NotApplicableError("Composition residual needs a grid on a sector domain")

    cfg = fmap.config
    beta = float(domain.metadata.get("beta", float("nan")))
    radius = float(domain.metadata.get("radius", float("nan")))
    if not (math.isclose(beta, cfg.beta) and math.isclose(radius, cfg.radius)):
        raise MisalignmentError(
            f"Sector (beta={beta}, R={radius}) differs from the map "
            f"(beta={cfg.beta}, R={cfg.radius})"
        )
    speed = 1.0 / (2.0 * radius)
    for name, sigma in (("sigma_plus", cfg.sigma_plus), ("sigma_minus", cfg.sigma_minus)):
        if abs(sigma - speed) > boundary_tol * speed:
            raise MisalignmentError(f"{name}={sigma} does not match the grid side speed {speed}")

    uu, vv = np.meshgrid(grid.u, grid.v, indexing="ij")
    x, y = grid.x[1:-1, 1:-1], grid.y[1:-1, 1:-1]
    u, v = uu[1:-1, 1:-1], vv[1:-1, 1:-1]

    r = np.hypot(x, y)
    phi = np.arctan2(y, x)
    inside = (r <= cfg.radius) & (np.abs(phi) <= half_angle(cfg.beta))
    skipped = int(np.count_nonzero(~inside))
    if skipped:
        logger.warning(f"{skipped} interior node(s) lie outside the sector and were skipped")

    deviation = np.full(x.shape, np.nan)
    try:
        w = fmap.evaluate(r[inside], phi[inside])
    except SectorDomainError as e:
        raise MisalignmentError(f"Grid nodes cannot be mapped: {e}") from e
    deviation[inside] = np.abs(w - (u[inside] + 1j * v[inside]))

    regions = {}
    for name, mask in _region_masks(u, v).items():
        values = deviation[mask & inside]
        regions[name] = float(values.max()) if values.size else float("nan")

    report = CompositionReport(
        max_deviation=float(np.nanmax(deviation)) if np.any(inside) else float("nan"),
        regions=regions,
        n_nodes=int(np.count_nonzero(inside)),
        skipped=skipped,
    )
    logger.info(
        f"Composition residual {grid.nx}x{grid.ny}: max {report.max_deviation:.3e}, "
        + ", ".join(f"{k} {v:.3e}" for k, v in regions.items())
    )
    return report
