"""Fold detection for structured quadrilateral grids."""

# Standard library imports
import logging
from typing import TYPE_CHECKING, List, Optional, Sequence, Tuple

# Third-party imports
import numpy as np

if TYPE_CHECKING:
    from .winslow import WinslowGrid

logger = logging.getLogger(__name__)


def cell_signed_areas(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """
    Signed areas of the four consecutive-corner triangles of every cell.

    Cell (i, j) has corners P0 = (i, j), P1 = (i+1, j), P2 = (i+1, j+1) and
    P3 = (i, j+1), counterclockwise in (u, v). Triangle k is (P(k-1), Pk, P(k+1)).

    Returns:
        Array of shape (nx - 1, ny - 1, 4); counterclockwise triangles are positive
    """
    corners = [
        (x[:-1, :-1], y[:-1, :-1]),
        (x[1:, :-1], y[1:, :-1]),
        (x[1:, 1:], y[1:, 1:]),
        (x[:-1, 1:], y[:-1, 1:]),
    ]
    areas = []
    for k in range(4):
        (xa, ya), (xb, yb), (xc, yc) = corners[k - 1], corners[k], corners[(k + 1) % 4]
        areas.append(0.5 * ((xb - xa) * (yc - ya) - (yb - ya) * (xc - xa)))
    return np.stack(areas, axis=-1)


def fold_cells(grid: "WinslowGrid") -> List[Tuple[int, int]]:
    """
    Cells with at least one non-positive corner triangle.

    Returns:
        Sorted list of (i, j) cell indices; empty for a fold-free grid
    """
    areas = cell_signed_areas(grid.x, grid.y)
    folded = np.argwhere(np.any(areas <= 0.0, axis=-1))
    cells = [(int(i), int(j)) for i, j in folded]
    if cells:
        logger.warning(f"{len(cells)} folded cell(s) in {grid.nx}x{grid.ny} grid")
    return cells


def fold_locality(cells: Sequence[Tuple[int, int]], node: Tuple[int, int]) -> Optional[int]:
    """
    Largest grid distance between ``node`` and the nearest corner of any folded cell.

    Returns:
        Max Manhattan distance in index space, or None when no cell is folded
    """
    if not cells:
        return None
    p, q = node

    def axis_distance(n: int, k: int) -> int:
        # Cell spans nodes k and k + 1 along this axis
        if k <= n <= k + 1:
            return 0
        return min(abs(n - k), abs(n - k - 1))

    return max(axis_distance(p, i) + axis_distance(q, j) for i, j in cells)
