"""
Physical domains for Winslow meshes and their constant-speed boundary parameterization.

A domain is a closed counterclockwise polyline whose four side sub-arcs are
assigned to the sides of the square Pi = (-1/2, 1/2) x (0, 1). Following the
boundary counterclockwise, the sub-arcs start at the vertices named by
``side_map`` in the order bottom (v = 0), right (u = 1/2), top (v = 1) and
left (u = -1/2). Top and left therefore run against the grid index
direction and are reversed when nodes are placed.
"""

# Standard library imports
import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

# Third-party imports
import numpy as np

logger = logging.getLogger(__name__)

SIDE_NAMES = ("bottom", "right", "top", "left")

# Arc fractions (right, top, left) of the sector builder; kinks stay on Simpson panel pairs
DEFAULT_ARC_SPLIT = (0.375, 0.375, 0.25)


class DomainError(Exception):
    """Raised when a polyline or its side map is not a valid domain."""

    pass


class DegenerateSideError(Exception):
    """Raised when a side sub-arc has zero length."""

    pass


@dataclass(frozen=True)
class DomainBoundary:
    """
    Closed counterclockwise polyline with its square-side assignment.

    ``vertices`` holds each point once (the closing segment is implicit),
    ``side_map`` the start vertices of bottom, right, top and left, and
    ``corners`` the vertices where the interior angle is pi*beta.
    """

    vertices: np.ndarray
    side_map: Tuple[int, int, int, int]
    corners: Tuple[int, ...] = ()
    metadata: Dict[str, object] = field(default_factory=dict)

    def __post_init__(self):
        points = np.asarray(self.vertices, dtype=float)
        object.__setattr__(self, "vertices", points)
        object.__setattr__(self, "side_map", tuple(int(k) for k in self.side_map))
        object.__setattr__(self, "corners", tuple(int(k) for k in self.corners))
        self.validate()

    @property
    def n_vertices(self) -> int:
        return int(self.vertices.shape[0])

    def validate(self) -> None:
        """
        Check shape, side map, orientation and simplicity.

        Raises:
            DomainError: If any domain invariant is violated
        """
        points = self.vertices
        if points.ndim != 2 or points.shape[1] != 2:
            raise DomainError(f"Vertices must be an (m, 2) array, got shape {points.shape}")
        m = points.shape[0]
        if m < 4:
            raise DomainError(f"A domain needs at least 4 vertices, got {m}")
        if not np.all(np.isfinite(points)):
            raise DomainError("Vertices contain non-finite coordinates")

        if len(self.side_map) != 4:
            raise DomainError(f"side_map needs 4 start indices, got {self.side_map}")
        if any(not 0 <= k < m for k in self.side_map):
            raise DomainError(f"side_map indices out of range [0, {m}): {self.side_map}")
        start = self.side_map[0]
        offsets = [(k - start) % m for k in self.side_map]
        if not offsets[0] < offsets[1] < offsets[2] < offsets[3]:
            raise DomainError(
                f"side_map {self.side_map} must list distinct vertices in counterclockwise order"
            )
        if any(not 0 <= k < m for k in self.corners):
            raise DomainError(f"Corner markers out of range: {self.corners}")

        if signed_area(points) <= 0.0:
            raise DomainError("Polyline must be oriented counterclockwise")
        # Zero-length edges are left to parameterize_boundary
        distinct = points[np.any(points != np.roll(points, 1, axis=0), axis=1)]
        if distinct.shape[0] < 3 or not is_simple_polygon(distinct):
            raise DomainError("Polyline intersects itself")

    def side_indices(self, side: int) -> List[int]:
        """Vertex indices of one side sub-arc in counterclockwise order, both ends included."""
        m = self.n_vertices
        start = self.side_map[side]
        end = self.side_map[(side + 1) % 4]
        length = (end - start) % m
        return [(start + k) % m for k in range(length + 1)]

    def side_polyline(self, side: int) -> np.ndarray:
        return self.vertices[self.side_indices(side)]

    def side_lengths(self) -> Tuple[float, float, float, float]:
        return tuple(_polyline_length(self.side_polyline(k)) for k in range(4))

    def corner_nodes(self, nx: int, ny: int) -> List[Tuple[int, int]]:
        """Grid nodes (i, j) onto which the corner markers fall under constant-speed spacing."""
        nodes = []
        for corner in self.corners:
            for side in range(4):
                indices = self.side_indices(side)
                if corner not in indices[:-1]:
                    continue
                polyline = self.side_polyline(side)
                cumulative = _cumulative_length(polyline)
                fraction = cumulative[indices.index(corner)] / cumulative[-1]
                count = nx if side in (0, 2) else ny
                k = int(round(fraction * (count - 1)))
                nodes.append(_side_node(side, k, nx, ny))
                break
        return nodes

    def to_dict(self) -> Dict[str, object]:
        return {
            "vertices": self.vertices.tolist(),
            "side_map": list(self.side_map),
            "corners": list(self.corners),
            "metadata": dict(self.metadata),
        }

    @classmethod
    def from_dict(cls, data: Dict[str, object]) -> "DomainBoundary":
        try:
            return cls(
                vertices=np.asarray(data["vertices"], dtype=float),
                side_map=tuple(data["side_map"]),
                corners=tuple(data.get("corners", ())),
                metadata=dict(data.get("metadata", {})),
            )
        except KeyError as e:
            raise DomainError(f"Domain description is missing field {e}") from e
        except (TypeError, ValueError) as e:
            raise DomainError(f"Malformed domain description: {e}") from e


def _side_node(side: int, k: int, nx: int, ny: int) -> Tuple[int, int]:
    # k counts along the counterclockwise direction of the side
    if side == 0:
        return (k, 0)
    if side == 1:
        return (nx - 1, k)
    if side == 2:
        return (nx - 1 - k, ny - 1)
    return (0, ny - 1 - k)


def signed_area(points: np.ndarray) -> float:
    """Shoelace area, positive for counterclockwise polylines."""
    x, y = points[:, 0], points[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def is_simple_polygon(points: np.ndarray) -> bool:
    """True when no two non-adjacent edges of the closed polyline touch."""
    m = points.shape[0]
    start = points
    end = np.roll(points, -1, axis=0)
    i, j = np.triu_indices(m, k=2)
    keep = ~((i == 0) & (j == m - 1))
    i, j = i[keep], j[keep]
    if i.size == 0:
        return True

    p, q = start[i], end[i]
    r, s = start[j], end[j]

    def orient(a, b, c):
        ab, ac = b - a, c - a
        return ab[:, 0] * ac[:, 1] - ab[:, 1] * ac[:, 0]

    d1, d2 = orient(p, q, r), orient(p, q, s)
    d3, d4 = orient(r, s, p), orient(r, s, q)
    straddle = (d1 * d2 <= 0.0) & (d3 * d4 <= 0.0)
    overlap = (
        (np.maximum(p[:, 0], q[:, 0]) >= np.minimum(r[:, 0], s[:, 0]))
        & (np.maximum(r[:, 0], s[:, 0]) >= np.minimum(p[:, 0], q[:, 0]))
        & (np.maximum(p[:, 1], q[:, 1]) >= np.minimum(r[:, 1], s[:, 1]))
        & (np.maximum(r[:, 1], s[:, 1]) >= np.minimum(p[:, 1], q[:, 1]))
    )
    return not bool(np.any(straddle & overlap))


def _cumulative_length(polyline: np.ndarray) -> np.ndarray:
    segments = np.hypot(*np.diff(polyline, axis=0).T)
    return np.concatenate(([0.0], np.cumsum(segments)))


def _polyline_length(polyline: np.ndarray) -> float:
    return float(_cumulative_length(polyline)[-1])


def resample_polyline(polyline: np.ndarray, count: int) -> np.ndarray:
    """
    Place ``count`` points on a polyline with equal arclength spacing.

    Raises:
        DegenerateSideError: If the polyline has zero length
    """
    cumulative = _cumulative_length(polyline)
    total = cumulative[-1]
    if not total > 0.0:
        raise DegenerateSideError(f"Side sub-arc has zero length ({polyline.shape[0]} vertices)")
    # Repeated vertices would give np.interp a flat abscissa
    keep = np.concatenate(([True], np.diff(cumulative) > 0.0))
    cumulative, polyline = cumulative[keep], polyline[keep]
    targets = np.linspace(0.0, total, count)
    x = np.interp(targets, cumulative, polyline[:, 0])
    y = np.interp(targets, cumulative, polyline[:, 1])
    nodes = np.column_stack((x, y))
    nodes[0], nodes[-1] = polyline[0], polyline[-1]
    return nodes


@dataclass(frozen=True)
class BoundaryNodes:
    """Boundary node positions in grid order: bottom/top by i, left/right by j."""

    bottom: np.ndarray  # (nx, 2), j = 0
    right: np.ndarray  # (ny, 2), i = nx - 1
    top: np.ndarray  # (nx, 2), j = ny - 1
    left: np.ndarray  # (ny, 2), i = 0

    def all_points(self) -> np.ndarray:
        return np.vstack((self.bottom, self.right, self.top, self.left))


def parameterize_boundary(domain: DomainBoundary, nx: int, ny: int) -> BoundaryNodes:
    """
    Constant-speed boundary nodes for an nx x ny grid on Pi.

    Args:
        domain: Physical domain
        nx: Nodes along u (>= 3)
        ny: Nodes along v (>= 3)

    Returns:
        BoundaryNodes whose square corners coincide with the side endpoints

    Raises:
        ValueError: If nx or ny is below 3
        DegenerateSideError: If a side sub-arc has zero length
    """
    if nx < 3 or ny < 3:
        raise ValueError(f"Grids need at least 3 x 3 nodes, got {nx} x {ny}")

    sides = []
    for side, count in zip(range(4), (nx, ny, nx, ny)):
        try:
            sides.append(resample_polyline(domain.side_polyline(side), count))
        except DegenerateSideError as e:
            raise DegenerateSideError(f"{SIDE_NAMES[side]} side: {e}") from e

    nodes = BoundaryNodes(bottom=sides[0], right=sides[1], top=sides[2][::-1], left=sides[3][::-1])
    logger.debug(f"Parameterized boundary with {nx} x {ny} nodes, lengths {domain.side_lengths()}")
    return nodes


# ---------------------------------------------------------------------- builders


def rectangle_domain(x0: float, x1: float, y0: float, y1: float) -> DomainBoundary:
    """Axis-parallel rectangle with one side per square side."""
    if not (x1 > x0 and y1 > y0):
        raise DomainError(f"Empty rectangle ({x0}, {x1}) x ({y0}, {y1})")
    vertices = np.array([[x0, y0], [x1, y0], [x1, y1], [x0, y1]], dtype=float)
    return DomainBoundary(vertices, (0, 1, 2, 3), metadata={"kind": "rectangle"})


def unit_square_domain() -> DomainBoundary:
    """The parameter square Pi itself; its Winslow grid is the uniform lattice."""
    domain = rectangle_domain(-0.5, 0.5, 0.0, 1.0)
    return DomainBoundary(domain.vertices, domain.side_map, metadata={"kind": "identity"})


def l_shaped_domain(size: float = 1.0) -> DomainBoundary:
    """L-shaped domain with its reentrant corner (beta = 3/2) in the middle of the top side."""
    if size <= 0.0:
        raise DomainError(f"L-shape size must be positive, got {size}")
    s = size
    vertices = np.array(
        [[0.0, 0.0], [2 * s, 0.0], [2 * s, s], [s, s], [s, 2 * s], [0.0, 2 * s]], dtype=float
    )
    return DomainBoundary(
        vertices, (0, 1, 2, 4), corners=(3,), metadata={"kind": "l_shaped", "beta": 1.5}
    )


def sector_domain(
    beta: float,
    radius: float = 1.0,
    arc_segments: int = 96,
    arc_split: Sequence[float] = DEFAULT_ARC_SPLIT,
) -> DomainBoundary:
    """
    Polygonal sector of opening pi*beta with the vertex at the origin.

    The bottom side of Pi runs along L- into the vertex and out along L+,
    so the vertex sits at the middle bottom node; the arc is shared among
    right, top and left in the proportions ``arc_split`` (rounded to whole
    arc segments, the rounded values are kept in the metadata).

    Raises:
        DomainError: If beta, radius or the split are invalid
    """
    if not 0.0 < beta < 2.0 or radius <= 0.0:
        raise DomainError(f"Invalid sector beta={beta}, radius={radius}")
    split = np.asarray(arc_split, dtype=float)
    if split.shape != (3,) or np.any(split <= 0.0) or not math.isclose(split.sum(), 1.0):
        raise DomainError(f"arc_split must hold three positive fractions summing to 1: {arc_split}")

    k_top = int(round(split[0] * arc_segments))
    k_left = int(round((split[0] + split[1]) * arc_segments))
    if not 0 < k_top < k_left < arc_segments:
        raise DomainError(f"arc_segments={arc_segments} too small for arc_split={arc_split}")

    h = math.pi * beta / 2.0
    angles = -h + 2.0 * h * np.arange(arc_segments) / arc_segments
    arc = radius * np.column_stack((np.cos(angles), np.sin(angles)))
    vertices = np.vstack(([[radius * math.cos(h), radius * math.sin(h)], [0.0, 0.0]], arc))

    rounded = (k_top / arc_segments, (k_left - k_top) / arc_segments, 1.0 - k_left / arc_segments)
    return DomainBoundary(
        vertices,
        (0, 2, 2 + k_top, 2 + k_left),
        corners=(1,),
        metadata={"kind": "sector", "beta": beta, "radius": radius, "arc_split": list(rounded)},
    )


def sector_arc_samples(
    beta: float,
    radius: float = 1.0,
    arc_split: Sequence[float] = DEFAULT_ARC_SPLIT,
    n_panels: int = 2048,
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Boundary correspondence of the sector Winslow problem as arc data.

    Moving along the arc from L+ to L- at constant speed, the image runs up
    the right side of Pi, along the top from right to left and down the
    left side. The matching side speeds are sigma_plus = sigma_minus = 1/(2R).

    Returns:
        Tuple (phi, values) for :func:`src.corners.harmonic_map.fit_from_arc`
    """
    s1, s2, _ = (float(x) for x in arc_split)
    t = np.linspace(0.0, 1.0, n_panels + 1)
    h = math.pi * beta / 2.0
    phi = -h + 2.0 * h * t

    values = np.empty(t.size, dtype=complex)
    right = t <= s1
    top = (t > s1) & (t <= s1 + s2)
    left = t > s1 + s2
    values[right] = 0.5 + 1j * (t[right] / s1)
    values[top] = (0.5 - (t[top] - s1) / s2) + 1j
    values[left] = -0.5 + 1j * (1.0 - (t[left] - s1 - s2) / (1.0 - s1 - s2))
    phi[0], phi[-1] = -h, h
    return phi, values


# ---------------------------------------------------------------------- JSON


def save_domain(path: Union[str, Path], domain: DomainBoundary) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(domain.to_dict(), indent=2), encoding="utf-8")
    return path


def load_domain(path: Union[str, Path]) -> DomainBoundary:
    """
    Load a domain from JSON with fields vertices, side_map and optional corners/metadata.

    Raises:
        DomainError: If the file cannot be read or describes an invalid domain
    """
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as e:
        raise DomainError(f"Cannot read domain file {path}: {e}") from e
    if not isinstance(data, dict):
        raise DomainError(f"{path}: expected a JSON object")
    domain = DomainBoundary.from_dict(data)
    logger.info(f"Loaded domain with {domain.n_vertices} vertices from {path}")
    return domain


def domain_by_name(name: str, beta: Optional[float] = None, **options) -> DomainBoundary:
    """Builder lookup used by the command line: identity, rectangle, l_shaped or sector."""
    if name == "identity":
        return unit_square_domain()
    if name == "rectangle":
        return rectangle_domain(-1.0, 1.0, 0.0, 2.0)
    if name == "l_shaped":
        return l_shaped_domain(options.get("size", 1.0))
    if name == "sector":
        if beta is None:
            raise DomainError("A sector domain needs beta")
        return sector_domain(beta, **options)
    raise DomainError(f"Unknown domain builder {name!r}")
