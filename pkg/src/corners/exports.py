"""
File formats for corner maps: CSV tables, coefficient JSON and arc data.

CSV files carry a single header line and comma-separated values printed
with 17 significant digits, so re-reading reproduces every double exactly.
"""

# Standard library imports
import json
import logging
from pathlib import Path
from typing import Dict, List, Sequence, Tuple, Union

# Third-party imports
import numpy as np

# Local imports
from .corner_model import CornerConfig
from .harmonic_map import ArcSampleError, HarmonicCornerMap
from .tracer import MeshImages, TracedCurve

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

CSV_FORMAT = "%.17g"


class ExportFormatError(Exception):
    """Raised when a file does not follow the expected layout."""

    pass


def write_csv(path: PathLike, header: Sequence[str], columns: Sequence[np.ndarray]) -> Path:
    """
    Write equally long columns to a CSV file with a header line.

    Args:
        path: Output file; parent directories are created
        header: Column names
        columns: One array per column

    Returns:
        The written path
    """
    path = Path(path)
    if len(header) != len(columns):
        raise ExportFormatError(f"{len(header)} column names for {len(columns)} columns")
    table = np.column_stack([np.asarray(c, dtype=float).ravel() for c in columns])
    path.parent.mkdir(parents=True, exist_ok=True)
    np.savetxt(path, table, fmt=CSV_FORMAT, delimiter=",", header=",".join(header), comments="")
    logger.debug(f"Wrote {table.shape[0]} rows to {path}")
    return path


def read_csv(path: PathLike) -> Tuple[List[str], np.ndarray]:
    """Read a CSV written by :func:`write_csv`; returns (header, rows x columns table)."""
    path = Path(path)
    try:
        with path.open("r", encoding="utf-8") as handle:
            header = handle.readline().strip().split(",")
        table = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    except (OSError, ValueError) as e:
        raise ExportFormatError(f"Cannot read CSV {path}: {e}") from e
    if table.size and table.shape[1] != len(header):
        raise ExportFormatError(
            f"{path}: header has {len(header)} names, rows have {table.shape[1]}"
        )
    return header, table


def write_curve_csv(path: PathLike, curve: TracedCurve) -> Path:
    """Write a traced curve as (parameter, ordinate) columns named after its representation."""
    return write_csv(path, curve.column_names(), [curve.parameter, curve.ordinate])


def write_json(path: PathLike, payload: Dict[str, object]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, indent=2), encoding="utf-8")
    logger.debug(f"Wrote JSON to {path}")
    return path


def write_mesh_json(path: PathLike, images: MeshImages) -> Path:
    """Export test-mesh polylines (source, image and conformal reference layers)."""
    return write_json(path, images.to_dict())


# ---------------------------------------------------------------------- coefficients


def coefficients_to_dict(fmap: HarmonicCornerMap) -> Dict[str, object]:
    cfg = fmap.config
    return {
        "beta": cfg.beta,
        "sigma_plus": cfg.sigma_plus,
        "sigma_minus": cfg.sigma_minus,
        "radius": cfg.radius,
        "a": [float(x) for x in fmap.coeffs.a],
        "b": [float(x) for x in fmap.coeffs.b],
    }


def map_from_dict(data: Dict[str, object]) -> HarmonicCornerMap:
    """
    Build a map from coefficient JSON fields.

    Raises:
        ExportFormatError: If a field is missing or has the wrong type
        CornerConfigError: If the corner parameters are invalid
        CoefficientConstraintError: If a_1 = 0 or b_1 <= 0
    """
    try:
        cfg = CornerConfig(
            beta=float(data["beta"]),
            sigma_plus=float(data["sigma_plus"]),
            sigma_minus=float(data["sigma_minus"]),
            radius=float(data.get("radius", 1.0)),
        )
        a = [float(x) for x in data["a"]]
        b = [float(x) for x in data["b"]]
    except KeyError as e:
        raise ExportFormatError(f"Coefficient file is missing field {e}") from e
    except (TypeError, ValueError) as e:
        raise ExportFormatError(f"Malformed coefficient file: {e}") from e
    return HarmonicCornerMap.from_coefficients(cfg, a, b)


def save_coefficients(path: PathLike, fmap: HarmonicCornerMap) -> Path:
    return write_json(path, coefficients_to_dict(fmap))


def load_coefficients(path: PathLike) -> HarmonicCornerMap:
    """Load a coefficient JSON file into a map."""
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as e:
        raise ExportFormatError(f"Cannot read coefficient file {path}: {e}") from e
    if not isinstance(data, dict):
        raise ExportFormatError(f"{path}: expected a JSON object")
    fmap = map_from_dict(data)
    logger.info(f"Loaded {fmap.coeffs.n_terms} coefficient pairs from {path}")
    return fmap


# ---------------------------------------------------------------------- arc data


def read_arc_csv(path: PathLike) -> Tuple[np.ndarray, np.ndarray]:
    """
    Read arc samples with columns phi, re, im.

    Returns:
        Tuple (phi, complex values)

    Raises:
        ArcSampleError: If the file does not hold three numeric columns
    """
    try:
        header, table = read_csv(path)
    except ExportFormatError as e:
        raise ArcSampleError(str(e)) from e
    if [name.strip().lower() for name in header] != ["phi", "re", "im"] or table.shape[1] != 3:
        raise ArcSampleError(f"{path}: expected columns phi,re,im, got {header}")
    return table[:, 0], table[:, 1] + 1j * table[:, 2]


def write_arc_csv(path: PathLike, phi: np.ndarray, values: np.ndarray) -> Path:
    values = np.asarray(values, dtype=complex)
    return write_csv(path, ("phi", "re", "im"), [phi, values.real, values.imag])

