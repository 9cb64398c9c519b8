"""
Run configuration for the corner-maps command line.

A run is described by a flat ``key = value`` file with section headers::

    [corner]
    beta = 1.5
    sigma_plus = 1.0
    sigma_minus = 0.8

    [winslow]
    domain = sector
    nx = 17
    ny = 17

Every value has a default; command-line flags override file values. All
numbers are checked against the preconditions of the library calls before
any command runs.
"""

# Standard library imports
import configparser
import logging
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable, List, Optional, Sequence, Tuple, TypeVar, Union

# Local imports
from ..corners.corner_model import CornerConfig, CornerConfigError
from ..corners.settings import get_settings

logger = logging.getLogger(__name__)

T = TypeVar("T")

SECTIONS = ("corner", "coefficients", "trace", "mesh", "winslow", "validate")
COEFFICIENT_SOURCES = ("conformal", "file", "explicit", "arc", "random")
MESH_KINDS = ("xi", "t", "both")
REPRESENTATIONS = ("polar", "cartesian", "rotated")
ORDERINGS = ("red_black", "lexicographic")


class RunConfigError(Exception):
    """Raised when a run configuration file or override is invalid."""

    pass


@dataclass(frozen=True)
class CornerSection:
    # Unequal side speeds keep a_1 of the conformal fit away from zero
    beta: float = 0.5
    sigma_plus: float = 2.0
    sigma_minus: float = 1.0
    radius: float = 1.0

    def to_config(self) -> CornerConfig:
        try:
            return CornerConfig(self.beta, self.sigma_plus, self.sigma_minus, self.radius)
        except CornerConfigError as e:
            raise RunConfigError(f"[corner] {e}") from e


@dataclass(frozen=True)
class CoefficientSection:
    """Where the harmonic map comes from."""

    source: str = "conformal"
    path: Optional[str] = None  # coefficient JSON for source=file
    arc_csv: Optional[str] = None  # phi,re,im samples for source=arc
    a: Tuple[float, ...] = ()
    b: Tuple[float, ...] = ()
    n_terms: Optional[int] = None
    seed: int = 0


@dataclass(frozen=True)
class TraceSection:
    thetas: Tuple[float, ...] = ()  # empty: three rays around theta*
    phis: Tuple[float, ...] = ()  # empty: three rays around phi*
    r_min_fraction: float = 1e-6
    r_max_fraction: float = 1e-1
    per_decade: Optional[int] = None
    representation: str = "polar"


@dataclass(frozen=True)
class MeshSection:
    kind: str = "both"
    n_circles: int = 5
    n_rays: int = 8
    samples: int = 65
    scale: Optional[float] = None


@dataclass(frozen=True)
class WinslowSection:
    domain: str = "identity"  # builder name or domain JSON path
    nx: int = 17
    ny: int = 17
    tolerance: Optional[float] = None
    relaxation: Optional[float] = None
    max_iters: Optional[int] = None
    ordering: str = "red_black"
    arc_segments: int = 96
    size: float = 1.0  # L-shaped domain
    composition: bool = False  # sector only: compare with the fitted harmonic map


@dataclass(frozen=True)
class ValidateSection:
    betas: Tuple[float, ...] = (0.4, 0.5, 0.75, 1.25, 1.5, 1.75)
    n_sets: int = 5
    seed: int = 0


@dataclass(frozen=True)
class RunConfig:
    """Parameter records of all commands plus the output directory."""

    corner: CornerSection = field(default_factory=CornerSection)
    coefficients: CoefficientSection = field(default_factory=CoefficientSection)
    trace: TraceSection = field(default_factory=TraceSection)
    mesh: MeshSection = field(default_factory=MeshSection)
    winslow: WinslowSection = field(default_factory=WinslowSection)
    validate: ValidateSection = field(default_factory=ValidateSection)
    output_dir: str = field(default_factory=lambda: get_settings().output_dir)

    @property
    def out(self) -> Path:
        return Path(self.output_dir)

    def check(self) -> "RunConfig":
        """
        Validate every section against the library preconditions.

        Raises:
            RunConfigError: Listing every problem found
        """
        problems: List[str] = []
        try:
            self.corner.to_config()
        except RunConfigError as e:
            problems.append(str(e))

        c = self.coefficients
        if c.source not in COEFFICIENT_SOURCES:
            sources = ", ".join(COEFFICIENT_SOURCES)
            problems.append(f"[coefficients] source must be one of {sources}")
        if c.source == "file" and not c.path:
            problems.append("[coefficients] source=file needs path")
        if c.source == "arc" and not c.arc_csv:
            problems.append("[coefficients] source=arc needs arc_csv")
        if c.source == "explicit" and (not c.a or len(c.a) != len(c.b)):
            problems.append("[coefficients] source=explicit needs equally long a and b lists")
        if c.n_terms is not None and c.n_terms < 2:
            problems.append("[coefficients] n_terms must be >= 2")

        t = self.trace
        if not 0.0 < t.r_min_fraction < t.r_max_fraction <= 1.0:
            problems.append("[trace] need 0 < r_min_fraction < r_max_fraction <= 1")
        if t.representation not in REPRESENTATIONS:
            problems.append(f"[trace] representation must be one of {', '.join(REPRESENTATIONS)}")
        if any(not 0.0 <= theta <= math.pi for theta in t.thetas):
            problems.append("[trace] thetas must lie in [0, pi]")

        m = self.mesh
        if m.kind not in MESH_KINDS:
            problems.append(f"[mesh] kind must be one of {', '.join(MESH_KINDS)}")
        if m.n_circles < 1 or m.n_rays < 2 or m.samples < 2:
            problems.append("[mesh] need n_circles >= 1, n_rays >= 2, samples >= 2")
        if m.scale is not None and m.scale <= 0.0:
            problems.append("[mesh] scale must be positive")

        w = self.winslow
        if w.nx < 3 or w.ny < 3:
            problems.append("[winslow] nx and ny must be >= 3")
        if w.relaxation is not None and not 0.0 < w.relaxation < 2.0:
            problems.append("[winslow] relaxation must lie in (0, 2)")
        if w.tolerance is not None and not w.tolerance > 0.0:
            problems.append("[winslow] tolerance must be positive")
        if w.max_iters is not None and w.max_iters < 0:
            problems.append("[winslow] max_iters must be >= 0")
        if w.ordering not in ORDERINGS:
            problems.append(f"[winslow] ordering must be one of {', '.join(ORDERINGS)}")
        if w.arc_segments < 8:
            problems.append("[winslow] arc_segments must be >= 8")

        v = self.validate
        if v.n_sets < 1 or not v.betas:
            problems.append("[validate] need n_sets >= 1 and at least one beta")
        if any(not 0.0 < beta < 2.0 or beta == 1.0 for beta in v.betas):
            problems.append("[validate] betas must lie in (0, 1) or (1, 2)")

        if problems:
            raise RunConfigError("; ".join(problems))
        return self


def _floats(raw: str) -> Tuple[float, ...]:
    return tuple(float(item) for item in raw.replace(";", ",").split(",") if item.strip())


def _optional(convert: Callable[[str], T]) -> Callable[[str], Optional[T]]:
    def parse(raw: str) -> Optional[T]:
        return None if raw.strip().lower() in ("", "none", "auto") else convert(raw)

    return parse


def _boolean(raw: str) -> bool:
    value = raw.strip().lower()
    if value in ("1", "true", "yes", "on"):
        return True
    if value in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {raw!r}")


# Converters per section key; unknown keys are rejected
_SCHEMA = {
    "corner": {"beta": float, "sigma_plus": float, "sigma_minus": float, "radius": float},
    "coefficients": {
        "source": str.strip,
        "path": str.strip,
        "arc_csv": str.strip,
        "a": _floats,
        "b": _floats,
        "n_terms": _optional(int),
        "seed": int,
    },
    "trace": {
        "thetas": _floats,
        "phis": _floats,
        "r_min_fraction": float,
        "r_max_fraction": float,
        "per_decade": _optional(int),
        "representation": str.strip,
    },
    "mesh": {
        "kind": str.strip,
        "n_circles": int,
        "n_rays": int,
        "samples": int,
        "scale": _optional(float),
    },
    "winslow": {
        "domain": str.strip,
        "nx": int,
        "ny": int,
        "tolerance": _optional(float),
        "relaxation": _optional(float),
        "max_iters": _optional(int),
        "ordering": str.strip,
        "arc_segments": int,
        "size": float,
        "composition": _boolean,
    },
    "validate": {"betas": _floats, "n_sets": int, "seed": int},
}


def _section_values(parser: configparser.ConfigParser, section: str) -> dict:
    values = {}
    schema = _SCHEMA[section]
    for key, raw in parser.items(section):
        if key not in schema:
            raise RunConfigError(f"Unknown key [{section}] {key}")
        try:
            values[key] = schema[key](raw)
        except ValueError as e:
            raise RunConfigError(f"Invalid value for [{section}] {key}: {raw!r}") from e
    return values


def load_run_config(path: Optional[Union[str, Path]] = None) -> RunConfig:
    """
    Read a run configuration file (or return the defaults when ``path`` is None).

    Raises:
        RunConfigError: If the file is unreadable or holds unknown or malformed entries
    """
    config = RunConfig()
    if path is None:
        return config

    path = Path(path)
    parser = configparser.ConfigParser(interpolation=None)
    try:
        with path.open("r", encoding="utf-8") as handle:
            parser.read_file(handle)
    except (OSError, configparser.Error) as e:
        raise RunConfigError(f"Cannot read run config {path}: {e}") from e

    for section in parser.sections():
        if section not in SECTIONS:
            raise RunConfigError(f"Unknown section [{section}] in {path}")
        values = _section_values(parser, section)
        config = replace(config, **{section: replace(getattr(config, section), **values)})

    logger.info(f"Loaded run config from {path} ({', '.join(parser.sections()) or 'no sections'})")
    return config


def override(config: RunConfig, section: str, **values) -> RunConfig:
    """Replace entries of one section, skipping values that are None."""
    values = {k: v for k, v in values.items() if v is not None}
    if not values:
        return config
    return replace(config, **{section: replace(getattr(config, section), **values)})


def parse_grid(raw: str) -> Tuple[int, int]:
    """Parse an ``NX,NY`` grid flag."""
    try:
        nx, ny = (int(part) for part in raw.split(","))
    except ValueError as e:
        raise RunConfigError(f"--grid expects NX,NY, got {raw!r}") from e
    return nx, ny


def parse_floats(raw: Optional[Sequence[str]]) -> Optional[Tuple[float, ...]]:
    if not raw:
        return None
    try:
        return tuple(value for item in raw for value in _floats(item))
    except ValueError as e:
        raise RunConfigError(f"Expected numbers, got {raw}") from e
