"""Environment-driven numerical defaults for corner maps and mesh generation.

Values are read once from the process environment (after ``load_dotenv()``)
and frozen into a :class:`Settings` record. Library code asks for the record
through :func:`get_settings`; tests and the CLI build explicit records with
:func:`load_settings` when they need to override a value.
"""

# Standard library imports
import logging
import os
from dataclasses import dataclass
from typing import Callable, Dict, Optional, TypeVar

# Third-party imports
from dotenv import load_dotenv

# Load environment variables
load_dotenv()

logger = logging.getLogger(__name__)

T = TypeVar("T")

_VALID_LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")


class SettingsError(Exception):
    """Raised when an environment setting cannot be parsed or is out of range."""

    pass


@dataclass(frozen=True)
class Settings:
    """Numerical defaults shared by the corner, tracer and Winslow modules."""

    n_terms: int = 8  # Series truncation order N
    quad_panels: int = 2048  # Composite Simpson panels for arc projection
    asym_radius_fraction: float = 0.1  # r_max_asym as a fraction of R
    samples_per_decade: int = 48  # Log-spaced tracer radii
    bisection_tol: float = 1e-12  # Angular tolerance of the root finder
    winslow_relaxation: float = 1.7
    winslow_tolerance: float = 1e-10
    winslow_iter_factor: int = 200  # max_iters = factor * max(nx, ny)
    log_level: str = "INFO"
    output_dir: str = "out"


def _read(env: Dict[str, str], key: str, default: str, convert: Callable[[str], T]) -> T:
    raw = env.get(key, default)
    try:
        return convert(raw)
    except ValueError as e:
        raise SettingsError(f"Invalid value for {key}: {raw!r}") from e


def load_settings(env: Optional[Dict[str, str]] = None) -> Settings:
    """
    Build settings from environment variables.

    Args:
        env: Mapping to read from (default: ``os.environ``)

    Returns:
        Validated Settings record

    Raises:
        SettingsError: If a value does not parse or violates its range
    """
    env = dict(os.environ) if env is None else env

    settings = Settings(
        n_terms=_read(env, "CORNERS_N_TERMS", "8", int),
        quad_panels=_read(env, "CORNERS_QUAD_PANELS", "2048", int),
        asym_radius_fraction=_read(env, "CORNERS_ASYM_RADIUS_FRACTION", "0.1", float),
        samples_per_decade=_read(env, "CORNERS_SAMPLES_PER_DECADE", "48", int),
        bisection_tol=_read(env, "CORNERS_BISECTION_TOL", "1e-12", float),
        winslow_relaxation=_read(env, "WINSLOW_RELAXATION", "1.7", float),
        winslow_tolerance=_read(env, "WINSLOW_TOLERANCE", "1e-10", float),
        winslow_iter_factor=_read(env, "WINSLOW_ITER_FACTOR", "200", int),
        log_level=env.get("CORNERS_LOG_LEVEL", "INFO").upper(),
        output_dir=env.get("CORNERS_OUTPUT_DIR", "out"),
    )

    problems = []
    if settings.n_terms < 2:
        problems.append("CORNERS_N_TERMS must be >= 2")
    if settings.quad_panels < 16 or settings.quad_panels % 2:
        problems.append("CORNERS_QUAD_PANELS must be an even number >= 16")
    if not 0.0 < settings.asym_radius_fraction <= 1.0:
        problems.append("CORNERS_ASYM_RADIUS_FRACTION must lie in (0, 1]")
    if settings.samples_per_decade < 2:
        problems.append("CORNERS_SAMPLES_PER_DECADE must be >= 2")
    if not settings.bisection_tol > 0.0:
        problems.append("CORNERS_BISECTION_TOL must be positive")
    if not 0.0 < settings.winslow_relaxation < 2.0:
        problems.append("WINSLOW_RELAXATION must lie in (0, 2)")
    if not settings.winslow_tolerance > 0.0:
        problems.append("WINSLOW_TOLERANCE must be positive")
    if settings.winslow_iter_factor < 1:
        problems.append("WINSLOW_ITER_FACTOR must be >= 1")
    if settings.log_level not in _VALID_LOG_LEVELS:
        problems.append(f"CORNERS_LOG_LEVEL must be one of {', '.join(_VALID_LOG_LEVELS)}")

    if problems:
        raise SettingsError("; ".join(problems))

    logger.debug(f"Settings loaded: {settings}")
    return settings


_settings: Optional[Settings] = None


def get_settings() -> Settings:
    """Get or create the process-wide settings from the environment."""
    global _settings
    if _settings is None:
        _settings = load_settings()
    return _settings


def reset_settings() -> None:
    """Drop the cached settings so the next call re-reads the environment."""
    global _settings
    _settings = None
