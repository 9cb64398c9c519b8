"""
Corner problem definition and its closed-form derived quantities.

A corner of opening angle pi*beta is modelled by the sector

    S = {0 < r < R, -pi*beta/2 < phi < pi*beta/2}

whose sides are L+ = {phi = -pi*beta/2} and L- = {phi = +pi*beta/2}. The
boundary correspondence moves along the sides with constant speed:
u = sigma_plus * r on L+ and u = -sigma_minus * r on L-, with v = 0 on both.

The harmonic function matching that data is the linear part

    Q(r, phi) = -mu * r * sin(phi - phi_star)

with mu > 0 and phi_star in the open sector.
"""

# Standard library imports
import logging
import math
from dataclasses import dataclass, replace
from typing import Union

# Third-party imports
import numpy as np

logger = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray]

# Angles closer than this to a side are treated as lying on it
SIDE_TOLERANCE = 1e-12


class CornerConfigError(Exception):
    """Raised when corner geometry or boundary speeds are invalid."""

    pass


class SectorDomainError(Exception):
    """Raised when a point lies outside the closed sector."""

    pass


@dataclass(frozen=True)
class CornerConfig:
    """Geometric and kinematic corner data."""

    beta: float  # Opening factor, corner angle = pi * beta
    sigma_plus: float  # Boundary speed on L+ (phi = -pi*beta/2)
    sigma_minus: float  # Boundary speed on L- (phi = +pi*beta/2)
    radius: float = 1.0  # Sector radius R

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        """
        Check the configuration invariants.

        Raises:
            CornerConfigError: If beta is outside (0,1) U (1,2) or a speed/radius is not positive
        """
        values = (self.beta, self.sigma_plus, self.sigma_minus, self.radius)
        if not all(math.isfinite(v) for v in values):
            raise CornerConfigError(f"Non-finite corner parameters: {values}")
        if not (0.0 < self.beta < 2.0) or self.beta == 1.0:
            raise CornerConfigError(
                f"beta must lie in (0, 1) or (1, 2), got {self.beta} "
                "(a straight boundary is not a corner)"
            )
        if self.sigma_plus <= 0.0 or self.sigma_minus <= 0.0:
            raise CornerConfigError(
                f"Boundary speeds must be positive, got sigma_plus={self.sigma_plus}, "
                f"sigma_minus={self.sigma_minus}"
            )
        if self.radius <= 0.0:
            raise CornerConfigError(f"Sector radius must be positive, got {self.radius}")

    @property
    def half_angle(self) -> float:
        """Half opening angle pi*beta/2."""
        return half_angle(self.beta)

    @property
    def is_reentrant(self) -> bool:
        return self.beta > 1.0


@dataclass(frozen=True)
class DerivedParams:
    """Amplitude and preferred direction of the linear part Q."""

    mu: float
    phi_star: float


def half_angle(beta: float) -> float:
    return math.pi * beta / 2.0


def is_reentrant(cfg: CornerConfig) -> bool:
    """Return True for interior angles larger than pi."""
    return cfg.beta > 1.0


def swap_sides(cfg: CornerConfig) -> CornerConfig:
    """Return the mirrored configuration with sigma_plus and sigma_minus exchanged."""
    return replace(cfg, sigma_plus=cfg.sigma_minus, sigma_minus=cfg.sigma_plus)


def symmetric_mu(beta: float, sigma: float) -> float:
    """Closed form of mu when both sides move with the same speed sigma."""
    return sigma / math.sin(half_angle(beta))


def derive_params(cfg: CornerConfig) -> DerivedParams:
    """
    Compute mu and phi_star for a corner configuration.

    Args:
        cfg: Corner configuration

    Returns:
        DerivedParams with mu > 0 and |phi_star| < pi*beta/2

    Raises:
        CornerConfigError: If the configuration is invalid
    """
    cfg.validate()

    sp, sm = cfg.sigma_plus, cfg.sigma_minus
    angle = math.pi * cfg.beta

    mu = math.sqrt(sp * sp + sm * sm + 2.0 * sp * sm * math.cos(angle)) / abs(math.sin(angle))
    phi_star = math.atan((sp - sm) / (sp + sm) * math.tan(angle / 2.0))

    logger.debug(f"Derived params for beta={cfg.beta}: mu={mu:.12g}, phi_star={phi_star:.12g}")
    return DerivedParams(mu=mu, phi_star=phi_star)


def check_sector_point(beta: float, r: ArrayLike, phi: ArrayLike, radius: float = math.inf):
    """
    Validate that (r, phi) lies in the closed sector.

    Raises:
        SectorDomainError: If any radius is negative or beyond ``radius``, or any angle
            lies outside [-pi*beta/2, pi*beta/2]
    """
    r_arr = np.asarray(r, dtype=float)
    phi_arr = np.asarray(phi, dtype=float)
    limit = half_angle(beta) * (1.0 + SIDE_TOLERANCE) + SIDE_TOLERANCE

    if np.any(~np.isfinite(r_arr)) or np.any(~np.isfinite(phi_arr)):
        raise SectorDomainError("Non-finite sector coordinates")
    if np.any(r_arr < 0.0) or np.any(r_arr > radius * (1.0 + 1e-9)):
        raise SectorDomainError(f"Radius outside [0, {radius}]: {r_arr.min()}..{r_arr.max()}")
    if np.any(np.abs(phi_arr) > limit):
        raise SectorDomainError(
            f"Angle outside closed sector |phi| <= {half_angle(beta):.12g}: "
            f"max |phi| = {np.abs(phi_arr).max():.12g}"
        )


def linear_part_q(cfg: CornerConfig, d: DerivedParams, r: ArrayLike, phi: ArrayLike) -> ArrayLike:
    """
    Evaluate Q(r, phi) = -mu * r * sin(phi - phi_star).

    Args:
        cfg: Corner configuration
        d: Derived parameters of ``cfg``
        r: Radius (scalar or array, >= 0)
        phi: Angle in the closed sector (scalar or array)

    Returns:
        Q at the given points; a float for scalar input

    Raises:
        SectorDomainError: If a point lies outside the closed sector
    """
    check_sector_point(cfg.beta, r, phi)
    value = -d.mu * np.asarray(r, dtype=float) * np.sin(np.asarray(phi, dtype=float) - d.phi_star)
    if np.ndim(value) == 0:
        return float(value)
    return value
