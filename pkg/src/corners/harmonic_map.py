"""
Harmonic maps of a corner sector represented by a truncated series.

The map F = u + i v on the sector is written as

    F = Q + sum_{n=1..N} (a_n + i b_n) * psi_n,
    psi_n(r, phi) = r^(n/beta) * sin(n * (phi/beta + pi/2)),

where Q is the linear part from :mod:`src.corners.corner_model`. Every psi_n
vanishes on both sides, so the side data of F is carried by Q alone and the
coefficients are fixed by the values on the arc r = R. Admissible maps have
a_1 != 0 and b_1 > 0.
"""

# Standard library imports
import logging
import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Tuple

# Third-party imports
import numpy as np
from scipy.integrate import simpson

# Local imports
from .corner_model import (
    SIDE_TOLERANCE,
    ArrayLike,
    CornerConfig,
    DerivedParams,
    check_sector_point,
    derive_params,
    half_angle,
    linear_part_q,
)
from .settings import get_settings

logger = logging.getLogger(__name__)

# Field callables map (r, phi) arrays to complex values
Field = Callable[[np.ndarray, np.ndarray], np.ndarray]

DEGENERATE_THRESHOLD = 1e-10


class CoefficientConstraintError(Exception):
    """Raised when series coefficients violate a_1 != 0 and b_1 > 0."""

    pass


class DegenerateFitError(Exception):
    """Raised when fitted coefficients do not define an admissible map."""

    pass


class ArcSampleError(Exception):
    """Raised when arc samples are too sparse or inconsistent with the side data."""

    pass


@dataclass(frozen=True)
class SeriesCoefficients:
    """Truncated series coefficients a_1..a_N and b_1..b_N."""

    a: Tuple[float, ...]
    b: Tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "a", tuple(float(x) for x in self.a))
        object.__setattr__(self, "b", tuple(float(x) for x in self.b))
        if len(self.a) != len(self.b):
            raise CoefficientConstraintError(
                f"a and b must have equal length, got {len(self.a)} and {len(self.b)}"
            )
        if len(self.a) < 2:
            raise CoefficientConstraintError(f"Truncation order must be >= 2, got {len(self.a)}")
        if not all(math.isfinite(x) for x in self.a + self.b):
            raise CoefficientConstraintError("Coefficients must be finite")
        if not self.b[0] > 0.0:
            raise CoefficientConstraintError(f"b_1 must be positive, got {self.b[0]}")
        if self.a[0] == 0.0:
            raise CoefficientConstraintError("a_1 must be non-zero")

    @property
    def n_terms(self) -> int:
        return len(self.a)

    @property
    def complex(self) -> np.ndarray:
        """Coefficients c_n = a_n + i b_n as a complex array."""
        return np.asarray(self.a) + 1j * np.asarray(self.b)

    @classmethod
    def padded(cls, a: Sequence[float], b: Sequence[float], n_terms: int = 2):
        """Build coefficients, padding both sequences with zeros up to ``n_terms``."""
        size = max(n_terms, len(a), len(b))
        a_full = list(a) + [0.0] * (size - len(a))
        b_full = list(b) + [0.0] * (size - len(b))
        return cls(tuple(a_full), tuple(b_full))


def _side_mask(beta: float, phi: np.ndarray) -> np.ndarray:
    return np.abs(np.abs(phi) - half_angle(beta)) <= SIDE_TOLERANCE


def basis_psi(n: int, beta: float, r: ArrayLike, phi: ArrayLike) -> ArrayLike:
    """
    Evaluate psi_n(r, phi) = r^(n/beta) * sin(n * (phi/beta + pi/2)).

    Returns exactly 0 on both sides of the sector.

    Raises:
        SectorDomainError: If a point lies outside the closed sector
    """
    if n < 1:
        raise ValueError(f"Basis index must be positive, got {n}")
    check_sector_point(beta, r, phi)

    r_arr = np.asarray(r, dtype=float)
    phi_arr = np.asarray(phi, dtype=float)
    value = np.power(r_arr, n / beta) * np.sin(n * (phi_arr / beta + math.pi / 2.0))
    value = np.where(_side_mask(beta, phi_arr), 0.0, value)

    if np.ndim(value) == 0:
        return float(value)
    return value


@dataclass(frozen=True)
class Jacobian:
    """Jacobian d(u, v)/d(x, y) at a sector point."""

    matrix: np.ndarray  # [[u_x, u_y], [v_x, v_y]]
    det: float
    singular: bool = False

    @property
    def preserves_orientation(self) -> bool:
        return not self.singular and self.det > 0.0


@dataclass(frozen=True)
class OrientationSample:
    """Summary of det J sampled over an interior polar grid."""

    min_det: float
    positive_fraction: float
    n_samples: int

    @property
    def orientation_preserving(self) -> bool:
        return self.positive_fraction == 1.0


@dataclass(frozen=True)
class HarmonicCornerMap:
    """
    Harmonic map of the sector given by its linear part and series coefficients.

    Instances are immutable; evaluation is pure and may run from many threads.

    Example:
        >>> cfg = CornerConfig(beta=0.5, sigma_plus=1.0, sigma_minus=1.0)
        >>> fmap = HarmonicCornerMap.from_coefficients(cfg, [1.0, 0.0], [1.0, 0.0])
        >>> w = fmap.evaluate(0.1, 0.0)  # ~ 0.01 + 0.01j
    """

    config: CornerConfig
    derived: DerivedParams
    coeffs: SeriesCoefficients

    @classmethod
    def from_coefficients(
        cls, cfg: CornerConfig, a: Sequence[float], b: Sequence[float]
    ) -> "HarmonicCornerMap":
        """Build a map from explicit coefficient lists (padded to at least two terms)."""
        return cls(config=cfg, derived=derive_params(cfg), coeffs=SeriesCoefficients.padded(a, b))

    @property
    def beta(self) -> float:
        return self.config.beta

    def evaluate(self, r: ArrayLike, phi: ArrayLike):
        """
        Evaluate F(r e^{i phi}) = Q + sum c_n psi_n.

        Args:
            r: Radius in [0, R] (scalar or array)
            phi: Angle in the closed sector (scalar or array)

        Returns:
            Complex image; a Python complex for scalar input

        Raises:
            SectorDomainError: If a point lies outside the closed sector
        """
        check_sector_point(self.beta, r, phi, self.config.radius)
        u, v = self._components(np.asarray(r, dtype=float), np.asarray(phi, dtype=float))
        w = u + 1j * v
        if np.ndim(w) == 0:
            return complex(w)
        return w

    def evaluate_xy(self, x: ArrayLike, y: ArrayLike):
        """Evaluate F at Cartesian points of the sector."""
        x_arr = np.asarray(x, dtype=float)
        y_arr = np.asarray(y, dtype=float)
        return self.evaluate(np.hypot(x_arr, y_arr), np.arctan2(y_arr, x_arr))

    def _components(self, r: np.ndarray, phi: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        u = -self.derived.mu * r * np.sin(phi - self.derived.phi_star)
        v = np.zeros(np.broadcast(r, phi).shape)
        on_side = _side_mask(self.beta, phi)
        t = phi / self.beta + math.pi / 2.0
        for n, (a_n, b_n) in enumerate(zip(self.coeffs.a, self.coeffs.b), start=1):
            if a_n == 0.0 and b_n == 0.0:
                continue
            psi = np.where(on_side, 0.0, np.power(r, n / self.beta) * np.sin(n * t))
            u = u + a_n * psi
            v = v + b_n * psi
        return u, v

    def _gradients(self, r: np.ndarray, phi: np.ndarray):
        mu, phi_star = self.derived.mu, self.derived.phi_star
        shape = np.broadcast(r, phi).shape
        u_x = np.full(shape, mu * math.sin(phi_star))
        u_y = np.full(shape, -mu * math.cos(phi_star))
        v_x = np.zeros(shape)
        v_y = np.zeros(shape)

        # psi_n = Im g_n with g_n = i^n z^(n/beta): psi_x = Im g', psi_y = Re g'
        with np.errstate(divide="ignore", invalid="ignore"):
            for n, (a_n, b_n) in enumerate(zip(self.coeffs.a, self.coeffs.b), start=1):
                if a_n == 0.0 and b_n == 0.0:
                    continue
                p = n / self.beta
                g_prime = (1j**n) * p * np.power(r, p - 1.0) * np.exp(1j * (p - 1.0) * phi)
                if p > 1.0:
                    g_prime = np.where(r == 0.0, 0.0, g_prime)
                psi_x, psi_y = g_prime.imag, g_prime.real
                u_x = u_x + a_n * psi_x
                u_y = u_y + a_n * psi_y
                v_x = v_x + b_n * psi_x
                v_y = v_y + b_n * psi_y
        return u_x, u_y, v_x, v_y

    def jacobian(self, r: float, phi: float) -> Jacobian:
        """
        Analytic Jacobian d(u, v)/d(x, y) at a sector point.

        At the vertex the series derivatives vanish for beta < 1, giving a finite
        matrix; for beta > 1 they blow up and the result is flagged singular.
        """
        check_sector_point(self.beta, r, phi, self.config.radius)
        if r == 0.0 and self.beta > 1.0:
            logger.debug("Jacobian requested at the vertex of a reentrant corner")
            nan = float("nan")
            return Jacobian(matrix=np.full((2, 2), nan), det=nan, singular=True)

        u_x, u_y, v_x, v_y = self._gradients(np.asarray(float(r)), np.asarray(float(phi)))
        matrix = np.array([[float(u_x), float(u_y)], [float(v_x), float(v_y)]])
        return Jacobian(matrix=matrix, det=float(np.linalg.det(matrix)))

    def sample_orientation(self, n_r: int = 16, n_phi: int = 33) -> OrientationSample:
        """
        Sample det J over an interior polar grid of the sector.

        The grid excludes the vertex and both sides; one-sheetedness is only
        indicated, not proved, by a fully positive sample.
        """
        radius = self.config.radius
        r = radius * np.linspace(0.0, 1.0, n_r + 2)[1:-1]
        phi = half_angle(self.beta) * np.linspace(-1.0, 1.0, n_phi + 2)[1:-1]
        rr, pp = np.meshgrid(r, phi, indexing="ij")
        u_x, u_y, v_x, v_y = self._gradients(rr, pp)
        det = u_x * v_y - u_y * v_x

        sample = OrientationSample(
            min_det=float(det.min()),
            positive_fraction=float(np.mean(det > 0.0)),
            n_samples=int(det.size),
        )
        if not sample.orientation_preserving:
            logger.warning(
                f"Orientation sampling found non-positive det J "
                f"(min {sample.min_det:.3e}, positive fraction {sample.positive_fraction:.3f})"
            )
        return sample

    def harmonicity_residual(self, h: float) -> float:
        """Max 5-point discrete Laplacian of both components over interior stencil centres."""
        return discrete_laplacian_residual(self.evaluate, self.beta, self.config.radius, h)


def _stencil_centres(beta: float, radius: float) -> Tuple[np.ndarray, np.ndarray]:
    r = radius * np.linspace(0.25, 0.75, 5)
    phi = 0.8 * half_angle(beta) * np.linspace(-1.0, 1.0, 7)
    rr, pp = np.meshgrid(r, phi, indexing="ij")
    return (rr * np.cos(pp)).ravel(), (rr * np.sin(pp)).ravel()


def discrete_laplacian_residual(field: Field, beta: float, radius: float, h: float) -> float:
    """
    Max |5-point Laplacian| of the real and imaginary parts of ``field``.

    Stencil centres sit on a fixed polar grid with r in [0.25R, 0.75R] and an
    angular margin of 20% from each side, so the same centres are used for any h.

    Args:
        field: Callable (r, phi) -> complex array, evaluated on the closed sector
        beta: Opening factor of the sector
        radius: Sector radius R
        h: Stencil step

    Returns:
        Max absolute discrete Laplacian over centres and components
    """
    x, y = _stencil_centres(beta, radius)
    margin = float(np.min(np.hypot(x, y) * np.sin(0.2 * half_angle(beta))))
    if not 0.0 < h < margin:
        raise ValueError(f"Stencil step {h} does not fit inside the sector (limit {margin:.3g})")

    def at(dx: float, dy: float) -> np.ndarray:
        px, py = x + dx, y + dy
        return np.asarray(field(np.hypot(px, py), np.arctan2(py, px)), dtype=complex)

    lap = (at(h, 0.0) + at(-h, 0.0) + at(0.0, h) + at(0.0, -h) - 4.0 * at(0.0, 0.0)) / (h * h)
    return float(max(np.abs(lap.real).max(), np.abs(lap.imag).max()))


def arc_parameter(beta: float, phi: ArrayLike) -> ArrayLike:
    """Map phi in [-pi*beta/2, pi*beta/2] to t = phi/beta + pi/2 in [0, pi]."""
    return np.asarray(phi, dtype=float) / beta + math.pi / 2.0


def sample_arc(field: Field, cfg: CornerConfig, n_panels: Optional[int] = None):
    """
    Sample a field on the arc r = R over a uniform grid in t.

    Returns:
        Tuple (phi, values) with ``n_panels + 1`` points including both sides
    """
    n_panels = n_panels or get_settings().quad_panels
    t = np.linspace(0.0, math.pi, n_panels + 1)
    phi = cfg.beta * (t - math.pi / 2.0)
    phi[0], phi[-1] = -half_angle(cfg.beta), half_angle(cfg.beta)
    values = np.asarray(field(np.full_like(phi, cfg.radius), phi), dtype=complex)
    return phi, values


def conformal_arc_samples(cfg: CornerConfig, n_panels: Optional[int] = None):
    """
    Arc data of the conformal map K(z) = (e^{i pi beta/2} z)^(1/beta) adjusted to the side data.

    K sends the arc to R^(1/beta) e^{it}; the endpoint mismatch against
    sigma_plus*R and -sigma_minus*R is removed by linear interpolation in t.
    """
    n_panels = n_panels or get_settings().quad_panels
    t = np.linspace(0.0, math.pi, n_panels + 1)
    phi = cfg.beta * (t - math.pi / 2.0)
    phi[0], phi[-1] = -half_angle(cfg.beta), half_angle(cfg.beta)

    scale = cfg.radius ** (1.0 / cfg.beta)
    k_values = scale * np.exp(1j * t)
    gap_start = scale - cfg.sigma_plus * cfg.radius
    gap_end = -scale + cfg.sigma_minus * cfg.radius
    values = k_values - (gap_start * (1.0 - t / math.pi) + gap_end * (t / math.pi))
    return phi, values


def fit_from_arc(
    cfg: CornerConfig,
    d: DerivedParams,
    phi: Sequence[float],
    values: Sequence[complex],
    n_terms: Optional[int] = None,
    endpoint_tol: float = 1e-6,
) -> SeriesCoefficients:
    """
    Fit series coefficients from samples of F on the arc r = R.

    With t = phi/beta + pi/2, each coefficient is the sine projection

        a_n + i b_n = (2/pi) R^(-n/beta) * integral_0^pi (F - Q) sin(n t) dt

    evaluated by composite Simpson quadrature on the sample grid. Missing side
    endpoints are filled from the side data, where F - Q vanishes.

    Args:
        cfg: Corner configuration
        d: Derived parameters of ``cfg``
        phi: Sample angles on the arc
        values: Complex values of F at those angles
        n_terms: Truncation order N (default from settings)
        endpoint_tol: Relative tolerance for side endpoint consistency

    Returns:
        Fitted SeriesCoefficients

    Raises:
        ArcSampleError: If samples are too few, out of range or disagree with the side data
        DegenerateFitError: If b_1 <= 0 or |a_1| is below the degeneracy threshold
    """
    n_terms = n_terms or get_settings().n_terms
    phi_arr = np.asarray(phi, dtype=float).ravel()
    val_arr = np.asarray(values, dtype=complex).ravel()

    if phi_arr.size != val_arr.size:
        raise ArcSampleError(f"Got {phi_arr.size} angles but {val_arr.size} values")
    if phi_arr.size < 8 * n_terms:
        raise ArcSampleError(
            f"At least {8 * n_terms} arc samples required for {n_terms} terms, got {phi_arr.size}"
        )
    if not np.all(np.isfinite(phi_arr)) or not np.all(np.isfinite(val_arr)):
        raise ArcSampleError("Arc samples contain non-finite values")

    edge = half_angle(cfg.beta)
    if np.any(np.abs(phi_arr) > edge * (1.0 + SIDE_TOLERANCE) + SIDE_TOLERANCE):
        raise ArcSampleError("Arc sample angles lie outside the closed sector")

    order = np.argsort(phi_arr, kind="stable")
    phi_arr, val_arr = phi_arr[order], val_arr[order]
    if np.any(np.diff(phi_arr) <= 0.0):
        raise ArcSampleError("Arc sample angles must be distinct")

    radius = cfg.radius
    scale = max(1.0, float(np.abs(val_arr).max()))
    side_values = {-1: cfg.sigma_plus * radius, 1: -cfg.sigma_minus * radius}
    for sign, index in ((-1, 0), (1, -1)):
        if abs(phi_arr[index] - sign * edge) <= SIDE_TOLERANCE * max(1.0, edge):
            mismatch = abs(val_arr[index] - side_values[sign])
            if mismatch > endpoint_tol * scale:
                raise ArcSampleError(
                    f"Arc value at phi={phi_arr[index]:.6g} disagrees with side data "
                    f"by {mismatch:.3e}"
                )

    # Side endpoints carry F - Q = 0
    remainder = val_arr - np.asarray(linear_part_q(cfg, d, np.full_like(phi_arr, radius), phi_arr))
    t = np.asarray(arc_parameter(cfg.beta, phi_arr))
    if t[0] > SIDE_TOLERANCE:
        t = np.concatenate(([0.0], t))
        remainder = np.concatenate(([0.0], remainder))
    if t[-1] < math.pi - SIDE_TOLERANCE:
        t = np.concatenate((t, [math.pi]))
        remainder = np.concatenate((remainder, [0.0]))

    a = np.empty(n_terms)
    b = np.empty(n_terms)
    for n in range(1, n_terms + 1):
        weight = np.sin(n * t)
        factor = (2.0 / math.pi) * radius ** (-n / cfg.beta)
        a[n - 1] = factor * simpson(remainder.real * weight, x=t)
        b[n - 1] = factor * simpson(remainder.imag * weight, x=t)

    threshold = DEGENERATE_THRESHOLD * scale
    if not b[0] >= threshold or not abs(a[0]) >= threshold:
        raise DegenerateFitError(
            f"Fitted map is not admissible: a_1={a[0]:.3e}, b_1={b[0]:.3e} "
            f"(need |a_1| and b_1 >= {threshold:.1e})"
        )

    logger.info(
        f"Fitted {n_terms} terms from {phi_arr.size} arc samples: "
        f"a_1={a[0]:.6g}, b_1={b[0]:.6g}"
    )
    return SeriesCoefficients(tuple(a), tuple(b))


def fit_map_from_arc(
    cfg: CornerConfig,
    phi: Sequence[float],
    values: Sequence[complex],
    n_terms: Optional[int] = None,
) -> HarmonicCornerMap:
    """Fit coefficients from arc data and wrap them into a map."""
    d = derive_params(cfg)
    coeffs = fit_from_arc(cfg, d, phi, values, n_terms=n_terms)
    return HarmonicCornerMap(config=cfg, derived=d, coeffs=coeffs)
