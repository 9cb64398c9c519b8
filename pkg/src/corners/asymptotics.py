"""
Closed-form corner asymptotics and exit-angle laws.

Inverse curves L_theta are the preimages of the rays {arg w = theta}; along
them phi_theta(r) tends to an exit angle as r -> 0. Forward curves l_phi are
the images of the rays {arg z = phi}; their polar angle tends to an exit angle
as rho = |w| -> 0. Which limit applies depends on whether the corner is convex
(beta < 1) or reentrant (beta > 1), and on the special ray theta_star where
a_1 - b_1 cot(theta) vanishes.

All constants follow the psi_n convention of :mod:`src.corners.harmonic_map`;
in particular every a_2/b_2-dependent constant carries the sign of
psi_2 = -r^(2/beta) sin(2 phi/beta).

Example:
    >>> kit = AsymptoticKit.build(fmap)
    >>> kit.phi_of_theta(kit.theta_star) == kit.phi_star
    True
"""

# Standard library imports
import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional, Tuple

# Third-party imports
import numpy as np

# Local imports
from .corner_model import ArrayLike, SectorDomainError, half_angle
from .harmonic_map import CoefficientConstraintError, HarmonicCornerMap
from .settings import get_settings

logger = logging.getLogger(__name__)

# Relative size of a_1 - b_1 cot(theta) below which theta counts as theta_star
SPECIAL_ANGLE_TOLERANCE = 1e-8
# Absolute angular tolerance for point pieces of angle laws
LAW_TOLERANCE = 1e-12


class UnsupportedAngleError(Exception):
    """Raised when an asymptotic formula is requested for an angle it does not cover."""

    pass


class SingularDirectionError(Exception):
    """Raised when cos(phi/beta) vanishes and a forward formula has no finite value."""

    pass


class AsymptoticCaseError(Exception):
    """Raised when a formula is used outside the beta-case it was derived for."""

    pass


def theta_star(a1: float, b1: float) -> float:
    """
    Special ray angle solving a_1 - b_1 cot(theta) = 0 in (0, pi).

    Raises:
        CoefficientConstraintError: If b_1 <= 0 or a_1 == 0
    """
    if not b1 > 0.0 or a1 == 0.0:
        raise CoefficientConstraintError(f"theta_star needs b_1 > 0 and a_1 != 0, got {a1}, {b1}")
    return math.atan2(b1, a1)


class LawKind(Enum):
    """Direction of an exit-angle correspondence."""

    INVERSE = "inverse"  # phi(theta)
    FORWARD = "forward"  # theta(phi)


@dataclass(frozen=True)
class LawPiece:
    """Constant piece of an angle law on [lower, upper] (a point when lower == upper)."""

    lower: float
    upper: float
    value: float

    @property
    def is_point(self) -> bool:
        return self.lower == self.upper

    def contains(self, x: float, tol: float = LAW_TOLERANCE) -> bool:
        if self.is_point:
            return abs(x - self.lower) <= tol
        return self.lower < x < self.upper


@dataclass(frozen=True)
class AngleLaw:
    """Piecewise-constant exit-angle correspondence with at most three pieces."""

    kind: LawKind
    beta: float
    pieces: Tuple[LawPiece, ...]

    @property
    def domain(self) -> Tuple[float, float]:
        return self.pieces[0].lower, self.pieces[-1].upper

    def value(self, x: float) -> float:
        """Exit angle assigned to the argument ``x``."""
        lo, hi = self.domain
        if not lo - LAW_TOLERANCE <= x <= hi + LAW_TOLERANCE:
            raise UnsupportedAngleError(
                f"{self.kind.value} law argument {x} outside [{lo:.12g}, {hi:.12g}]"
            )
        # Point pieces take precedence over the open intervals around them
        for piece in sorted(self.pieces, key=lambda p: not p.is_point):
            if piece.contains(x):
                return piece.value
        # Only reachable for endpoints covered by an open piece within tolerance
        nearest = min(self.pieces, key=lambda p: min(abs(x - p.lower), abs(x - p.upper)))
        return nearest.value

    def values(self, xs: ArrayLike) -> np.ndarray:
        return np.array([self.value(float(x)) for x in np.atleast_1d(xs)])

    def interior_jump(self) -> Optional[Tuple[float, float]]:
        """
        Location and magnitude of a jump strictly inside the domain.

        Returns:
            (location, |right value - left value|) or None for laws constant in the interior
        """
        lo, hi = self.domain
        for index, piece in enumerate(self.pieces):
            if piece.is_point and lo < piece.lower < hi:
                left = self.pieces[index - 1].value
                right = self.pieces[index + 1].value
                return piece.lower, abs(right - left)
        return None

    def tabulate(self, n: int = 181) -> Tuple[np.ndarray, np.ndarray]:
        """Sample the law on a uniform grid with the point pieces inserted."""
        lo, hi = self.domain
        grid = np.linspace(lo, hi, n)
        points = [p.lower for p in self.pieces if p.is_point]
        xs = np.unique(np.concatenate((grid, points)))
        return xs, self.values(xs)


def inverse_angle_law(beta: float, theta_s: float, phi_s: float) -> AngleLaw:
    """Exit angle phi of L_theta as a function of theta in [0, pi]."""
    h = half_angle(beta)
    if beta < 1.0:
        pieces = (
            LawPiece(0.0, 0.0, -h),
            LawPiece(0.0, math.pi, phi_s),
            LawPiece(math.pi, math.pi, h),
        )
    else:
        pieces = (
            LawPiece(0.0, theta_s, -h),
            LawPiece(theta_s, theta_s, phi_s),
            LawPiece(theta_s, math.pi, h),
        )
    return AngleLaw(kind=LawKind.INVERSE, beta=beta, pieces=pieces)


def forward_angle_law(beta: float, theta_s: float, phi_s: float) -> AngleLaw:
    """Exit angle theta of l_phi as a function of phi in [-pi*beta/2, pi*beta/2]."""
    h = half_angle(beta)
    if beta < 1.0:
        pieces = (
            LawPiece(-h, phi_s, 0.0),
            LawPiece(phi_s, phi_s, theta_s),
            LawPiece(phi_s, h, math.pi),
        )
    else:
        pieces = (
            LawPiece(-h, -h, 0.0),
            LawPiece(-h, h, theta_s),
            LawPiece(h, h, math.pi),
        )
    return AngleLaw(kind=LawKind.FORWARD, beta=beta, pieces=pieces)


class Representation(Enum):
    """Coordinates in which a forward curve is described."""

    POLAR = "polar"  # theta versus rho
    CARTESIAN = "cartesian"  # v versus |u|
    ROTATED = "rotated"  # V versus U in the frame rotated by theta_star


@dataclass(frozen=True)
class Regime:
    """
    Leading-order behaviour of one asymptotic branch.

    The ordinate tends to ``limit`` like ``amplitude * s^order`` in the curve
    parameter s; in terms of the sector radius the deviation reads
    ``r_amplitude * r^r_exponent``. ``remainder_order`` is the exponent of the
    absolute error of the leading-order formula, when one is known, and
    ``correction_exponent`` the exponent of its relative error.
    """

    label: str
    limit: float
    order: Optional[float]
    amplitude: float
    r_amplitude: float
    r_exponent: float
    remainder_order: Optional[float] = None
    correction_exponent: Optional[float] = None

    def deviation(self, r: ArrayLike) -> ArrayLike:
        return self.r_amplitude * np.power(r, self.r_exponent)

    @property
    def exact(self) -> bool:
        return self.order is None


@dataclass(frozen=True)
class AsymptoticKit:
    """All derived asymptotic constants of one harmonic corner map."""

    map: HarmonicCornerMap
    theta_star: float
    gamma: float
    r_max_asym: float
    inverse_law: AngleLaw = field(repr=False)
    forward_law: AngleLaw = field(repr=False)

    @classmethod
    def build(
        cls, fmap: HarmonicCornerMap, r_max_fraction: Optional[float] = None
    ) -> "AsymptoticKit":
        """
        Derive theta_star, gamma and the angle laws of a map.

        Args:
            fmap: Admissible harmonic corner map
            r_max_fraction: Radius of the asymptotic range as a fraction of R

        Returns:
            AsymptoticKit bound to ``fmap``
        """
        if r_max_fraction is None:
            r_max_fraction = get_settings().asym_radius_fraction
        beta = fmap.beta
        t_star = theta_star(fmap.coeffs.a[0], fmap.coeffs.b[0])
        phi_s = fmap.derived.phi_star

        if beta > 1.0:
            gamma = min(1.0 / beta, 2.0 * (1.0 - 1.0 / beta))
        else:
            gamma = 2.0 / beta - 2.0

        kit = cls(
            map=fmap,
            theta_star=t_star,
            gamma=gamma,
            r_max_asym=r_max_fraction * fmap.config.radius,
            inverse_law=inverse_angle_law(beta, t_star, phi_s),
            forward_law=forward_angle_law(beta, t_star, phi_s),
        )
        logger.debug(f"Asymptotic kit: beta={beta}, theta*={t_star:.12g}, gamma={gamma:.6g}")
        return kit

    # ------------------------------------------------------------------ constants

    @property
    def beta(self) -> float:
        return self.map.beta

    @property
    def mu(self) -> float:
        return self.map.derived.mu

    @property
    def phi_star(self) -> float:
        return self.map.derived.phi_star

    @property
    def half_angle(self) -> float:
        return half_angle(self.beta)

    @property
    def rho1(self) -> float:
        """Modulus of the leading coefficient a_1 + i b_1."""
        return math.hypot(self.map.coeffs.a[0], self.map.coeffs.b[0])

    def level_coefficient(self, n: int, theta: float) -> float:
        """c_n(theta) = a_n - b_n cot(theta) of the level-curve equation."""
        a_n, b_n = self.map.coeffs.a[n - 1], self.map.coeffs.b[n - 1]
        return a_n - b_n * math.cos(theta) / math.sin(theta)

    def is_special(self, theta: float) -> bool:
        """True when theta is numerically the special ray theta_star."""
        if theta == self.theta_star:
            return True
        if not 0.0 < theta < math.pi:
            return False
        return abs(self.level_coefficient(1, theta)) < SPECIAL_ANGLE_TOLERANCE * self.rho1

    def e1(self, theta: float) -> float:
        """E_1(theta) = mu^-1 (a_1 - b_1 cot theta) cos(phi_star/beta)."""
        return self.level_coefficient(1, theta) * math.cos(self.phi_star / self.beta) / self.mu

    @property
    def e1_star(self) -> float:
        """E_1* = mu^-1 c_2(theta_star) sin(2(phi_star/beta + pi/2))."""
        c2 = self.level_coefficient(2, self.theta_star)
        return -c2 * math.sin(2.0 * self.phi_star / self.beta) / self.mu

    def f1(self, theta: float) -> float:
        """F_1(theta) = mu (a_1 - b_1 cot theta)^-1."""
        c1 = self.level_coefficient(1, theta)
        if c1 == 0.0:
            raise AsymptoticCaseError("F_1 is undefined on the special ray theta_star")
        return self.mu / c1

    @property
    def polar_special_constant(self) -> float:
        """Slope C* of theta*(rho) = theta_star + C* rho along the ray phi_star."""
        a1, a2 = self.map.coeffs.a[0], self.map.coeffs.a[1]
        b1, b2 = self.map.coeffs.b[0], self.map.coeffs.b[1]
        return 2.0 * (a2 * b1 - a1 * b2) * math.tan(self.phi_star / self.beta) / self.rho1**3

    def polar_constant(self, phi: float) -> float:
        """Amplitude C_phi of theta_phi(rho) = theta_star + C_phi rho^(beta - 1)."""
        cos_term = self._direction_cosine(phi)
        b1 = self.map.coeffs.b[0]
        return (
            self.mu
            * b1
            * math.sin(phi - self.phi_star)
            / (self.rho1 ** (self.beta + 1.0) * cos_term**self.beta)
        )

    def _direction_cosine(self, phi: float) -> float:
        if abs(phi) > self.half_angle * (1.0 + 1e-12):
            raise SectorDomainError(f"Direction phi={phi} outside the sector")
        value = math.cos(phi / self.beta)
        if value < 1e-12:
            raise SingularDirectionError(f"cos(phi/beta) vanishes at phi={phi:.12g}")
        return value

    def is_special_direction(self, phi: float) -> bool:
        return abs(phi - self.phi_star) <= LAW_TOLERANCE

    def in_asymptotic_range(self, r: ArrayLike) -> bool:
        return bool(np.all(np.asarray(r) <= self.r_max_asym))

    def _warn_range(self, r: np.ndarray, what: str) -> None:
        if not self.in_asymptotic_range(r):
            logger.warning(
                f"{what} evaluated out of asymptotic range: r up to {float(np.max(r)):.3g} "
                f"> r_max_asym={self.r_max_asym:.3g}"
            )

    # ------------------------------------------------------------------ inverse curves

    def phi_theta_asym(self, r: ArrayLike, theta: float):
        """
        Leading-order angle phi_theta(r) of the inverse curve L_theta.

        Args:
            r: Radius or radii (>= 0), nominally within r_max_asym
            theta: Ray angle in [0, pi]

        Returns:
            Predicted angle(s), clamped to the closed sector

        Raises:
            UnsupportedAngleError: For theta outside [0, pi], or theta in {0, pi} when beta > 1
        """
        if not 0.0 <= theta <= math.pi:
            raise UnsupportedAngleError(f"theta={theta} outside [0, pi]")
        r_arr = np.asarray(r, dtype=float)
        if np.any(r_arr < 0.0):
            raise SectorDomainError("Radii must be non-negative")
        self._warn_range(r_arr, "phi_theta_asym")

        regime = self.inverse_regime(theta)
        value = regime.limit + regime.deviation(r_arr)

        h = self.half_angle
        clamped = np.clip(value, -h, h)
        if np.any(clamped != value):
            logger.warning(
                f"phi_theta_asym left the sector for theta={theta:.6g}; "
                f"clamped {int(np.sum(clamped != value))} value(s)"
            )
        if np.ndim(clamped) == 0:
            return float(clamped)
        return clamped

    def inverse_regime(self, theta: float) -> Regime:
        """Leading-order branch of L_theta; the curve parameter is r."""
        h = self.half_angle
        beta = self.beta
        if theta <= 0.0 or theta >= math.pi:
            if beta > 1.0:
                raise UnsupportedAngleError(
                    "Side rays theta in {0, pi} have no stated asymptotics for beta > 1"
                )
            limit = -h if theta <= 0.0 else h
            return Regime("side", limit, None, 0.0, 0.0, 1.0)

        if self.is_special(theta):
            exponent = 2.0 / beta - 1.0
            e1s = self.e1_star
            correction = min(2.0 / beta - 1.0, 1.0 / beta)
            return Regime(
                "special", self.phi_star, exponent, e1s, e1s, exponent, None, correction
            )

        if beta < 1.0:
            exponent = 1.0 / beta - 1.0
            e1 = self.e1(theta)
            return Regime(
                "interior", self.phi_star, exponent, e1, e1, exponent, self.gamma, exponent
            )

        exponent = 1.0 - 1.0 / beta
        f1 = self.f1(theta)
        correction = min(1.0 - 1.0 / beta, 1.0 / beta)
        if theta < self.theta_star:
            amp = -beta * f1 * math.sin(h + self.phi_star)
            return Regime("side_plus", -h, exponent, amp, amp, exponent, self.gamma, correction)
        amp = -beta * f1 * math.sin(h - self.phi_star)
        return Regime("side_minus", h, exponent, amp, amp, exponent, self.gamma, correction)

    def phi_of_theta(self, theta: float) -> float:
        """Exit angle phi of L_theta."""
        return self.inverse_law.value(theta)

    def theta_of_phi(self, phi: float) -> float:
        """Exit angle theta of l_phi."""
        return self.forward_law.value(phi)

    # ------------------------------------------------------------------ forward curves

    def forward_curve_cartesian(self, arg: ArrayLike, phi: float):
        """
        Leading-order ordinate of the forward curve l_phi.

        For beta < 1 the argument is u and the result is v; for beta > 1 the
        argument is U >= 0 and the result is V in the frame (U + iV) = w e^{-i theta_star}.

        Raises:
            SingularDirectionError: If cos(phi/beta) vanishes (phi on a side)
        """
        cos_term = self._direction_cosine(phi)
        x = np.asarray(arg, dtype=float)
        a1, b1 = self.map.coeffs.a[0], self.map.coeffs.b[0]

        if self.beta < 1.0:
            if self.is_special_direction(phi):
                value = (b1 / a1) * x
            else:
                denom = (self.mu * abs(math.sin(phi - self.phi_star))) ** (1.0 / self.beta)
                value = b1 * cos_term * np.power(np.abs(x), 1.0 / self.beta) / denom
        else:
            if self.is_special_direction(phi):
                value = self.polar_special_constant * x**2
            else:
                value = self.polar_constant(phi) * np.power(np.abs(x), self.beta)

        if np.ndim(value) == 0:
            return float(value)
        return value

    def forward_curve_polar(self, rho: ArrayLike, phi: float):
        """
        Leading-order polar angle of l_phi for a reentrant corner.

        Raises:
            AsymptoticCaseError: If beta < 1
        """
        if self.beta < 1.0:
            raise AsymptoticCaseError("Polar forward asymptotics hold for beta in (1, 2)")
        x = np.asarray(rho, dtype=float)
        if self.is_special_direction(phi):
            value = self.theta_star + self.polar_special_constant * x
        else:
            value = self.theta_star + self.polar_constant(phi) * np.power(x, self.beta - 1.0)
        if np.ndim(value) == 0:
            return float(value)
        return value

    def forward_regime(self, phi: float, representation: Representation) -> Regime:
        """Leading-order branch of l_phi in the requested representation."""
        h = self.half_angle
        beta = self.beta
        a1, b1 = self.map.coeffs.a[0], self.map.coeffs.b[0]

        if abs(phi) >= h * (1.0 - 1e-12):
            if representation is not Representation.POLAR:
                raise SingularDirectionError(f"Side direction phi={phi} has no curve asymptotics")
            limit = 0.0 if phi < 0.0 else math.pi
            return Regime("side", limit, None, 0.0, 0.0, 1.0)

        cos_term = self._direction_cosine(phi)
        scale = self.rho1 * cos_term  # rho ~ scale * r^(1/beta) along phi_star and for beta > 1

        if self.is_special_direction(phi):
            c_star = self.polar_special_constant
            if representation is Representation.POLAR:
                return Regime(
                    "special", self.theta_star, 1.0, c_star, c_star * scale, 1.0 / beta,
                    correction_exponent=1.0 / beta,
                )
            if representation is Representation.ROTATED:
                return Regime(
                    "special", 0.0, 2.0, c_star, c_star * scale**2, 2.0 / beta,
                    correction_exponent=1.0 / beta,
                )
            if beta > 1.0:
                raise AsymptoticCaseError("Cartesian forward asymptotics hold for beta in (0, 1)")
            slope = b1 / abs(a1)
            return Regime(
                "special", 0.0, 1.0, slope, b1 * cos_term, 1.0 / beta,
                correction_exponent=1.0 / beta,
            )

        sin_term = math.sin(phi - self.phi_star)
        if beta < 1.0:
            k = b1 * cos_term / (self.mu * abs(sin_term)) ** (1.0 / beta)
            if representation is Representation.POLAR:
                exponent = 1.0 / beta - 1.0
                r_amp = b1 * cos_term / (self.mu * abs(sin_term))
                if sin_term < 0.0:
                    return Regime("toward_zero", 0.0, exponent, k, r_amp, exponent, None, exponent)
                return Regime("toward_pi", math.pi, exponent, -k, -r_amp, exponent, None, exponent)
            if representation is Representation.CARTESIAN:
                return Regime(
                    "power", 0.0, 1.0 / beta, k, b1 * cos_term, 1.0 / beta,
                    correction_exponent=1.0 / beta - 1.0,
                )
            raise AsymptoticCaseError("Rotated-frame asymptotics hold for beta in (1, 2)")

        c_phi = self.polar_constant(phi)
        correction = min(1.0 - 1.0 / beta, 2.0 / beta - 1.0)
        if representation is Representation.POLAR:
            r_amp = self.mu * b1 * sin_term / (self.rho1**2 * cos_term)
            return Regime(
                "interior", self.theta_star, beta - 1.0, c_phi, r_amp, 1.0 - 1.0 / beta,
                correction_exponent=correction,
            )
        if representation is Representation.ROTATED:
            r_amp = self.mu * b1 * sin_term / self.rho1
            return Regime(
                "interior", 0.0, beta, c_phi, r_amp, 1.0, correction_exponent=correction
            )
        raise AsymptoticCaseError("Cartesian forward asymptotics hold for beta in (0, 1)")

    def inverse_limit_candidates(self) -> Tuple[float, float, float]:
        return (-self.half_angle, self.phi_star, self.half_angle)

    def forward_limit_candidates(self) -> Tuple[float, float, float]:
        return (0.0, self.theta_star, math.pi)


# ---------------------------------------------------------------------- conformal reference


def conformal_map(beta: float, r: ArrayLike, phi: ArrayLike):
    """K(z) = (e^{i pi beta/2} z)^(1/beta) for z = r e^{i phi} in the sector."""
    r_arr = np.asarray(r, dtype=float)
    phi_arr = np.asarray(phi, dtype=float)
    w = np.power(r_arr, 1.0 / beta) * np.exp(1j * conformal_theta_of_phi(beta, phi_arr))
    if np.ndim(w) == 0:
        return complex(w)
    return w


def conformal_inverse(beta: float, rho: ArrayLike, theta: ArrayLike):
    """K^-1(rho e^{i theta}) as a complex sector point."""
    rho_arr = np.asarray(rho, dtype=float)
    z = np.power(rho_arr, beta) * np.exp(1j * conformal_phi_of_theta(beta, np.asarray(theta)))
    if np.ndim(z) == 0:
        return complex(z)
    return z


def conformal_theta_of_phi(beta: float, phi: ArrayLike) -> ArrayLike:
    """Continuous conformal law theta(phi) = phi/beta + pi/2."""
    value = np.asarray(phi, dtype=float) / beta + math.pi / 2.0
    return float(value) if np.ndim(value) == 0 else value


def conformal_phi_of_theta(beta: float, theta: ArrayLike) -> ArrayLike:
    """Continuous conformal law phi(theta) = beta*theta - pi*beta/2."""
    value = beta * np.asarray(theta, dtype=float) - half_angle(beta)
    return float(value) if np.ndim(value) == 0 else value


def law_jump_summary(kit: AsymptoticKit) -> List[Tuple[str, Optional[Tuple[float, float]]]]:
    """Interior jumps of both laws, labelled by kind."""
    return [
        (kit.inverse_law.kind.value, kit.inverse_law.interior_jump()),
        (kit.forward_law.kind.value, kit.forward_law.interior_jump()),
    ]
