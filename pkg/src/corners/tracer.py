"""
Curve-tracing oracle for corner asymptotics.

Inverse curves L_theta = F^-1({arg w = theta}) are traced by solving the level
equation Im[F(r e^{i phi}) e^{-i theta}] = 0 for phi at each radius, following
one branch from the largest radius inward. Forward curves l_phi = F({arg z = phi})
need only direct evaluation. Exit angles and convergence orders are then
estimated from log-log fits, independently of the closed forms in
:mod:`src.corners.asymptotics`, which makes the tracer an oracle for them.
"""

# Standard library imports
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Dict, List, Optional, Sequence, Tuple

# Third-party imports
import numpy as np
from scipy.optimize import bisect, brentq

# Local imports
from .asymptotics import (
    AsymptoticKit,
    Regime,
    Representation,
    UnsupportedAngleError,
    conformal_inverse,
    conformal_map,
)
from .corner_model import CornerConfig, check_sector_point, half_angle
from .harmonic_map import HarmonicCornerMap
from .settings import get_settings

logger = logging.getLogger(__name__)


class NoRootError(Exception):
    """Raised when the level equation has no sign change at a radius."""

    def __init__(self, message: str, radius: float):
        super().__init__(message)
        self.radius = radius


class PoorFitError(Exception):
    """Raised when a curve is too short or not in its asymptotic regime."""

    pass


class CurveKind(Enum):
    """Origin of a traced curve."""

    INVERSE = "inverse"  # preimage of a ray, phi versus r
    FORWARD = "forward"  # image of a ray


@dataclass(frozen=True)
class TracedCurve:
    """Samples of a traced curve ordered by decreasing parameter."""

    kind: CurveKind
    angle: float  # theta for inverse curves, phi for forward curves
    beta: float
    radii: np.ndarray
    parameter: np.ndarray
    ordinate: np.ndarray
    representation: Representation
    limit_candidates: Tuple[float, ...]
    images: Optional[np.ndarray] = field(default=None, repr=False)
    theta_star: Optional[float] = None

    def __len__(self) -> int:
        return int(self.parameter.size)

    @property
    def decades(self) -> float:
        """Decades spanned by the parameter."""
        p = np.abs(self.parameter)
        p = p[p > 0.0]
        if p.size < 2:
            return 0.0
        return float(math.log10(p.max() / p.min()))

    def column_names(self) -> Tuple[str, str]:
        if self.kind is CurveKind.INVERSE:
            return ("r", "phi")
        return {
            Representation.POLAR: ("rho", "theta"),
            Representation.CARTESIAN: ("u", "v"),
            Representation.ROTATED: ("U", "V"),
        }[self.representation]

    def as_representation(self, representation: Representation) -> "TracedCurve":
        """
        Re-express a forward curve in polar, Cartesian or rotated coordinates.

        Cartesian curves use |u| as parameter; rotated curves use the frame
        (U + iV) = w e^{-i theta_star}.
        """
        if self.kind is not CurveKind.FORWARD or self.images is None:
            raise ValueError("Only forward curves carry images to re-express")
        w = self.images
        if representation is Representation.POLAR:
            parameter, ordinate = np.abs(w), np.arctan2(w.imag, w.real)
            candidates = (0.0, float(self.theta_star), math.pi)
        elif representation is Representation.CARTESIAN:
            parameter, ordinate = np.abs(w.real), w.imag
            candidates = (0.0,)
        else:
            rotated = w * np.exp(-1j * float(self.theta_star))
            parameter, ordinate = rotated.real, rotated.imag
            candidates = (0.0,)
        return replace(
            self,
            parameter=np.asarray(parameter, dtype=float),
            ordinate=np.asarray(ordinate, dtype=float),
            representation=representation,
            limit_candidates=candidates,
        )


@dataclass(frozen=True)
class ExitAngleEstimate:
    """Fitted limit, order and quality of a traced curve."""

    limit_angle: float
    order_estimate: Optional[float]  # None when the curve sits exactly on its limit
    fit_residual: float
    final_gap: float  # |ordinate - limit| at the smallest parameter
    decades: float
    n_samples: int


@dataclass(frozen=True)
class AsymptoticComparison:
    """Discrepancy between a traced curve and its leading-order prediction."""

    max_abs: float
    rms: float
    remainder_exponent: Optional[float]
    expected_remainder: Optional[float]
    n_samples: int

    def remainder_consistent(self, slack: float = 0.1) -> bool:
        """True when the measured remainder decays at least as fast as expected (minus slack)."""
        if self.remainder_exponent is None or self.expected_remainder is None:
            return True
        return self.remainder_exponent >= self.expected_remainder - slack


def log_radii(
    radius: float = 1.0,
    r_min_fraction: float = 1e-6,
    r_max_fraction: float = 1e-1,
    per_decade: Optional[int] = None,
) -> np.ndarray:
    """Log-spaced radii from r_max down to r_min, ``per_decade`` samples per decade."""
    per_decade = per_decade or get_settings().samples_per_decade
    if not 0.0 < r_min_fraction < r_max_fraction:
        raise ValueError(f"Need 0 < r_min < r_max, got {r_min_fraction}, {r_max_fraction}")
    decades = math.log10(r_max_fraction / r_min_fraction)
    count = max(2, int(math.ceil(decades * per_decade)) + 1)
    return radius * np.geomspace(r_max_fraction, r_min_fraction, count)


def _prepare_radii(fmap: HarmonicCornerMap, radii: Optional[Sequence[float]]) -> np.ndarray:
    if radii is None:
        radii = log_radii(fmap.config.radius)
    r = np.unique(np.asarray(radii, dtype=float))[::-1]
    if r.size == 0:
        raise ValueError("No radii to trace")
    if r[-1] <= 0.0 or r[0] > fmap.config.radius:
        raise ValueError(f"Radii must lie in (0, R], got {r[-1]}..{r[0]}")
    return r


def level_function(fmap: HarmonicCornerMap, theta: float, r: float):
    """g(phi) = Im[F(r e^{i phi}) e^{-i theta}] = v cos(theta) - u sin(theta)."""
    cos_t, sin_t = math.cos(theta), math.sin(theta)

    def g(phi):
        w = fmap.evaluate(r, phi)
        return np.imag(w) * cos_t - np.real(w) * sin_t

    return g


def _bracket_by_scan(g, h: float, scan_points: int, phi_hint: Optional[float]):
    grid = np.linspace(-h, h, scan_points)
    grid[0], grid[-1] = -h, h
    values = np.asarray(g(grid), dtype=float)
    brackets = [
        (grid[k], grid[k + 1])
        for k in range(scan_points - 1)
        if values[k] == 0.0 or values[k] * values[k + 1] < 0.0
    ]
    if not brackets:
        return None, 0
    if phi_hint is None:
        return brackets[0], len(brackets)
    best = min(brackets, key=lambda b: abs(0.5 * (b[0] + b[1]) - phi_hint))
    return best, len(brackets)


def _bracket_near(g, h: float, phi_prev: float, width: float):
    while True:
        lo, hi = max(-h, phi_prev - width), min(h, phi_prev + width)
        g_lo, g_hi = float(g(lo)), float(g(hi))
        if g_lo == 0.0 or g_hi == 0.0 or g_lo * g_hi < 0.0:
            return lo, hi, g_lo, g_hi
        if lo <= -h and hi >= h:
            return None
        width *= 2.0


def _solve_bracket(g, lo: float, hi: float, xtol: float) -> float:
    g_lo, g_hi = float(g(lo)), float(g(hi))
    if g_lo == 0.0:
        return lo
    if g_hi == 0.0:
        return hi
    return float(bisect(g, lo, hi, xtol=xtol))


def _follow_branch(
    fmap: HarmonicCornerMap,
    theta: float,
    radii: np.ndarray,
    xtol: float,
    scan_points: int,
    phi_hint: Optional[float],
) -> Tuple[List[float], Optional[NoRootError]]:
    h = half_angle(fmap.beta)
    phis: List[float] = []
    for r in radii:
        g = level_function(fmap, theta, float(r))
        if not phis:
            bracket, count = _bracket_by_scan(g, h, scan_points, phi_hint)
            if bracket is None:
                return phis, NoRootError(f"No sign change for theta={theta:.6g} at r={r:.3e}", r)
            if count > 1:
                logger.warning(
                    f"{count} level-curve roots for theta={theta:.6g} at r={r:.3e}; "
                    f"following the one at phi~{0.5 * (bracket[0] + bracket[1]):.6g}"
                )
            phis.append(_solve_bracket(g, bracket[0], bracket[1], xtol))
            continue

        step = abs(phis[-1] - phis[-2]) if len(phis) > 1 else 0.0
        found = _bracket_near(g, h, phis[-1], max(4.0 * step, 1e-6 * h))
        if found is None:
            return phis, NoRootError(f"No sign change for theta={theta:.6g} at r={r:.3e}", r)
        lo, hi, _, _ = found
        phis.append(_solve_bracket(g, lo, hi, xtol))
    return phis, None


def trace_inverse_ray(
    fmap: HarmonicCornerMap,
    theta: float,
    radii: Optional[Sequence[float]] = None,
    xtol: Optional[float] = None,
    scan_points: int = 513,
    phi_hint: Optional[float] = None,
) -> TracedCurve:
    """
    Trace the preimage L_theta of the ray {arg w = theta}.

    The first (largest) radius is bracketed by a scan of the whole sector;
    every later radius searches a window around the previous root that
    doubles until it holds a sign change, so one continuous branch is kept.

    Args:
        fmap: Harmonic corner map
        theta: Ray angle in [0, pi]
        radii: Radii to trace (default: log-spaced over [1e-6, 1e-1]*R)
        xtol: Absolute angular tolerance of bisection (default from settings)
        scan_points: Grid size of the initial sign-change scan
        phi_hint: Preferred root when the initial scan finds several

    Returns:
        TracedCurve with phi versus r

    Raises:
        UnsupportedAngleError: For theta in {0, pi} when beta > 1, or theta outside [0, pi]
        NoRootError: If the level equation has no sign change at some radius
    """
    if not 0.0 <= theta <= math.pi:
        raise UnsupportedAngleError(f"theta={theta} outside [0, pi]")
    r = _prepare_radii(fmap, radii)
    h = half_angle(fmap.beta)
    candidates = (-h, fmap.derived.phi_star, h)

    if theta in (0.0, math.pi):
        if fmap.beta > 1.0:
            raise UnsupportedAngleError("Side rays theta in {0, pi} are not traced for beta > 1")
        side = -h if theta == 0.0 else h
        return TracedCurve(
            CurveKind.INVERSE, theta, fmap.beta, r, r, np.full(r.size, side),
            Representation.POLAR, candidates,
        )

    xtol = xtol or get_settings().bisection_tol
    phis, error = _follow_branch(fmap, theta, r, xtol, scan_points, phi_hint)
    if error is not None:
        raise error

    logger.debug(f"Traced L_theta for theta={theta:.6g} over {r.size} radii")
    return TracedCurve(
        CurveKind.INVERSE, theta, fmap.beta, r, r, np.asarray(phis),
        Representation.POLAR, candidates,
    )


def trace_forward_ray(
    fmap: HarmonicCornerMap,
    phi: float,
    radii: Optional[Sequence[float]] = None,
    representation: Representation = Representation.POLAR,
) -> TracedCurve:
    """
    Evaluate the image l_phi of the ray {arg z = phi}.

    Args:
        fmap: Harmonic corner map
        phi: Ray angle in the closed sector
        radii: Radii to evaluate (default: log-spaced over [1e-6, 1e-1]*R)
        representation: Coordinates of the returned curve

    Returns:
        TracedCurve carrying the complex images
    """
    check_sector_point(fmap.beta, 0.0, phi)
    r = _prepare_radii(fmap, radii)
    images = np.asarray(fmap.evaluate(r, np.full(r.size, float(phi))), dtype=complex)
    t_star = math.atan2(fmap.coeffs.b[0], fmap.coeffs.a[0])

    curve = TracedCurve(
        CurveKind.FORWARD, float(phi), fmap.beta, r, np.abs(images),
        np.arctan2(images.imag, images.real), Representation.POLAR,
        (0.0, t_star, math.pi), images=images, theta_star=t_star,
    )
    if representation is not Representation.POLAR:
        curve = curve.as_representation(representation)
    return curve


def trace_inverse_family(
    fmap: HarmonicCornerMap,
    thetas: Sequence[float],
    radii: Optional[Sequence[float]] = None,
    xtol: Optional[float] = None,
    max_workers: Optional[int] = None,
) -> List[TracedCurve]:
    """Trace several inverse curves concurrently over the shared immutable map."""
    with ThreadPoolExecutor(max_workers=max_workers) as executor:
        futures = [executor.submit(trace_inverse_ray, fmap, t, radii, xtol) for t in thetas]
        return [f.result() for f in futures]


def trace_forward_family(
    fmap: HarmonicCornerMap,
    phis: Sequence[float],
    radii: Optional[Sequence[float]] = None,
    max_workers: Optional[int] = None,
) -> List[TracedCurve]:
    """Evaluate several forward curves concurrently."""
    with ThreadPoolExecutor(max_workers=max_workers) as executor:
        futures = [executor.submit(trace_forward_ray, fmap, p, radii) for p in phis]
        return [f.result() for f in futures]


def estimate_exit_angle(
    curve: TracedCurve,
    min_samples: int = 12,
    min_decades: float = 2.0,
    max_residual: float = 0.1,
    exact_tol: float = 1e-11,
) -> ExitAngleEstimate:
    """
    Fit ordinate ~ A + C * s^p over the curve's limit candidates.

    Candidates depend on the curve kind. Inverse curves try {-pi*beta/2, phi*,
    pi*beta/2}, forward curves in polar form try {0, theta*, pi} and the
    Cartesian and rotated forms try 0 only. Limits that a curve of its kind
    cannot reach are never fitted.

    For each candidate A, log|ordinate - A| is regressed on log s. A candidate
    is admissible when the fitted order exceeds 0.01 and the gap at the
    smallest parameter is below 0.1; the admissible candidate with the
    smallest RMS residual wins.

    Raises:
        PoorFitError: If the curve is too short, spans too few decades, or fits badly
    """
    n = len(curve)
    if n < min_samples:
        raise PoorFitError(f"Need at least {min_samples} samples, got {n}")
    decades = curve.decades
    if decades < min_decades - 1e-9:
        raise PoorFitError(f"Need at least {min_decades} decades, got {decades:.2f}")

    s = np.abs(curve.parameter)
    y = curve.ordinate
    smallest = int(np.argmin(s))
    log_s = np.log(s)

    best: Optional[ExitAngleEstimate] = None
    for limit in curve.limit_candidates:
        gap = np.abs(y - limit)
        if np.all(gap <= exact_tol * max(1.0, abs(limit))):
            return ExitAngleEstimate(float(limit), None, 0.0, float(gap[smallest]), decades, n)

        mask = gap > 0.0
        if mask.sum() < 3:
            continue
        slope, intercept = np.polyfit(log_s[mask], np.log(gap[mask]), 1)
        fitted = slope * log_s[mask] + intercept
        residual = float(np.sqrt(np.mean((np.log(gap[mask]) - fitted) ** 2)))
        final_gap = float(gap[smallest])

        if slope <= 0.01 or final_gap >= 0.1:
            continue
        if best is None or residual < best.fit_residual:
            best = ExitAngleEstimate(float(limit), float(slope), residual, final_gap, decades, n)

    if best is None:
        raise PoorFitError(f"No limit candidate fits the {curve.kind.value} curve")
    if best.fit_residual > max_residual:
        raise PoorFitError(
            f"Best fit residual {best.fit_residual:.3g} exceeds {max_residual} "
            f"(limit {best.limit_angle:.6g}); curve not in asymptotic regime"
        )
    return best


def _prediction(curve: TracedCurve, kit: AsymptoticKit) -> Tuple[np.ndarray, Regime]:
    if curve.kind is CurveKind.INVERSE:
        regime = kit.inverse_regime(curve.angle)
        return np.asarray(kit.phi_theta_asym(curve.radii, curve.angle), dtype=float), regime

    regime = kit.forward_regime(curve.angle, curve.representation)
    s = np.abs(curve.parameter)
    if curve.representation is Representation.POLAR:
        if kit.beta > 1.0:
            return np.asarray(kit.forward_curve_polar(s, curve.angle), dtype=float), regime
        if regime.exact:
            return np.full(s.size, regime.limit), regime
        return regime.limit + regime.amplitude * np.power(s, regime.order), regime
    if curve.representation is Representation.CARTESIAN:
        w = curve.images
        return np.asarray(kit.forward_curve_cartesian(w.real, curve.angle), dtype=float), regime
    return np.asarray(kit.forward_curve_cartesian(s, curve.angle), dtype=float), regime


def compare_with_asymptotics(curve: TracedCurve, kit: AsymptoticKit) -> AsymptoticComparison:
    """
    Measure the discrepancy between a traced curve and the leading-order formula.

    Returns:
        Max and RMS discrepancy plus the empirical remainder exponent, i.e.
        the log-log slope of the discrepancy against the curve parameter
    """
    if not kit.in_asymptotic_range(curve.radii):
        logger.warning(
            f"Curve extends to r={float(np.max(curve.radii)):.3g} beyond "
            f"r_max_asym={kit.r_max_asym:.3g}"
        )

    predicted, regime = _prediction(curve, kit)
    diff = np.abs(curve.ordinate - predicted)
    max_abs = float(diff.max())
    rms = float(np.sqrt(np.mean(diff**2)))

    exponent: Optional[float] = None
    floor = 1e-14 * max(1.0, abs(regime.limit))
    mask = diff > floor
    if mask.sum() >= 3:
        s = np.abs(curve.parameter)[mask]
        if s.max() > s.min():
            exponent = float(np.polyfit(np.log(s), np.log(diff[mask]), 1)[0])

    return AsymptoticComparison(
        max_abs=max_abs,
        rms=rms,
        remainder_exponent=exponent,
        expected_remainder=regime.remainder_order,
        n_samples=len(curve),
    )


def asymptotic_radii(
    regime: Regime,
    kit: AsymptoticKit,
    target: float = 5e-3,
    floor: float = 1e-11,
    decades: float = 4.0,
    per_decade: Optional[int] = None,
    r_floor_fraction: float = 1e-22,
    relative_target: float = 1e-2,
) -> np.ndarray:
    """
    Radii where the leading deviation of ``regime`` lies between ``floor`` and ``target``.

    The window starts where the deviation reaches ``target`` (capped at
    r_max_asym) and extends inward by up to ``decades`` decades, stopping
    where the deviation would fall below ``floor``. When the regime knows the
    exponent of its relative correction, the window is also kept inside the
    radius where that correction drops below ``relative_target``.
    """
    per_decade = per_decade or get_settings().samples_per_decade
    radius = kit.map.config.radius
    r_hi = kit.r_max_asym
    amp = abs(regime.r_amplitude)
    if regime.correction_exponent:
        r_hi = min(r_hi, radius * relative_target ** (1.0 / regime.correction_exponent))

    if regime.exact or amp == 0.0:
        r_lo = r_hi * 10.0**-decades
    else:
        exponent = regime.r_exponent
        r_hi = min(r_hi, (target / amp) ** (1.0 / exponent))
        r_lo = max(r_hi * 10.0**-decades, (floor / amp) ** (1.0 / exponent))
    r_lo = max(r_lo, r_floor_fraction * radius)
    if r_lo >= r_hi:
        logger.warning(f"Degenerate asymptotic window for {regime.label}; using two decades")
        r_lo = r_hi * 1e-2

    span = math.log10(r_hi / r_lo)
    count = max(12, int(math.ceil(span * per_decade)) + 1)
    return np.geomspace(r_hi, r_lo, count)


# ---------------------------------------------------------------------- polar test meshes


class MeshKind(Enum):
    """Polar test mesh families."""

    XI = "xi"  # polar mesh in the w-plane, pulled back by F^-1
    T = "t"  # polar mesh in the z-plane, pushed forward by F


@dataclass(frozen=True)
class MeshSpec:
    """Polar test mesh: ``n_circles`` circles and ``n_rays`` rays including both sides."""

    kind: MeshKind
    n_circles: int = 5
    n_rays: int = 8
    scale: Optional[float] = None  # outer radius; default fits the mesh inside the image
    samples: int = 65  # points per polyline


@dataclass
class MeshImages:
    """Polylines of a test mesh, its image under F (or F^-1) and the conformal reference."""

    kind: MeshKind
    scale: float
    labels: List[str]
    source: List[np.ndarray]
    image: List[np.ndarray]
    reference: List[np.ndarray]
    truncated: List[str] = field(default_factory=list)

    def to_dict(self) -> Dict[str, object]:
        def pack(lines: List[np.ndarray]):
            return [line.tolist() for line in lines]

        return {
            "kind": self.kind.value,
            "scale": self.scale,
            "labels": list(self.labels),
            "source": pack(self.source),
            "image": pack(self.image),
            "reference": pack(self.reference),
            "truncated": list(self.truncated),
        }


def _xy(z: np.ndarray) -> np.ndarray:
    z = np.asarray(z, dtype=complex)
    return np.column_stack((z.real, z.imag))


def _default_xi_scale(fmap: HarmonicCornerMap) -> float:
    """
    Outer circle radius 0.9 * min |F| on the arc.

    Every circle then meets each sampled direction inside the sector. Pass
    MeshSpec.scale = 1 for circles rho = n/5 on maps normalised so that the
    arc image encloses the unit half-disc.
    """
    cfg: CornerConfig = fmap.config
    h = half_angle(cfg.beta)
    phi = np.linspace(-h, h, 257)
    arc = np.abs(fmap.evaluate(np.full(phi.size, cfg.radius), phi))
    return 0.9 * float(arc.min())


def _circle_preimage(fmap: HarmonicCornerMap, rho: float, phis: np.ndarray):
    radius = fmap.config.radius
    points = []
    failed = False
    for phi in phis:
        def f(r: float) -> float:
            return abs(fmap.evaluate(r, phi)) - rho

        if f(radius) <= 0.0:
            failed = True
            continue
        r = brentq(f, 0.0, radius, xtol=1e-14)
        points.append(r * complex(math.cos(phi), math.sin(phi)))
    return np.asarray(points, dtype=complex), failed


def _mesh_xi(fmap: HarmonicCornerMap, spec: MeshSpec, on_error: str) -> MeshImages:
    cfg = fmap.config
    beta, radius = cfg.beta, cfg.radius
    h = half_angle(beta)
    scale = spec.scale or _default_xi_scale(fmap)
    images = MeshImages(MeshKind.XI, scale, [], [], [], [])

    thetas_fine = np.linspace(0.0, math.pi, spec.samples)
    phis_fine = np.linspace(-h, h, spec.samples)
    for k in range(1, spec.n_circles + 1):
        rho = scale * k / spec.n_circles
        label = f"circle rho={rho:.6g}"
        images.labels.append(label)
        images.source.append(_xy(rho * np.exp(1j * thetas_fine)))
        preimage, failed = _circle_preimage(fmap, rho, phis_fine)
        if failed:
            message = f"{label}: arc image too close to the vertex, preimage truncated"
            if on_error == "raise":
                raise NoRootError(message, radius)
            logger.warning(message)
            images.truncated.append(label)
        images.image.append(_xy(preimage))
        images.reference.append(_xy(conformal_inverse(beta, rho, thetas_fine)))

    rhos_fine = np.linspace(0.0, scale, spec.samples)
    trace_radii = np.geomspace(radius * (1.0 - 1e-9), radius * 1e-4, 4 * spec.samples)
    for m in range(spec.n_rays):
        theta = math.pi * m / (spec.n_rays - 1)
        label = f"ray theta={theta:.6g}"
        images.labels.append(label)
        images.source.append(_xy(rhos_fine * np.exp(1j * theta)))
        images.reference.append(_xy(conformal_inverse(beta, rhos_fine, theta)))

        if m in (0, spec.n_rays - 1):
            # Side rays are the corner sides by the boundary correspondence
            speed = cfg.sigma_plus if m == 0 else cfg.sigma_minus
            side = -h if m == 0 else h
            r_side = np.linspace(0.0, min(radius, scale / speed), spec.samples)
            images.image.append(_xy(r_side * np.exp(1j * side)))
            continue

        phis, error = _follow_branch(
            fmap, theta, trace_radii, get_settings().bisection_tol, 513, None
        )
        if error is not None:
            if on_error == "raise":
                raise error
            logger.warning(f"{label}: {error}; polyline truncated")
            images.truncated.append(label)
        r_done = trace_radii[: len(phis)]
        z = r_done * np.exp(1j * np.asarray(phis))
        inside = np.abs(np.asarray(fmap.evaluate(r_done, np.asarray(phis)))) <= scale
        # Outward from the vertex
        images.image.append(_xy(np.concatenate(([0.0], z[inside][::-1]))))
    return images


def _mesh_t(fmap: HarmonicCornerMap, spec: MeshSpec) -> MeshImages:
    cfg = fmap.config
    beta = cfg.beta
    h = half_angle(beta)
    scale = spec.scale or cfg.radius
    images = MeshImages(MeshKind.T, scale, [], [], [], [])

    phis_fine = np.linspace(-h, h, spec.samples)
    for k in range(1, spec.n_circles + 1):
        r = scale * k / spec.n_circles
        r_arr = np.full(spec.samples, r)
        images.labels.append(f"arc r={r:.6g}")
        images.source.append(_xy(r_arr * np.exp(1j * phis_fine)))
        images.image.append(_xy(fmap.evaluate(r_arr, phis_fine)))
        images.reference.append(_xy(conformal_map(beta, r_arr, phis_fine)))

    r_fine = np.linspace(0.0, scale, spec.samples)
    for m in range(spec.n_rays):
        phi = h * (2.0 * m / (spec.n_rays - 1) - 1.0)
        if m == 0:
            phi = -h
        elif m == spec.n_rays - 1:
            phi = h
        phi_arr = np.full(spec.samples, phi)
        images.labels.append(f"ray phi={phi:.6g}")
        images.source.append(_xy(r_fine * np.exp(1j * phi)))
        images.image.append(_xy(fmap.evaluate(r_fine, phi_arr)))
        images.reference.append(_xy(conformal_map(beta, r_fine, phi_arr)))
    return images


def mesh_images(fmap: HarmonicCornerMap, spec: MeshSpec, on_error: str = "raise") -> MeshImages:
    """
    Map a polar test mesh through F or F^-1.

    The XI mesh (circles and rays in the w-plane) is pulled back: rays by
    branch-following traces, circles by 1-D root finds in r along each
    direction, side rays from the boundary correspondence. The T mesh (arcs
    and rays in the z-plane) is pushed forward by direct evaluation.

    Args:
        fmap: Harmonic corner map
        spec: Mesh specification
        on_error: "raise" to propagate NoRootError, "truncate" to keep partial polylines

    Returns:
        MeshImages with n_circles + n_rays polylines in each layer
    """
    if on_error not in ("raise", "truncate"):
        raise ValueError(f"on_error must be 'raise' or 'truncate', got {on_error!r}")
    if spec.n_circles < 1 or spec.n_rays < 2 or spec.samples < 2:
        raise ValueError(f"Invalid mesh spec: {spec}")
    if spec.kind is MeshKind.XI:
        result = _mesh_xi(fmap, spec, on_error)
    else:
        result = _mesh_t(fmap, spec)
    logger.info(
        f"Mesh {spec.kind.value}: {len(result.image)} polylines, "
        f"{len(result.truncated)} truncated"
    )
    return result
