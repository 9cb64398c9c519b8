"""Oracle-versus-asymptote validation suite over random admissible corner maps."""

# Standard library imports
import logging
import math
from dataclasses import asdict, dataclass, field
from typing import Dict, List, Optional, Sequence

# Third-party imports
import numpy as np

# Local imports
from .asymptotics import (
    AsymptoticKit,
    Regime,
    Representation,
    conformal_phi_of_theta,
    conformal_theta_of_phi,
)
from .corner_model import CornerConfig, half_angle
from .harmonic_map import HarmonicCornerMap
from .tracer import (
    PoorFitError,
    TracedCurve,
    asymptotic_radii,
    compare_with_asymptotics,
    estimate_exit_angle,
    trace_forward_ray,
    trace_inverse_ray,
)

logger = logging.getLogger(__name__)

DEFAULT_BETAS = (0.4, 0.5, 0.75, 1.25, 1.5, 1.75)


class ValidationSetupError(Exception):
    """Raised when no well-conditioned coefficient set can be drawn."""

    pass


@dataclass
class ValidationRow:
    """One oracle check with its expected and measured values."""

    beta: float
    set_index: int
    check: str
    label: str
    expected_limit: Optional[float] = None
    measured_limit: Optional[float] = None
    expected_order: Optional[float] = None
    measured_order: Optional[float] = None
    expected_remainder: Optional[float] = None
    measured_remainder: Optional[float] = None
    passed: bool = False
    message: str = ""


@dataclass
class ValidationReport:
    """Rows of a validation run."""

    rows: List[ValidationRow] = field(default_factory=list)
    seed: int = 0

    @property
    def passed(self) -> bool:
        return bool(self.rows) and all(row.passed for row in self.rows)

    def failures(self) -> List[ValidationRow]:
        return [row for row in self.rows if not row.passed]

    def to_dict(self) -> Dict[str, object]:
        return {
            "seed": self.seed,
            "passed": self.passed,
            "rows": [asdict(row) for row in self.rows],
        }

    def to_table(self) -> str:
        """Fixed-width pass/fail table."""

        def fmt(value: Optional[float]) -> str:
            return "-" if value is None else f"{value:.4f}"

        header = (
            f"{'beta':>5} {'set':>3} {'check':<8} {'label':<24} "
            f"{'limit':>9} {'meas':>9} {'order':>7} {'meas':>7} {'rem':>7} {'meas':>7}  result"
        )
        lines = [header, "-" * len(header)]
        for row in self.rows:
            lines.append(
                f"{row.beta:>5.2f} {row.set_index:>3d} {row.check:<8} {row.label:<24} "
                f"{fmt(row.expected_limit):>9} {fmt(row.measured_limit):>9} "
                f"{fmt(row.expected_order):>7} {fmt(row.measured_order):>7} "
                f"{fmt(row.expected_remainder):>7} {fmt(row.measured_remainder):>7}  "
                f"{'PASS' if row.passed else 'FAIL'}"
                + (f"  {row.message}" if row.message else "")
            )
        lines.append(f"{len(self.rows) - len(self.failures())}/{len(self.rows)} checks passed")
        return "\n".join(lines)


def random_corner_map(rng: np.random.Generator, beta: float, n_terms: int = 8) -> HarmonicCornerMap:
    """
    Draw an admissible map with a_1 = +-U(0.5, 1.5), b_1 = U(0.5, 1.5),
    higher coefficients U(-0.5, 0.5) * 0.5^n and speeds U(0.5, 2).
    """
    sigma_plus, sigma_minus = rng.uniform(0.5, 2.0, size=2)
    cfg = CornerConfig(beta=beta, sigma_plus=float(sigma_plus), sigma_minus=float(sigma_minus))
    n = np.arange(2, n_terms + 1)
    a1 = rng.choice([-1.0, 1.0]) * rng.uniform(0.5, 1.5)
    a = np.concatenate(([a1], rng.uniform(-0.5, 0.5, n.size) * 0.5**n))
    b = np.concatenate(([rng.uniform(0.5, 1.5)], rng.uniform(-0.5, 0.5, n.size) * 0.5**n))
    return HarmonicCornerMap.from_coefficients(cfg, a.tolist(), b.tolist())


def well_conditioned_kit(
    rng: np.random.Generator, beta: float, min_special: float = 0.05, attempts: int = 200
) -> AsymptoticKit:
    """Draw maps until the a_2/b_2-dependent constants are not close to zero."""
    for _ in range(attempts):
        kit = AsymptoticKit.build(random_corner_map(rng, beta))
        if abs(kit.e1_star) >= min_special and abs(kit.polar_special_constant) >= min_special:
            return kit
    raise ValidationSetupError(f"No well-conditioned coefficient set for beta={beta}")


@dataclass(frozen=True)
class Tolerances:
    limit: float = 1e-2
    order: float = 0.05
    special_order: float = 0.1
    remainder_slack: float = 0.1
    amplitude: float = 0.1  # relative leading-order discrepancy
    jump_fraction: float = 0.95
    xtol: float = 1e-14
    floor: float = 1e-12


def _check_curve(
    row: ValidationRow,
    curve: TracedCurve,
    kit: AsymptoticKit,
    regime: Regime,
    order_tol: float,
    tol: Tolerances,
) -> ValidationRow:
    problems = []
    try:
        estimate = estimate_exit_angle(curve, min_decades=min(2.0, max(1.0, curve.decades)))
    except PoorFitError as e:
        row.message = str(e)
        return row

    row.measured_limit = estimate.limit_angle
    row.measured_order = estimate.order_estimate
    expected = row.expected_limit
    if expected is not None and abs(estimate.limit_angle - expected) > tol.limit:
        problems.append("limit")

    if regime.order is not None:
        if estimate.order_estimate is None:
            problems.append("order undefined")
        elif curve.decades >= 2.0 and abs(estimate.order_estimate - regime.order) > order_tol:
            problems.append("order")

    comparison = compare_with_asymptotics(curve, kit)
    row.expected_remainder = comparison.expected_remainder
    row.measured_remainder = comparison.remainder_exponent
    if not comparison.remainder_consistent(tol.remainder_slack):
        problems.append("remainder")
    if not regime.exact:
        spread = float(np.max(np.abs(curve.ordinate - regime.limit)))
        if comparison.max_abs > tol.amplitude * spread:
            problems.append("amplitude")

    row.passed = not problems
    row.message = ", ".join(problems)
    return row


def _inverse_row(kit: AsymptoticKit, set_index: int, theta: float, label: str, tol: Tolerances):
    regime = kit.inverse_regime(theta)
    row = ValidationRow(
        beta=kit.beta,
        set_index=set_index,
        check="inverse",
        label=label,
        expected_limit=kit.phi_of_theta(theta),
        expected_order=regime.order,
    )
    radii = asymptotic_radii(regime, kit, floor=tol.floor)
    curve = trace_inverse_ray(kit.map, theta, radii, xtol=tol.xtol)
    order_tol = tol.special_order if regime.label == "special" else tol.order
    return _check_curve(row, curve, kit, regime, order_tol, tol)


def _forward_rows(kit: AsymptoticKit, set_index: int, phi: float, label: str, tol: Tolerances):
    polar_regime = kit.forward_regime(phi, Representation.POLAR)
    radii = asymptotic_radii(polar_regime, kit, floor=tol.floor)
    polar = trace_forward_ray(kit.map, phi, radii)

    rows = []
    row = ValidationRow(
        beta=kit.beta,
        set_index=set_index,
        check="forward",
        label=f"{label} polar",
        expected_limit=kit.theta_of_phi(phi),
        expected_order=polar_regime.order,
    )
    rows.append(_check_curve(row, polar, kit, polar_regime, tol.order, tol))

    representation = Representation.CARTESIAN if kit.beta < 1.0 else Representation.ROTATED
    regime = kit.forward_regime(phi, representation)
    row = ValidationRow(
        beta=kit.beta,
        set_index=set_index,
        check="forward",
        label=f"{label} {representation.value}",
        expected_limit=0.0,
        expected_order=regime.order,
    )
    rows.append(
        _check_curve(row, polar.as_representation(representation), kit, regime, tol.order, tol)
    )
    return rows


def _limit_of(curve: TracedCurve) -> Optional[float]:
    try:
        return estimate_exit_angle(curve, min_decades=min(2.0, max(1.0, curve.decades))).limit_angle
    except PoorFitError as e:
        logger.warning(f"Jump check could not fit a limit: {e}")
        return None


def _jump_row(kit: AsymptoticKit, set_index: int, delta: float, tol: Tolerances) -> ValidationRow:
    if kit.beta > 1.0:
        limits = []
        for theta in (kit.theta_star - delta, kit.theta_star + delta):
            regime = kit.inverse_regime(theta)
            radii = asymptotic_radii(regime, kit, floor=tol.floor)
            limits.append(_limit_of(trace_inverse_ray(kit.map, theta, radii, xtol=tol.xtol)))
        expected = math.pi * kit.beta
        label = f"theta* +- {delta}"
    else:
        limits = []
        for phi in (kit.phi_star - delta, kit.phi_star + delta):
            regime = kit.forward_regime(phi, Representation.POLAR)
            radii = asymptotic_radii(regime, kit, floor=tol.floor)
            limits.append(_limit_of(trace_forward_ray(kit.map, phi, radii)))
        expected = math.pi
        label = f"phi* +- {delta}"

    row = ValidationRow(beta=kit.beta, set_index=set_index, check="jump", label=label)
    row.expected_limit = expected
    if None in limits:
        row.message = "limit fit failed"
        return row
    jump = abs(limits[1] - limits[0])
    row.measured_limit = jump
    row.passed = jump >= tol.jump_fraction * expected
    if not row.passed:
        row.message = "jump too small"
    return row


def _conformal_row(beta: float, theta_s: float) -> ValidationRow:
    grid = np.linspace(0.0, math.pi, 181)
    linear = beta * grid - half_angle(beta)
    mismatch = float(np.max(np.abs(conformal_phi_of_theta(beta, grid) - linear)))
    eps = 1e-9
    left = conformal_phi_of_theta(beta, theta_s - eps)
    jump = abs(conformal_phi_of_theta(beta, theta_s + eps) - left)
    roundtrip = abs(conformal_theta_of_phi(beta, conformal_phi_of_theta(beta, theta_s)) - theta_s)

    row = ValidationRow(beta=beta, set_index=-1, check="conform", label="linear law, no jump")
    row.expected_limit = 0.0
    row.measured_limit = max(mismatch, jump - 2.0 * beta * eps, roundtrip)
    row.passed = mismatch <= 1e-10 and jump <= 1e-10 + 2.0 * beta * eps and roundtrip <= 1e-10
    return row


def validate_kit(
    kit: AsymptoticKit, set_index: int = 0, tol: Optional[Tolerances] = None, delta: float = 0.05
) -> List[ValidationRow]:
    """All inverse, forward and jump checks for one coefficient set."""
    tol = tol or Tolerances()
    rows: List[ValidationRow] = []
    t_star, p_star, h = kit.theta_star, kit.phi_star, kit.half_angle

    theta_offset = 0.35 * min(t_star, math.pi - t_star)
    for theta, label in (
        (t_star - theta_offset, "theta < theta*"),
        (t_star, "theta = theta*"),
        (t_star + theta_offset, "theta > theta*"),
    ):
        rows.append(_inverse_row(kit, set_index, theta, label, tol))

    for phi, label in (
        (p_star - 0.35 * (p_star + h), "phi < phi*"),
        (p_star, "phi = phi*"),
        (p_star + 0.35 * (h - p_star), "phi > phi*"),
    ):
        rows.extend(_forward_rows(kit, set_index, phi, label, tol))

    rows.append(_jump_row(kit, set_index, delta, tol))
    return rows


def run_validation_suite(
    betas: Sequence[float] = DEFAULT_BETAS,
    n_sets: int = 5,
    seed: int = 0,
    tol: Optional[Tolerances] = None,
) -> ValidationReport:
    """
    Compare traced curves against the closed-form asymptotics.

    Args:
        betas: Opening factors to sample
        n_sets: Random coefficient sets per beta
        seed: Seed of the coefficient generator
        tol: Tolerances of the checks

    Returns:
        ValidationReport with one row per check

    Raises:
        ValidationSetupError: If n_sets < 1 or no opening factor is given
    """
    if n_sets < 1 or not betas:
        raise ValidationSetupError(
            f"Need n_sets >= 1 and at least one beta, got n_sets={n_sets}, betas={betas}"
        )
    tol = tol or Tolerances()
    rng = np.random.default_rng(seed)
    report = ValidationReport(seed=seed)

    for beta in betas:
        for set_index in range(n_sets):
            kit = well_conditioned_kit(rng, beta)
            report.rows.extend(validate_kit(kit, set_index, tol))
        report.rows.append(_conformal_row(beta, kit.theta_star))
        logger.info(f"Validated beta={beta}: {n_sets} coefficient sets")

    failed = len(report.failures())
    if failed:
        logger.warning(f"Validation finished with {failed} failed check(s)")
    else:
        logger.info(f"Validation passed: {len(report.rows)} checks")
    return report
