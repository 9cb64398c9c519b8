"""
Sub-command implementations of the corner-maps command line.

Each command takes a checked :class:`RunConfig`, writes its artifacts under
``config.out`` and returns a :class:`CommandResult`. Library exceptions are
propagated; the entry point maps them to exit codes.
"""

# Standard library imports
import logging
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Dict, List, Tuple

# Third-party imports
import numpy as np

# Local imports
from ..corners.asymptotics import (
    AsymptoticCaseError,
    AsymptoticKit,
    Representation,
    SingularDirectionError,
    UnsupportedAngleError,
    conformal_phi_of_theta,
    conformal_theta_of_phi,
    law_jump_summary,
)
from ..corners.corner_model import CornerConfig
from ..corners.exports import (
    load_coefficients,
    read_arc_csv,
    save_coefficients,
    write_arc_csv,
    write_csv,
    write_curve_csv,
    write_json,
    write_mesh_json,
)
from ..corners.harmonic_map import HarmonicCornerMap, conformal_arc_samples, fit_map_from_arc
from ..corners.tracer import (
    CurveKind,
    MeshKind,
    MeshSpec,
    PoorFitError,
    TracedCurve,
    compare_with_asymptotics,
    estimate_exit_angle,
    log_radii,
    mesh_images,
    trace_forward_family,
    trace_inverse_family,
)
from ..corners.validation import (
    ValidationReport,
    random_corner_map,
    run_validation_suite,
    validate_kit,
)
from ..mesh.domain import DomainBoundary, domain_by_name, load_domain, sector_arc_samples
from ..mesh.folds import fold_locality
from ..mesh.winslow import Ordering, composition_residual, solve
from ..viz.svg import plot_angle_laws, plot_mesh_images, plot_traced_curves, plot_winslow_grid
from .run_config import RunConfig

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VALIDATION_FAILED = 2
EXIT_NOT_CONVERGED = 3
EXIT_BAD_INPUT = 4

ANGLE_SAMPLES = 361
RAY_OFFSET = 0.35  # default rays sit this fraction of the way from the special ray to a side


@dataclass
class CommandResult:
    """Artifacts written by a command and its exit code."""

    command: str
    outputs: List[Path] = field(default_factory=list)
    exit_code: int = EXIT_OK
    message: str = ""

    @property
    def ok(self) -> bool:
        return self.exit_code == EXIT_OK


def resolve_map(config: RunConfig) -> HarmonicCornerMap:
    """
    Build the harmonic corner map named by the ``[coefficients]`` section.

    Sources:
        conformal: fit from the arc data of the conformal map with the corner's side speeds
        arc: fit from phi,re,im samples in ``arc_csv``
        file: coefficient JSON written by ``fit``
        explicit: the ``a`` and ``b`` lists
        random: an admissible random map for the corner's beta
    """
    section = config.coefficients
    source = section.source

    if source == "file":
        fmap = load_coefficients(section.path)
        wanted = config.corner.to_config()
        if not math.isclose(fmap.beta, wanted.beta):
            logger.warning(
                f"Coefficient file has beta={fmap.beta}, run config asks for {wanted.beta}; "
                f"using the file"
            )
        return fmap

    cfg = config.corner.to_config()
    if source == "explicit":
        return HarmonicCornerMap.from_coefficients(cfg, section.a, section.b)
    if source == "random":
        rng = np.random.default_rng(section.seed)
        return random_corner_map(rng, cfg.beta, n_terms=section.n_terms or 8)
    if source == "arc":
        phi, values = read_arc_csv(section.arc_csv)
        return fit_map_from_arc(cfg, phi, values, n_terms=section.n_terms)

    phi, values = conformal_arc_samples(cfg)
    return fit_map_from_arc(cfg, phi, values, n_terms=section.n_terms)


def _ray_offsets(special: float, lower: float, upper: float) -> Tuple[float, float, float]:
    return (
        special - RAY_OFFSET * (special - lower),
        special,
        special + RAY_OFFSET * (upper - special),
    )


# ---------------------------------------------------------------------- angles


def cmd_angles(config: RunConfig) -> CommandResult:
    """Tabulate both exit-angle laws with the conformal reference and plot them."""
    kit = AsymptoticKit.build(resolve_map(config))
    out = config.out
    result = CommandResult("angles")

    thetas, phis = kit.inverse_law.tabulate(ANGLE_SAMPLES)
    result.outputs.append(
        write_csv(
            out / "angles_inverse.csv",
            ("theta", "phi", "phi_conformal"),
            [thetas, phis, conformal_phi_of_theta(kit.beta, thetas)],
        )
    )
    phis_fwd, thetas_fwd = kit.forward_law.tabulate(ANGLE_SAMPLES)
    result.outputs.append(
        write_csv(
            out / "angles_forward.csv",
            ("phi", "theta", "theta_conformal"),
            [phis_fwd, thetas_fwd, conformal_theta_of_phi(kit.beta, phis_fwd)],
        )
    )
    result.outputs.append(plot_angle_laws(kit, out / "angles.svg", n=ANGLE_SAMPLES))

    for kind, jump in law_jump_summary(kit):
        if jump is None:
            logger.info(f"{kind} law: no interior jump")
        else:
            logger.info(f"{kind} law: jump of {jump[1]:.6g} at {jump[0]:.12g}")
    result.message = f"theta* = {kit.theta_star:.12g}, phi* = {kit.phi_star:.12g}"
    return result


# ---------------------------------------------------------------------- trace


def _law_limit(kit: AsymptoticKit, curve: TracedCurve) -> float:
    if curve.kind is CurveKind.INVERSE:
        return kit.phi_of_theta(curve.angle)
    if curve.representation is Representation.POLAR:
        return kit.theta_of_phi(curve.angle)
    return 0.0


def _summary_row(kit: AsymptoticKit, curve: TracedCurve) -> List[float]:
    """Fitted limit and order, law limit and leading-order discrepancy of one curve."""
    limit = order = max_abs = remainder = float("nan")
    try:
        estimate = estimate_exit_angle(curve)
        limit = estimate.limit_angle
        order = estimate.order_estimate if estimate.order_estimate is not None else float("inf")
    except PoorFitError as e:
        logger.warning(f"{curve.kind.value} curve at {curve.angle:.6g}: {e}")
    try:
        comparison = compare_with_asymptotics(curve, kit)
        max_abs = comparison.max_abs
        if comparison.remainder_exponent is not None:
            remainder = comparison.remainder_exponent
    except (UnsupportedAngleError, SingularDirectionError, AsymptoticCaseError) as e:
        logger.warning(f"No leading-order formula for {curve.kind.value} {curve.angle:.6g}: {e}")
    return [
        float(curve.kind is CurveKind.FORWARD),
        curve.angle,
        limit,
        order,
        _law_limit(kit, curve),
        max_abs,
        remainder,
    ]


def cmd_trace(config: RunConfig) -> CommandResult:
    """Trace preimages of rays and images of rays, export curves and a fit summary."""
    fmap = resolve_map(config)
    kit = AsymptoticKit.build(fmap)
    section = config.trace
    out = config.out
    result = CommandResult("trace")

    radii = log_radii(
        fmap.config.radius, section.r_min_fraction, section.r_max_fraction, section.per_decade
    )
    thetas = section.thetas or _ray_offsets(kit.theta_star, 0.0, math.pi)
    phis = section.phis or _ray_offsets(kit.phi_star, -kit.half_angle, kit.half_angle)

    inverse = trace_inverse_family(fmap, thetas, radii)
    forward = trace_forward_family(fmap, phis, radii)
    representation = Representation(section.representation)
    if representation is not Representation.POLAR:
        forward = [curve.as_representation(representation) for curve in forward]

    rows = []
    for prefix, curves in (("inverse", inverse), ("forward", forward)):
        for k, curve in enumerate(curves):
            result.outputs.append(write_curve_csv(out / f"trace_{prefix}_{k}.csv", curve))
            rows.append(_summary_row(kit, curve))

    table = np.asarray(rows, dtype=float)
    result.outputs.append(
        write_csv(
            out / "trace_summary.csv",
            ("forward", "angle", "fit_limit", "fit_order", "law_limit", "max_abs", "remainder"),
            list(table.T),
        )
    )

    n_inv = len(inverse)
    for name, curves, limits in (
        ("trace_inverse.svg", inverse, table[:n_inv, 4]),
        ("trace_forward.svg", forward, table[n_inv:, 4]),
    ):
        result.outputs.append(plot_traced_curves(curves, list(limits), out / name))

    fits = int(np.count_nonzero(np.isfinite(table[:, 2])))
    result.message = f"{len(rows)} curves traced, {fits} exit angles fitted"
    return result


# ---------------------------------------------------------------------- mesh images


def cmd_mesh_images(config: RunConfig) -> CommandResult:
    """Map the polar test meshes through F or its inverse; export JSON polylines and SVG."""
    fmap = resolve_map(config)
    section = config.mesh
    result = CommandResult("mesh-images")
    kinds = (MeshKind.XI, MeshKind.T) if section.kind == "both" else (MeshKind(section.kind),)

    truncated = 0
    for kind in kinds:
        spec = MeshSpec(
            kind,
            n_circles=section.n_circles,
            n_rays=section.n_rays,
            scale=section.scale,
            samples=section.samples,
        )
        images = mesh_images(fmap, spec, on_error="truncate")
        truncated += len(images.truncated)
        result.outputs.append(write_mesh_json(config.out / f"mesh_{kind.value}.json", images))
        title = f"{kind.value} mesh, beta = {fmap.beta:g}"
        result.outputs.append(
            plot_mesh_images(images, config.out / f"mesh_{kind.value}.svg", title=title)
        )

    result.message = f"{len(kinds)} mesh(es) written, {truncated} truncated polyline(s)"
    return result


# ---------------------------------------------------------------------- winslow


def resolve_domain(config: RunConfig) -> DomainBoundary:
    """Domain from a JSON file or a named builder (identity, rectangle, l_shaped, sector)."""
    section = config.winslow
    if section.domain.endswith(".json") or Path(section.domain).is_file():
        return load_domain(section.domain)
    options: Dict[str, object] = {}
    if section.domain == "sector":
        options = {"radius": config.corner.radius, "arc_segments": section.arc_segments}
    elif section.domain == "l_shaped":
        options = {"size": section.size}
    return domain_by_name(section.domain, beta=config.corner.beta, **options)


def sector_composition_map(domain: DomainBoundary) -> HarmonicCornerMap:
    """Fit the harmonic map whose inverse is the Winslow solution on a sector domain."""
    beta = float(domain.metadata["beta"])
    radius = float(domain.metadata["radius"])
    speed = 1.0 / (2.0 * radius)
    cfg = CornerConfig(beta=beta, sigma_plus=speed, sigma_minus=speed, radius=radius)
    phi, values = sector_arc_samples(beta, radius, arc_split=domain.metadata["arc_split"])
    return fit_map_from_arc(cfg, phi, values)


def cmd_winslow(config: RunConfig) -> CommandResult:
    """Solve the Winslow system; export grid CSV, report JSON and an SVG with folds filled."""
    section = config.winslow
    domain = resolve_domain(config)
    grid, report = solve(
        domain,
        section.nx,
        section.ny,
        tolerance=section.tolerance,
        max_iters=section.max_iters,
        relaxation=section.relaxation,
        ordering=Ordering(section.ordering),
    )
    out = config.out
    result = CommandResult("winslow")

    table = np.asarray(grid.rows(), dtype=float)
    result.outputs.append(write_csv(out / "winslow_grid.csv", ("i", "j", "x", "y"), list(table.T)))

    payload: Dict[str, object] = {
        "nx": grid.nx,
        "ny": grid.ny,
        "domain": domain.metadata.get("kind", section.domain),
        "report": report.to_dict(),
        "corner_fold_distance": {
            f"{i},{j}": fold_locality(report.fold_cells, (i, j))
            for i, j in domain.corner_nodes(grid.nx, grid.ny)
        },
    }
    if section.composition:
        if domain.metadata.get("kind") == "sector":
            composition = composition_residual(grid, sector_composition_map(domain))
            payload["composition"] = asdict(composition)
        else:
            logger.warning("Composition check requested for a non-sector domain; skipped")

    result.outputs.append(write_json(out / "winslow_report.json", payload))
    result.outputs.append(plot_winslow_grid(grid, report, out / "winslow.svg"))

    result.message = (
        f"{report.iterations} sweeps, final update {report.final_update:.3e}, "
        f"{len(report.fold_cells)} folded cell(s)"
    )
    if not report.converged:
        result.exit_code = EXIT_NOT_CONVERGED
        result.message = f"not converged: {result.message}"
    return result


# ---------------------------------------------------------------------- validate


def cmd_validate(config: RunConfig, coefficients_given: bool = False) -> CommandResult:
    """
    Run the oracle-versus-asymptotics checks and print the pass/fail table.

    With ``coefficients_given`` only the configured map is checked; otherwise
    the random suite over ``[validate] betas`` runs.
    """
    section = config.validate
    if coefficients_given:
        kit = AsymptoticKit.build(resolve_map(config))
        report = ValidationReport(rows=validate_kit(kit), seed=section.seed)
    else:
        report = run_validation_suite(section.betas, section.n_sets, section.seed)

    print(report.to_table())
    result = CommandResult("validate")
    result.outputs.append(write_json(config.out / "validation.json", report.to_dict()))
    failed = len(report.failures())
    result.message = f"{len(report.rows) - failed}/{len(report.rows)} checks passed"
    if not report.passed:
        result.exit_code = EXIT_VALIDATION_FAILED
    return result


# ---------------------------------------------------------------------- fit


def cmd_fit(config: RunConfig) -> CommandResult:
    """Fit coefficients from arc data (or the conformal default) and save them as JSON."""
    fmap = resolve_map(config)
    result = CommandResult("fit")
    result.outputs.append(save_coefficients(config.out / "coefficients.json", fmap))

    if config.coefficients.source == "conformal":
        phi, values = conformal_arc_samples(fmap.config)
        result.outputs.append(write_arc_csv(config.out / "arc_conformal.csv", phi, values))

    orientation = fmap.sample_orientation()
    result.message = (
        f"a_1={fmap.coeffs.a[0]:.6g}, b_1={fmap.coeffs.b[0]:.6g}, "
        f"det J > 0 on {orientation.positive_fraction:.1%} of samples"
    )
    return result


COMMANDS = {
    "angles": cmd_angles,
    "trace": cmd_trace,
    "mesh-images": cmd_mesh_images,
    "winslow": cmd_winslow,
    "fit": cmd_fit,
}


def run_command(name: str, config: RunConfig, coefficients_given: bool = False) -> CommandResult:
    """Dispatch a sub-command by name."""
    if name == "validate":
        return cmd_validate(config, coefficients_given=coefficients_given)
    return COMMANDS[name](config)
