"""
corner-maps command line.

Usage:
    python scripts/corner_maps.py angles --beta 1.5 --out out/angles
    python scripts/corner_maps.py winslow --config runs/sector.ini --grid 33,33
    python scripts/corner_maps.py validate --seed 7

Exit codes: 0 success, 2 validation failure, 3 solver non-convergence,
4 bad input.
"""

# Standard library imports
import argparse
import logging
import sys
from dataclasses import replace
from typing import List, NoReturn, Optional

# Local imports
from ..corners.asymptotics import (
    AsymptoticCaseError,
    SingularDirectionError,
    UnsupportedAngleError,
)
from ..corners.corner_model import CornerConfigError, SectorDomainError
from ..corners.exports import ExportFormatError
from ..corners.harmonic_map import ArcSampleError, CoefficientConstraintError, DegenerateFitError
from ..corners.settings import SettingsError, get_settings
from ..corners.tracer import NoRootError, PoorFitError
from ..corners.validation import ValidationSetupError
from ..mesh.domain import DegenerateSideError, DomainError
from ..mesh.winslow import MisalignmentError, NotApplicableError, WinslowDivergenceError
from .commands import EXIT_BAD_INPUT, EXIT_NOT_CONVERGED, run_command
from .run_config import (
    MESH_KINDS,
    ORDERINGS,
    REPRESENTATIONS,
    RunConfig,
    RunConfigError,
    load_run_config,
    override,
    parse_floats,
    parse_grid,
)

logger = logging.getLogger(__name__)

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"

# Errors that mean the inputs describe no valid computation
BAD_INPUT_ERRORS = (
    RunConfigError,
    SettingsError,
    CornerConfigError,
    SectorDomainError,
    CoefficientConstraintError,
    DegenerateFitError,
    ArcSampleError,
    ExportFormatError,
    DomainError,
    DegenerateSideError,
    UnsupportedAngleError,
    SingularDirectionError,
    AsymptoticCaseError,
    NoRootError,
    PoorFitError,
    NotApplicableError,
    MisalignmentError,
    ValidationSetupError,
)


def configure_logging(verbose: bool = False) -> None:
    """Configure the root logger once from CORNERS_LOG_LEVEL (or DEBUG with --verbose)."""
    try:
        level = "DEBUG" if verbose else get_settings().log_level
    except SettingsError:
        level = "INFO"
    logging.basicConfig(level=getattr(logging, level), format=LOG_FORMAT)


class CornerMapsParser(argparse.ArgumentParser):
    """Argument parser whose usage errors raise RunConfigError instead of exiting."""

    def error(self, message: str) -> NoReturn:
        self.print_usage(sys.stderr)
        raise RunConfigError(f"{self.prog}: {message}")


def build_parser() -> CornerMapsParser:
    common = CornerMapsParser(add_help=False)
    common.add_argument("--config", help="Run configuration file ([section] key = value)")
    common.add_argument("--out", help="Output directory (default CORNERS_OUTPUT_DIR)")
    common.add_argument("--beta", type=float, help="Opening factor, corner angle = pi*beta")
    common.add_argument("--sigma-plus", type=float, help="Boundary speed on L+")
    common.add_argument("--sigma-minus", type=float, help="Boundary speed on L-")
    common.add_argument("--coeffs", help="Coefficient JSON (beta, sigma_plus, sigma_minus, a, b)")
    common.add_argument("--grid", help="Winslow grid size NX,NY")
    common.add_argument("--tol", type=float, help="Winslow convergence tolerance")
    common.add_argument("--seed", type=int, help="Seed of random coefficient sets")
    common.add_argument("-v", "--verbose", action="store_true", help="Debug logging")

    parser = CornerMapsParser(
        prog="corner-maps",
        description="Harmonic maps of planar corners: exit angles, test meshes, Winslow grids",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("angles", parents=[common], help="Tabulate and plot the exit-angle laws")

    trace = sub.add_parser("trace", parents=[common], help="Trace ray preimages and images")
    trace.add_argument("--theta", action="append", help="Inverse ray angle(s), comma separated")
    trace.add_argument("--phi", action="append", help="Forward ray angle(s), comma separated")
    trace.add_argument("--representation", choices=REPRESENTATIONS)

    mesh = sub.add_parser("mesh-images", parents=[common], help="Map polar test meshes")
    mesh.add_argument("--kind", choices=MESH_KINDS)
    mesh.add_argument("--scale", type=float, help="Outer radius of the test mesh")

    winslow = sub.add_parser("winslow", parents=[common], help="Solve the Winslow system")
    winslow.add_argument("--domain", help="identity, rectangle, l_shaped, sector or a JSON file")
    winslow.add_argument("--relaxation", type=float)
    winslow.add_argument("--max-iters", type=int)
    winslow.add_argument("--ordering", choices=ORDERINGS)
    winslow.add_argument(
        "--composition", action="store_true", help="Compare a sector grid with the fitted map"
    )

    validate = sub.add_parser("validate", parents=[common], help="Run the asymptotics checks")
    validate.add_argument("--betas", action="append", help="Opening factors, comma separated")
    validate.add_argument("--n-sets", type=int)

    fit = sub.add_parser("fit", parents=[common], help="Fit coefficients from arc data")
    fit.add_argument("--arc", help="Arc samples CSV with columns phi,re,im")
    fit.add_argument("--n-terms", type=int)
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    """Load the run configuration and apply the command-line overrides."""
    config = load_run_config(args.config)
    config = override(
        config, "corner", beta=args.beta, sigma_plus=args.sigma_plus, sigma_minus=args.sigma_minus
    )
    if args.coeffs:
        config = override(config, "coefficients", source="file", path=args.coeffs)
    if args.seed is not None:
        config = override(config, "coefficients", seed=args.seed)
        config = override(config, "validate", seed=args.seed)
    if args.grid:
        nx, ny = parse_grid(args.grid)
        config = override(config, "winslow", nx=nx, ny=ny)
    config = override(config, "winslow", tolerance=args.tol)

    command = args.command
    if command == "trace":
        config = override(
            config,
            "trace",
            thetas=parse_floats(args.theta),
            phis=parse_floats(args.phi),
            representation=args.representation,
        )
    elif command == "mesh-images":
        config = override(config, "mesh", kind=args.kind, scale=args.scale)
    elif command == "winslow":
        config = override(
            config,
            "winslow",
            domain=args.domain,
            relaxation=args.relaxation,
            max_iters=args.max_iters,
            ordering=args.ordering,
            composition=True if args.composition else None,
        )
    elif command == "validate":
        config = override(config, "validate", betas=parse_floats(args.betas), n_sets=args.n_sets)
    elif command == "fit":
        if args.arc:
            config = override(config, "coefficients", source="arc", arc_csv=args.arc)
        config = override(config, "coefficients", n_terms=args.n_terms)

    if args.out:
        config = replace(config, output_dir=args.out)
    return config.check()


def main(argv: Optional[List[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except RunConfigError as e:
        configure_logging()
        logger.error(str(e))
        return EXIT_BAD_INPUT
    configure_logging(args.verbose)

    try:
        config = config_from_args(args)
        coefficients_given = bool(args.coeffs) or config.coefficients.source == "file"
        result = run_command(args.command, config, coefficients_given=coefficients_given)
    except BAD_INPUT_ERRORS as e:
        logger.error(f"{args.command}: {type(e).__name__}: {e}")
        return EXIT_BAD_INPUT
    except WinslowDivergenceError as e:
        logger.error(f"{args.command}: {e} (sweep {e.iteration}, last update {e.last_update:.3e})")
        return EXIT_NOT_CONVERGED
    except Exception as e:
        logger.exception(f"{args.command} failed: {e}")
        return 1

    for path in result.outputs:
        logger.info(f"Wrote {path}")
    if result.ok:
        logger.info(f"{result.command}: {result.message}")
    else:
        logger.warning(f"{result.command}: {result.message} (exit code {result.exit_code})")
    return result.exit_code


if __name__ == "__main__":
    sys.exit(main())
