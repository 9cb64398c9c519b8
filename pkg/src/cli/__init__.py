"""Command line front end: run configuration, sub-commands and the argparse entry point."""

from .commands import (
    EXIT_BAD_INPUT,
    EXIT_NOT_CONVERGED,
    EXIT_OK,
    EXIT_VALIDATION_FAILED,
    CommandResult,
    cmd_angles,
    cmd_fit,
    cmd_mesh_images,
    cmd_trace,
    cmd_validate,
    cmd_winslow,
    resolve_domain,
    resolve_map,
    run_command,
)
from .main import build_parser, main
from .run_config import RunConfig, RunConfigError, load_run_config

__all__ = [
    # Configuration
    "RunConfig",
    "RunConfigError",
    "load_run_config",
    # Commands
    "CommandResult",
    "cmd_angles",
    "cmd_trace",
    "cmd_mesh_images",
    "cmd_winslow",
    "cmd_validate",
    "cmd_fit",
    "resolve_map",
    "resolve_domain",
    "run_command",
    # Entry point
    "build_parser",
    "main",
    "EXIT_OK",
    "EXIT_VALIDATION_FAILED",
    "EXIT_NOT_CONVERGED",
    "EXIT_BAD_INPUT",
]
