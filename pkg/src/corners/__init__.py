"""Harmonic maps of planar corners, their exit-angle asymptotics and a curve-tracing oracle."""

from .asymptotics import (
    AngleLaw,
    AsymptoticCaseError,
    AsymptoticKit,
    LawKind,
    LawPiece,
    Regime,
    Representation,
    SingularDirectionError,
    UnsupportedAngleError,
    conformal_inverse,
    conformal_map,
    conformal_phi_of_theta,
    conformal_theta_of_phi,
    forward_angle_law,
    inverse_angle_law,
    theta_star,
)
from .corner_model import (
    CornerConfig,
    CornerConfigError,
    DerivedParams,
    SectorDomainError,
    derive_params,
    linear_part_q,
    swap_sides,
    symmetric_mu,
)
from .exports import ExportFormatError, load_coefficients, save_coefficients
from .harmonic_map import (
    ArcSampleError,
    CoefficientConstraintError,
    DegenerateFitError,
    HarmonicCornerMap,
    Jacobian,
    SeriesCoefficients,
    basis_psi,
    discrete_laplacian_residual,
    fit_from_arc,
    fit_map_from_arc,
)
from .settings import Settings, SettingsError, get_settings, load_settings
from .tracer import (
    CurveKind,
    ExitAngleEstimate,
    MeshImages,
    MeshKind,
    MeshSpec,
    NoRootError,
    PoorFitError,
    TracedCurve,
    compare_with_asymptotics,
    estimate_exit_angle,
    mesh_images,
    trace_forward_family,
    trace_forward_ray,
    trace_inverse_family,
    trace_inverse_ray,
)
from .validation import ValidationReport, run_validation_suite

__all__ = [
    # Corner model
    "CornerConfig",
    "CornerConfigError",
    "DerivedParams",
    "SectorDomainError",
    "derive_params",
    "linear_part_q",
    "swap_sides",
    "symmetric_mu",
    # Harmonic maps
    "HarmonicCornerMap",
    "SeriesCoefficients",
    "Jacobian",
    "ArcSampleError",
    "CoefficientConstraintError",
    "DegenerateFitError",
    "basis_psi",
    "discrete_laplacian_residual",
    "fit_from_arc",
    "fit_map_from_arc",
    # Asymptotics
    "AsymptoticKit",
    "AngleLaw",
    "LawKind",
    "LawPiece",
    "Regime",
    "Representation",
    "AsymptoticCaseError",
    "SingularDirectionError",
    "UnsupportedAngleError",
    "theta_star",
    "inverse_angle_law",
    "forward_angle_law",
    "conformal_map",
    "conformal_inverse",
    "conformal_theta_of_phi",
    "conformal_phi_of_theta",
    # Tracing oracle
    "CurveKind",
    "TracedCurve",
    "ExitAngleEstimate",
    "NoRootError",
    "PoorFitError",
    "trace_inverse_ray",
    "trace_forward_ray",
    "trace_inverse_family",
    "trace_forward_family",
    "estimate_exit_angle",
    "compare_with_asymptotics",
    "MeshKind",
    "MeshSpec",
    "MeshImages",
    "mesh_images",
    # Validation
    "ValidationReport",
    "run_validation_suite",
    # Files and settings
    "ExportFormatError",
    "load_coefficients",
    "save_coefficients",
    "Settings",
    "SettingsError",
    "get_settings",
    "load_settings",
]
