"""Dual curvature measures of convex bodies and their subspace concentration."""
__version__ = "0.1.0"

from .bounds import (
    BoundKind,
    VerificationRecord,
    anderson_inequality_check,
    theorem_bound,
    tightness_sweep,
    verify_body,
)
from .exceptions import (
    BodyFileError,
    ConfigError,
    DomainError,
    DualCurvError,
    InvariantError,
    OpenRangeError,
    UnsupportedError,
)
from .generators import GeneratorSpec, generate_body
from .geometry import Subspace, asymmetry_constant, load_body, save_body
from .measures import MeasureReport, PhiSpec, QuadratureSpec, concentration_ratio, total_measure
from .slicing import (
    DivergenceReport,
    FDSpec,
    divergence_identity_check,
    g_gradient_dot,
    g_value,
    gradient_bound_check,
    gradient_integral,
)

__all__ = [
    "BodyFileError", "BoundKind", "ConfigError", "DivergenceReport", "DomainError", "DualCurvError",
    "FDSpec", "GeneratorSpec", "InvariantError", "MeasureReport", "OpenRangeError", "PhiSpec",
    "QuadratureSpec", "Subspace", "UnsupportedError", "VerificationRecord", "anderson_inequality_check",
    "asymmetry_constant", "concentration_ratio", "divergence_identity_check", "g_gradient_dot", "g_value",
    "generate_body", "gradient_bound_check", "gradient_integral", "load_body", "save_body",
    "theorem_bound", "tightness_sweep", "total_measure", "verify_body",
]
