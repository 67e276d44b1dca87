"""Zeros, spectrum and zero-free regions of the partial theta function."""

__version__ = "0.1.0"

from .errors import (AmbiguousNearSpectral, BracketFailure, CertificationFailure,  # noqa: E402
                     ConvergenceFailure, DegreeOverflow, DomainError, NoCrossing,
                     PreconditionUnmet, QuadratureFailure, SeedFailure, ThetaAtlasError)
from .series import (DEFAULT_PRECISION, EvalResult, PrecisionConfig, check_identities,  # noqa: E402
                     eval_bilateral_series, eval_G, eval_katsnelson_family, eval_theta,
                     eval_theta_partial, eval_theta_star)
from .realzeros import bracket_real_zero, find_real_zero, list_real_zeros  # noqa: E402
from .complexzeros import (build_truncation, certify_zero, count_pairs,  # noqa: E402
                           find_all_zeros)
from .spectrum import (chi_mu_sequences, eval_psi, find_imaginary_axis_solution,  # noqa: E402
                       find_spectral_point)

__all__ = [
    "__version__", "ThetaAtlasError", "DomainError", "BracketFailure", "ConvergenceFailure",
    "DegreeOverflow", "CertificationFailure", "AmbiguousNearSpectral", "SeedFailure",
    "NoCrossing", "QuadratureFailure", "PreconditionUnmet", "PrecisionConfig",
    "DEFAULT_PRECISION", "EvalResult", "eval_theta", "eval_theta_partial", "eval_G",
    "eval_theta_star", "eval_bilateral_series", "check_identities", "eval_katsnelson_family",
    "bracket_real_zero", "find_real_zero", "list_real_zeros", "build_truncation",
    "certify_zero", "find_all_zeros", "count_pairs", "find_spectral_point", "eval_psi",
    "chi_mu_sequences", "find_imaginary_axis_solution",
]
