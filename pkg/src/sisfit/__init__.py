"""Optimal shift-invariant subspace models for sampled periodic signals.

Fit the closest subspace spanned by lattice translates of a small set of
generators to a family of signals, read the exact approximation error for
every model order off one spectral pass, and get generators whose translates
form a Parseval frame of the fitted space.
"""

from .spectral import (
    EigenDecomposition,
    SvdResult,
    compensated_dot,
    eigh_descending,
    gram_matrix,
    svd,
    validate_hermitian,
)
from .transform import (
    FiberSet,
    GridSpec,
    SignalSet,
    defiberize,
    fiberize,
    inverse_dft,
    lattice_shift,
    naive_dft,
    unitary_dft,
)
from .subspace import FitResult, best_subspace, residual
from .model import (
    ApproximationReport,
    FiberGramian,
    SisModel,
    SpectralProfile,
    apply_weights,
    direct_error,
    error_curve,
    error_formula,
    fiber_cross_gram,
    fit,
    gramian,
    project,
    spectral_profile,
    synthesize,
    uniqueness_check,
    verify_parseval,
)

__version__ = "0.1.0"

__all__ = [
    "ApproximationReport",
    "EigenDecomposition",
    "FiberGramian",
    "FiberSet",
    "FitResult",
    "GridSpec",
    "SignalSet",
    "SisModel",
    "SpectralProfile",
    "SvdResult",
    "apply_weights",
    "best_subspace",
    "compensated_dot",
    "defiberize",
    "direct_error",
    "eigh_descending",
    "error_curve",
    "error_formula",
    "fiber_cross_gram",
    "fiberize",
    "fit",
    "gram_matrix",
    "gramian",
    "inverse_dft",
    "lattice_shift",
    "naive_dft",
    "project",
    "residual",
    "spectral_profile",
    "svd",
    "synthesize",
    "uniqueness_check",
    "unitary_dft",
    "validate_hermitian",
    "verify_parseval",
]
