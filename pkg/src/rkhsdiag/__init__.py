"""Diagonalization of translation-invariant operators on reproducing kernel Hilbert spaces over ``G x Y``.

The main entry points are :func:`get_model` for the kernel catalog,
:func:`commutativity_report` for the fiber diagnostics, and
:func:`gamma` / :func:`berezin` for spectral data of Toeplitz operators.
"""

__version__ = "0.1.0"

from .catalog import KernelModel, GroupModel, eval_K, eval_L, eval_Q, eval_q, get_model, list_models
from .errors import (
    AliasingSuspected,
    AnchorDegenerate,
    DegenerateSamples,
    DenominatorUnderflow,
    DomainViolation,
    FrequencyOutsideOmega,
    IndexOutOfRange,
    InvalidParam,
    ModelError,
    NonConvergence,
    NonFiniteEvaluation,
    NonScalarFiber,
    NormalizationFailure,
    OscillationBudget,
    QuadratureError,
    RKHSDiagError,
    SingularAnchorMatrix,
    UnknownModel,
)
from .fiber import (
    FiberReport,
    Tolerances,
    commutativity_report,
    compute_L_numeric,
    fiber_dimension,
    fiber_report,
    gram_rank,
    projection_direct,
    projection_fiber_oracle,
    reconstruct_K,
    repro_residual,
    schwarz_residual,
)
from .quadrature import Domain1D, IntegralResult, QuadSpec, WeightedMeasure, fourier_integral, integrate
from .specialfns import WaveletModel, jacobi01, laguerre, mexican_hat, normalize_wavelet
from .spectral import (
    SpectralSample,
    SpectrumRange,
    apply_R_to_kernel,
    berezin,
    gamma,
    gamma_matrix,
    gamma_scalar,
    kernel_diagonal_from_fibers,
    lambda_inverse_matrix,
    lambda_inverse_toeplitz,
    spectrum_range,
)
from .symbols import SymbolSpec

__all__ = [
    "AliasingSuspected",
    "AnchorDegenerate",
    "apply_R_to_kernel",
    "berezin",
    "commutativity_report",
    "compute_L_numeric",
    "DegenerateSamples",
    "DenominatorUnderflow",
    "Domain1D",
    "DomainViolation",
    "eval_K",
    "eval_L",
    "eval_Q",
    "eval_q",
    "fiber_dimension",
    "fiber_report",
    "FiberReport",
    "fourier_integral",
    "FrequencyOutsideOmega",
    "gamma",
    "gamma_matrix",
    "gamma_scalar",
    "get_model",
    "gram_rank",
    "GroupModel",
    "IndexOutOfRange",
    "IntegralResult",
    "integrate",
    "InvalidParam",
    "jacobi01",
    "kernel_diagonal_from_fibers",
    "KernelModel",
    "laguerre",
    "lambda_inverse_matrix",
    "lambda_inverse_toeplitz",
    "list_models",
    "mexican_hat",
    "ModelError",
    "NonConvergence",
    "NonFiniteEvaluation",
    "NonScalarFiber",
    "NormalizationFailure",
    "normalize_wavelet",
    "OscillationBudget",
    "projection_direct",
    "projection_fiber_oracle",
    "QuadratureError",
    "QuadSpec",
    "reconstruct_K",
    "repro_residual",
    "RKHSDiagError",
    "schwarz_residual",
    "SingularAnchorMatrix",
    "SpectralSample",
    "spectrum_range",
    "SpectrumRange",
    "SymbolSpec",
    "Tolerances",
    "UnknownModel",
    "WaveletModel",
    "WeightedMeasure",
]
