"""Coisometric Krein-space state realizations of operator series.

The pipeline: an operator series Phi induces a Hermitian form on a
weighted space of principal parts (gram); the spectral split of its
weighted Gram matrix yields a Krein basis (kreinrange); scaling the kept
eigenvectors synthesizes the model space of the sharp transform and its
realization (C, R0, J) (realize).  Everything runs over the complex
numbers and over the quaternions (scalars, linalg, seriesfn supply the
slice-hyperholomorphic calculus), and the cli module sweeps truncation
orders and reports machine-readable verification records.
"""

from ._errors import (
    ArgumentError,
    ConfigError,
    ConvergenceError,
    DivergenceError,
    FieldError,
    KreinRealizeError,
    PairingError,
)
from .scalars import (
    QUAT_I,
    QUAT_J,
    QUAT_K,
    QUAT_ONE,
    Quaternion,
    SliceForm,
    as_quaternion,
    chi_scalar,
    quat_mul,
    slice_decompose,
)
from .linalg import (
    EigDecomposition,
    QuatMatrix,
    adjoint,
    chi_embed,
    chi_split,
    eig_backend_name,
    fro_norm,
    herm_eig,
    hermitian_eig,
    krein_adjoint,
    max_abs,
    op_norm,
    op_norm_est,
    quat_herm_eig,
)
from .seriesfn import (
    OperatorSeries,
    StarInverseResult,
    eval_series,
    sharp,
    slice_components,
    star_inv_linear,
    star_mul,
)
from .gram import (
    CoeffVector,
    GramOperator,
    GramSpec,
    NormBoundReport,
    apply_p_cauchy,
    build_form_matrix,
    cauchy_vector,
    form_coeff,
    form_contour,
    norm_bound_check,
    shift_blocks_down,
    shift_blocks_up,
    weighted_norm,
)
from .kreinrange import KreinBasis, hilbert_form, krein_form, spectral_split
from .realize import (
    CoisometryDefect,
    ModelSpace,
    Realization,
    RealizationValue,
    build_c,
    build_model_space,
    build_r0,
    build_realization,
    coisometry_defect,
    kernel_closed,
    kernel_reconstruct,
    kernel_synth,
    moment_check,
    moment_equiv,
    realization_eval,
)
from .cli import RunConfig, emit_report, main, parse_config, run_pipeline

__version__ = "0.1.0"

__all__ = [
    "ArgumentError",
    "ConfigError",
    "ConvergenceError",
    "DivergenceError",
    "FieldError",
    "KreinRealizeError",
    "PairingError",
    "Quaternion",
    "SliceForm",
    "QUAT_ONE",
    "QUAT_I",
    "QUAT_J",
    "QUAT_K",
    "as_quaternion",
    "chi_scalar",
    "quat_mul",
    "slice_decompose",
    "QuatMatrix",
    "EigDecomposition",
    "adjoint",
    "chi_embed",
    "chi_split",
    "eig_backend_name",
    "fro_norm",
    "herm_eig",
    "hermitian_eig",
    "krein_adjoint",
    "max_abs",
    "op_norm",
    "op_norm_est",
    "quat_herm_eig",
    "OperatorSeries",
    "StarInverseResult",
    "eval_series",
    "sharp",
    "slice_components",
    "star_inv_linear",
    "star_mul",
    "CoeffVector",
    "GramOperator",
    "GramSpec",
    "NormBoundReport",
    "apply_p_cauchy",
    "build_form_matrix",
    "cauchy_vector",
    "form_coeff",
    "form_contour",
    "norm_bound_check",
    "shift_blocks_down",
    "shift_blocks_up",
    "weighted_norm",
    "KreinBasis",
    "hilbert_form",
    "krein_form",
    "spectral_split",
    "CoisometryDefect",
    "ModelSpace",
    "Realization",
    "RealizationValue",
    "build_c",
    "build_model_space",
    "build_r0",
    "build_realization",
    "coisometry_defect",
    "kernel_closed",
    "kernel_reconstruct",
    "kernel_synth",
    "moment_check",
    "moment_equiv",
    "realization_eval",
    "RunConfig",
    "emit_report",
    "main",
    "parse_config",
    "run_pipeline",
    "__version__",
]
