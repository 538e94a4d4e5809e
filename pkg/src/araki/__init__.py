"""Numerical verification of Araki-type matrix trace inequalities."""
from .errors import (
    ArakiError,
    CorruptState,
    DimensionMismatch,
    DomainError,
    HypothesisViolated,
    NonConvergence,
    NotPSD,
    ShapeMismatch,
    SingularLog,
    SingularPower,
)
from .hermitian import (
    PSDClass,
    SpectralDecomposition,
    TolerancePolicy,
    apply_function,
    as_hermitian,
    classify_psd,
    decompose,
    fractional_power,
    matrix_exp,
    matrix_log,
    sandwich,
    trace_product,
    trace_product3,
)

__version__ = "0.1.0"
