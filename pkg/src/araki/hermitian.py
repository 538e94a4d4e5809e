"""Dense Hermitian linear algebra and spectral functional calculus.

Matrices are plain ``numpy`` complex arrays. :func:`as_hermitian` is the
single entry point that turns arbitrary square input into the symmetrized
``complex128`` form every other routine expects.
"""
from __future__ import annotations

import enum
import os
from dataclasses import dataclass, fields
from functools import cached_property

import numpy as np

from .errors import (
    DimensionMismatch,
    NonConvergence,
    NotHermitian,
    NotPSD,
    SingularLog,
    SingularPower,
)

__all__ = [
    "TolerancePolicy",
    "PSDClass",
    "SpectralDecomposition",
    "as_hermitian",
    "decompose",
    "classify_psd",
    "apply_function",
    "fractional_power",
    "matrix_log",
    "matrix_exp",
    "sandwich",
    "trace_product",
    "trace_product3",
    "trace_product_diag",
]


@dataclass(frozen=True)
class TolerancePolicy:
    """Numerical tolerances shared by every check.

    ``psd_clip`` and ``pd_floor`` are relative to the largest eigenvalue.
    """

    tol_abs: float = 1e-10
    tol_rel: float = 1e-8
    psd_clip: float = 1e-12
    pd_floor: float = 1e-10

    def __post_init__(self):
        for f in fields(self):
            if not getattr(self, f.name) > 0:
                raise ValueError(f"{f.name} must be positive")

    def threshold(self, *magnitudes: float) -> float:
        """Allowed slack ``tol_abs + tol_rel * max|m|``."""
        scale = max((abs(m) for m in magnitudes), default=0.0)
        return self.tol_abs + self.tol_rel * scale

    def tightened(self, factor: float = 10.0) -> "TolerancePolicy":
        return TolerancePolicy(
            self.tol_abs / factor, self.tol_rel / factor, self.psd_clip, self.pd_floor
        )

    @classmethod
    def from_env(cls, environ=None, **overrides) -> "TolerancePolicy":
        """Defaults, then ``ARAKI_TOL_ABS`` style variables, then overrides."""
        environ = os.environ if environ is None else environ
        values = {}
        for f in fields(cls):
            key = "ARAKI_" + f.name.upper()
            if key in environ:
                values[f.name] = float(environ[key])
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)


DEFAULT_POLICY = TolerancePolicy()


class PSDClass(str, enum.Enum):
    PD = "PD"
    PSD = "PSD"
    NOT_PSD = "NotPSD"


def as_hermitian(x, check: bool = False) -> np.ndarray:
    """Return ``(X + X^*)/2`` as a ``complex128`` array.

    With ``check=True`` input that is far from Hermitian is rejected instead
    of being silently projected.
    """
    a = np.asarray(x, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise DimensionMismatch(f"expected a non-empty square matrix, got shape {a.shape}")
    ah = a.conj().T
    if check:
        dev = np.linalg.norm(a - ah)
        if dev > 1e-8 * (1.0 + np.linalg.norm(a)):
            raise NotHermitian(f"input deviates from Hermitian by {dev:.3g}")
    return (a + ah) / 2


@dataclass(frozen=True, eq=False)
class SpectralDecomposition:
    """Eigenvalues in non-increasing order with matching eigenvector columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def dim(self) -> int:
        return self.eigenvalues.shape[0]

    def reconstruct(self, values=None) -> np.ndarray:
        """``U diag(values) U^*``; ``values`` defaults to the eigenvalues."""
        w = self.eigenvalues if values is None else np.asarray(values)
        u = self.eigenvectors
        out = (u * w) @ u.conj().T
        return (out + out.conj().T) / 2

    def eigenprojection(self, i: int) -> np.ndarray:
        """Rank-one projector onto eigenvector ``i`` (1-based)."""
        v = self.eigenvectors[:, i - 1 : i]
        return v @ v.conj().T

    def prefix_projector(self, k: int) -> np.ndarray:
        """Projector onto the span of the first ``k`` eigenvectors (1-based)."""
        if not 1 <= k <= self.dim:
            raise ValueError(f"k must lie in 1..{self.dim}, got {k}")
        v = self.eigenvectors[:, :k]
        return v @ v.conj().T

    def tied_at(self, k: int, rtol: float = 1e-9) -> bool:
        """True if eigenvalue ``k`` is numerically equal to eigenvalue ``k+1``."""
        if k >= self.dim:
            return False
        w = self.eigenvalues
        scale = max(abs(w[0]), abs(w[-1]), 1e-300)
        return abs(w[k - 1] - w[k]) <= rtol * scale

    @cached_property
    def lambda_max(self) -> float:
        return float(max(abs(self.eigenvalues[0]), abs(self.eigenvalues[-1])))

    def clipped(self, pol: TolerancePolicy = DEFAULT_POLICY) -> np.ndarray:
        """Eigenvalues with the noise band ``|λ| <= psd_clip * λ_max`` set to 0.

        Raises :class:`NotPSD` when an eigenvalue lies below the band.
        """
        w = self.eigenvalues
        band = pol.psd_clip * self.lambda_max
        if w[-1] < -band:
            raise NotPSD(f"smallest eigenvalue {w[-1]:.3g} below -{band:.3g}")
        return np.where(np.abs(w) <= band, 0.0, w)


def decompose(a) -> SpectralDecomposition:
    a = as_hermitian(a)
    try:
        w, u = np.linalg.eigh(a)
    except np.linalg.LinAlgError as exc:
        raise NonConvergence(str(exc)) from exc
    if not np.all(np.isfinite(w)):
        raise NonConvergence("eigensolver returned non-finite eigenvalues")
    order = np.argsort(-w, kind="stable")
    return SpectralDecomposition(w[order], u[:, order])


def _decomp(a) -> SpectralDecomposition:
    return a if isinstance(a, SpectralDecomposition) else decompose(a)


def classify_psd(a, pol: TolerancePolicy = DEFAULT_POLICY) -> PSDClass:
    d = _decomp(a)
    w = d.eigenvalues
    lmax = d.lambda_max
    if lmax == 0.0:
        return PSDClass.PSD
    if w[-1] > pol.pd_floor * lmax:
        return PSDClass.PD
    if w[-1] >= -pol.psd_clip * lmax:
        return PSDClass.PSD
    return PSDClass.NOT_PSD


def apply_function(a, f, pol: TolerancePolicy | None = None) -> np.ndarray:
    """Spectral mapping ``U diag(f(λ)) U^*``.

    ``f`` is any callable on a real vector; :class:`araki.functions.ScalarFunction`
    instances additionally check their domain and raise ``DomainError``.
    Passing ``pol`` declares ``A`` PSD: eigenvalues in the clip band are
    mapped as exact zeros.
    """
    d = _decomp(a)
    w = d.eigenvalues if pol is None else d.clipped(pol)
    return d.reconstruct(np.asarray(f(w), dtype=float))


def _power_values(w: np.ndarray, s: float, is_pd: bool) -> np.ndarray:
    if s == 0:
        return np.ones_like(w)
    if s < 0:
        if not is_pd:
            raise SingularPower(f"negative power {s} of a singular matrix")
        return w**s
    return np.where(w > 0, np.abs(w) ** s, 0.0)


def fractional_power(a, s: float, pol: TolerancePolicy = DEFAULT_POLICY) -> np.ndarray:
    """``A^s`` for PSD ``A`` with the convention ``0^0 = 1``.

    Eigenvalues inside the clip band are treated as exact zeros.
    """
    d = _decomp(a)
    w = d.clipped(pol)
    is_pd = classify_psd(d, pol) is PSDClass.PD
    return d.reconstruct(_power_values(w, float(s), is_pd))


def matrix_log(a, pol: TolerancePolicy = DEFAULT_POLICY) -> np.ndarray:
    d = _decomp(a)
    if classify_psd(d, pol) is not PSDClass.PD:
        raise SingularLog("matrix logarithm needs a positive definite argument")
    return d.reconstruct(np.log(d.eigenvalues))


def matrix_exp(a) -> np.ndarray:
    d = _decomp(a)
    return d.reconstruct(np.exp(d.eigenvalues))


def sandwich(a, b, pol: TolerancePolicy = DEFAULT_POLICY) -> np.ndarray:
    """``A^{1/2} B A^{1/2}``, re-symmetrized."""
    b = as_hermitian(b)
    r = fractional_power(a, 0.5, pol)
    if r.shape != b.shape:
        raise DimensionMismatch(f"{r.shape} vs {b.shape}")
    return as_hermitian(r @ b @ r)


def trace_product(x, y) -> float:
    """Real part of ``Tr[XY]``."""
    return trace_product_diag(x, y)[0]


def trace_product_diag(x, y) -> tuple[float, float]:
    """``(Re Tr[XY], Im Tr[XY])``."""
    x = np.asarray(x)
    y = np.asarray(y)
    if x.shape != y.shape or x.ndim != 2:
        raise DimensionMismatch(f"{x.shape} vs {y.shape}")
    # Tr[XY] = sum_ij X_ij Y_ji without forming the product.
    t = np.sum(x * y.T)
    return float(t.real), float(t.imag)


def trace_product3(x, y, z) -> float:
    """Real part of ``Tr[XYZ]``."""
    x, y, z = (np.asarray(m) for m in (x, y, z))
    if not (x.shape == y.shape == z.shape) or x.ndim != 2:
        raise DimensionMismatch(f"{x.shape}, {y.shape}, {z.shape}")
    return trace_product(x, y @ z)
