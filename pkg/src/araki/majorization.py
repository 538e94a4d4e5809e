"""Eigenvalues of products of PSD powers and log-majorization verdicts."""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import ShapeMismatch, SingularPower
from .graded import from_eig
from .hermitian import DEFAULT_POLICY, PSDClass, TolerancePolicy, as_hermitian, classify_psd, decompose

__all__ = [
    "MajorizationVerdict",
    "LogMajorizationReport",
    "product_eigenvalues",
    "hermitian_eigenvalues",
    "check_log_majorization",
    "DEGENERACY_FLOOR",
]

#: entries at or below this fraction of the largest entry count as exact zeros
DEGENERACY_FLOOR = 1e-13


class MajorizationVerdict(str, enum.Enum):
    HOLDS = "Holds"
    REVERSE_HOLDS = "ReverseHolds"
    FAILS = "Fails"
    DEGENERATE = "Degenerate"


@dataclass(frozen=True, eq=False)
class LogMajorizationReport:
    """Comparison of two nonnegative spectra ``x`` (left) and ``y`` (right).

    ``weak_holds`` is the prefix condition for ``x ≺ y``; ``reverse_weak_holds``
    the one for ``y ≺ x``. ``det_equal`` is ``None`` when some entry is below
    the degeneracy floor. ``expected`` records which orientation the caller
    claims, if any.
    """

    prefix_log_lhs: np.ndarray
    prefix_log_rhs: np.ndarray
    weak_holds: bool
    reverse_weak_holds: bool
    det_equal: bool | None
    det_log_diff: float
    tol: float
    verdict: MajorizationVerdict
    expected: MajorizationVerdict | None = None

    @property
    def forward_holds(self) -> bool:
        return self.weak_holds and self.det_equal is not False

    @property
    def reverse_holds(self) -> bool:
        return self.reverse_weak_holds and self.det_equal is not False

    @property
    def claim_holds(self) -> bool:
        if self.verdict is MajorizationVerdict.DEGENERATE:
            return True
        if self.expected is MajorizationVerdict.REVERSE_HOLDS:
            return self.reverse_holds
        return self.forward_holds

    def margin(self) -> float:
        """Smallest prefix slack in the expected orientation (log domain)."""
        a, b = self.prefix_log_lhs, self.prefix_log_rhs
        if self.expected is MajorizationVerdict.REVERSE_HOLDS:
            a, b = b, a
        with np.errstate(invalid="ignore"):
            d = np.where(np.isneginf(a), np.inf, b - a)
        return float(np.min(d)) if d.size else 0.0


def hermitian_eigenvalues(x) -> np.ndarray:
    """Eigenvalues of a Hermitian matrix, non-increasing."""
    return np.sort(np.linalg.eigvalsh(as_hermitian(x)))[::-1]


def product_eigenvalues(a, pa: float, b, pb: float, pol: TolerancePolicy = DEFAULT_POLICY) -> np.ndarray:
    """Eigenvalues of ``A^pa B^pb`` for PSD ``A``, ``B``, non-increasing.

    These are the eigenvalues of the Hermitian matrix ``B^{pb/2} A^pa B^{pb/2}``,
    obtained as squared singular values of ``B^{pb/2} A^{pa/2}`` written in the
    two eigenbases, which keeps small eigenvalues accurate.
    """
    da, db = decompose(as_hermitian(a)), decompose(as_hermitian(b))
    wa = _powers(da, pa, pol, "A")
    wb = _powers(db, pb, pol, "B")
    w = da.eigenvectors.conj().T @ db.eigenvectors
    return from_eig(wb, w).sandwiched(np.sqrt(wa)).spectrum()


def _powers(d, t, pol, name):
    lam = d.clipped(pol)
    if t == 0:
        return np.ones_like(lam)
    if t < 0:
        if classify_psd(d, pol) is not PSDClass.PD:
            raise SingularPower(f"negative power {t} of a singular {name}")
        return lam**t
    return np.where(lam > 0, lam, 0.0) ** t


def _prefix_logs(v: np.ndarray, floor: float) -> np.ndarray:
    with np.errstate(divide="ignore"):
        logs = np.where(v > floor, np.log(np.where(v > floor, v, 1.0)), -np.inf)
    return np.cumsum(logs)


def _weak(lhs: np.ndarray, rhs: np.ndarray, tol: float) -> bool:
    for a, b in zip(lhs, rhs):
        if np.isneginf(a):
            continue
        if np.isneginf(b) or a > b + tol:
            return False
    return True


def check_log_majorization(
    eigs_x, eigs_y, pol: TolerancePolicy = DEFAULT_POLICY, floor: float = DEGENERACY_FLOOR
) -> LogMajorizationReport:
    """Decide ``x ≺_log y`` and ``y ≺_log x`` for sorted nonnegative spectra.

    Entries at or below ``floor`` times the largest entry count as zeros.
    The default suits spectra from a plain Hermitian eigensolver, whose
    error is absolute; pass ``floor=0`` for spectra with relative accuracy,
    such as :func:`product_eigenvalues`.
    """
    x = np.asarray(eigs_x, dtype=float)
    y = np.asarray(eigs_y, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise ShapeMismatch(f"{x.shape} vs {y.shape}")
    if np.any(x < 0) or np.any(y < 0):
        raise ValueError("spectra must be nonnegative")
    if np.any(np.diff(x) > 0) or np.any(np.diff(y) > 0):
        raise ValueError("spectra must be sorted non-increasing")

    top = max(float(x.max(initial=0.0)), float(y.max(initial=0.0)))
    floor = floor * top
    px = _prefix_logs(x, floor)
    py = _prefix_logs(y, floor)
    finite = np.concatenate([px[np.isfinite(px)], py[np.isfinite(py)]])
    tol = pol.threshold(*finite) if finite.size else pol.tol_abs

    if top == 0.0:
        return LogMajorizationReport(
            px, py, True, True, None, 0.0, tol, MajorizationVerdict.DEGENERATE
        )

    weak = _weak(px, py, tol)
    rev = _weak(py, px, tol)
    if np.all(x > floor) and np.all(y > floor):
        diff = float(px[-1] - py[-1])
        det_equal = bool(abs(diff) <= tol)
    else:
        diff, det_equal = float("nan"), None

    if weak and det_equal is not False:
        verdict = MajorizationVerdict.HOLDS
    elif rev and det_equal is not False:
        verdict = MajorizationVerdict.REVERSE_HOLDS
    else:
        verdict = MajorizationVerdict.FAILS
    return LogMajorizationReport(px, py, weak, rev, det_equal, diff, tol, verdict)
