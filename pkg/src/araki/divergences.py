"""Quantum Rényi divergences and relative entropies of density matrices.

All values are in nats.
"""
from __future__ import annotations

import enum

import numpy as np

from .errors import DomainError, HypothesisViolated
from .hermitian import (
    DEFAULT_POLICY,
    PSDClass,
    TolerancePolicy,
    as_hermitian,
    classify_psd,
    decompose,
    matrix_exp,
    matrix_log,
    trace_product,
)
from .graded import from_eig
from .inequalities import CheckResult, ExponentParams, Verdict, _result

__all__ = [
    "DivergenceKind",
    "RENYI_KINDS",
    "as_density",
    "divergence",
    "ordering_report",
]


class DivergenceKind(str, enum.Enum):
    PETZ = "petz"
    SANDWICHED = "sandwiched"
    LOG_EUCLIDEAN = "log_euclidean"
    GEOMETRIC = "geometric"
    UMEGAKI = "umegaki"
    BELAVKIN_STASZEWSKI = "belavkin_staszewski"


RENYI_KINDS = (
    DivergenceKind.PETZ,
    DivergenceKind.SANDWICHED,
    DivergenceKind.LOG_EUCLIDEAN,
    DivergenceKind.GEOMETRIC,
)


def as_density(x, pol: TolerancePolicy = DEFAULT_POLICY) -> np.ndarray:
    """Validate a density matrix: PSD with unit trace (within 1e-10)."""
    m = as_hermitian(x)
    if classify_psd(m, pol) is PSDClass.NOT_PSD:
        raise HypothesisViolated("density matrix must be positive semi-definite")
    tr = float(np.trace(m).real)
    if abs(tr - 1.0) > 1e-10:
        raise HypothesisViolated(f"density matrix has trace {tr!r}, expected 1")
    return m


def _require_pd(m, pol, name):
    if classify_psd(m, pol) is not PSDClass.PD:
        raise DomainError(f"{name} must be positive definite")


def _renyi(alpha, value):
    if not value > 0:
        raise DomainError("trace functional vanished; divergence is infinite")
    return float(np.log(value) / (alpha - 1.0))


def divergence(kind, rho, sigma, alpha: float | None = None, pol: TolerancePolicy = DEFAULT_POLICY) -> float:
    """Divergence ``kind`` of ``rho`` from ``sigma``.

    Raises ``DomainError`` (``SingularLog`` / ``SingularPower``) when the
    support conditions needed by the formula fail.
    """
    kind = DivergenceKind(kind)
    rho = as_density(rho, pol)
    sigma = as_density(sigma, pol)

    if kind is DivergenceKind.UMEGAKI:
        _require_pd(sigma, pol, "sigma")
        dr = decompose(rho)
        lam = dr.clipped(pol)
        ent = float(np.sum(np.where(lam > 0, lam * np.log(np.where(lam > 0, lam, 1.0)), 0.0)))
        return ent - trace_product(rho, matrix_log(sigma, pol))
    if kind is DivergenceKind.BELAVKIN_STASZEWSKI:
        _require_pd(rho, pol, "rho")
        _require_pd(sigma, pol, "sigma")
        lam, other = _frame(rho, sigma, pol)
        inner = other.power(-1.0).sandwiched(np.sqrt(lam))
        return float(np.sum(lam * np.real(np.diag(inner.map(np.log).matrix()))))

    if alpha is None:
        raise ValueError(f"{kind.value} needs alpha")
    alpha = float(alpha)
    if not alpha > 0 or alpha == 1.0:
        raise ValueError("alpha must be positive and different from 1")

    if kind is DivergenceKind.PETZ:
        if alpha > 1:
            _require_pd(sigma, pol, "sigma")
        dr, ds = decompose(rho), decompose(sigma)
        overlap = np.abs(dr.eigenvectors.conj().T @ ds.eigenvectors) ** 2
        val = float(_pow(dr.clipped(pol), alpha) @ overlap @ _pow(ds.clipped(pol), 1 - alpha))
        return _renyi(alpha, val)
    if kind is DivergenceKind.SANDWICHED:
        e = (1 - alpha) / (2 * alpha)
        if e < 0:
            _require_pd(sigma, pol, "sigma")
        lam, other = _frame(sigma, rho, pol)
        val = float(np.sum(other.sandwiched(_pow(lam, e)).spectrum() ** alpha))
        return _renyi(alpha, val)
    if kind is DivergenceKind.LOG_EUCLIDEAN:
        _require_pd(rho, pol, "rho")
        _require_pd(sigma, pol, "sigma")
        gen = alpha * matrix_log(rho, pol) + (1 - alpha) * matrix_log(sigma, pol)
        return _renyi(alpha, float(np.trace(matrix_exp(gen)).real))
    if kind is DivergenceKind.GEOMETRIC:
        _require_pd(rho, pol, "rho")
        if alpha > 1:
            _require_pd(sigma, pol, "sigma")
        lam, other = _frame(rho, sigma, pol)
        inner = other.sandwiched(lam**-0.5).power(1 - alpha)
        return _renyi(alpha, float(np.sum(lam * np.real(np.diag(inner.matrix())))))
    raise AssertionError(kind)


def _pow(w, t):
    if t == 0:
        return np.ones_like(w)
    return np.where(w > 0, np.where(w > 0, w, 1.0) ** t, 0.0)


def _frame(x, y, pol):
    """Clipped eigenvalues of ``x`` and ``y`` held in the eigenbasis of ``x``."""
    dx = decompose(x)
    u = dx.eigenvectors
    dy = decompose(as_hermitian(u.conj().T @ y @ u))
    return dx.clipped(pol), from_eig(dy.clipped(pol), dy.eigenvectors)


_CHAIN = (
    ("sandwiched<=petz", DivergenceKind.SANDWICHED, DivergenceKind.PETZ, lambda a: a > 0),
    ("petz<=log_euclidean", DivergenceKind.PETZ, DivergenceKind.LOG_EUCLIDEAN, lambda a: 0 < a < 1),
    ("log_euclidean<=geometric", DivergenceKind.LOG_EUCLIDEAN, DivergenceKind.GEOMETRIC, lambda a: 0 < a <= 1),
)


def ordering_report(rho, sigma, alpha_grid, pol: TolerancePolicy = DEFAULT_POLICY) -> list[CheckResult]:
    """Oriented checks of the divergence chain at each α, plus the α = 1 pair.

    Each result's ``inequality_id`` names the comparison, e.g.
    ``"sandwiched<=petz"``.
    """
    out = []
    for alpha in alpha_grid:
        alpha = float(alpha)
        if alpha == 1.0:
            continue
        for name, lo, hi, applies in _CHAIN:
            if applies(alpha):
                out.append(_pair(name, lo, hi, rho, sigma, alpha, pol))
    out.append(
        _pair(
            "umegaki<=belavkin_staszewski",
            DivergenceKind.UMEGAKI,
            DivergenceKind.BELAVKIN_STASZEWSKI,
            rho,
            sigma,
            None,
            pol,
        )
    )
    return out


def _pair(name, lo, hi, rho, sigma, alpha, pol) -> CheckResult:
    params = ExponentParams(alpha=alpha)
    try:
        lv = divergence(lo, rho, sigma, alpha, pol)
        hv = divergence(hi, rho, sigma, alpha, pol)
    except DomainError as exc:
        nan = float("nan")
        return CheckResult(name, params, nan, nan, nan, nan, Verdict.DEGENERATE, {}, str(exc))
    return _result(name, params, lv, hv, pol)
