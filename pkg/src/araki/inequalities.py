"""Araki-type trace inequalities and their classical relatives as gap predicates.

Every predicate returns a :class:`CheckResult` whose ``gap`` is oriented so
that ``gap >= 0`` means the stated inequality holds on that instance.

Most trace quantities are evaluated in the eigenbasis of ``A``: there every
power of ``A`` and every weight ``f(A)`` is diagonal and the sandwich
``A^{1/2} B A^{1/2}`` is an entrywise rescaling of ``U^* B U``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from .errors import DomainError, HypothesisViolated, NotPSD, SingularLog, SingularPower
from .functions import ScalarFunction, is_monotone_on
from .hermitian import (
    DEFAULT_POLICY,
    PSDClass,
    SpectralDecomposition,
    TolerancePolicy,
    as_hermitian,
    classify_psd,
    decompose,
    fractional_power,
    matrix_exp,
    matrix_log,
    trace_product,
)
from .graded import Embedded, from_eig
from .majorization import (
    LogMajorizationReport,
    MajorizationVerdict,
    check_log_majorization,
    hermitian_eigenvalues,
)

__all__ = [
    "InequalityId",
    "Verdict",
    "ExponentParams",
    "CheckResult",
    "PinchedFamily",
    "PROVEN",
    "CONJECTURES",
    "LOG_MAJORIZATION_IDS",
    "gap_main_direct",
    "gap_main_converse",
    "gap_projector",
    "gap_pinch_lemma",
    "operator_jensen_step",
    "gap_lemma2",
    "gap_gt_limit",
    "gap_s2",
    "gap_lemma4",
    "gap_conjecture1",
    "gap_conjecture2",
    "gap_classical",
    "lm_classical",
    "lm_check",
    "remark_instance",
    "gap_remark",
]


class InequalityId(str, enum.Enum):
    GT = "gt"
    ALT = "alt"
    LIE_TROTTER = "lie_trotter"
    AH94 = "ah94"
    BLP = "blp"
    BLP_TRACE = "blp_trace"
    GBLP = "gblp"
    HP93 = "hp93"
    MA12 = "ma12"
    MAIN_DIRECT = "main_direct"
    MAIN_CONVERSE = "main_converse"
    PROJECTOR = "projector"
    PINCH = "pinch"
    JENSEN_STEP = "jensen_step"
    LEMMA2 = "lemma2"
    GT_LIMIT = "gt_limit"
    S2 = "s2"
    LEMMA4 = "lemma4"
    CONJ1 = "conj1"
    CONJ2 = "conj2"


CONJECTURES = frozenset({InequalityId.CONJ1, InequalityId.CONJ2})
PROVEN = frozenset(InequalityId) - CONJECTURES
LOG_MAJORIZATION_IDS = frozenset(
    {
        InequalityId.ALT,
        InequalityId.LIE_TROTTER,
        InequalityId.AH94,
        InequalityId.BLP,
        InequalityId.GBLP,
        InequalityId.MA12,
    }
)


class Verdict(str, enum.Enum):
    HOLDS = "Holds"
    VIOLATED = "Violated"
    DEGENERATE = "Degenerate"


@dataclass(frozen=True)
class ExponentParams:
    s: float | None = None
    t: float | None = None
    r: float | None = None
    p: float | None = None
    q: float | None = None
    alpha: float | None = None
    k: int | None = None
    epsilon: float | None = None

    def to_dict(self) -> dict:
        return {k: v for k, v in asdict(self).items() if v is not None}


@dataclass(frozen=True)
class CheckResult:
    #: an :class:`InequalityId`, or a plain string for divergence comparisons
    inequality_id: InequalityId | str
    params: ExponentParams
    lhs: float
    rhs: float
    gap: float
    rel_gap: float
    verdict: Verdict
    diagnostics: dict = field(default_factory=dict)
    note: str = ""
    #: weight function used by f-parameterized checks, if any
    weight: ScalarFunction | None = field(default=None, compare=False)

    @property
    def id_str(self) -> str:
        return getattr(self.inequality_id, "value", self.inequality_id)

    @property
    def holds(self) -> bool:
        return self.verdict is Verdict.HOLDS

    @property
    def violated(self) -> bool:
        return self.verdict is Verdict.VIOLATED


def _as_id(ineq):
    try:
        return InequalityId(ineq)
    except ValueError:
        return str(ineq)


def _result(
    ineq,
    params,
    lhs,
    rhs,
    pol,
    gap=None,
    diagnostics=None,
    tol=None,
    force=None,
    note="",
) -> CheckResult:
    lhs = float(lhs)
    rhs = float(rhs)
    gap = rhs - lhs if gap is None else float(gap)
    if tol is None:
        tol = pol.threshold(lhs, rhs)
    rel = gap / max(1.0, abs(lhs), abs(rhs)) if math.isfinite(gap) else gap
    if force is not None:
        verdict = force
    else:
        verdict = Verdict.HOLDS if gap >= -tol else Verdict.VIOLATED
    diag = dict(diagnostics or {})
    diag.setdefault("tol", tol)
    return CheckResult(_as_id(ineq), params, lhs, rhs, gap, rel, verdict, diag, note)


def _degenerate(ineq, params, reason: str) -> CheckResult:
    nan = float("nan")
    return CheckResult(_as_id(ineq), params, nan, nan, nan, nan, Verdict.DEGENERATE, {}, reason)


# --------------------------------------------------------------------------
# shared machinery


def _psd(a, pol, name="A") -> SpectralDecomposition:
    d = a if isinstance(a, SpectralDecomposition) else decompose(a)
    if classify_psd(d, pol) is PSDClass.NOT_PSD:
        raise HypothesisViolated(f"{name} is not positive semi-definite")
    return d


def _check_range(name, value, lo=-math.inf, hi=math.inf, lo_open=False, hi_open=False):
    ok = (value > lo if lo_open else value >= lo) and (value < hi if hi_open else value <= hi)
    if not ok:
        raise HypothesisViolated(f"{name}={value} outside the admissible range")


def _pow(w: np.ndarray, s: float) -> np.ndarray:
    """Elementwise power of clipped nonnegative values with ``0^0 = 1``."""
    if s == 0:
        return np.ones_like(w)
    if s < 0:
        if np.any(w <= 0):
            raise DomainError(f"negative power {s} of a singular matrix")
        return w**s
    return np.where(w > 0, np.abs(w) ** s, 0.0)


class _Frame:
    """``B`` expressed in the eigenbasis of ``A``, with cached powers.

    Sandwiches ``D^{1/2} B^c D^{1/2}`` are diagonalized with a Jacobi SVD of
    ``B^{c/2} D^{1/2}`` so that their small eigenvalues keep relative accuracy
    when ``A`` or ``B`` is ill-conditioned.
    """

    def __init__(self, da: SpectralDecomposition, b, pol: TolerancePolicy):
        self.pol = pol
        self.da = da
        self.lam = da.clipped(pol)
        self.is_pd = classify_psd(da, pol) is PSDClass.PD
        u = da.eigenvectors
        self.b = as_hermitian(u.conj().T @ as_hermitian(b) @ u)
        self.db = _psd(self.b, pol, "B")
        self.b_emb = from_eig(self.db.clipped(pol), self.db.eigenvectors)
        self._bpow = {}

    def b_pow(self, s: float) -> np.ndarray:
        if s not in self._bpow:
            self._bpow[s] = fractional_power(self.db, s, self.pol)
        return self._bpow[s]

    def a_pow(self, t: float) -> np.ndarray:
        if t < 0 and not self.is_pd:
            raise SingularPower(f"negative power {t} of a singular A")
        return _pow(self.lam, t)

    def graded(self, avals: np.ndarray, bpow: float = 1.0) -> Embedded:
        """Spectral form of ``D^{1/2} B^bpow D^{1/2}`` with ``D = diag(avals)``."""
        if bpow < 0 and classify_psd(self.db, self.pol) is not PSDClass.PD:
            raise SingularPower(f"negative power {bpow} of a singular B")
        return self.b_emb.power(bpow).sandwiched(np.sqrt(avals))

    def sandwich(self, avals: np.ndarray, bmat: np.ndarray | None = None) -> np.ndarray:
        """``D^{1/2} X D^{1/2}`` with ``D = diag(avals)`` and ``X`` defaulting to ``B``."""
        h = np.sqrt(avals)
        x = self.b if bmat is None else bmat
        return as_hermitian(h[:, None] * x * h[None, :])

    def sandwich_pow(self, avals: np.ndarray, s: float, bpow: float = 1.0) -> np.ndarray:
        """``(D^{1/2} B^bpow D^{1/2})^s``."""
        return self.graded(avals, bpow).power(s).matrix()

    def sandwich_pow_diag(self, avals: np.ndarray, s: float) -> np.ndarray:
        """Diagonal of ``(D^{1/2} B D^{1/2})^s``."""
        return np.real(np.diag(self.sandwich_pow(avals, s)))

    def araki_sides(self, weights, avals, s) -> tuple[float, float]:
        """``(Tr[W D^s B^s], Tr[W (D^{1/2} B D^{1/2})^s])`` for diagonal ``W``."""
        w = np.asarray(weights, dtype=float)
        prod = float(np.sum(w * _pow(avals, s) * np.real(np.diag(self.b_pow(s)))))
        sand = float(np.sum(w * self.sandwich_pow_diag(avals, s)))
        return prod, sand


def _monotone_weights(f: ScalarFunction, lam: np.ndarray, increasing: bool, what: str):
    try:
        vals = np.asarray(f(lam), dtype=float)
    except DomainError as exc:
        raise HypothesisViolated(f"{what}: {exc}") from exc
    scale = max(1.0, float(np.max(np.abs(vals))))
    if np.any(vals < -1e-12 * scale):
        raise HypothesisViolated(f"{what} takes negative values on the spectrum")
    if not is_monotone_on(vals, lam, increasing=increasing):
        raise HypothesisViolated(
            f"{what} is not {'nondecreasing' if increasing else 'nonincreasing'} on the spectrum"
        )
    return vals


# --------------------------------------------------------------------------
# main results


def _weighted_araki_gap(ineq, f, a, b, s, pol, reverse) -> CheckResult:
    da = _psd(a, pol)
    fr = _Frame(da, b, pol)
    w = _monotone_weights(f, fr.lam, True, "f")
    prod, sand = fr.araki_sides(w, fr.lam, s)
    params = ExponentParams(s=s)
    if reverse:
        return _result(ineq, params, sand, prod, pol)
    return _result(ineq, params, prod, sand, pol)


def gap_main_direct(f: ScalarFunction, a, b, s: float, pol: TolerancePolicy = DEFAULT_POLICY) -> CheckResult:
    """``Tr[f(A) A^s B^s] <= Tr[f(A) (A^{1/2} B A^{1/2})^s]`` for ``s in [0, 1]``.

    ``f`` must be nonnegative and nondecreasing on the spectrum of ``A``.
    """
    _check_range("s", s, 0.0, 1.0)
    return _weighted_araki_gap(InequalityId.MAIN_DIRECT, f, a, b, s, pol, reverse=False)


def gap_s2(f: ScalarFunction, a, b, pol: TolerancePolicy = DEFAULT_POLICY) -> CheckResult:
    """Reverse direction at ``s = 2``."""
    return _weighted_araki_gap(InequalityId.S2, f, a, b, 2.0, pol, reverse=True)


def gap_conjecture1(f: ScalarFunction, a, b, s: float, pol: TolerancePolicy = DEFAULT_POLICY) -> CheckResult:
    """Conjectured reverse direction for ``s > 1``; a violation is a finding."""
    _check_range("s", s, 1.0, lo_open=True)
    return _weighted_araki_gap(InequalityId.CONJ1, f, a, b, float(s), pol, reverse=True)


def gap_main_converse(g: ScalarFunction, a, b, s: float, pol: TolerancePolicy = DEFAULT_POLICY) -> CheckResult:
    """``Tr[g(A) (A^{1/2}BA^{1/2})^s] <= Tr[g(A) A^s B^s]``.

    Requires ``x ↦ x^s g(x)`` nonnegative and nonincreasing on the spectrum.
    """
    _check_range("s", s, 0.0, 1.0)
    params = ExponentParams(s=s)
    da = _psd(a, pol)
    fr = _Frame(da, b, pol)
    try:
        gv = np.asarray(g(fr.lam), dtype=float)
    except DomainError as exc:
        if not fr.is_pd:
            return _degenerate(InequalityId.MAIN_CONVERSE, params, str(exc))
        raise HypothesisViolated(f"g: {exc}") from exc
    h = _pow(fr.lam, s) * gv
    scale = max(1.0, float(np.max(np.abs(h))))
    if np.any(h < -1e-12 * scale) or not is_monotone_on(h, fr.lam, increasing=False):
        raise HypothesisViolated("x^s g(x) is not nonnegative and nonincreasing on the spectrum")
    prod, sand = fr.araki_sides(gv, fr.lam, s)
    return _result(InequalityId.MAIN_CONVERSE, params, sand, prod, pol)


def gap_projector(
    a, b, k: int, s: float, pol: TolerancePolicy = DEFAULT_POLICY, single: bool = False
) -> CheckResult:
    """Weight ``Π_k`` (first ``k`` eigenprojections of ``A``).

    ``single=True`` uses the lone eigenprojection ``P_k`` instead; the
    inequality is not claimed there, so the verdict is informational.
    """
    _check_range("s", s, 0.0, 1.0)
    da = _psd(a, pol)
    n = da.dim
    _check_range("k", k, 1, n)
    fr = _Frame(da, b, pol)
    w = np.zeros(n)
    if single:
        w[k - 1] = 1.0
    else:
        w[:k] = 1.0
    prod, sand = fr.araki_sides(w, fr.lam, s)
    tied = da.tied_at(k) or (single and k > 1 and da.tied_at(k - 1))
    diag = {"tied_cut": float(tied), "single_eigenprojection": float(single)}
    return _result(
        InequalityId.PROJECTOR,
        ExponentParams(s=s, k=k),
        prod,
        sand,
        pol,
        diagnostics=diag,
        force=Verdict.DEGENERATE if tied else None,
        note="eigenvalue tie at the cut" if tied else "",
    )


def remark_instance():
    """The 2x2 pair on which a single eigenprojection breaks the inequality."""
    a = np.diag([2.0, 1.0]).astype(complex)
    b = np.ones((2, 2), dtype=complex)
    return a, b, 0.5


def gap_remark(pol: TolerancePolicy = DEFAULT_POLICY) -> dict:
    """Evaluate the single-projection counterexample and the two prefix variants."""
    a, b, s = remark_instance()
    return {
        "single_p2": gap_projector(a, b, 2, s, pol, single=True),
        "prefix_k1": gap_projector(a, b, 1, s, pol),
        "prefix_k2": gap_projector(a, b, 2, s, pol),
    }


@dataclass(frozen=True, eq=False)
class PinchedFamily:
    """``Π_k A + (λ_k − ε) Π_k^c`` built on the eigenbasis of ``A``."""

    base: SpectralDecomposition
    k: int
    epsilon: float = 0.0
    pol: TolerancePolicy = DEFAULT_POLICY

    def __post_init__(self):
        if not 1 <= self.k <= self.base.dim:
            raise ValueError(f"k must lie in 1..{self.base.dim}")
        lk = self.lambda_k
        if self.epsilon < 0 or (self.epsilon > 0 and not self.epsilon < lk):
            raise HypothesisViolated(f"epsilon={self.epsilon} must lie in (0, λ_k={lk})")

    @property
    def lambda_k(self) -> float:
        return float(self.base.clipped(self.pol)[self.k - 1])

    @property
    def eigenvalues(self) -> np.ndarray:
        lam = self.base.clipped(self.pol)
        out = lam.copy()
        out[self.k :] = self.lambda_k - self.epsilon
        return out

    @property
    def pinched(self) -> np.ndarray:
        return self.base.reconstruct(self.eigenvalues)

    def projector_weights(self) -> np.ndarray:
        w = np.zeros(self.base.dim)
        w[: self.k] = 1.0
        return w


def gap_pinch_lemma(a, b, k: int, s: float, pol: TolerancePolicy = DEFAULT_POLICY) -> CheckResult:
    """Raising the eigenvalues below ``λ_k`` to ``λ_k`` lowers ``Tr[Π_k (·)^s]``.

    Holds for ``s in [0, 1]``; the orientation flips for ``s in [1, 2]``.
    """
    _check_range("s", s, 0.0, 2.0)
    da = _psd(a, pol)
    fr = _Frame(da, b, pol)
    fam = PinchedFamily(da, k, 0.0, pol)
    w = fam.projector_weights()
    orig = float(np.sum(w * fr.sandwich_pow_diag(fr.lam, s)))
    pinched = float(np.sum(w * fr.sandwich_pow_diag(fam.eigenvalues, s)))
    params = ExponentParams(s=s, k=k)
    if s <= 1:
        return _result(InequalityId.PINCH, params, pinched, orig, pol)
    return _result(InequalityId.PINCH, params, orig, pinched, pol)


def operator_jensen_step(a, b, k: int, s: float, pol: TolerancePolicy = DEFAULT_POLICY) -> CheckResult:
    """Löwner-order step ``R (Ã^{1/2}BÃ^{1/2})^s R <= (A^{1/2}BA^{1/2})^s``.

    ``R = (A Ã_k^{-1})^{1/2}`` is a contraction. For ``s in (1, 2]`` the
    order reverses. ``gap`` is the smallest eigenvalue of the difference;
    ``lhs``/``rhs`` carry the spectral norms of the two sides.
    """
    _check_range("s", s, 0.0, 2.0)
    params = ExponentParams(s=s, k=k)
    da = _psd(a, pol)
    fr = _Frame(da, b, pol)
    fam = PinchedFamily(da, k, 0.0, pol)
    at = fam.eigenvalues
    if not fam.lambda_k > 0:
        return _degenerate(InequalityId.JENSEN_STEP, params, "Ã_k is singular")
    rdiag = np.sqrt(fr.lam / at)
    inner = fr.sandwich_pow(at, s)
    m1 = as_hermitian(rdiag[:, None] * inner * rdiag[None, :])
    m2 = as_hermitian(fr.sandwich_pow(fr.lam, s))
    diff = m2 - m1 if s <= 1 else m1 - m2
    gap = float(hermitian_eigenvalues(diff)[-1])
    n1 = float(np.linalg.norm(m1, 2))
    n2 = float(np.linalg.norm(m2, 2))
    r_max = float(rdiag.max())
    diag = {"r_max": r_max, "contraction": float(r_max <= 1 + 1e-12)}
    force = Verdict.VIOLATED if r_max > 1 + 1e-12 else None
    return _result(InequalityId.JENSEN_STEP, params, n1, n2, pol, gap=gap, diagnostics=diag, force=force)


def gap_lemma2(a, b, s: float, t: float, pol: TolerancePolicy = DEFAULT_POLICY) -> CheckResult:
    """``Tr[A^t (A^{1/2}BA^{1/2})^s] <= Tr[A^t A^s B^s]`` for ``t <= −s``."""
    _check_range("s", s, 0.0, 1.0)
    _check_range("t", t, hi=-s)
    params = ExponentParams(s=s, t=t)
    da = _psd(a, pol)
    fr = _Frame(da, b, pol)
    if t != 0 and not fr.is_pd:
        return _degenerate(InequalityId.LEMMA2, params, "negative power of a singular A")
    w = _pow(fr.lam, t)
    prod, sand = fr.araki_sides(w, fr.lam, s)
    return _result(InequalityId.LEMMA2, params, sand, prod, pol)


def gap_gt_limit(
    a, b, k: int, s: float, t: float, epsilon: float, pol: TolerancePolicy = DEFAULT_POLICY
) -> CheckResult:
    """Weight ``g_t(Ã_{k,ε})`` with ``g_t(x) = 1 − (x/(λ_k − ε))^t`` on the pinched pair.

    ``diagnostics['weight_to_projector']`` is ``‖g_t(Ã_{k,ε}) − Π_k‖_F``, which
    tends to 0 as ``t → −∞``.
    """
    _check_range("s", s, 0.0, 1.0)
    _check_range("t", t, hi=-s)
    da = _psd(a, pol)
    fam = PinchedFamily(da, k, float(epsilon), pol)
    if not epsilon > 0:
        raise HypothesisViolated("epsilon must be positive")
    fr = _Frame(da, b, pol)
    at = fam.eigenvalues
    base = fam.lambda_k - epsilon
    w = 1.0 - _pow(at / base, t)
    dist = float(np.linalg.norm(w - fam.projector_weights()))
    prod, sand = fr.araki_sides(w, at, s)
    return _result(
        InequalityId.GT_LIMIT,
        ExponentParams(s=s, t=t, k=k, epsilon=float(epsilon)),
        prod,
        sand,
        pol,
        diagnostics={"weight_to_projector": dist},
    )


def gap_lemma4(a, b, k: int, pol: TolerancePolicy = DEFAULT_POLICY) -> CheckResult:
    """``Tr[Π_k (Ã^{1/2}BÃ^{1/2})^2] <= Tr[Π_k Ã^2 B^2]`` with the proof chain exposed.

    ``subgap_pinch`` is the step using ``λ_k Π_k <= Π_k Ã_k Π_k`` and
    ``subgap_alt`` the 2-power trace inequality on the compressed blocks.
    """
    da = _psd(a, pol)
    fr = _Frame(da, b, pol)
    fam = PinchedFamily(da, k, 0.0, pol)
    at = fam.eigenvalues
    lk = fam.lambda_k
    n = da.dim
    pi = np.zeros(n)
    pi[:k] = 1.0
    bm = fr.b
    # everything below is in the eigenbasis of A, where Π and Ã are diagonal
    dpi = pi * at
    bc = bm * (1.0 - pi)[None, :]  # B Π^c
    lhs = float(np.real(np.trace(fr.sandwich_pow(at, 2.0) * pi[:, None])))
    pbp = bm * pi[:, None] * pi[None, :]
    cm = dpi[:, None] * pbp  # ΠÃΠ ΠBΠ
    first = float(np.real(np.trace(cm @ cm)))
    alt_rhs = float(np.real(np.trace((dpi**2)[:, None] * (pbp @ pbp))))
    bcb = bc @ bm  # B Π^c B
    second_low = float(lk * np.real(np.sum(dpi * np.diag(bcb))))
    second_up = float(np.real(np.sum(dpi**2 * np.diag(bcb))))
    rhs = float(np.sum(pi * at**2 * np.real(np.diag(fr.b_pow(2.0)))))
    sub_pinch = second_up - second_low
    sub_alt = alt_rhs - first
    residual = (rhs - lhs) - (sub_pinch + sub_alt)
    tol_p = pol.threshold(second_up, second_low)
    tol_a = pol.threshold(alt_rhs, first)
    ok_subs = sub_pinch >= -tol_p and sub_alt >= -tol_a
    diag = {
        "subgap_pinch": sub_pinch,
        "subgap_alt": sub_alt,
        "chain_residual": residual,
    }
    res = _result(InequalityId.LEMMA4, ExponentParams(k=k), lhs, rhs, pol, diagnostics=diag)
    if res.holds and not ok_subs:
        res = _result(
            InequalityId.LEMMA4, ExponentParams(k=k), lhs, rhs, pol, diagnostics=diag, force=Verdict.VIOLATED
        )
    return res


def gap_conjecture2(a, b, p: float, q: float, r: float, pol: TolerancePolicy = DEFAULT_POLICY) -> CheckResult:
    """Conjectured ``Tr[A^r (A^{p/2}B^pA^{p/2})^{q/p}] <= Tr[A^{r+q} B^q]`` for ``0 < p <= q``, ``r >= 0``."""
    _check_range("p", p, 0.0, lo_open=True)
    _check_range("q", q, p)
    _check_range("r", r, 0.0)
    da = _psd(a, pol)
    fr = _Frame(da, b, pol)
    lhs = float(np.sum(_pow(fr.lam, r + q) * np.real(np.diag(fr.b_pow(q)))))
    diag_pow = np.real(np.diag(fr.sandwich_pow(_pow(fr.lam, p), q / p, bpow=p)))
    rhs = float(np.sum(_pow(fr.lam, r) * diag_pow))
    return _result(InequalityId.CONJ2, ExponentParams(p=p, q=q, r=r), rhs, lhs, pol)


# --------------------------------------------------------------------------
# classical statements


def _gt(h, k, pol):
    h = as_hermitian(h)
    k = as_hermitian(k)
    lhs = float(np.sum(np.exp(np.linalg.eigvalsh(h + k))))
    rhs = trace_product(matrix_exp(h), matrix_exp(k))
    return _result(InequalityId.GT, ExponentParams(), lhs, rhs, pol)


def _alt(a, b, r, pol):
    _check_range("r", r, 0.0)
    fr = _Frame(_psd(a, pol), b, pol)
    params = ExponentParams(r=r)
    sand = float(np.sum(fr.sandwich_pow_diag(fr.lam, r)))
    prod = float(np.sum(_pow(fr.lam, r) * np.real(np.diag(fr.b_pow(r)))))
    if r >= 1:
        return _result(InequalityId.ALT, params, sand, prod, pol)
    return _result(InequalityId.ALT, params, prod, sand, pol)


def _hp93(a, b, p, pol):
    _check_range("p", p, 0.0, lo_open=True)
    params = ExponentParams(p=p)
    da = _psd(a, pol)
    fr = _Frame(da, b, pol)
    if not fr.is_pd or classify_psd(fr.db, pol) is not PSDClass.PD:
        return _degenerate(InequalityId.HP93, params, "logarithm of a singular matrix")
    lam = fr.lam
    lhs = float(np.sum(lam * np.log(lam)) + np.sum(lam * np.real(np.diag(matrix_log(fr.db, pol)))))
    inner = fr.graded(lam**p, bpow=p)
    if not np.all(inner.values > 0):
        raise SingularLog("sandwich lost positive definiteness")
    rhs = float(np.sum(lam * np.real(np.diag(inner.map(np.log).matrix())))) / p
    return _result(InequalityId.HP93, params, lhs, rhs, pol)


def _blp_trace(a, b, s, t, pol):
    _check_range("s", s, 0.0, 1.0)
    _check_range("t", t, 0.0)
    fr = _Frame(_psd(a, pol), b, pol)
    prod, sand = fr.araki_sides(_pow(fr.lam, t), fr.lam, s)
    return _result(InequalityId.BLP_TRACE, ExponentParams(s=s, t=t), prod, sand, pol)


def _param(params: ExponentParams, name: str) -> float:
    v = getattr(params, name)
    if v is None:
        raise HypothesisViolated(f"parameter {name} is required")
    return float(v)


def gap_classical(ineq, x, y, params: ExponentParams, pol: TolerancePolicy = DEFAULT_POLICY) -> CheckResult:
    """Trace form of a classical statement.

    ``x, y`` are ``H, K`` for ``gt`` and ``A, B`` otherwise. Supported ids:
    ``gt``, ``alt``, ``hp93``, ``blp_trace``.
    """
    ineq = InequalityId(ineq)
    try:
        if ineq is InequalityId.GT:
            return _gt(x, y, pol)
        if ineq is InequalityId.ALT:
            return _alt(x, y, _param(params, "r"), pol)
        if ineq is InequalityId.HP93:
            return _hp93(x, y, _param(params, "p"), pol)
        if ineq is InequalityId.BLP_TRACE:
            return _blp_trace(x, y, _param(params, "s"), _param(params, "t"), pol)
    except (DomainError,) as exc:
        if isinstance(exc, NotPSD):
            raise HypothesisViolated(str(exc)) from exc
        return _degenerate(ineq, params, str(exc))
    raise ValueError(f"{ineq.value} has no trace form here")


def _gblp_expected(p, q, r):
    if 0 < q <= p and r >= 0:
        return MajorizationVerdict.HOLDS
    if (0 <= r <= p <= q and p > 0) or (0 <= q < p and -r >= q):
        return MajorizationVerdict.REVERSE_HOLDS
    raise HypothesisViolated(f"(p, q, r) = ({p}, {q}, {r}) is outside every stated region")


def _ma12_expected(s):
    if s < 0:
        raise HypothesisViolated("s must be nonnegative")
    # at s = 1 and s = 2 both orientations hold; report the forward one
    if 1 < s < 2:
        return MajorizationVerdict.REVERSE_HOLDS
    return MajorizationVerdict.HOLDS


def lm_classical(ineq, x, y, params: ExponentParams, pol: TolerancePolicy = DEFAULT_POLICY) -> LogMajorizationReport:
    """Log-majorization form of a classical statement.

    Spectra are always compared as (left side, right side) of the displayed
    relation; ``expected`` records whether the statement claims ``≺`` or
    ``≻`` for the given parameters.
    """
    ineq = InequalityId(ineq)
    H = MajorizationVerdict.HOLDS
    R = MajorizationVerdict.REVERSE_HOLDS
    if ineq in (InequalityId.LIE_TROTTER, InequalityId.AH94):
        p = _param(params, "p")
        _check_range("p", p, 0.0, lo_open=True)
        h, k = as_hermitian(x), as_hermitian(y)
        if ineq is InequalityId.LIE_TROTTER:
            ex = np.exp(hermitian_eigenvalues(h + k))
            dh, kf = _exp_frame(h, k)
            ey = kf.power(p).sandwiched(np.exp(p * dh.eigenvalues / 2)).spectrum() ** (1 / p)
        else:
            alpha = _param(params, "alpha")
            _check_range("alpha", alpha, 0.0, 1.0)
            dk, hf = _exp_frame(k, h)
            z = hf.power(p).sandwiched(np.exp(-p * dk.eigenvalues / 2))
            ex = z.power(alpha).sandwiched(np.exp(p * dk.eigenvalues / 2)).spectrum() ** (1 / p)
            ey = np.exp(hermitian_eigenvalues(alpha * h + (1 - alpha) * k))
        expected = H
    else:
        fr = _Frame(_psd(x, pol), y, pol)
        lam = fr.lam
        if ineq is InequalityId.ALT:
            r = _param(params, "r")
            _check_range("r", r, 0.0)
            ex = _pow(fr.graded(lam).spectrum(), r)
            ey = fr.graded(_pow(lam, r), bpow=r).spectrum()
            expected = H if r >= 1 else R
        elif ineq is InequalityId.BLP:
            s = _param(params, "s")
            t = _param(params, "t")
            _check_range("s", s, 0.0, 1.0, lo_open=True)
            _check_range("t", t, 0.0, lo_open=True)
            ex = fr.graded(_pow(lam, t + s), bpow=s).spectrum()
            ey = fr.graded(lam).power(s).sandwiched(np.sqrt(_pow(lam, t))).spectrum()
            expected = H
        elif ineq is InequalityId.GBLP:
            p, q, r = (_param(params, n) for n in ("p", "q", "r"))
            expected = _gblp_expected(p, q, r)
            ex = fr.graded(fr.a_pow(r + q), bpow=q).spectrum()
            inner = fr.graded(fr.a_pow(p), bpow=p).power(q / p)
            ey = inner.sandwiched(np.sqrt(fr.a_pow(r))).spectrum()
        elif ineq is InequalityId.MA12:
            s = _param(params, "s")
            expected = _ma12_expected(s)
            inner = fr.graded(fr.a_pow(-1.0)).power(s)
            ex = inner.sandwiched(np.sqrt(lam)).spectrum()
            ey = fr.graded(fr.a_pow(1.0 - s), bpow=s).spectrum()
        else:
            raise ValueError(f"{ineq.value} has no log-majorization form here")
    rep = check_log_majorization(np.sort(ex)[::-1], np.sort(ey)[::-1], pol, floor=0.0)
    return replace(rep, expected=expected)


def _exp_frame(h, k):
    """Eigenpairs of ``h`` and ``exp(k)`` in the eigenbasis of ``h``."""
    dh = decompose(h)
    u = dh.eigenvectors
    dk = decompose(as_hermitian(u.conj().T @ k @ u))
    return dh, from_eig(np.exp(dk.eigenvalues), dk.eigenvectors)


def lm_check(ineq, x, y, params: ExponentParams, pol: TolerancePolicy = DEFAULT_POLICY) -> CheckResult:
    """:func:`lm_classical` folded into a :class:`CheckResult`.

    ``gap`` is the smallest log-prefix slack in the claimed orientation,
    replaced by ``−|log det X − log det Y|`` when determinants disagree. Spectra
    that need a missing inverse come back Degenerate.
    """
    ineq = InequalityId(ineq)
    try:
        rep = lm_classical(ineq, x, y, params, pol)
    except DomainError as exc:
        if isinstance(exc, NotPSD):
            raise HypothesisViolated(str(exc)) from exc
        return _degenerate(ineq, params, str(exc))
    if rep.verdict is MajorizationVerdict.DEGENERATE:
        return _degenerate(ineq, params, "zero spectra")
    gap = rep.margin()
    if rep.det_equal is False:
        gap = min(gap, -abs(rep.det_log_diff))
    verdict = Verdict.HOLDS if rep.claim_holds else Verdict.VIOLATED
    diag = {
        "weak_holds": float(rep.weak_holds),
        "reverse_weak_holds": float(rep.reverse_weak_holds),
        "det_checked": float(rep.det_equal is not None),
        "det_log_diff": rep.det_log_diff,
        "expected_reverse": float(rep.expected is MajorizationVerdict.REVERSE_HOLDS),
    }
    return _result(
        ineq,
        params,
        rep.prefix_log_lhs[-1],
        rep.prefix_log_rhs[-1],
        pol,
        gap=gap,
        diagnostics=diag,
        tol=rep.tol,
        force=verdict,
    )
