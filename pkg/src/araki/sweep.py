"""Deterministic sweeps of the inequality predicates over sampled instances.

Instance ``i`` of a sweep with master seed ``m`` is drawn from
``rng_for(m, i)`` alone, so sweeps can be split across workers or resumed
at any ordinal and still reproduce the same records.
"""
from __future__ import annotations

import itertools
import math
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable, Iterable

import numpy as np

from . import functions as fn
from . import inequalities as iq
from .divergences import ordering_report
from .errors import ArakiError, HypothesisViolated
from .hermitian import DEFAULT_POLICY, TolerancePolicy
from .inequalities import CheckResult, ExponentParams, InequalityId, Verdict
from .sampling import SamplerSpec, random_hermitian, rng_for, sample

__all__ = [
    "Instance",
    "Target",
    "TARGETS",
    "SweepConfig",
    "SweepSummary",
    "SearchRecord",
    "make_instance",
    "evaluate_instance",
    "run_sweep",
    "format_grid",
    "parse_grid",
]


@dataclass(frozen=True, eq=False)
class Instance:
    ordinal: int
    dim: int
    family: str
    seed_path: str
    a: np.ndarray
    b: np.ndarray
    rng: np.random.Generator = field(repr=False)


@dataclass(frozen=True)
class Target:
    name: str
    input_kind: str  # "psd", "hermitian" or "density"
    families: tuple
    grid: tuple
    evaluate: Callable
    conjecture: bool = False


@dataclass(frozen=True)
class SearchRecord:
    """One evaluated check together with where it came from."""

    target: str
    params: dict
    dim: int
    family: str
    seed_path: str
    ordinal: int
    lhs: float
    rhs: float
    gap: float
    rel_gap: float
    verdict: str
    diagnostics: dict = field(default_factory=dict)
    note: str = ""
    payload: dict | None = None

    def sort_key(self):
        return (self.gap, self.ordinal, self.seed_path, sorted(self.params.items()))

    def to_dict(self) -> dict:
        d = {
            "inequality_id": self.target,
            "params": self.params,
            "dim": self.dim,
            "family": self.family,
            "seed_path": self.seed_path,
            "ordinal": self.ordinal,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "gap": self.gap,
            "rel_gap": self.rel_gap,
            "verdict": self.verdict,
            "diagnostics": self.diagnostics,
        }
        if self.note:
            d["note"] = self.note
        if self.payload is not None:
            d["payload"] = self.payload
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "SearchRecord":
        return cls(
            target=d["inequality_id"],
            params=dict(d["params"]),
            dim=int(d["dim"]),
            family=d["family"],
            seed_path=d["seed_path"],
            ordinal=int(d["ordinal"]),
            lhs=float(d["lhs"]),
            rhs=float(d["rhs"]),
            gap=float(d["gap"]),
            rel_gap=float(d["rel_gap"]),
            verdict=d["verdict"],
            diagnostics=dict(d.get("diagnostics", {})),
            note=d.get("note", ""),
            payload=d.get("payload"),
        )


def record_from_result(inst: Instance, res: CheckResult, payload=None, note_prefix="") -> SearchRecord:
    note = res.note if not note_prefix else f"{note_prefix}{res.note}"
    params = res.params.to_dict()
    return SearchRecord(
        target=res.id_str,
        params=params,
        dim=inst.dim,
        family=inst.family,
        seed_path=inst.seed_path,
        ordinal=inst.ordinal,
        lhs=res.lhs,
        rhs=res.rhs,
        gap=res.gap,
        rel_gap=res.rel_gap,
        verdict=res.verdict.value,
        diagnostics=dict(res.diagnostics),
        note=note,
        payload=payload,
    )


# --------------------------------------------------------------------------
# instances

#: family used for ``B`` when ``A`` comes from a structured family
_PARTNER = {
    "wishart": "wishart",
    "density": "density",
    "near_singular": "near_singular",
    "spiked_diagonal": "wishart",
    "degenerate_spectrum": "wishart",
}


def make_instance(seed: int, ordinal: int, dims, families, input_kind: str = "psd") -> Instance:
    dims = tuple(dims)
    families = tuple(families)
    dim = int(dims[ordinal % len(dims)])
    family = families[(ordinal // len(dims)) % len(families)]
    rng = rng_for(seed, ordinal)
    sa, sb = (int(x) for x in rng.integers(0, 2**63, size=2))
    if input_kind == "hermitian":
        sub = rng_for(sa)
        a = random_hermitian(sub, dim)
        b = random_hermitian(sub, dim)
        family = "gue"
    elif family == "commuting_pair":
        a, b = sample(SamplerSpec(dim, family, sa))
    else:
        a = sample(SamplerSpec(dim, family, sa))
        partner = "density" if input_kind == "density" else _PARTNER[family]
        b = sample(SamplerSpec(dim, partner, sb))
    return Instance(ordinal, dim, family, f"{seed}/{ordinal}", a, b, rng)


def injected_instance(ordinal: int, a, b, label: str = "injected") -> Instance:
    a = np.asarray(a, dtype=complex)
    return Instance(ordinal, a.shape[0], label, f"{label}/{ordinal}", a, np.asarray(b, dtype=complex), rng_for(0, ordinal))


# --------------------------------------------------------------------------
# function families


def _spectrum(a):
    return np.linalg.eigvalsh(a)


def random_step(rng, lam, n_steps=None, reverse=False):
    lo, hi = float(np.min(lam)), float(np.max(lam))
    n_steps = int(rng.integers(1, 4)) if n_steps is None else n_steps
    th = rng.uniform(lo, hi, size=n_steps) if hi > lo else np.full(n_steps, lo)
    w = rng.uniform(0.1, 1.0, size=n_steps)
    steps = tuple(zip(th.tolist(), w.tolist()))
    return fn.ReverseStep(steps) if reverse else fn.StepCombination(steps)


def direct_family(inst: Instance) -> list[fn.ScalarFunction]:
    """Nonnegative nondecreasing weights: powers, exp, three random step functions."""
    lam = _spectrum(inst.a)
    fs = [fn.Power(t) for t in (0.0, 0.5, 1.0, 2.0)] + [fn.Exp()]
    fs += [random_step(inst.rng, lam) for _ in range(3)]
    return fs


def converse_family(inst: Instance, s: float, steps) -> list[fn.ScalarFunction]:
    """Weights ``g`` with ``x^s g(x)`` nonnegative and nonincreasing."""
    base = fn.Power(-s)
    gs = [base, fn.Power(-s - 0.5), fn.Power(-s - 1.0), fn.Product(base, fn.Exp(-1.0))]
    gs += [fn.Product(base, st) for st in steps]
    return gs


# --------------------------------------------------------------------------
# per-target evaluators; each returns a list of CheckResult for one instance


def _grid_points(grid):
    return [dict(p) for p in grid]


def _eval_main_direct(inst, grid, pol):
    out = []
    fs = direct_family(inst)
    for pt in grid:
        for f in fs:
            out.append(_tag(iq.gap_main_direct(f, inst.a, inst.b, pt["s"], pol), f))
    return out


def _eval_converse(inst, grid, pol):
    lam = _spectrum(inst.a)
    steps = [random_step(inst.rng, lam, reverse=True) for _ in range(3)]
    out = []
    for pt in grid:
        for g in converse_family(inst, pt["s"], steps):
            out.append(_tag(iq.gap_main_converse(g, inst.a, inst.b, pt["s"], pol), g))
    return out


def _eval_projector(inst, grid, pol):
    return [iq.gap_projector(inst.a, inst.b, k, pt["s"], pol) for pt in grid for k in range(1, inst.dim + 1)]


def _eval_pinch(inst, grid, pol):
    return [iq.gap_pinch_lemma(inst.a, inst.b, k, pt["s"], pol) for pt in grid for k in range(1, inst.dim + 1)]


def _eval_jensen(inst, grid, pol):
    return [iq.operator_jensen_step(inst.a, inst.b, k, pt["s"], pol) for pt in grid for k in range(1, inst.dim + 1)]


def _eval_lemma2(inst, grid, pol):
    out = []
    for pt in grid:
        s = pt["s"]
        for t in pt.get("t_list", (-s, -1.0, -2.0)):
            if t <= -s:
                out.append(iq.gap_lemma2(inst.a, inst.b, s, t, pol))
    return out


def _eval_gt_limit(inst, grid, pol):
    lam = np.sort(np.clip(_spectrum(inst.a), 0, None))[::-1]
    out = []
    for pt in grid:
        s = pt["s"]
        for k in range(1, inst.dim + 1):
            lk = lam[k - 1]
            if not lk > 0:
                continue
            for t in (-s, -1.0 - s, -10.0, -50.0):
                out.append(iq.gap_gt_limit(inst.a, inst.b, k, s, t, lk / 2, pol))
    return out


def _eval_s2(inst, grid, pol):
    return [_tag(iq.gap_s2(f, inst.a, inst.b, pol), f) for f in direct_family(inst)]


def _eval_lemma4(inst, grid, pol):
    return [iq.gap_lemma4(inst.a, inst.b, k, pol) for k in range(1, inst.dim + 1)]


def conj1_family(inst: Instance) -> list[fn.ScalarFunction]:
    lam = np.sort(_spectrum(inst.a))[::-1]
    fs = [fn.Power(1.0), fn.Exp(), random_step(inst.rng, lam)]
    k = int(inst.rng.integers(1, inst.dim + 1))
    # the prefix projector Π_k as a step function
    th = lam[k - 1] - 0.5 * (lam[k - 1] - lam[k]) if k < inst.dim else lam[-1] - 1.0
    fs.append(fn.indicator(float(th)))
    return fs


def _eval_conj1(inst, grid, pol):
    fs = conj1_family(inst)
    return [_tag(iq.gap_conjecture1(f, inst.a, inst.b, pt["s"], pol), f) for pt in grid for f in fs]


def _eval_conj2(inst, grid, pol):
    return [iq.gap_conjecture2(inst.a, inst.b, pt["p"], pt["q"], pt["r"], pol) for pt in grid]


def _eval_gt(inst, grid, pol):
    return [iq.gap_classical(InequalityId.GT, inst.a, inst.b, ExponentParams(), pol)]


def _eval_alt(inst, grid, pol):
    out = []
    for pt in grid:
        prm = ExponentParams(r=pt["r"])
        out.append(iq.gap_classical(InequalityId.ALT, inst.a, inst.b, prm, pol))
        out.append(iq.lm_check(InequalityId.ALT, inst.a, inst.b, prm, pol))
    return out


def _lm(ineq):
    def run(inst, grid, pol):
        return [iq.lm_check(ineq, inst.a, inst.b, ExponentParams(**pt), pol) for pt in grid]

    return run


def _eval_blp_trace(inst, grid, pol):
    return [iq.gap_classical(InequalityId.BLP_TRACE, inst.a, inst.b, ExponentParams(**pt), pol) for pt in grid]


def _eval_hp93(inst, grid, pol):
    return [iq.gap_classical(InequalityId.HP93, inst.a, inst.b, ExponentParams(**pt), pol) for pt in grid]


def _tag(res: CheckResult, f: fn.ScalarFunction) -> CheckResult:
    return replace(res, note=res.note or f"f={_fdesc(f)}", weight=f)


def _fdesc(f) -> str:
    d = f.to_dict()
    kind = d.pop("kind")
    if kind == "product":
        return f"{_fdesc(f.left)}*{_fdesc(f.right)}"
    if kind in ("step", "reverse_step"):
        return f"{kind}[{len(d['steps'])}]"
    return kind + "(" + ",".join(f"{k}={v:g}" for k, v in d.items()) + ")"


def _s_grid(lo, hi, n):
    return tuple({"s": round(float(x), 12)} for x in np.linspace(lo, hi, n))


S01 = _s_grid(0.0, 1.0, 11)
S02 = _s_grid(0.0, 2.0, 9)

PSD_FAMILIES = ("wishart", "near_singular", "spiked_diagonal", "degenerate_spectrum", "commuting_pair")
PD_FAMILIES = ("wishart", "spiked_diagonal", "degenerate_spectrum")
SEARCH_FAMILIES = ("wishart", "near_singular", "spiked_diagonal", "degenerate_spectrum")

GBLP_GRID = (
    # forward: 0 < q <= p, r >= 0
    {"p": 1.0, "q": 0.5, "r": 0.0},
    {"p": 1.0, "q": 0.5, "r": 1.0},
    {"p": 2.0, "q": 1.0, "r": 0.5},
    {"p": 1.0, "q": 1.0, "r": 2.0},
    # reverse: 0 <= r <= p <= q
    {"p": 1.0, "q": 2.0, "r": 0.5},
    {"p": 1.0, "q": 2.0, "r": 1.0},
    {"p": 0.5, "q": 1.0, "r": 0.25},
    # reverse: 0 <= q < p, -r >= q
    {"p": 1.0, "q": 0.5, "r": -0.5},
    {"p": 2.0, "q": 1.0, "r": -1.5},
    {"p": 1.0, "q": 0.5, "r": -1.0},
)

CONJ1_GRID = tuple({"s": s} for s in (1.25, 1.5, 2.0, 2.5, 3.0, 4.0))
CONJ2_GRID = tuple(
    {"p": p, "q": q, "r": r}
    for p, q in itertools.product((0.5, 1.0, 2.0), repeat=2)
    if p <= q
    for r in (0.0, 0.5, 1.0)
)

TARGETS: dict[str, Target] = {
    t.name: t
    for t in (
        Target("main_direct", "psd", PSD_FAMILIES, S01, _eval_main_direct),
        Target("main_converse", "psd", PSD_FAMILIES, S01, _eval_converse),
        Target("projector", "psd", PSD_FAMILIES, S01, _eval_projector),
        Target("pinch", "psd", PSD_FAMILIES, S02, _eval_pinch),
        Target("jensen_step", "psd", PD_FAMILIES + ("near_singular",), S02, _eval_jensen),
        Target("lemma2", "psd", PSD_FAMILIES, S01, _eval_lemma2),
        Target("gt_limit", "psd", PSD_FAMILIES, S01, _eval_gt_limit),
        Target("s2", "psd", PSD_FAMILIES, ({},), _eval_s2),
        Target("lemma4", "psd", PSD_FAMILIES, ({},), _eval_lemma4),
        Target("gt", "hermitian", ("gue",), ({},), _eval_gt),
        Target("alt", "psd", PD_FAMILIES, tuple({"r": r} for r in (0.3, 0.5, 1.0, 2.0, 3.0)), _eval_alt),
        Target("lie_trotter", "hermitian", ("gue",), tuple({"p": p} for p in (0.5, 1.0, 2.0)), _lm(InequalityId.LIE_TROTTER)),
        Target(
            "ah94",
            "hermitian",
            ("gue",),
            tuple({"alpha": a, "p": p} for a in (0.3, 0.7) for p in (0.5, 1.0)),
            _lm(InequalityId.AH94),
        ),
        Target(
            "blp",
            "psd",
            PD_FAMILIES,
            tuple({"s": s, "t": t} for s in (0.25, 0.5, 1.0) for t in (0.5, 1.0, 2.0)),
            _lm(InequalityId.BLP),
        ),
        Target(
            "blp_trace",
            "psd",
            PSD_FAMILIES,
            tuple({"s": s["s"], "t": t} for s in S01 for t in (0.0, 0.5, 1.0, 2.0)),
            _eval_blp_trace,
        ),
        Target("gblp", "psd", PD_FAMILIES, GBLP_GRID, _lm(InequalityId.GBLP)),
        Target("hp93", "psd", PD_FAMILIES, tuple({"p": p} for p in (0.5, 1.0, 2.0)), _eval_hp93),
        Target("ma12", "psd", PD_FAMILIES, tuple({"s": s} for s in (0.25, 0.5, 1.2, 1.8, 2.5)), _lm(InequalityId.MA12)),
        Target("conj1", "psd", SEARCH_FAMILIES, CONJ1_GRID, _eval_conj1, conjecture=True),
        Target("conj2", "psd", SEARCH_FAMILIES, CONJ2_GRID, _eval_conj2, conjecture=True),
    )
}


def _eval_divergence(inst, grid, pol):
    alphas = [pt["alpha"] for pt in grid]
    return ordering_report(inst.a, inst.b, alphas, pol)


TARGETS["divergence"] = Target(
    "divergence",
    "density",
    ("density",),
    tuple({"alpha": round(a, 12)} for a in list(np.linspace(0.1, 0.9, 9)) + [2.0, 3.0]),
    _eval_divergence,
)


def evaluate_instance(target: Target, inst: Instance, grid, pol: TolerancePolicy) -> list[CheckResult]:
    """Run every check of ``target`` on one instance; errors become Degenerate results."""
    try:
        return target.evaluate(inst, _grid_points(grid), pol)
    except (ArakiError, np.linalg.LinAlgError) as exc:
        if isinstance(exc, HypothesisViolated):
            raise
        nan = float("nan")
        return [CheckResult(target.name, ExponentParams(), nan, nan, nan, nan, Verdict.DEGENERATE, {}, str(exc))]


# --------------------------------------------------------------------------
# sweeps


@dataclass(frozen=True)
class SweepConfig:
    target: str
    dims: tuple = (2, 3)
    budget: int = 100
    seed: int = 0
    grid: tuple | None = None
    families: tuple | None = None
    keep: int = 10
    keep_payload: bool = False

    def __post_init__(self):
        if self.target not in TARGETS:
            raise ValueError(f"unknown target {self.target!r}")
        if self.budget < 1:
            raise ValueError("budget must be at least 1")
        if not self.dims or min(self.dims) < 1:
            raise ValueError("dims must be positive")

    @property
    def spec(self) -> Target:
        return TARGETS[self.target]

    def resolved_grid(self) -> tuple:
        return tuple(self.spec.grid if self.grid is None else self.grid)

    def resolved_families(self) -> tuple:
        return tuple(self.spec.families if self.families is None else self.families)


@dataclass
class SweepSummary:
    target: str
    n_instances: int = 0
    n_checks: int = 0
    counts: Counter = field(default_factory=Counter)
    near_violations: int = 0
    degenerate_reasons: Counter = field(default_factory=Counter)
    lowest: list = field(default_factory=list)
    violations: list = field(default_factory=list)
    min_rel_gap: float = math.inf

    @property
    def holds(self) -> int:
        return self.counts["Holds"]

    @property
    def violated(self) -> int:
        return self.counts["Violated"]

    @property
    def degenerate(self) -> int:
        return self.counts["Degenerate"]

    def to_dict(self) -> dict:
        return {
            "target": self.target,
            "instances": self.n_instances,
            "checks": self.n_checks,
            "holds": self.holds,
            "violated": self.violated,
            "degenerate": self.degenerate,
            "near_violations": self.near_violations,
            "min_gap": self.lowest[0].gap if self.lowest else float("nan"),
            "min_rel_gap": self.min_rel_gap if self.min_rel_gap < math.inf else float("nan"),
            "degenerate_reasons": dict(sorted(self.degenerate_reasons.items())),
        }


def _payload(inst: Instance, res: CheckResult, f=None) -> dict:
    from .io import matrix_to_rows

    d = {"A": matrix_to_rows(inst.a), "B": matrix_to_rows(inst.b)}
    f = res.weight if f is None else f
    if f is not None:
        d["f"] = f.to_dict()
    return d


def _chunk_results(args):
    cfg, start, stop, pol = args
    spec = cfg.spec
    grid = cfg.resolved_grid()
    fams = cfg.resolved_families()
    out = []
    for i in range(start, stop):
        inst = make_instance(cfg.seed, i, cfg.dims, fams, spec.input_kind)
        res = evaluate_instance(spec, inst, grid, pol)
        out.append((inst, res))
    return out


def iter_instances(cfg: SweepConfig, pol: TolerancePolicy, start: int = 0, stop: int | None = None, workers: int = 1, chunk: int = 50):
    """Yield ``(instance, results)`` in ordinal order."""
    stop = cfg.budget if stop is None else stop
    bounds = [(a, min(a + chunk, stop)) for a in range(start, stop, chunk)]
    if workers <= 1:
        for a, b in bounds:
            yield from _chunk_results((cfg, a, b, pol))
        return
    with ProcessPoolExecutor(max_workers=workers) as ex:
        for part in ex.map(_chunk_results, [(cfg, a, b, pol) for a, b in bounds]):
            yield from part


class _Accumulator:
    """Counts plus a bounded, deterministically ordered set of lowest-gap records."""

    def __init__(self, summary: SweepSummary, keep: int, pol: TolerancePolicy, keep_payload: bool, candidate_filter=None):
        self.s = summary
        self.keep = keep
        self.pol = pol
        self.keep_payload = keep_payload
        self.candidate_filter = candidate_filter

    def add(self, inst: Instance, results: Iterable[CheckResult], payload_fn=None):
        s = self.s
        s.n_instances += 1
        for res in results:
            s.n_checks += 1
            s.counts[res.verdict.value] += 1
            if res.verdict is Verdict.DEGENERATE:
                s.degenerate_reasons[_reason(res.note)] += 1
                continue
            tol = res.diagnostics.get("tol", self.pol.threshold(res.lhs, res.rhs))
            if res.verdict is Verdict.HOLDS and res.gap < 0 and res.gap > -10 * tol:
                s.near_violations += 1
            if res.verdict is Verdict.VIOLATED and len(s.violations) < self.keep:
                s.violations.append(record_from_result(inst, res, _payload(inst, res)))
            if not math.isfinite(res.gap):
                continue
            if math.isfinite(res.rel_gap):
                s.min_rel_gap = min(s.min_rel_gap, float(res.rel_gap))
            if self.candidate_filter is not None and not self.candidate_filter(inst, res):
                continue
            if len(s.lowest) >= self.keep and res.gap >= s.lowest[-1].gap:
                continue
            pay = None
            if self.keep_payload:
                pay = payload_fn(inst, res) if payload_fn else _payload(inst, res)
            s.lowest.append(record_from_result(inst, res, pay))
            s.lowest.sort(key=SearchRecord.sort_key)
            del s.lowest[self.keep :]


def _reason(note: str) -> str:
    return note.split(":")[0][:60] if note else "unspecified"


def run_sweep(
    cfg: SweepConfig,
    pol: TolerancePolicy = DEFAULT_POLICY,
    workers: int = 1,
    on_result: Callable | None = None,
    inject: Iterable = (),
) -> SweepSummary:
    """Evaluate ``cfg.target`` on ``cfg.budget`` seeded instances.

    ``on_result(instance, result)`` sees every check in ordinal order.
    ``inject`` adds fixed ``(A, B)`` pairs after the sampled instances.
    """
    summary = SweepSummary(cfg.target)
    acc = _Accumulator(summary, cfg.keep, pol, cfg.keep_payload)
    spec = cfg.spec
    grid = cfg.resolved_grid()

    def consume(inst, results):
        if on_result is not None:
            for r in results:
                on_result(inst, r)
        acc.add(inst, results)

    for inst, results in iter_instances(cfg, pol, workers=workers):
        consume(inst, results)
    for j, (a, b) in enumerate(inject):
        inst = injected_instance(cfg.budget + j, a, b)
        consume(inst, evaluate_instance(spec, inst, grid, pol))
    return summary


# --------------------------------------------------------------------------
# grid syntax: "p=1,q=2,r=0/0.5" -> cartesian product; "/" separates values


def parse_grid(texts: Iterable[str]) -> tuple:
    points = []
    for text in texts:
        names, values = [], []
        for part in text.split(","):
            part = part.strip()
            if not part:
                continue
            if "=" not in part:
                raise ValueError(f"grid entry {part!r} is not name=value")
            name, vals = part.split("=", 1)
            names.append(name.strip())
            values.append([float(v) for v in vals.split("/") if v.strip()])
        for combo in itertools.product(*values):
            points.append(dict(zip(names, combo)))
    return tuple(points)


def format_grid(grid) -> str:
    # repr is the shortest text that parses back to the same float
    return ";".join(",".join(f"{k}={float(v)!r}" for k, v in sorted(pt.items())) for pt in grid)
