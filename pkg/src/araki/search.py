"""Seeded counterexample search for the two conjectured inequalities.

A search runs in three stages. ``sweep`` evaluates ``budget`` sampled
instances and keeps the lowest-gap candidates with their matrices.
``refine`` runs a stochastic hill descent from each kept candidate.
``done`` means the report is final. Progress can be checkpointed to a JSON
state file after any unit of work and resumed with identical results.

A candidate counts as a violation when ``gap < -10 * tol``. It is confirmed
only if a second evaluation, at a 10x tighter tolerance and through a
plain standard-basis formula, agrees.
"""
from __future__ import annotations

import hashlib
import json
import math
from collections import Counter
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from . import inequalities as iq
from .errors import ArakiError, CorruptState, HypothesisViolated
from .functions import function_from_dict
from .hermitian import DEFAULT_POLICY, TolerancePolicy, apply_function, as_hermitian, fractional_power, sandwich
from .io import dumps_canonical, matrix_to_rows, rows_to_matrix
from .sampling import rng_for
from .sweep import (
    TARGETS,
    SearchRecord,
    SweepConfig,
    SweepSummary,
    _Accumulator,
    _payload,
    format_grid,
    iter_instances,
)

__all__ = [
    "SearchConfig",
    "SearchOutcome",
    "STATE_VERSION",
    "refine",
    "run_search",
    "confirm",
    "load_state",
    "candidate_gap",
]

STATE_VERSION = 1
_STATE_KIND = "araki-search-state"
_REFINE_TAG = 0x72656669
STEP_BOUNDS = (1e-9, 1e2)


@dataclass(frozen=True)
class SearchConfig:
    target: str
    grid: tuple | None = None
    dims: tuple = (2, 3, 4)
    budget: int = 1000
    refine_steps: int = 200
    refine_top: int = 10
    step_init: float = 0.1
    seed: int = 0
    families: tuple | None = None

    def __post_init__(self):
        if self.target not in ("conj1", "conj2"):
            raise ValueError(f"search target must be conj1 or conj2, not {self.target!r}")
        if self.budget < 1:
            raise ValueError("budget must be at least 1")
        if self.refine_steps < 0 or self.refine_top < 0:
            raise ValueError("refine_steps and refine_top must be nonnegative")
        if not self.step_init > 0:
            raise ValueError("step_init must be positive")
        for pt in self.resolved_grid():
            _check_point(self.target, pt)

    def resolved_grid(self) -> tuple:
        return tuple(dict(p) for p in (TARGETS[self.target].grid if self.grid is None else self.grid))

    def sweep_config(self) -> SweepConfig:
        return SweepConfig(
            self.target,
            dims=tuple(self.dims),
            budget=self.budget,
            seed=self.seed,
            grid=self.resolved_grid(),
            families=self.families,
            keep=self.refine_top,
            keep_payload=True,
        )

    def to_dict(self) -> dict:
        return {
            "target": self.target,
            "grid": format_grid(self.resolved_grid()),
            "dims": list(self.dims),
            "budget": self.budget,
            "refine_steps": self.refine_steps,
            "refine_top": self.refine_top,
            "step_init": self.step_init,
            "seed": self.seed,
            "families": list(self.sweep_config().resolved_families()),
        }


def _check_point(target, pt):
    if target == "conj1":
        if set(pt) != {"s"}:
            raise HypothesisViolated(f"conj1 grid points take only s, got {sorted(pt)}")
        if not pt["s"] > 1:
            raise HypothesisViolated(f"conj1 needs s > 1, got s={pt['s']}")
    else:
        if set(pt) != {"p", "q", "r"}:
            raise HypothesisViolated(f"conj2 grid points take p, q, r, got {sorted(pt)}")
        if not (0 < pt["p"] <= pt["q"] and pt["r"] >= 0):
            raise HypothesisViolated(f"conj2 needs 0 < p <= q and r >= 0, got {pt}")


def _commutes(a, b) -> bool:
    c = a @ b - b @ a
    return float(np.linalg.norm(c)) <= 1e-12 * float(np.linalg.norm(a) * np.linalg.norm(b))


def _is_candidate(inst, res) -> bool:
    # identity cases carry only rounding noise: p == q in conj2, commuting A, B,
    # and a weight that vanishes on the whole spectrum (both sides exactly 0)
    p = res.params
    if p.p is not None and p.q is not None and p.p == p.q:
        return False
    if res.lhs == 0 and res.rhs == 0:
        return False
    return not _commutes(inst.a, inst.b)


# --------------------------------------------------------------------------
# gap evaluation from a payload


def candidate_gap(target: str, params: dict, a, b, f=None, pol: TolerancePolicy = DEFAULT_POLICY):
    """The library predicate for a conjecture on explicit matrices."""
    if target == "conj1":
        return iq.gap_conjecture1(f, a, b, params["s"], pol)
    return iq.gap_conjecture2(a, b, params["p"], params["q"], params["r"], pol)


def _naive_gap(target, params, a, b, f, pol):
    """Standard-basis evaluation, independent of the eigenframe used by the predicates."""
    if target == "conj1":
        s = params["s"]
        fa = apply_function(a, f, pol)
        prod = np.trace(fa @ fractional_power(a, s, pol) @ fractional_power(b, s, pol)).real
        sand = np.trace(fa @ fractional_power(sandwich(a, b, pol), s, pol)).real
        return float(prod - sand), pol.threshold(prod, sand)
    p, q, r = params["p"], params["q"], params["r"]
    rhs = np.trace(fractional_power(a, r + q, pol) @ fractional_power(b, q, pol)).real
    ah = fractional_power(a, p / 2, pol)
    inner = as_hermitian(ah @ fractional_power(b, p, pol) @ ah)
    lhs = np.trace(fractional_power(a, r, pol) @ fractional_power(inner, q / p, pol)).real
    return float(rhs - lhs), pol.threshold(lhs, rhs)


def _unpack(rec: SearchRecord):
    pay = rec.payload or {}
    a = rows_to_matrix(pay["A"])
    b = rows_to_matrix(pay["B"])
    f = function_from_dict(pay["f"]) if "f" in pay else None
    return a, b, f


def is_violation(rec: SearchRecord, pol: TolerancePolicy = DEFAULT_POLICY) -> bool:
    tol = rec.diagnostics.get("tol", pol.threshold(rec.lhs, rec.rhs))
    return math.isfinite(rec.gap) and rec.gap < -10 * tol


def confirm(rec: SearchRecord, pol: TolerancePolicy = DEFAULT_POLICY) -> bool:
    """Re-check a violating record at 10x tighter tolerance by two routes."""
    if rec.payload is None:
        return False
    tight = pol.tightened(10)
    a, b, f = _unpack(rec)
    try:
        res = candidate_gap(rec.target, rec.params, a, b, f, tight)
        naive, naive_tol = _naive_gap(rec.target, rec.params, a, b, f, tight)
    except ArakiError:
        return False
    tol = res.diagnostics["tol"]
    return res.gap < -10 * tol and naive < -10 * naive_tol


# --------------------------------------------------------------------------
# refinement


def _factor(m):
    m = as_hermitian(m)
    scale = max(float(np.trace(m).real), 1e-300)
    jitter = 0.0
    for _ in range(8):
        try:
            return np.linalg.cholesky(m + jitter * np.eye(m.shape[0]))
        except np.linalg.LinAlgError:
            jitter = 1e-14 * scale if jitter == 0 else jitter * 100
    w, u = np.linalg.eigh(m)
    # fallback keeps A = L L^* exactly but loses triangularity
    return u * np.sqrt(np.clip(w, 0, None))


def _perturb(rng, l, step):
    n = l.shape[0]
    g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    scale = np.linalg.norm(l) / n
    out = l + step * scale * np.tril(g) / np.sqrt(2.0)
    # keep the trace of L L^* fixed so descent cannot run off in scale
    return out * (np.linalg.norm(l) / max(np.linalg.norm(out), 1e-300))


def refine(
    candidate: SearchRecord,
    config: SearchConfig,
    pol: TolerancePolicy = DEFAULT_POLICY,
    rank: int = 0,
) -> SearchRecord:
    """Hill descent on the gap starting from ``candidate``'s matrices.

    ``A = L L^*`` and ``B = M M^*`` with lower-triangular factors. Each step
    adds a Gaussian perturbation to both factors; a trial is accepted only
    if it lowers the gap, so the result never has a larger gap than the
    input. The random stream is keyed by ``(seed, rank)``.
    """
    if candidate.payload is None:
        raise ValueError("refine needs a candidate with a matrix payload")
    rng = rng_for(config.seed, _REFINE_TAG, rank)
    a, b, f = _unpack(candidate)
    la, lb = _factor(a), _factor(b)
    best = candidate
    best_a, best_b = a, b
    step = float(np.clip(config.step_init, *STEP_BOUNDS))
    accepted = 0
    for _ in range(config.refine_steps):
        ta, tb = _perturb(rng, la, step), _perturb(rng, lb, step)
        ma = as_hermitian(ta @ ta.conj().T)
        mb = as_hermitian(tb @ tb.conj().T)
        try:
            res = candidate_gap(candidate.target, candidate.params, ma, mb, f, pol)
        except (ArakiError, np.linalg.LinAlgError):
            res = None
        if res is not None and res.verdict is not iq.Verdict.DEGENERATE and res.gap < best.gap:
            la, lb = ta, tb
            best_a, best_b = ma, mb
            best = replace(
                best,
                lhs=res.lhs,
                rhs=res.rhs,
                gap=res.gap,
                rel_gap=res.rel_gap,
                verdict=res.verdict.value,
                diagnostics=dict(res.diagnostics),
            )
            accepted += 1
            step = min(step * 1.5, STEP_BOUNDS[1])
        else:
            step = max(step * 0.6, STEP_BOUNDS[0])
    payload = dict(candidate.payload)
    payload["A"] = matrix_to_rows(best_a)
    payload["B"] = matrix_to_rows(best_b)
    diag = dict(best.diagnostics)
    diag.update(
        {
            "refine_steps": float(config.refine_steps),
            "refine_accepted": float(accepted),
            "refine_final_step": step,
            "start_gap": candidate.gap,
        }
    )
    return replace(best, diagnostics=diag, payload=payload, note=_join(candidate.note, "refined"))


def _join(a, b):
    return f"{a};{b}" if a else b


# --------------------------------------------------------------------------
# state


@dataclass
class SearchOutcome:
    config: SearchConfig
    summary: SweepSummary
    stage: str = "sweep"
    cursor: int = 0
    refined: list = field(default_factory=list)
    confirmed: list = field(default_factory=list)

    @property
    def complete(self) -> bool:
        return self.stage == "done"

    @property
    def exit_code(self) -> int:
        return 3 if self.confirmed else 0

    def records(self) -> list[SearchRecord]:
        """Final report: refined candidates (or raw ones if refinement is off), by ascending gap."""
        recs = list(self.refined) if self.config.refine_steps > 0 else list(self.summary.lowest)
        return sorted(recs, key=SearchRecord.sort_key)

    def report_summary(self, pol: TolerancePolicy = DEFAULT_POLICY) -> dict:
        d = self.summary.to_dict()
        recs = self.records()
        d.update(
            {
                "stage": self.stage,
                "refined_min_gap": recs[0].gap if recs else float("nan"),
                "candidates_violating": sum(is_violation(r, pol) for r in recs),
                "confirmed_violations": len(self.confirmed),
            }
        )
        return d


def _summary_to_dict(s: SweepSummary) -> dict:
    return {
        "target": s.target,
        "n_instances": s.n_instances,
        "n_checks": s.n_checks,
        "counts": dict(sorted(s.counts.items())),
        "near_violations": s.near_violations,
        "degenerate_reasons": dict(sorted(s.degenerate_reasons.items())),
        "lowest": [r.to_dict() for r in s.lowest],
        "violations": [r.to_dict() for r in s.violations],
        "min_rel_gap": s.min_rel_gap,
    }


def _summary_from_dict(d: dict) -> SweepSummary:
    return SweepSummary(
        target=d["target"],
        n_instances=int(d["n_instances"]),
        n_checks=int(d["n_checks"]),
        counts=Counter({k: int(v) for k, v in d["counts"].items()}),
        near_violations=int(d["near_violations"]),
        degenerate_reasons=Counter({k: int(v) for k, v in d["degenerate_reasons"].items()}),
        lowest=[SearchRecord.from_dict(r) for r in d["lowest"]],
        violations=[SearchRecord.from_dict(r) for r in d["violations"]],
        min_rel_gap=float(d["min_rel_gap"]),
    )


def _state_body(out: SearchOutcome) -> dict:
    return {
        "kind": _STATE_KIND,
        "version": STATE_VERSION,
        "config": out.config.to_dict(),
        "stage": out.stage,
        "cursor": out.cursor,
        "summary": _summary_to_dict(out.summary),
        "refined": [r.to_dict() for r in out.refined],
        "confirmed": [r.to_dict() for r in out.confirmed],
    }


def _checksum(body_text: str) -> str:
    return hashlib.sha256(body_text.encode("utf-8")).hexdigest()


def save_state(path, out: SearchOutcome) -> None:
    body = dumps_canonical(_state_body(out))
    doc = '{"checksum":' + json.dumps(_checksum(body)) + ',"state":' + body + "}\n"
    tmp = Path(str(path) + ".tmp")
    tmp.write_text(doc, encoding="utf-8")
    tmp.replace(path)


def load_state(path, config: SearchConfig | None = None) -> SearchOutcome:
    """Read a state file; ``config`` (when given) must match the one it was written with."""
    text = Path(path).read_text(encoding="utf-8")
    try:
        doc = json.loads(text)
        body_start = text.index(',"state":') + len(',"state":')
        body = text[body_start : text.rindex("}")]
        stored = doc["checksum"]
        state = doc["state"]
    except (ValueError, KeyError, TypeError) as exc:
        raise CorruptState(f"{path}: unreadable state file ({exc})") from exc
    if _checksum(body) != stored:
        raise CorruptState(f"{path}: checksum mismatch")
    if state.get("kind") != _STATE_KIND or state.get("version") != STATE_VERSION:
        raise CorruptState(f"{path}: unsupported state version {state.get('version')!r}")
    cfg_d = state["config"]
    if config is not None and cfg_d != json.loads(dumps_canonical(config.to_dict())):
        if cfg_d.get("target") != config.target:
            raise ValueError(f"state file belongs to target {cfg_d.get('target')!r}, not {config.target!r}")
        raise ValueError("state file was written with a different search configuration")
    if config is None:
        config = _config_from_dict(cfg_d)
    return SearchOutcome(
        config=config,
        summary=_summary_from_dict(state["summary"]),
        stage=state["stage"],
        cursor=int(state["cursor"]),
        refined=[SearchRecord.from_dict(r) for r in state["refined"]],
        confirmed=[SearchRecord.from_dict(r) for r in state["confirmed"]],
    )


def _config_from_dict(d: dict) -> SearchConfig:
    from .sweep import parse_grid

    grid = parse_grid(d["grid"].split(";")) if d["grid"] else ()
    return SearchConfig(
        target=d["target"],
        grid=grid,
        dims=tuple(d["dims"]),
        budget=int(d["budget"]),
        refine_steps=int(d["refine_steps"]),
        refine_top=int(d["refine_top"]),
        step_init=float(d["step_init"]),
        seed=int(d["seed"]),
        families=tuple(d["families"]),
    )


# --------------------------------------------------------------------------
# driver


def run_search(
    config: SearchConfig,
    pol: TolerancePolicy = DEFAULT_POLICY,
    state_path=None,
    stop_after: int | None = None,
    checkpoint_every: int = 100,
    workers: int = 1,
) -> SearchOutcome:
    """Run (or resume) a search.

    With ``state_path`` an existing state file is resumed and progress is
    written back. ``stop_after`` limits the units of work done in this call
    (instances while sweeping, candidates while refining); the returned
    outcome then has ``complete == False``.
    """
    if state_path is not None and Path(state_path).exists():
        out = load_state(state_path, config)
    else:
        out = SearchOutcome(config, SweepSummary(config.target))
    scfg = config.sweep_config()
    acc = _Accumulator(out.summary, scfg.keep, pol, True, candidate_filter=_is_candidate)
    budget_left = math.inf if stop_after is None else int(stop_after)

    def checkpoint():
        if state_path is not None:
            save_state(state_path, out)

    if out.stage == "sweep":
        stop = config.budget if budget_left == math.inf else min(config.budget, out.cursor + int(budget_left))
        done = 0
        for inst, results in iter_instances(scfg, pol, start=out.cursor, stop=stop, workers=workers):
            acc.add(inst, results, payload_fn=_payload)
            out.cursor = inst.ordinal + 1
            done += 1
            if done % checkpoint_every == 0:
                checkpoint()
        budget_left -= done
        if out.cursor >= config.budget:
            out.stage = "refine"
            out.cursor = 0
        checkpoint()

    if out.stage == "refine":
        cands = out.summary.lowest if config.refine_steps > 0 else []
        while out.cursor < len(cands) and budget_left > 0:
            out.refined.append(refine(cands[out.cursor], config, pol, rank=out.cursor))
            out.cursor += 1
            budget_left -= 1
            checkpoint()
        if out.cursor >= len(cands):
            pool = out.records() + list(out.summary.violations)
            seen = set()
            for rec in sorted(pool, key=SearchRecord.sort_key):
                key = (rec.ordinal, rec.note, tuple(sorted(rec.params.items())), rec.gap)
                if key in seen or not is_violation(rec, pol):
                    continue
                seen.add(key)
                if confirm(rec, pol):
                    out.confirmed.append(rec)
            out.stage = "done"
            out.cursor = 0
            checkpoint()
    return out
