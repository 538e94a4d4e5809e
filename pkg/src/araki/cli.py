"""Command-line entry point: ``araki verify | search | divergence``.

Exit codes: 0 success, 1 bad flags or I/O, 2 a proven statement was
violated, 3 a conjecture violation survived re-verification.
"""
from __future__ import annotations

import argparse
import sys
from typing import Sequence

from .divergences import DivergenceKind, divergence, ordering_report
from .errors import ArakiError, DomainError, HypothesisViolated
from .hermitian import TolerancePolicy
from .inequalities import gap_remark
from .io import check_line, dumps_canonical, fmt_float, read_matrix, write_csv
from .search import SearchConfig, is_violation, run_search
from .sweep import TARGETS, SweepConfig, _payload, parse_grid, record_from_result, run_sweep

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VIOLATED = 2
EXIT_CONFIRMED = 3


class _Usage(Exception):
    pass


def _ints(text: str) -> tuple:
    try:
        vals = tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise _Usage(f"expected comma-separated integers, got {text!r}")
    if not vals or min(vals) < 1:
        raise _Usage(f"dimensions must be positive, got {text!r}")
    return vals


def _floats(text: str) -> list:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise _Usage(f"expected comma-separated numbers, got {text!r}")


def _policy(args) -> TolerancePolicy:
    try:
        return TolerancePolicy.from_env(tol_abs=args.tol_abs, tol_rel=args.tol_rel)
    except ValueError as exc:
        raise _Usage(str(exc))


def _grid(target: str, s_grid: str | None, param_grid: list | None):
    if param_grid:
        try:
            return parse_grid(param_grid)
        except ValueError as exc:
            raise _Usage(str(exc))
    if s_grid is None:
        return None
    svals = _floats(s_grid)
    base = TARGETS[target].grid
    if not any("s" in p for p in base):
        raise _Usage(f"{target} has no s parameter; use --param-grid")
    others = []
    for p in base:
        rest = {k: v for k, v in p.items() if k != "s"}
        if rest not in others:
            others.append(rest)
    return tuple(dict(o, s=s) for o in others for s in svals)


class _Sink:
    """Line-delimited report writer (or a CSV buffer) on a file or stdout."""

    def __init__(self, path, fmt):
        self.fmt = fmt
        self.rows = []
        self.handle = None
        self.path = path
        if fmt == "jsonl":
            self.handle = open(path, "w", encoding="utf-8") if path else sys.stdout

    def write(self, rec: dict):
        if self.fmt == "jsonl":
            self.handle.write(check_line(rec) + "\n")
        else:
            self.rows.append(rec)

    def close(self):
        if self.fmt == "csv":
            write_csv(self.path if self.path else sys.stdout, self.rows)
        elif self.handle is not None and self.handle is not sys.stdout:
            self.handle.close()


def _summary_line(d: dict) -> str:
    return (
        f"{d['target']}: instances={d['instances']} checks={d['checks']} holds={d['holds']} "
        f"violated={d['violated']} degenerate={d['degenerate']} near={d['near_violations']} "
        f"min_gap={float(d['min_gap']):.6g} min_rel_gap={float(d['min_rel_gap']):.6g}"
    )


# --------------------------------------------------------------------------
# verify


def cmd_verify(args) -> int:
    pol = _policy(args)
    if args.inequality == "remark":
        return _verify_remark(args, pol)
    names = list(TARGETS) if args.inequality == "all" else [args.inequality]
    for n in names:
        if n not in TARGETS:
            raise _Usage(f"unknown inequality {n!r}; choose from {', '.join(['all', 'remark', *TARGETS])}")
    if args.samples < 1:
        raise _Usage("--samples must be at least 1")
    dims = _ints(args.dims)
    sink = _Sink(args.out, args.format)
    code = EXIT_OK
    findings = []
    try:
        for name in names:
            grid = _grid(name, args.s_grid, args.param_grid)
            cfg = SweepConfig(name, dims=dims, budget=args.samples, seed=args.seed, grid=grid)

            def emit(inst, res):
                pay = _payload(inst, res) if res.violated else None
                sink.write(record_from_result(inst, res, pay).to_dict())

            try:
                summary = run_sweep(cfg, pol, workers=args.workers, on_result=emit)
            except HypothesisViolated as exc:
                raise _Usage(f"{name}: {exc}")
            d = summary.to_dict()
            conjecture = TARGETS[name].conjecture
            if conjecture:
                findings.append(d)
            else:
                print(_summary_line(d), file=sys.stderr)
                if summary.violated:
                    code = EXIT_VIOLATED
    finally:
        sink.close()
    if findings:
        print("findings (conjectures; violations here are results, not failures):", file=sys.stderr)
        for d in findings:
            print("  " + _summary_line(d), file=sys.stderr)
    return code


def _verify_remark(args, pol) -> int:
    results = gap_remark(pol)
    sink = _Sink(args.out, args.format) if args.out else None
    for label, res in results.items():
        by_design = " (Violated-by-design)" if label == "single_p2" and res.violated else ""
        print(
            f"{label}: lhs={res.lhs:.7f} rhs={res.rhs:.7f} gap={res.gap:.7f} "
            f"verdict={res.verdict.value}{by_design}"
        )
        if sink is not None:
            sink.write(_remark_record(label, res))
    if sink is not None:
        sink.close()
    return EXIT_OK


def _remark_record(label, res) -> dict:
    return {
        "inequality_id": res.id_str,
        "params": res.params.to_dict(),
        "dim": 2,
        "family": "remark",
        "seed_path": f"remark/{label}",
        "ordinal": 0,
        "lhs": res.lhs,
        "rhs": res.rhs,
        "gap": res.gap,
        "rel_gap": res.rel_gap,
        "verdict": res.verdict.value,
        "diagnostics": dict(res.diagnostics),
        "note": label,
    }


# --------------------------------------------------------------------------
# search


def cmd_search(args) -> int:
    pol = _policy(args)
    grid = _grid(args.target, args.s_grid, args.grid)
    try:
        cfg = SearchConfig(
            args.target,
            grid=grid,
            dims=_ints(args.dims),
            budget=args.budget,
            refine_steps=args.refine_steps,
            refine_top=args.refine_top,
            seed=args.seed,
        )
    except (ValueError, HypothesisViolated) as exc:
        raise _Usage(str(exc))
    out = run_search(cfg, pol, state_path=args.state, stop_after=args.stop_after, workers=args.workers)
    if not out.complete:
        print(
            f"interrupted in stage {out.stage} at cursor {out.cursor}; rerun with the same flags to resume",
            file=sys.stderr,
        )
        return EXIT_OK
    confirmed = {dumps_canonical(r.to_dict()) for r in out.confirmed}
    records = out.records()
    listed = {dumps_canonical(r.to_dict()) for r in records}
    extra = [r for r in out.confirmed if dumps_canonical(r.to_dict()) not in listed]
    sink = _Sink(args.out, "jsonl")
    try:
        for rec in sorted(records + extra, key=lambda r: r.sort_key()):
            d = rec.to_dict()
            d["diagnostics"] = dict(
                d["diagnostics"],
                violation=float(is_violation(rec, pol)),
                confirmed=float(dumps_canonical(rec.to_dict()) in confirmed),
            )
            sink.write(d)
    finally:
        sink.close()
    s = out.report_summary(pol)
    print(_summary_line(s), file=sys.stderr)
    print(
        f"{s['target']}: refined_min_gap={float(s['refined_min_gap']):.6g} "
        f"candidate_violations={s['candidates_violating']} confirmed={s['confirmed_violations']}",
        file=sys.stderr,
    )
    return out.exit_code


# --------------------------------------------------------------------------
# divergence


def cmd_divergence(args) -> int:
    pol = _policy(args)
    try:
        rho = read_matrix(args.rho)
        sigma = read_matrix(args.sigma)
    except (OSError, ValueError, ArakiError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    alphas = _floats(args.alpha)
    try:
        kinds = [DivergenceKind(k.strip()) for k in args.kinds.split(",") if k.strip()]
    except ValueError as exc:
        raise _Usage(str(exc))
    rows = []
    for kind in kinds:
        alist = [None] if kind in (DivergenceKind.UMEGAKI, DivergenceKind.BELAVKIN_STASZEWSKI) else alphas
        for a in alist:
            try:
                val = fmt_float(divergence(kind, rho, sigma, a, pol))
            except DomainError as exc:
                val = f"Degenerate ({exc})"
            except HypothesisViolated as exc:
                print(f"error: {exc}", file=sys.stderr)
                return EXIT_USAGE
            except ValueError as exc:
                val = f"undefined ({exc})"
            rows.append((kind.value, "-" if a is None else f"{a:g}", val))
    width = max(len(r[0]) for r in rows) if rows else 10
    print(f"{'kind':<{width}}  {'alpha':>6}  value")
    for k, a, v in rows:
        print(f"{k:<{width}}  {a:>6}  {v}")
    print()
    print("orderings:")
    for res in ordering_report(rho, sigma, [a for a in alphas if a > 0 and a != 1], pol):
        alpha = res.params.alpha
        at = "" if alpha is None else f" alpha={alpha:g}"
        print(f"  {res.id_str}{at}: lhs={fmt_float(res.lhs)} rhs={fmt_float(res.rhs)} verdict={res.verdict.value}")
    return EXIT_OK


# --------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="araki", description="Numerical checks of Araki-type trace inequalities.")
    sub = parser.add_subparsers(dest="command", required=True)

    def tolerances(p):
        p.add_argument("--tol-abs", type=float, default=None, help="absolute tolerance (env ARAKI_TOL_ABS)")
        p.add_argument("--tol-rel", type=float, default=None, help="relative tolerance (env ARAKI_TOL_REL)")

    v = sub.add_parser("verify", help="sweep an inequality over seeded random instances")
    v.add_argument("--inequality", required=True, help="inequality id, 'all' or 'remark'")
    v.add_argument("--dims", default="2,3")
    v.add_argument("--samples", type=int, default=100)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--s-grid", default=None, help="comma-separated s values")
    v.add_argument("--param-grid", action="append", default=None, help="e.g. p=1,q=2,r=0/0.5 (repeatable)")
    v.add_argument("--out", default=None, help="report path (default stdout)")
    v.add_argument("--format", choices=("jsonl", "csv"), default="jsonl")
    v.add_argument("--workers", type=int, default=1)
    tolerances(v)
    v.set_defaults(func=cmd_verify)

    s = sub.add_parser("search", help="counterexample search for a conjecture")
    s.add_argument("--target", choices=("conj1", "conj2"), required=True)
    s.add_argument("--budget", type=int, default=1000)
    s.add_argument("--refine-steps", type=int, default=200)
    s.add_argument("--refine-top", type=int, default=10)
    s.add_argument("--dims", default="2,3,4")
    s.add_argument("--grid", action="append", default=None, help="e.g. p=1,q=2,r=1 (repeatable)")
    s.add_argument("--s-grid", default=None, help="comma-separated s values for conj1")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--state", default=None, help="checkpoint file; resumed when present")
    s.add_argument("--stop-after", type=int, default=None, help="stop after this many units of work")
    s.add_argument("--out", default=None, help="findings path (default stdout)")
    s.add_argument("--workers", type=int, default=1)
    tolerances(s)
    s.set_defaults(func=cmd_search)

    d = sub.add_parser("divergence", help="Rényi divergences of two density matrices")
    d.add_argument("--rho", required=True)
    d.add_argument("--sigma", required=True)
    d.add_argument("--alpha", default="0.5,2")
    d.add_argument("--kinds", default=",".join(k.value for k in DivergenceKind))
    tolerances(d)
    d.set_defaults(func=cmd_divergence)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        return args.func(args)
    except _Usage as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ArakiError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
