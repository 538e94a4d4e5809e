"""Real scalar functions applied to spectra.

Each function knows its domain and can serialize itself to a plain dict, so
a weight function used in a search record can be rebuilt later from JSON.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import ClassVar

import numpy as np

from .errors import DomainError

__all__ = [
    "ScalarFunction",
    "Power",
    "Exp",
    "Log",
    "Constant",
    "StepCombination",
    "ReverseStep",
    "ShiftedPower",
    "Custom",
    "Product",
    "indicator",
    "function_from_dict",
    "is_monotone_on",
]


class ScalarFunction:
    """Base class. Subclasses implement :meth:`_eval` and set ``kind``."""

    kind: ClassVar[str] = ""
    #: (lower, upper, lower_closed)
    domain: tuple = (-math.inf, math.inf, True)

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        lo, hi, closed = self.domain
        bad = (x > hi) | ((x < lo) if closed else (x <= lo))
        if np.any(bad):
            raise DomainError(
                f"{self.kind}: value {x[bad][0]:.6g} outside domain "
                f"{'[' if closed else '('}{lo}, {hi}]"
            )
        return self._eval(x)

    def _eval(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def to_dict(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class Power(ScalarFunction):
    """``x ↦ x^t`` with ``0^0 = 1``; negative ``t`` excludes 0."""

    t: float
    kind: ClassVar[str] = "power"

    @property
    def domain(self):
        return (0.0, math.inf, self.t >= 0)

    def _eval(self, x):
        if self.t == 0:
            return np.ones_like(x)
        if self.t > 0:
            return np.where(x > 0, np.abs(x) ** self.t, 0.0)
        return x**self.t

    def to_dict(self):
        return {"kind": self.kind, "t": self.t}


@dataclass(frozen=True)
class Exp(ScalarFunction):
    """``x ↦ exp(rate·x)``."""

    rate: float = 1.0
    kind: ClassVar[str] = "exp"

    def _eval(self, x):
        return np.exp(self.rate * x)

    def to_dict(self):
        return {"kind": self.kind, "rate": self.rate}


@dataclass(frozen=True)
class Log(ScalarFunction):
    kind: ClassVar[str] = "log"
    domain = (0.0, math.inf, False)

    def _eval(self, x):
        return np.log(x)

    def to_dict(self):
        return {"kind": self.kind}


@dataclass(frozen=True)
class Constant(ScalarFunction):
    c: float
    kind: ClassVar[str] = "constant"

    def _eval(self, x):
        return np.full_like(x, self.c)

    def to_dict(self):
        return {"kind": self.kind, "c": self.c}


def _check_steps(steps):
    steps = tuple((float(th), float(w)) for th, w in steps)
    if any(w < 0 for _, w in steps):
        raise ValueError("step weights must be nonnegative")
    return steps


@dataclass(frozen=True)
class StepCombination(ScalarFunction):
    """``x ↦ Σ_j w_j [x ≥ θ_j]`` with ``w_j ≥ 0``: nonnegative and nondecreasing."""

    steps: tuple
    kind: ClassVar[str] = "step"

    def __post_init__(self):
        object.__setattr__(self, "steps", _check_steps(self.steps))

    def _eval(self, x):
        out = np.zeros_like(x)
        for th, w in self.steps:
            out = out + w * (x >= th)
        return out

    def to_dict(self):
        return {"kind": self.kind, "steps": [list(s) for s in self.steps]}


@dataclass(frozen=True)
class ReverseStep(ScalarFunction):
    """``x ↦ Σ_j w_j [x ≤ θ_j]`` with ``w_j ≥ 0``: nonnegative and nonincreasing."""

    steps: tuple
    kind: ClassVar[str] = "reverse_step"

    def __post_init__(self):
        object.__setattr__(self, "steps", _check_steps(self.steps))

    def _eval(self, x):
        out = np.zeros_like(x)
        for th, w in self.steps:
            out = out + w * (x <= th)
        return out

    def to_dict(self):
        return {"kind": self.kind, "steps": [list(s) for s in self.steps]}


@dataclass(frozen=True)
class ShiftedPower(ScalarFunction):
    """``x ↦ 1 − (x/scale)^t``.

    For ``t < 0`` this is nonnegative and nondecreasing on ``[scale, ∞)`` and
    tends to the indicator of ``(scale, ∞)`` as ``t → −∞``.
    """

    t: float
    scale: float
    kind: ClassVar[str] = "shifted_power"

    def __post_init__(self):
        if not self.scale > 0:
            raise ValueError("scale must be positive")

    @property
    def domain(self):
        return (0.0, math.inf, self.t >= 0)

    def _eval(self, x):
        return 1.0 - Power(self.t)._eval(x / self.scale)

    def to_dict(self):
        return {"kind": self.kind, "t": self.t, "scale": self.scale}


@dataclass(frozen=True)
class Custom(ScalarFunction):
    """Tabulated values on a fixed set of points (typically a spectrum)."""

    points: tuple
    values: tuple
    rtol: float = 1e-9
    kind: ClassVar[str] = "custom"

    def __post_init__(self):
        object.__setattr__(self, "points", tuple(float(p) for p in self.points))
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        if len(self.points) != len(self.values) or not self.points:
            raise ValueError("points and values must be non-empty and equally long")

    def _eval(self, x):
        pts = np.asarray(self.points)
        vals = np.asarray(self.values)
        idx = np.abs(x[:, None] - pts[None, :]).argmin(axis=1)
        scale = max(1.0, float(np.max(np.abs(pts))))
        miss = np.abs(pts[idx] - x) > self.rtol * scale
        if np.any(miss):
            raise DomainError(f"custom: {x[miss][0]:.6g} is not a tabulated point")
        return vals[idx]

    def to_dict(self):
        return {"kind": self.kind, "points": list(self.points), "values": list(self.values)}


@dataclass(frozen=True)
class Product(ScalarFunction):
    """Pointwise product of two functions."""

    left: ScalarFunction
    right: ScalarFunction
    kind: ClassVar[str] = "product"

    def __call__(self, x):
        return self.left(x) * self.right(x)

    def to_dict(self):
        return {"kind": self.kind, "left": self.left.to_dict(), "right": self.right.to_dict()}


def indicator(threshold: float) -> StepCombination:
    """``[x ≥ threshold]``."""
    return StepCombination(((threshold, 1.0),))


_KINDS = {
    cls.kind: cls
    for cls in (Power, Exp, Log, Constant, StepCombination, ReverseStep, ShiftedPower, Custom)
}


def function_from_dict(d: dict) -> ScalarFunction:
    d = dict(d)
    kind = d.pop("kind")
    if kind == "product":
        return Product(function_from_dict(d["left"]), function_from_dict(d["right"]))
    if kind in ("step", "reverse_step"):
        return _KINDS[kind](tuple(tuple(s) for s in d["steps"]))
    if kind == "custom":
        return Custom(tuple(d["points"]), tuple(d["values"]))
    return _KINDS[kind](**d)


def is_monotone_on(values, eigenvalues, increasing: bool = True, tol: float = 1e-12) -> bool:
    """Check ``λ_i ≥ λ_j ⇒ v_i ≥ v_j`` (or ``≤``) on a spectrum.

    Only the ordering on the given points matters: any such assignment extends
    to a monotone function on an interval containing them.
    """
    v = np.asarray(values, dtype=float)
    w = np.asarray(eigenvalues, dtype=float)
    order = np.argsort(-w, kind="stable")
    v = v[order]
    slack = tol * max(1.0, float(np.max(np.abs(v))) if v.size else 1.0)
    diffs = v[:-1] - v[1:]
    if not increasing:
        diffs = -diffs
    return bool(np.all(diffs >= -slack))
