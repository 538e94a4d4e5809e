"""Seeded random matrix families.

Every random stream is a ``numpy`` PCG64 generator keyed by a
``SeedSequence`` over an integer path such as ``(master_seed, ordinal)``, so
instance ``i`` of a sweep is reproducible without replaying instances
``0..i-1``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .hermitian import as_hermitian

__all__ = [
    "FAMILIES",
    "SamplerSpec",
    "rng_for",
    "derive_seed",
    "sample",
    "random_unitary",
    "random_hermitian",
    "complex_ginibre",
]

FAMILIES = (
    "wishart",
    "density",
    "commuting_pair",
    "near_singular",
    "spiked_diagonal",
    "degenerate_spectrum",
)

_MASK64 = (1 << 64) - 1


def rng_for(*path: int) -> np.random.Generator:
    """Independent generator for an integer seed path."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([int(p) & _MASK64 for p in path])))


def derive_seed(*path: int) -> int:
    """A 64-bit seed derived from a path, stable across platforms."""
    return int(np.random.SeedSequence([int(p) & _MASK64 for p in path]).generate_state(1, np.uint64)[0])


@dataclass(frozen=True)
class SamplerSpec:
    dim: int
    family: str
    seed: int
    scale: float = 1.0

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("dim must be at least 1")
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}")
        if not self.scale > 0:
            raise ValueError("scale must be positive")


def complex_ginibre(rng: np.random.Generator, n: int, m: int | None = None) -> np.ndarray:
    """i.i.d. standard complex normal entries (E|z|^2 = 1)."""
    m = n if m is None else m
    z = rng.standard_normal((n, m, 2))
    return (z[..., 0] + 1j * z[..., 1]) / np.sqrt(2.0)


def random_unitary(rng: np.random.Generator, n: int) -> np.ndarray:
    """Haar-distributed unitary via QR with phase correction."""
    q, r = np.linalg.qr(complex_ginibre(rng, n))
    d = np.diag(r)
    return q * (d / np.abs(d))[None, :]


def random_hermitian(rng: np.random.Generator, n: int, scale: float = 1.0) -> np.ndarray:
    """GUE-like Hermitian matrix with entries of order ``scale``."""
    g = complex_ginibre(rng, n)
    return as_hermitian(scale * (g + g.conj().T) / 2.0)


def _wishart(rng, n, scale):
    g = complex_ginibre(rng, n)
    return as_hermitian(scale * (g @ g.conj().T))


def _from_spectrum(rng, values):
    u = random_unitary(rng, len(values))
    return as_hermitian((u * np.asarray(values, dtype=float)) @ u.conj().T)


def sample(spec: SamplerSpec):
    """Draw one PSD matrix, or an ``(A, B)`` pair for ``commuting_pair``."""
    rng = rng_for(spec.seed)
    n, c = spec.dim, spec.scale
    fam = spec.family
    if fam == "wishart":
        return _wishart(rng, n, c)
    if fam == "density":
        w = _wishart(rng, n, 1.0)
        return as_hermitian(w / np.trace(w).real)
    if fam == "near_singular":
        w = _wishart(rng, n, c)
        lam, u = np.linalg.eigh(w)
        if n > 1:
            lam[0] = 1e-8 * lam[-1]
        return as_hermitian((u * lam) @ u.conj().T)
    if fam == "spiked_diagonal":
        d = rng.uniform(0.1, 1.0, size=n)
        d[rng.integers(n)] *= 100.0
        return np.diag(c * d).astype(np.complex128)
    if fam == "degenerate_spectrum":
        m = max(1, (n + 1) // 2)
        levels = rng.uniform(0.1, 2.0, size=m)
        values = np.sort(np.resize(levels, n))[::-1]
        return _from_spectrum(rng, c * values)
    if fam == "commuting_pair":
        u = random_unitary(rng, n)
        da = c * rng.uniform(0.05, 2.0, size=n)
        db = c * rng.uniform(0.05, 2.0, size=n)
        a = as_hermitian((u * da) @ u.conj().T)
        b = as_hermitian((u * db) @ u.conj().T)
        return a, b
    raise AssertionError(fam)
