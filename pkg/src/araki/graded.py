"""Relative-accuracy spectra of scaled PSD sandwiches.

Products such as ``A^a B^b`` with ill-conditioned factors lose their small
eigenvalues when the product is formed and handed to ``eigh``: the error is
absolute, of order ``eps * ||product||``. In a frame where one factor is
diagonal the product becomes ``D1 W D2`` with ``W`` unitary and ``D1, D2``
nonnegative diagonals, and a Jacobi SVD (LAPACK ``dgejsv``) recovers every
singular value to high relative accuracy.

LAPACK only exposes the real Jacobi SVD here, so complex ``n x n`` matrices
are carried in their real ``2n x 2n`` embedding ``[[Re, -Im], [Im, Re]]``.
Every spectrum is doubled there; :func:`halve` drops the duplicates.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg.lapack import dgejsv

from .errors import NonConvergence

__all__ = ["Embedded", "embed", "unembed", "halve", "jacobi_svd", "from_eig"]

# scipy's integer codes: joba=2 is 'F' (two-sided scaled input), jobu=3 'N', jobv=0 'V'
_JOBA_F = 2


def embed(m) -> np.ndarray:
    m = np.asarray(m, dtype=np.complex128)
    return np.block([[m.real, -m.imag], [m.imag, m.real]])


def unembed(r: np.ndarray) -> np.ndarray:
    n = r.shape[0] // 2
    return r[:n, :n] + 1j * r[n:, :n]


def halve(values: np.ndarray) -> np.ndarray:
    """Non-increasing values with each duplicated pair collapsed."""
    v = np.sort(np.asarray(values, dtype=float))[::-1]
    return v[::2]


def jacobi_svd(g: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Singular values (non-increasing) and right singular vectors of a real matrix."""
    g = np.ascontiguousarray(g, dtype=float)
    if not np.all(np.isfinite(g)):
        raise NonConvergence("non-finite entries in Jacobi SVD input")
    if not np.any(g):
        n = g.shape[1]
        return np.zeros(n), np.eye(n)
    sva, _, v, work, _, info = dgejsv(g, joba=_JOBA_F, jobu=3, jobv=0, jobr=1, jobt=0, jobp=0)
    if info != 0:
        raise NonConvergence(f"dgejsv returned info={info}")
    sva = sva * (work[0] / work[1])
    order = np.argsort(-sva, kind="stable")
    return sva[order], v[:, order]


@dataclass(frozen=True, eq=False)
class Embedded:
    """A PSD matrix ``Q diag(values) Q^T`` held in the real embedding."""

    values: np.ndarray
    vectors: np.ndarray

    def power(self, t: float) -> "Embedded":
        v = self.values
        if t == 0:
            out = np.ones_like(v)
        else:
            with np.errstate(divide="ignore"):
                out = np.where(v > 0, np.where(v > 0, v, 1.0) ** t, 0.0 if t > 0 else np.inf)
        return Embedded(out, self.vectors)

    def map(self, f) -> "Embedded":
        return Embedded(np.asarray(f(self.values), dtype=float), self.vectors)

    def sandwiched(self, outer) -> "Embedded":
        """Spectral form of ``diag(outer) M diag(outer)`` (``outer`` of length n or 2n)."""
        outer = np.asarray(outer, dtype=float)
        if outer.size * 2 == self.values.size:
            outer = np.concatenate([outer, outer])
        left = np.sqrt(np.clip(self.values, 0.0, None))
        g = left[:, None] * self.vectors.T * outer[None, :]
        s, v = jacobi_svd(g)
        return Embedded(s * s, v)

    def spectrum(self) -> np.ndarray:
        """Eigenvalues of the underlying complex matrix, non-increasing."""
        return halve(self.values)

    def matrix(self) -> np.ndarray:
        q = self.vectors
        return unembed((q * self.values[None, :]) @ q.T)


def from_eig(values, vectors) -> Embedded:
    """Embed ``U diag(values) U^H`` given its complex eigenpairs."""
    values = np.asarray(values, dtype=float)
    return Embedded(np.concatenate([values, values]), embed(vectors))
