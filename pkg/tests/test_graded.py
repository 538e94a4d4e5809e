import mpmath
import numpy as np
import pytest
from conftest import dims, mp_eigvals, mp_fun, mp_matrix, rand_pd, rand_unitary, seeds, to_numpy
from hypothesis import given

from araki.errors import NonConvergence
from araki.graded import embed, from_eig, halve, jacobi_svd, unembed


def _graded_case(rng, n, decades):
    """Diagonal D and unitary W with D spread over ``decades`` orders of magnitude."""
    d = 10.0 ** -np.linspace(0, decades, n)
    return d, rand_unitary(rng, n)


def test_embed_round_trip(rng):
    m = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    assert np.array_equal(unembed(embed(m)), m)
    x, y = m, rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    assert np.allclose(embed(x @ y), embed(x) @ embed(y))


def test_halve():
    assert np.array_equal(halve([1.0, 3.0, 1.0, 3.0]), [3.0, 1.0])


def test_jacobi_svd_matches_numpy(rng):
    g = rng.standard_normal((5, 5))
    s, v = jacobi_svd(g)
    assert np.allclose(s, np.linalg.svd(g, compute_uv=False))
    assert np.allclose(np.linalg.norm(g @ v, axis=0), s)


def test_jacobi_svd_edge_cases():
    s, v = jacobi_svd(np.zeros((3, 3)))
    assert np.array_equal(s, np.zeros(3)) and np.array_equal(v, np.eye(3))
    with pytest.raises(NonConvergence):
        jacobi_svd(np.array([[1.0, np.nan], [0.0, 1.0]]))


def test_power_zero_convention():
    e = from_eig(np.array([2.0, 0.0]), np.eye(2))
    assert np.array_equal(e.power(0).spectrum(), [1.0, 1.0])
    assert np.array_equal(e.power(0.5).spectrum(), [np.sqrt(2), 0.0])
    assert np.isinf(e.power(-1).values).any()


@given(seeds, dims)
def test_matrix_reconstruction(seed, n):
    rng = np.random.default_rng(seed)
    a = rand_pd(rng, n)
    w, u = np.linalg.eigh(a)
    assert np.allclose(from_eig(w, u).matrix(), a, atol=1e-12 * np.abs(a).max())


@pytest.mark.parametrize("n, decades", [(2, 6), (3, 8), (4, 12)])
def test_sandwich_spectrum_relative_accuracy(n, decades):
    """Eigenvalues of D^{1/2} W diag(c) W* D^{1/2} to high relative accuracy."""
    rng = np.random.default_rng(n * 17 + decades)
    d, w = _graded_case(rng, n, decades)
    c = 10.0 ** -np.linspace(0, decades, n)[::-1]
    got = from_eig(c, w).sandwiched(np.sqrt(d)).spectrum()

    with mpmath.workdps(60):
        sd = mpmath.diag([mpmath.sqrt(mpmath.mpf(x)) for x in d])
        wm = mp_matrix(w)
        m = sd * wm * mpmath.diag([mpmath.mpf(x) for x in c]) * wm.transpose_conj() * sd
        ref = np.array(mp_eigvals(m))
    assert np.allclose(got / ref, 1.0, rtol=1e-11, atol=0.0)


def test_nested_power_matches_mpmath():
    """(D W C W* D)^s built from singular vectors, compared entrywise."""
    rng = np.random.default_rng(5)
    n, s = 3, 0.37
    d, w = _graded_case(rng, n, 9)
    c = np.array([1.0, 1e-3, 1e-7])
    got = from_eig(c, w).sandwiched(d).power(s).matrix()

    with mpmath.workdps(60):
        dm = mpmath.diag([mpmath.mpf(x) for x in d])
        wm = mp_matrix(w)
        m = dm * wm * mpmath.diag([mpmath.mpf(x) for x in c]) * wm.transpose_conj() * dm
        ref = to_numpy(mp_fun(m, lambda x: mpmath.re(x) ** s if mpmath.re(x) > 0 else 0))
    assert np.max(np.abs(got - ref)) < 1e-10 * np.abs(ref).max()
