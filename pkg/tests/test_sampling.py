import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from araki import PSDClass, classify_psd
from araki.sampling import FAMILIES, SamplerSpec, derive_seed, random_unitary, rng_for, sample
from araki.sweep import make_instance


@pytest.mark.parametrize("family", FAMILIES)
def test_same_spec_same_bytes(family):
    spec = SamplerSpec(3, family, 12345)
    x, y = sample(spec), sample(spec)
    if family == "commuting_pair":
        assert all(p.tobytes() == q.tobytes() for p, q in zip(x, y))
    else:
        assert x.tobytes() == y.tobytes()


def test_known_first_draw():
    # pins the bit stream: a change of generator or seeding rule breaks old findings
    assert rng_for(0, 1).integers(0, 10**6, size=4).tolist() == [522157, 889738, 992948, 557138]
    assert derive_seed(0, 1) == 5836529245451711556
    assert derive_seed(0, 1) != derive_seed(1, 0)


@given(st.integers(0, 2**63 - 1), st.integers(1, 6))
def test_density_trace(seed, n):
    rho = sample(SamplerSpec(n, "density", seed))
    assert abs(np.trace(rho).real - 1.0) < 1e-12
    assert classify_psd(rho) is not PSDClass.NOT_PSD


def test_wishart_seed42():
    assert classify_psd(sample(SamplerSpec(3, "wishart", 42))) in (PSDClass.PSD, PSDClass.PD)


@given(st.integers(0, 2**63 - 1), st.integers(2, 6), st.sampled_from(FAMILIES))
def test_families_psd(seed, n, family):
    out = sample(SamplerSpec(n, family, seed))
    mats = out if family == "commuting_pair" else (out,)
    for m in mats:
        assert np.allclose(m, m.conj().T)
        assert classify_psd(m) is not PSDClass.NOT_PSD


def test_family_shapes():
    w = np.sort(np.linalg.eigvalsh(sample(SamplerSpec(4, "near_singular", 3))))
    assert w[0] / w[-1] == pytest.approx(1e-8, rel=1e-4)
    d = sample(SamplerSpec(4, "spiked_diagonal", 3))
    assert np.count_nonzero(d - np.diag(np.diag(d))) == 0
    vals = np.sort(np.diag(d).real)
    assert vals[-1] > 9 * vals[-2]
    w = np.linalg.eigvalsh(sample(SamplerSpec(4, "degenerate_spectrum", 3)))
    assert len(np.unique(np.round(w, 9))) <= 2
    a, b = sample(SamplerSpec(3, "commuting_pair", 3))
    assert np.allclose(a @ b, b @ a)


def test_spec_validation():
    with pytest.raises(ValueError):
        SamplerSpec(0, "wishart", 1)
    with pytest.raises(ValueError):
        SamplerSpec(2, "gaussian", 1)
    with pytest.raises(ValueError):
        SamplerSpec(2, "wishart", 1, scale=0.0)


def test_unitary_is_unitary():
    u = random_unitary(rng_for(5), 4)
    assert np.allclose(u.conj().T @ u, np.eye(4), atol=1e-12)


def test_instance_stream_is_random_access():
    """Instance i depends only on (seed, i), not on the instances before it."""
    fams = ("wishart", "near_singular")
    late = make_instance(9, 57, (2, 3), fams)
    for i in range(57):
        make_instance(9, i, (2, 3), fams)
    again = make_instance(9, 57, (2, 3), fams)
    assert late.a.tobytes() == again.a.tobytes() and late.b.tobytes() == again.b.tobytes()
    assert late.seed_path == "9/57"
    assert (late.dim, late.family) == (3, "wishart")
