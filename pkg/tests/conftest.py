import mpmath
import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

settings.register_profile(
    "default",
    max_examples=60,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")


def ginibre(rng, n):
    return (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)


def rand_psd(rng, n, rank=None):
    g = ginibre(rng, n)
    if rank is not None:
        g = g[:, :rank]
    return g @ g.conj().T


def rand_pd(rng, n, floor=0.05):
    return rand_psd(rng, n) + floor * np.eye(n)


def rand_unitary(rng, n):
    q, r = np.linalg.qr(ginibre(rng, n))
    return q * (np.diag(r) / np.abs(np.diag(r)))


def rand_density(rng, n):
    m = rand_pd(rng, n)
    return m / np.trace(m).real


def naive_pow(a, s):
    """Standard-basis spectral power of a Hermitian PSD matrix, 0^0 = 1."""
    w, u = np.linalg.eigh((a + a.conj().T) / 2)
    w = np.clip(w, 0, None)
    if s == 0:
        v = np.ones_like(w)
    else:
        v = np.where(w > 1e-14 * max(w.max(), 1e-300), w, 0.0) ** s
    return (u * v) @ u.conj().T


def naive_fun(a, f):
    w, u = np.linalg.eigh((a + a.conj().T) / 2)
    return (u * f(w)) @ u.conj().T


def mp_matrix(a):
    a = np.asarray(a, dtype=complex)
    return mpmath.matrix([[mpmath.mpc(complex(x)) for x in row] for row in a])


def mp_fun(m, f):
    """Spectral function of a Hermitian mpmath matrix."""
    w, q = mpmath.eighe(m)
    n = m.rows
    d = mpmath.diag([f(w[i]) for i in range(n)])
    return q * d * q.transpose_conj()


def mp_eigvals(m):
    w = mpmath.eighe(m, eigvals_only=True)
    return sorted((float(mpmath.re(x)) for x in w), reverse=True)


def to_numpy(m):
    return np.array([[complex(m[i, j]) for j in range(m.cols)] for i in range(m.rows)])


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


seeds = st.integers(min_value=0, max_value=2**32 - 1)
dims = st.integers(min_value=2, max_value=4)


# ------------------------------------------------------------ acceptance report

_CRITERIA = []


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    rep = (yield).get_result()
    if rep.when == "call":
        item.rep_call = rep


@pytest.fixture
def criterion(request):
    """Dict the test fills with ``id`` and ``detail``; one PASS/FAIL line is printed afterwards."""
    info = {"id": request.node.name, "detail": ""}
    yield info
    rep = getattr(request.node, "rep_call", None)
    status = "PASS" if rep is not None and rep.passed else "FAIL"
    line = f"criterion {info['id']}: {status}  {info['detail']}".rstrip()
    _CRITERIA.append(line)
    tr = request.config.pluginmanager.get_plugin("terminalreporter")
    if tr is not None:
        tr.write_line("")
        tr.write_line(line)


def pytest_terminal_summary(terminalreporter):
    if _CRITERIA:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_CRITERIA, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
