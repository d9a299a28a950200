import numpy as np
import pytest
import scipy.sparse as sparse

from entbus.propagation import expm_krylov, hermitian_propagator

from helpers import expm_unitary


def random_hermitian(dim, rng):
    mat = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return (mat + mat.conj().T) / 2.0


@pytest.mark.parametrize("dim", [2, 5, 17])
def test_hermitian_propagator_matches_pade_expm(dim):
    rng = np.random.default_rng(11)
    h = random_hermitian(dim, rng)
    for t in (0.0, 0.3, 2.7):
        assert np.max(np.abs(hermitian_propagator(h, t) - expm_unitary(h, t))) < 1e-11


def test_hermitian_propagator_is_unitary():
    rng = np.random.default_rng(12)
    h = random_hermitian(32, rng)
    u = hermitian_propagator(h, 5.0)
    assert np.max(np.abs(u.conj().T @ u - np.eye(32))) < 1e-10


@pytest.mark.parametrize("t", [0.0, 0.05, 1.0, -3.0, 40.0])
def test_krylov_matches_dense_exponential(t):
    rng = np.random.default_rng(21)
    h = random_hermitian(60, rng)
    vec = rng.standard_normal(60) + 1j * rng.standard_normal(60)
    vec /= np.linalg.norm(vec)
    expected = expm_unitary(h, t) @ vec
    got = expm_krylov(sparse.csr_matrix(h), vec, t, tol=1e-11)
    assert np.max(np.abs(got - expected)) < 1e-8


def test_krylov_long_interval_steps_and_norm():
    rng = np.random.default_rng(22)
    diag = rng.uniform(0.0, 30.0, 400)
    off = rng.uniform(0.1, 1.0, 399)
    h = sparse.diags([off, diag, off], offsets=[-1, 0, 1], format="csr")
    vec = rng.standard_normal(400) + 1j * rng.standard_normal(400)
    vec /= np.linalg.norm(vec)
    out, info = expm_krylov(h, vec, 30.0, tol=1e-10, return_info=True)
    assert info.steps >= 1
    assert info.max_residual < 1e-9
    assert abs(np.linalg.norm(out) - 1.0) < 1e-10


def test_krylov_reports_info_fields():
    rng = np.random.default_rng(23)
    h = sparse.csr_matrix(random_hermitian(30, rng))
    vec = np.zeros(30, dtype=complex)
    vec[0] = 1.0
    out, info = expm_krylov(h, vec, 1.0, return_info=True)
    assert info.max_krylov_dim <= 40
    assert np.isfinite(info.max_residual)
    assert abs(np.linalg.norm(out) - 1.0) < 1e-10
