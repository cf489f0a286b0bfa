import numpy as np
import pytest
import scipy.linalg as sla

from activeirs.spectral import (
    SingularMatrixError,
    pd_solve,
    principal_eigvec,
    principal_eigvec_low_rank,
    rank_one_rayleigh_max,
    rayleigh_quotient,
)


def crandn(rng, *shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def random_pd(rng, n):
    r = crandn(rng, n, n)
    return r.conj().T @ r + np.eye(n)


def random_psd(rng, n, rank):
    r = crandn(rng, rank, n)
    return r.conj().T @ r


def oracle_max_quotient(a, b):
    # non-Hermitian dense eigendecomposition of b^{-1} a
    vals = sla.eig(np.linalg.solve(b, a), right=False)
    return float(np.max(vals.real))


def random_unit_probes(rng, n, count):
    v = crandn(rng, count, n)
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def probe_quotients(a, b, probes):
    num = np.einsum("ki,ij,kj->k", probes.conj(), a, probes).real
    den = np.einsum("ki,ij,kj->k", probes.conj(), b, probes).real
    return num / den


def phase_match(u, v):
    return abs(np.vdot(u, v)) / (np.linalg.norm(u) * np.linalg.norm(v))


def test_pd_solve_trivial():
    b = np.array([1 + 2j, -3, 0.5j])
    np.testing.assert_allclose(pd_solve(np.eye(3), b), b)
    np.testing.assert_allclose(pd_solve(2 * np.eye(2), np.array([4.0, 0.0])), [2.0, 0.0])


@pytest.mark.parametrize("seed", range(10))
def test_pd_solve_residual(seed):
    rng = np.random.default_rng(seed)
    m = random_pd(rng, 7)
    b = crandn(rng, 7)
    x = pd_solve(m, b)
    assert np.linalg.norm(m @ x - b) <= 1e-9 * np.linalg.norm(b)


def test_pd_solve_rejects_indefinite():
    with pytest.raises(SingularMatrixError):
        pd_solve(np.diag([1.0, -1.0]), np.ones(2))


def test_principal_eigvec_diagonal():
    v = principal_eigvec(np.diag([2.0, 1.0]), np.eye(2))
    np.testing.assert_allclose(v, [1.0, 0.0], atol=1e-12)


def test_principal_eigvec_rank_one():
    u = np.array([1 + 1j, 2, -1j])
    v = principal_eigvec(np.outer(u, u.conj()), np.eye(3))
    assert phase_match(u, v) == pytest.approx(1.0, abs=1e-12)


def test_principal_eigvec_phase_convention():
    rng = np.random.default_rng(0)
    v = principal_eigvec(random_psd(rng, 5, 5), random_pd(rng, 5))
    i = np.argmax(np.abs(v))
    assert v[i].imag == 0 and v[i].real > 0
    assert np.linalg.norm(v) == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("seed", range(20))
def test_principal_eigvec_matches_dense_oracle(seed):
    rng = np.random.default_rng(seed)
    a, b = random_psd(rng, 4, 3), random_pd(rng, 4)
    v = principal_eigvec(a, b)
    assert rayleigh_quotient(a, b, v) == pytest.approx(oracle_max_quotient(a, b), rel=1e-8)


@pytest.mark.parametrize("seed", range(5))
def test_principal_eigvec_beats_random_probes(seed):
    rng = np.random.default_rng(100 + seed)
    a, b = random_psd(rng, 5, 2), random_pd(rng, 5)
    q = rayleigh_quotient(a, b, principal_eigvec(a, b))
    assert q >= probe_quotients(a, b, random_unit_probes(rng, 5, 10_000)).max()


def test_rank_one_trivial():
    v = rank_one_rayleigh_max(np.eye(2), np.array([3.0, 4.0]))
    assert phase_match(v, [0.6, 0.8]) == pytest.approx(1.0, abs=1e-12)
    v = rank_one_rayleigh_max(np.diag([1.0, 4.0]), np.array([1.0, 1.0]))
    w = np.array([1.0, 0.25])
    assert phase_match(v, w) == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(ValueError):
        rank_one_rayleigh_max(np.eye(2), np.zeros(2))


@pytest.mark.parametrize("seed", range(10))
def test_rank_one_global_max(seed):
    rng = np.random.default_rng(seed)
    b, u = random_pd(rng, 4), crandn(rng, 4)
    a = np.outer(u, u.conj())
    v = rank_one_rayleigh_max(b, u)
    q = rayleigh_quotient(a, b, v)
    assert q == pytest.approx(np.vdot(u, np.linalg.solve(b, u)).real, rel=1e-10)
    assert q >= probe_quotients(a, b, random_unit_probes(rng, 4, 10_000)).max()
    assert phase_match(v, principal_eigvec(a, b)) >= 1 - 1e-8


@pytest.mark.parametrize("seed", range(30))
def test_low_rank_path_matches_dense(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 9))
    u, f = crandn(rng, n), crandn(rng, n)
    alpha, beta, s = rng.uniform(0, 2), rng.uniform(0, 2), rng.uniform(0.1, 2)
    a = np.outer(u, u.conj()) + alpha * np.eye(n)
    b = beta * np.outer(f, f.conj()) + s * np.eye(n)
    v = principal_eigvec_low_rank(u, alpha, f, beta, s)
    assert np.linalg.norm(v) == pytest.approx(1.0, abs=1e-12)
    assert rayleigh_quotient(a, b, v) == pytest.approx(oracle_max_quotient(a, b), rel=1e-10)


def test_low_rank_path_orthogonal_complement_wins():
    # u = 0: quotient alpha / (beta |f^H v|^2 + s) is largest orthogonal to f
    f = np.array([1.0, 1.0, 0.0])
    v = principal_eigvec_low_rank(np.zeros(3), 1.0, f, 1.0, 1.0)
    assert abs(np.vdot(f, v)) < 1e-12


def test_low_rank_path_all_zero():
    v = principal_eigvec_low_rank(np.zeros(2), 1.0, np.zeros(2), 1.0, 1.0)
    assert np.linalg.norm(v) == pytest.approx(1.0)
