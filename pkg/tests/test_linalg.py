import numpy as np
import pytest
import scipy.linalg as sl
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from fbentangle.errors import NotPSDError, SingularLyapunovError
from fbentangle.linalg import expm, is_psd, min_eig_sym, solve_lyapunov, sqrtm_psd, sym_eig
from fbentangle.parametric import free_cm, reduced_drift


def random_sym(rng, n):
    G = rng.standard_normal((n, n))
    return G + G.T


def random_psd(rng, n, rank=None):
    G = rng.standard_normal((n, rank or n))
    return G @ G.T


# --- sym_eig -----------------------------------------------------------------

def test_sym_eig_diagonal():
    w, V = sym_eig(np.diag([3.0, 1.0, 2.0]))
    np.testing.assert_allclose(w, [1, 2, 3])
    np.testing.assert_allclose(np.abs(V), np.eye(3)[:, [1, 2, 0]])


def test_sym_eig_exchange():
    w, _ = sym_eig([[0.0, 1.0], [1.0, 0.0]])
    np.testing.assert_allclose(w, [-1, 1], atol=1e-15)


def test_sym_eig_reconstruction_8x8():
    S = random_sym(np.random.default_rng(7), 8)
    w, V = sym_eig(S)
    np.testing.assert_allclose(V @ np.diag(w) @ V.T, S, atol=1e-9)


@pytest.mark.parametrize("seed", range(100))
def test_sym_eig_properties(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 17))
    S = random_sym(rng, n) * 10.0 ** rng.uniform(-3, 3)
    w, V = sym_eig(S)
    norm = np.linalg.norm(S)
    assert np.all(np.diff(w) >= 0)
    assert np.linalg.norm(V.T @ V - np.eye(n)) < 1e-9
    assert np.linalg.norm(V * w @ V.T - S) < 1e-9 * norm
    np.testing.assert_allclose(w, np.linalg.eigvalsh(S), atol=1e-10 * norm)


def test_sym_eig_degenerate_and_large():
    rng = np.random.default_rng(3)
    Q, _ = np.linalg.qr(rng.standard_normal((64, 64)))
    d = np.repeat([1.0, -2.0, 5.0, 5.0], 16)
    S = Q @ np.diag(d) @ Q.T
    w, V = sym_eig(S)
    np.testing.assert_allclose(w, np.sort(d), atol=1e-9)
    assert np.linalg.norm(V.T @ V - np.eye(64)) < 1e-9


# --- min_eig / is_psd ----------------------------------------------------------

def test_min_eig_and_is_psd():
    assert min_eig_sym(np.eye(3)) == pytest.approx(1.0)
    assert is_psd(np.eye(3))
    assert min_eig_sym(np.diag([1.0, -0.5])) == pytest.approx(-0.5)
    assert not is_psd(np.diag([1.0, -0.5]), tol=1e-10)


def test_free_steady_state_lyapunov_residual_is_zero():
    A = reduced_drift(1, 1, 0.45)
    s = free_cm(1, 1, 0.45)
    assert abs(min_eig_sym(A @ s + s @ A.T + np.eye(4))) < 1e-9


# --- sqrtm_psd -----------------------------------------------------------------

def test_sqrtm_examples():
    np.testing.assert_allclose(sqrtm_psd(np.eye(3)), np.eye(3))
    np.testing.assert_allclose(sqrtm_psd(np.diag([4.0, 9.0])), np.diag([2.0, 3.0]))
    v = np.array([[1.0], [1.0]]) / np.sqrt(2)
    P = v @ v.T
    np.testing.assert_allclose(sqrtm_psd(P), P, atol=1e-12)
    U = np.diag([0.0, 0.0, 1.0, 1.0])
    np.testing.assert_allclose(sqrtm_psd(U), U)


def test_sqrtm_clamps_roundoff_but_rejects_negative():
    np.testing.assert_allclose(sqrtm_psd(np.diag([1.0, -1e-13])), np.diag([1.0, 0.0]))
    with pytest.raises(NotPSDError):
        sqrtm_psd(np.diag([1.0, -1e-3]))


@pytest.mark.parametrize("seed", range(100))
def test_sqrtm_round_trip(seed):
    rng = np.random.default_rng(1000 + seed)
    n = int(rng.integers(2, 17))
    S = random_psd(rng, n, rank=int(rng.integers(1, n + 1)))
    R = sqrtm_psd(S)
    assert np.allclose(R, R.T)
    assert min_eig_sym(R) > -1e-10
    assert np.max(np.abs(R @ R - S)) <= 1e-9 * np.linalg.norm(S, 2)


def test_sqrtm_matches_scipy():
    S = random_psd(np.random.default_rng(5), 6)
    np.testing.assert_allclose(sqrtm_psd(S), sl.sqrtm(S).real, atol=1e-10)


# --- solve_lyapunov -------------------------------------------------------------

def test_lyapunov_vacuum_fixed_point():
    np.testing.assert_allclose(solve_lyapunov(-0.5 * np.eye(4), np.eye(4)), np.eye(4), atol=1e-14)


@pytest.mark.parametrize("seed", range(100))
def test_lyapunov_residual(seed):
    rng = np.random.default_rng(2000 + seed)
    n = int(rng.integers(2, 13))
    M = rng.standard_normal((n, n))
    shift = max(0.0, np.max(np.linalg.eigvals(M).real)) + rng.uniform(0.1, 1.0)
    A = M - shift * np.eye(n)
    Q = np.eye(n)
    X = solve_lyapunov(A, Q)
    assert np.max(np.abs(A @ X + X @ A.T + Q)) < 1e-9 * np.max(np.abs(Q)) * max(1.0, np.max(np.abs(X)))
    np.testing.assert_allclose(X, sl.solve_continuous_lyapunov(A, -Q), atol=1e-8 * np.max(np.abs(X)))


def test_lyapunov_singular():
    # eigenvalues +1 and -1 sum to zero
    with pytest.raises(SingularLyapunovError):
        solve_lyapunov(np.diag([1.0, -1.0]), np.eye(2))


# --- expm ---------------------------------------------------------------------

def test_expm_examples():
    np.testing.assert_allclose(expm(np.zeros((3, 3))), np.eye(3))
    np.testing.assert_allclose(expm(np.diag([1.0, -1.0])), np.diag([np.e, 1 / np.e]), rtol=1e-14)
    theta = 0.7
    R = expm([[0.0, theta], [-theta, 0.0]])
    np.testing.assert_allclose(R, [[np.cos(theta), np.sin(theta)], [-np.sin(theta), np.cos(theta)]], atol=1e-14)


@pytest.mark.parametrize("seed", range(100))
def test_expm_inverse_and_doubling(seed):
    rng = np.random.default_rng(3000 + seed)
    n = int(rng.integers(2, 9))
    M = rng.standard_normal((n, n))
    M *= rng.uniform(0, 5) / np.linalg.norm(M, 2)
    E = expm(M)
    np.testing.assert_allclose(E @ expm(-M), np.eye(n), atol=1e-8)
    half = expm(M / 2)
    assert np.linalg.norm(half @ half - E) <= 1e-10 * np.linalg.norm(E)
    np.testing.assert_allclose(E, sl.expm(M), rtol=1e-10, atol=1e-12 * np.linalg.norm(E))


@settings(max_examples=50, deadline=None)
@given(arrays(np.float64, (4, 4), elements=st.floats(-3, 3)))
def test_sym_eig_trace_and_determinant(M):
    S = M + M.T
    w, _ = sym_eig(S)
    assert np.sum(w) == pytest.approx(np.trace(S), abs=1e-9 * max(1.0, np.linalg.norm(S)))
    np.testing.assert_allclose(w, np.linalg.eigvalsh(S), atol=1e-10 * max(1.0, np.linalg.norm(S)))
