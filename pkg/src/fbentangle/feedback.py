"""
Continuous general-dyne monitoring and the steady-state entanglement bound.

A covariance matrix is reachable as a conditional steady state of the
monitored dynamics iff it is physical and ``A s + s A^T + 1 >= 0``. The
smallest partially transposed symplectic eigenvalue of any such state
obeys ``nu^2 >= alpha_1 alpha_2``, with ``alpha`` the ascending eigenvalues
of ``-A - A^T``.
"""

import math
from dataclasses import dataclass

import numpy as np

from .dynamics import drift_from_hamiltonian, is_stable, steady_state_cm
from .errors import InvalidUnravellingError, UnstableError
from .linalg import TOL_PSD, as_matrix, max_eig_sym, min_eig_sym, solve_lyapunov, sqrtm_psd, sym, sym_eig
from .symplectic import InequalityReport, check_physical, n_modes_of, omega

TOL_STABILISING = 1e-8


def unravelling_from_upsilon(upsilon, tol=TOL_PSD):
    """
    Unravelling matrix ``U = 1/2 [[1 + Re Y, Im Y], [Im Y, 1 - Re Y]]``.

    The rows and columns of ``U`` are ordered ``(q1..qN, p1..pN)``, matching
    :func:`cbar`.

    Raises
    ------
    InvalidUnravellingError
        If ``Im Y`` is not symmetric or ``U`` is not positive semi-definite.
    """
    upsilon = np.array(upsilon, dtype=complex, ndmin=2)
    N = upsilon.shape[0]
    if upsilon.shape != (N, N):
        raise ValueError(f"Upsilon must be square, got {upsilon.shape}")
    re, im = upsilon.real, upsilon.imag
    eye = np.eye(N)
    U = 0.5 * np.block([[eye + re, im], [im, eye - re]])
    if not np.allclose(U, U.T, rtol=0.0, atol=1e-12):
        raise InvalidUnravellingError("unravelling matrix is not symmetric (Im Upsilon asymmetric)")
    lam = min_eig_sym(U)
    if lam < -tol:
        raise InvalidUnravellingError(f"unravelling matrix not PSD (min eigenvalue {lam:.3e})")
    return sym(U)


def cbar(n_modes):
    """Rows pick ``q1..qN`` then ``p1..pN`` (each scaled by 1/sqrt 2) out of ``(q1, p1, ...)``."""
    C = np.zeros((2 * n_modes, 2 * n_modes))
    r = 1.0 / math.sqrt(2.0)
    for j in range(n_modes):
        C[j, 2 * j] = r
        C[n_modes + j, 2 * j + 1] = r
    return C


def measurement_matrix(U):
    """Output matrix ``C = 2 U^(1/2) Cbar`` of the measured current."""
    U = as_matrix(U)
    return 2.0 * sqrtm_psd(U) @ cbar(n_modes_of(U))


@dataclass(frozen=True)
class StabilisingReport:
    ok: bool
    lyapunov_margin: float
    physical_margin: float

    def __bool__(self):
        return self.ok


def is_stabilising_solution(sigma, A, tol=TOL_STABILISING):
    """
    Test whether ``sigma`` is a stabilising solution for drift ``A``.

    ``lyapunov_margin`` is the smallest eigenvalue of ``A s + s A^T + 1`` and
    ``physical_margin`` the smallest eigenvalue of the real embedding of
    ``s + i Omega``. Both are zero for states on the boundary.
    """
    sigma = sym(as_matrix(sigma))
    A = as_matrix(A)
    if sigma.shape != A.shape:
        raise ValueError(f"shape mismatch: sigma {sigma.shape}, A {A.shape}")
    lyap = min_eig_sym(A @ sigma + sigma @ A.T + np.eye(A.shape[0]))
    phys = check_physical(sigma, tol).min_embedding_eig
    return StabilisingReport(lyap >= -tol and phys >= -tol, lyap, phys)


@dataclass(frozen=True)
class BoundReport:
    alpha1: float
    alpha2: float
    nu_sq_bound: float
    en_bound: float


def entanglement_bound(A):
    """
    Upper bound on steady-state log-negativity reachable by monitoring and feedback.

    Raises
    ------
    UnstableError
        If ``A + A^T`` is not negative definite.
    """
    A = as_matrix(A)
    stability = is_stable(A)
    if not stability:
        raise UnstableError(f"drift is not stable: max eig(A + A^T) = {stability.margin:.6g}")
    alphas = sym_eig(-A - A.T)[0]
    if alphas.size < 2:
        raise ValueError("need at least one mode (two quadratures)")
    a1, a2 = float(alphas[0]), float(alphas[1])
    nu_sq = a1 * a2
    return BoundReport(a1, a2, nu_sq, max(0.0, -0.5 * math.log2(nu_sq)))


def eigb_check(sigma, A, tol=1e-8):
    """Check that the two largest eigenvalues satisfy ``l1 l2 <= 1/(alpha1 alpha2)``."""
    w = sym_eig(sigma)[0]
    bound = entanglement_bound(A)
    lhs, rhs = float(w[-1] * w[-2]), 1.0 / bound.nu_sq_bound
    return InequalityReport(lhs <= rhs + tol * max(1.0, rhs), lhs, rhs)


def optimal_unravelling(A, sigma, tol=TOL_PSD):
    """
    Unravelling that stabilises ``sigma``: ``U = E (A s + s A^T + 1) E^T`` with ``E = 2 Cbar s - Cbar``.

    The result is validated, never projected. An invalid ``U`` means
    ``sigma`` is not reachable.
    """
    A = as_matrix(A)
    sigma = sym(as_matrix(sigma))
    Cb = cbar(n_modes_of(sigma))
    E = 2.0 * Cb @ sigma - Cb
    X = A @ sigma + sigma @ A.T + np.eye(A.shape[0])
    U = E @ X @ E.T
    if not np.allclose(U, U.T, rtol=0.0, atol=1e-9 * max(1.0, np.max(np.abs(U)))):
        raise InvalidUnravellingError("optimal unravelling is not symmetric")
    U = sym(U)
    lam = min_eig_sym(U)
    if lam < -tol * max(1.0, np.max(np.abs(U))):
        raise InvalidUnravellingError(
            f"optimal unravelling not PSD (min eigenvalue {lam:.3e}); state not reachable"
        )
    return U


def random_stable_drift(n_modes, rng, scale=1.0):
    """
    Drift ``(Omega H - 1)/2`` for a random symmetric ``H``, rescaled into the stable region.

    The rescaling is random, so some samples sit close to the threshold.
    """
    G = rng.standard_normal((2 * n_modes, 2 * n_modes)) * scale
    H = G + G.T
    A = drift_from_hamiltonian(H)
    excess = max(0.0, is_stable(A).margin + 1.0)
    if excess >= 1.0:
        H *= rng.uniform(0.2, 0.98) / excess
        A = drift_from_hamiltonian(H)
    return A


def sample_stabilising_solutions(A, rng, count=4, max_rank=None):
    """
    Sample stabilising solutions of drift ``A``.

    Each candidate is ``s = Lyap(A, 1 - t X)`` for a random low-rank PSD
    ``X``, so ``A s + s A^T + 1 = t X >= 0`` by construction. With
    ``s = s_free - t D`` the physicality boundary is
    ``t_max = 1 / lambda_max(G^(-1/2) (D + D) G^(-1/2))`` where ``G`` is the
    real embedding of ``s_free + i Omega``. Half of the samples are placed
    on that boundary. Candidates are kept only if
    :func:`is_stabilising_solution` accepts them.
    """
    A = as_matrix(A)
    dim = A.shape[0]
    free = steady_state_cm(A)
    Om = omega(dim // 2)
    w, V = sym_eig(np.block([[free, -Om], [Om, free]]))
    if w[0] > 1e-9:
        g_inv_root = (V / np.sqrt(w)) @ V.T
    else:
        g_inv_root = None
    max_rank = max_rank or dim
    samples = []
    for _ in range(count * 4):
        if len(samples) == count:
            break
        rank = int(rng.integers(1, max_rank + 1))
        G = rng.standard_normal((dim, rank))
        X = G @ G.T
        X /= np.max(np.abs(sym_eig(X)[0]))
        delta = solve_lyapunov(A, X)
        if g_inv_root is None:
            t_max = 0.0
        else:
            zero = np.zeros_like(delta)
            lead = max_eig_sym(g_inv_root @ np.block([[delta, zero], [zero, delta]]) @ g_inv_root)
            t_max = 1.0 / lead if lead > 0 else 0.0
        t = t_max if rng.random() < 0.5 else t_max * rng.random()
        sigma = free - t * delta
        if is_stabilising_solution(sigma, A):
            samples.append(sigma)
    return samples
