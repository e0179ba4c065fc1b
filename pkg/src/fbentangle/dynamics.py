"""
Open-system Gaussian dynamics with quadratic Hamiltonians and pure losses.

Time is measured in units of the loss rate, so the damping contributes
``-1/2`` to the drift and exactly the identity to the diffusion.
"""

from dataclasses import dataclass

import numpy as np

from .errors import UnstableError
from .linalg import as_matrix, max_eig_sym, solve_lyapunov, sym
from .symplectic import n_modes_of, omega


def drift_from_hamiltonian(H):
    """Drift matrix ``A = (Omega H - 1)/2`` for a symmetric Hamiltonian matrix."""
    H = as_matrix(H)
    if H.shape[0] != H.shape[1]:
        raise ValueError(f"Hamiltonian matrix must be square, got {H.shape}")
    if not np.allclose(H, H.T, rtol=0.0, atol=1e-12 * max(1.0, np.max(np.abs(H)))):
        raise ValueError("Hamiltonian matrix must be symmetric")
    N = n_modes_of(H)
    return 0.5 * (omega(N) @ sym(H) - np.eye(2 * N))


@dataclass(frozen=True)
class Stability:
    stable: bool
    margin: float

    def __bool__(self):
        return self.stable


def is_stable(A):
    """``(A + A^T) < 0``; ``margin`` is the largest eigenvalue of ``A + A^T``."""
    A = as_matrix(A)
    margin = max_eig_sym(A + A.T)
    return Stability(margin < 0.0, margin)


def steady_state_cm(A, D=None):
    """Stationary covariance matrix solving ``A s + s A^T + D = 0`` (``D`` defaults to 1)."""
    A = as_matrix(A)
    stability = is_stable(A)
    if not stability:
        raise UnstableError(f"drift is not stable: max eig(A + A^T) = {stability.margin:.6g}")
    if D is None:
        D = np.eye(A.shape[0])
    return solve_lyapunov(A, D)


@dataclass
class Trajectory:
    times: np.ndarray
    states: np.ndarray

    @property
    def final(self):
        return self.states[-1]


def _rk4(f, y0, t_final, dt, record_every):
    if dt <= 0:
        raise ValueError("dt must be positive")
    if t_final < 0:
        raise ValueError("t_final must be non-negative")
    steps = int(round(t_final / dt))
    if record_every is None:
        record_every = max(1, steps // 1000)
    y = np.array(y0, dtype=float)
    times, states = [0.0], [y.copy()]
    t = 0.0
    for k in range(1, steps + 1):
        k1 = f(t, y)
        k2 = f(t + dt / 2, y + dt / 2 * k1)
        k3 = f(t + dt / 2, y + dt / 2 * k2)
        k4 = f(t + dt, y + dt * k3)
        y = y + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        t = k * dt
        if y.ndim == 2:
            y = sym(y)
        if k % record_every == 0 or k == steps:
            times.append(t)
            states.append(y.copy())
    return Trajectory(np.array(times), np.array(states))


def evolve_cm(A, sigma0, t_final=None, dt=1e-3, D=None, record_every=None):
    """
    Integrate ``d sigma/dt = A sigma + sigma A^T + D`` with fixed-step RK4.

    ``t_final`` defaults to ``20 / |margin|`` for a stable drift. About a
    thousand evenly spaced states are recorded unless ``record_every`` says
    otherwise; the final state is always kept.
    """
    A = as_matrix(A)
    if D is None:
        D = np.eye(A.shape[0])
    if t_final is None:
        stability = is_stable(A)
        if not stability:
            raise UnstableError("t_final is required for an unstable drift")
        t_final = 20.0 / abs(stability.margin)
    return _rk4(lambda t, s: A @ s + s @ A.T + D, sym(sigma0), t_final, dt, record_every)


def evolve_mean(A, B, u_fn, x0, t_final, dt=1e-3, record_every=None):
    """Integrate ``dx/dt = A x + B u(t)`` with fixed-step RK4."""
    A = as_matrix(A)
    B = as_matrix(B)

    def rhs(t, x):
        return A @ x + B @ np.atleast_1d(u_fn(t))

    return _rk4(rhs, np.asarray(x0, dtype=float), t_final, dt, record_every)


def modified_dynamics(A, M, C):
    """
    Closed-loop drift and diffusion under direct feedback ``u = F y``.

    ``M`` is the product ``B F``. Returns ``(A + M C, 1 - (M C)^T - M C + 2 M M^T)``.
    """
    A = as_matrix(A)
    M = as_matrix(M)
    C = as_matrix(C)
    if M.shape[0] != A.shape[0] or M.shape[1] != C.shape[0] or C.shape[1] != A.shape[1]:
        raise ValueError(f"incompatible shapes A{A.shape}, M{M.shape}, C{C.shape}")
    MC = M @ C
    D = np.eye(A.shape[0]) - MC.T - MC + 2.0 * M @ M.T
    return A + MC, sym(D)
