"""
Dense real linear algebra used by the rest of the package.

Everything here works on small (dimension <= 64) numpy arrays. The
eigensolver is a cyclic Jacobi method, the Lyapunov solver vectorises the
equation through its Kronecker sum and the matrix exponential uses scaling
and squaring of a truncated Taylor series.
"""

import math

import numpy as np

from .errors import ConvergenceError, NotPSDError, SingularLyapunovError

TOL_EIG = 1e-10
TOL_PSD = 1e-10
TOL_RESID = 1e-9

_MAX_SWEEPS = 60


def sym(M):
    """Return the symmetric part (M + M^T)/2 as a float array."""
    M = np.asarray(M, dtype=float)
    return 0.5 * (M + M.T)


def as_matrix(M):
    M = np.array(M, dtype=float, ndmin=2)
    if M.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise ValueError("matrix has non-finite entries")
    return M


def _as_square(M):
    M = as_matrix(M)
    if M.shape[0] != M.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {M.shape}")
    return M


def sym_eig(S, tol=TOL_EIG):
    """
    Eigendecomposition of a real symmetric matrix by cyclic Jacobi rotations.

    Parameters
    ----------
    S : array_like
        Symmetric matrix. Only its symmetric part is used.
    tol : float
        Relative tolerance on the residual ``||S V - V diag(w)||``.

    Returns
    -------
    w : ndarray
        Eigenvalues in ascending order.
    V : ndarray
        Orthonormal eigenvectors stored as columns, ``V[:, k]`` pairs with
        ``w[k]``.

    Raises
    ------
    ConvergenceError
        If the off-diagonal mass does not vanish within the sweep cap.
    """
    S = sym(_as_square(S))
    n = S.shape[0]
    a = S.copy()
    V = np.eye(n)
    scale = np.linalg.norm(S)
    if n == 1 or scale == 0.0:
        return np.diag(a).copy(), V

    target = 1e-4 * tol * scale
    for _ in range(_MAX_SWEEPS):
        off = np.linalg.norm(a - np.diag(np.diag(a)))
        if off <= target:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = math.copysign(1.0, theta) / (abs(theta) + math.hypot(theta, 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c

                col_p = a[:, p].copy()
                col_q = a[:, q]
                a[:, p] = c * col_p - s * col_q
                a[:, q] = s * col_p + c * col_q
                row_p = a[p, :].copy()
                row_q = a[q, :]
                a[p, :] = c * row_p - s * row_q
                a[q, :] = s * row_p + c * row_q
                a[p, q] = a[q, p] = 0.0

                vp = V[:, p].copy()
                vq = V[:, q]
                V[:, p] = c * vp - s * vq
                V[:, q] = s * vp + c * vq

    w = np.diag(a).copy()
    order = np.argsort(w, kind="stable")
    w = w[order]
    V = V[:, order]
    residual = np.linalg.norm(S @ V - V * w)
    if residual > tol * scale:
        raise ConvergenceError("Jacobi eigensolver did not converge", residual)
    return w, V


def min_eig_sym(S):
    """Smallest eigenvalue of the symmetric part of ``S``."""
    return float(sym_eig(S)[0][0])


def max_eig_sym(S):
    return float(sym_eig(S)[0][-1])


def is_psd(S, tol=TOL_PSD):
    return min_eig_sym(S) >= -tol


def sqrtm_psd(S, tol=TOL_PSD):
    """
    Principal square root of a positive semi-definite symmetric matrix.

    Eigenvalues in ``[-tol * max(1, |lambda|_max), 0)`` are treated as
    round-off and clamped to zero; anything more negative raises
    :class:`NotPSDError`.
    """
    w, V = sym_eig(S)
    floor = -tol * max(1.0, float(np.max(np.abs(w))))
    if w[0] < floor:
        raise NotPSDError(f"matrix is not positive semi-definite (min eigenvalue {w[0]:.3e})")
    root = np.sqrt(np.clip(w, 0.0, None))
    return sym((V * root) @ V.T)


def solve_lyapunov(A, Q, tol=TOL_RESID):
    """
    Solve ``A X + X A^T + Q = 0`` for symmetric ``X``.

    The equation is vectorised as ``(I (x) A + A (x) I) vec(X) = -vec(Q)``
    and solved densely, which is cheap for the dimensions used here.

    Raises
    ------
    SingularLyapunovError
        If the Kronecker sum is singular, i.e. ``A`` has eigenvalues with
        ``lambda_i + lambda_j = 0``.
    """
    A = _as_square(A)
    Q = sym(_as_square(Q))
    n = A.shape[0]
    if Q.shape != (n, n):
        raise ValueError(f"shape mismatch: A is {A.shape}, Q is {Q.shape}")
    eye = np.eye(n)
    K = np.kron(eye, A) + np.kron(A, eye)
    try:
        x = np.linalg.solve(K, -Q.reshape(-1))
    except np.linalg.LinAlgError as exc:
        raise SingularLyapunovError("Kronecker-sum system is singular") from exc
    X = sym(x.reshape(n, n))
    if not np.all(np.isfinite(X)):
        raise SingularLyapunovError("Lyapunov solution is not finite")
    residual = np.max(np.abs(A @ X + X @ A.T + Q))
    # near-singular systems solve to garbage; the residual catches them
    if residual > tol * max(1.0, np.max(np.abs(Q))) * max(1.0, np.max(np.abs(X))):
        raise SingularLyapunovError(
            f"Lyapunov residual {residual:.3e} too large; A has (near) mirrored eigenvalues"
        )
    return X


def expm(M):
    """Matrix exponential by scaling and squaring with a degree-18 Taylor series."""
    M = _as_square(M)
    n = M.shape[0]
    norm = np.max(np.sum(np.abs(M), axis=0)) if n else 0.0
    s = max(0, int(math.ceil(math.log2(norm / 0.5)))) if norm > 0.5 else 0
    X = M / 2.0**s
    result = np.eye(n)
    term = np.eye(n)
    for k in range(1, 19):
        term = term @ X / k
        result = result + term
    for _ in range(s):
        result = result @ result
    return result
