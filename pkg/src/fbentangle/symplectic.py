"""
Phase-space kinematics of Gaussian states.

Quadratures are ordered ``(q1, p1, ..., qN, pN)`` and covariance matrices
are normalised so that the vacuum is the identity.
"""

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import NotPositiveError, UnphysicalError
from .linalg import TOL_EIG, TOL_PSD, as_matrix, expm, sym, sym_eig

_PAIR_GAP = 1e-6


def omega(n_modes):
    """
    Symplectic form for ``n_modes`` modes.

    Parameters
    ----------
    n_modes : int
        Number of modes N.

    Returns
    -------
    ndarray
        The 2N x 2N antisymmetric matrix with ``[x_j, x_k] = i Omega_jk``.
    """
    if n_modes < 1:
        raise ValueError("n_modes must be >= 1")
    return np.kron(np.eye(n_modes), np.array([[0.0, 1.0], [-1.0, 0.0]]))


def n_modes_of(sigma):
    dim = np.shape(sigma)[0]
    if dim % 2:
        raise ValueError(f"phase-space dimension must be even, got {dim}")
    return dim // 2


@dataclass(frozen=True)
class Bipartition:
    """A split of ``n_modes`` modes into two non-empty parties."""

    party_a: tuple
    party_b: tuple

    def __post_init__(self):
        a, b = tuple(sorted(self.party_a)), tuple(sorted(self.party_b))
        if not a or not b:
            raise ValueError("both parties must be non-empty")
        if set(a) & set(b):
            raise ValueError("parties overlap")
        if sorted(a + b) != list(range(len(a) + len(b))):
            raise ValueError("parties must cover modes 0..N-1")
        object.__setattr__(self, "party_a", a)
        object.__setattr__(self, "party_b", b)

    @property
    def n_modes(self):
        return len(self.party_a) + len(self.party_b)

    @property
    def sizes(self):
        return len(self.party_a), len(self.party_b)

    @classmethod
    def split(cls, m, n):
        """First ``m`` modes against the remaining ``n``."""
        return cls(tuple(range(m)), tuple(range(m, m + n)))

    @classmethod
    def parse(cls, text):
        """Parse ``"m:n"`` into :meth:`split`."""
        try:
            m, n = (int(part) for part in text.split(":"))
        except ValueError as exc:
            raise ValueError(f"bipartition must look like m:n, got {text!r}") from exc
        if m < 1 or n < 1:
            raise ValueError(f"bipartition sizes must be positive, got {text!r}")
        return cls.split(m, n)

    @classmethod
    def one_vs_rest(cls, mode, n_modes):
        rest = tuple(k for k in range(n_modes) if k != mode)
        return cls((mode,), rest)

    def __str__(self):
        m, n = self.sizes
        return f"{m}:{n}"


def one_vs_rest_bipartitions(n_modes):
    return [Bipartition.one_vs_rest(k, n_modes) for k in range(n_modes)]


def pt_flip(bipartition):
    """Diagonal reflection P flipping the momenta of ``party_b``; sigma~ = P sigma P."""
    d = np.ones(2 * bipartition.n_modes)
    for k in bipartition.party_b:
        d[2 * k + 1] = -1.0
    return np.diag(d)


def _check_dim(sigma, bipartition):
    if 2 * bipartition.n_modes != sigma.shape[0]:
        raise ValueError(
            f"bipartition covers {bipartition.n_modes} modes, matrix has {n_modes_of(sigma)}"
        )


def symplectic_spectrum(sigma):
    """
    Symplectic eigenvalues of a positive-definite covariance matrix.

    Computed as square roots of the eigenvalues of the symmetric matrix
    ``s^(1/2) Omega^T sigma Omega s^(1/2)`` (with ``s = sigma``), whose
    spectrum is doubly degenerate; one value of each pair is kept.

    Returns
    -------
    ndarray
        The N symplectic eigenvalues in ascending order.
    """
    sigma = sym(as_matrix(sigma))
    N = n_modes_of(sigma)
    w, V = sym_eig(sigma)
    if w[0] <= 0.0:
        raise NotPositiveError(f"covariance matrix not positive definite (min eigenvalue {w[0]:.3e})")
    root = (V * np.sqrt(w)) @ V.T
    Om = omega(N)
    squares = sym_eig(root @ Om.T @ sigma @ Om @ root)[0]
    squares = np.clip(squares, 0.0, None)
    lower, upper = squares[0::2], squares[1::2]
    gap = np.abs(upper - lower)
    if np.any(gap > _PAIR_GAP * np.maximum(upper, np.finfo(float).tiny)):
        raise ArithmeticError(f"symplectic spectrum not doubly degenerate: {squares}")
    return np.sqrt(0.5 * (lower + upper))


def pt_symplectic_spectrum(sigma, bipartition):
    """Symplectic eigenvalues of the partially transposed state, ascending."""
    sigma = as_matrix(sigma)
    _check_dim(sigma, bipartition)
    P = pt_flip(bipartition)
    return symplectic_spectrum(P @ sigma @ P)


def pt_min_symplectic(sigma, bipartition):
    """Smallest partially transposed symplectic eigenvalue."""
    return float(pt_symplectic_spectrum(sigma, bipartition)[0])


def log_negativity(sigma, bipartition, summed=False):
    """
    Logarithmic negativity in ebits.

    By default only the smallest partially transposed symplectic eigenvalue
    enters, ``max(0, -log2 nu_min)``. With ``summed=True`` every eigenvalue
    below one contributes. A warning is emitted when the single-eigenvalue
    form discards a second eigenvalue below one; eigenvalues within
    ``TOL_EIG`` of one are treated as unentangled for that purpose.
    """
    nus = pt_symplectic_spectrum(sigma, bipartition)
    below = nus[nus < 1.0]
    if summed:
        return float(max(0.0, -np.sum(np.log2(below))))
    entangled = np.count_nonzero(nus < 1.0 - TOL_EIG)
    if entangled > 1:
        warnings.warn(
            f"{entangled} partially transposed symplectic eigenvalues below 1; "
            "single-eigenvalue log-negativity underestimates entanglement",
            RuntimeWarning,
            stacklevel=2,
        )
    return float(max(0.0, -np.log2(nus[0])))


def _rng(seed):
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def random_symplectic(n_modes, seed=None, magnitude=2.0):
    """``expm(Omega K)`` for a random symmetric ``K`` of spectral norm ``magnitude``."""
    rng = _rng(seed)
    G = rng.standard_normal((2 * n_modes, 2 * n_modes))
    K = G + G.T
    norm = np.max(np.abs(sym_eig(K)[0]))
    if magnitude == 0 or norm == 0:
        return np.eye(2 * n_modes)
    K *= magnitude / norm
    return expm(omega(n_modes) @ K)


def random_cm(n_modes, seed=None, symplectic_eigs=None, magnitude=2.0):
    """Random covariance matrix ``S^T diag(nu1, nu1, ...) S`` with prescribed spectrum."""
    if symplectic_eigs is None:
        symplectic_eigs = np.ones(n_modes)
    nus = np.asarray(symplectic_eigs, dtype=float)
    if nus.shape != (n_modes,):
        raise ValueError(f"need {n_modes} symplectic eigenvalues, got {nus.shape}")
    if np.any(nus < 1.0):
        raise UnphysicalError(f"symplectic eigenvalues must be >= 1, got {nus}")
    S = random_symplectic(n_modes, seed, magnitude)
    return sym(S.T @ np.diag(np.repeat(nus, 2)) @ S)


@dataclass(frozen=True)
class PhysicalityReport:
    ok: bool
    min_embedding_eig: float
    min_symplectic_minus_one: float

    def __bool__(self):
        return self.ok


def check_physical(sigma, tol=TOL_PSD):
    """
    Test ``sigma + i Omega >= 0`` through its real 4N x 4N embedding.

    The report also carries ``min(nu) - 1`` as an independent cross-check;
    it is NaN when sigma is not positive definite.
    """
    sigma = sym(as_matrix(sigma))
    N = n_modes_of(sigma)
    Om = omega(N)
    embedding = np.block([[sigma, -Om], [Om, sigma]])
    lam = float(sym_eig(embedding)[0][0])
    try:
        nu_gap = float(symplectic_spectrum(sigma)[0]) - 1.0
    except (NotPositiveError, ArithmeticError):
        nu_gap = float("nan")
    return PhysicalityReport(lam >= -tol, lam, nu_gap)


@dataclass(frozen=True)
class InequalityReport:
    ok: bool
    lhs: float
    rhs: float

    def __bool__(self):
        return self.ok


def poincare_check(sigma, tol=1e-9):
    """
    Check ``lambda_up[k] * lambda_down[k] >= 1`` for the ordinary eigenvalues.

    ``lhs`` is the smallest such product, ``rhs`` is one.
    """
    w = sym_eig(sigma)[0]
    worst = float(np.min(w * w[::-1]))
    return InequalityReport(worst >= 1.0 - tol, worst, 1.0)


def sympb_check(sigma, bipartition, tol=1e-9):
    """Check ``nu_pt_min^2 >= lambda_1 * lambda_2`` (two smallest eigenvalues)."""
    w = sym_eig(sigma)[0]
    nu = pt_min_symplectic(sigma, bipartition)
    lhs, rhs = nu * nu, float(w[0] * w[1])
    return InequalityReport(lhs >= rhs - tol, lhs, rhs)
