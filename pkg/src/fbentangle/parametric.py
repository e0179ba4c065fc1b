"""
All-to-all parametric interactions under loss, with and without feedback.

``N`` modes interact pairwise through ``chi (q_j p_k + p_j q_k)``. For an
``m:n`` split the symmetric mode of each party carries all of the
entanglement, so the relevant physics lives in a two-mode reduced drift.
The local feedback family monitors both reduced momenta and feeds each
current back onto the other party with gains ``mu1`` and ``mu2 = mu1 n/m``.
"""

import csv
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .dynamics import drift_from_hamiltonian, is_stable, modified_dynamics, steady_state_cm
from .errors import ConstructionFailedError, FeedbackEntanglementError, UnstableError, UnstableLoopError
from .feedback import entanglement_bound, is_stabilising_solution, measurement_matrix
from .linalg import as_matrix, solve_lyapunov, sym, sym_eig
from .search import bisect_boundary, find_exit, golden_section
from .symplectic import Bipartition, pt_min_symplectic

SWEEP_HEADER = ("chi", "nu_free", "nu_local", "nu_bound", "mu1_star", "status")


def chi_threshold(n_modes):
    """Largest stable coupling, ``1 / (2 (N - 1))``."""
    return 1.0 / (2.0 * (n_modes - 1))


def _require_stable(n_modes, chi):
    if chi < 0:
        raise ValueError("chi must be non-negative")
    if chi >= chi_threshold(n_modes):
        raise UnstableError(
            f"chi = {chi:g} is unstable for N = {n_modes}: need chi < 1/(2(N-1)) = {chi_threshold(n_modes):.6g}"
        )


def parametric_hamiltonian(n_modes, chi):
    """
    Hamiltonian matrix of the all-to-all parametric coupling.

    Entries ``H[q_j, p_k] = H[p_k, q_j] = 2 chi`` for ``j != k``. The factor
    two makes ``(Omega H - 1)/2`` carry couplings of exactly ``chi``, which
    puts the stability threshold at ``1/(2(N-1))``.
    """
    if n_modes < 2:
        raise ValueError("need at least two modes")
    if chi < 0:
        raise ValueError("chi must be non-negative")
    H = np.zeros((2 * n_modes, 2 * n_modes))
    for j in range(n_modes):
        for k in range(n_modes):
            if j != k:
                H[2 * j, 2 * k + 1] = H[2 * k + 1, 2 * j] = 2.0 * chi
    return H


def full_drift(n_modes, chi):
    return drift_from_hamiltonian(parametric_hamiltonian(n_modes, chi))


def reduced_drift(m, n, chi):
    """
    Two-mode drift of the party-symmetric modes for an ``m:n`` split.

    Position couplings are ``(m-1) chi`` and ``(n-1) chi`` on each side and
    ``sqrt(m n) chi`` across; momenta carry the opposite sign.
    """
    if m < 1 or n < 1:
        raise ValueError("party sizes must be positive")
    cross = math.sqrt(m * n) * chi
    K = np.array([[(m - 1) * chi, cross], [cross, (n - 1) * chi]])
    A = np.zeros((4, 4))
    A[0::2, 0::2] = K
    A[1::2, 1::2] = -K
    return A - 0.5 * np.eye(4)


def free_cm(m, n, chi):
    """Steady state of the reduced model without feedback."""
    _require_stable(m + n, chi)
    return steady_state_cm(reduced_drift(m, n, chi))


def free_logneg(n_modes, chi):
    """Closed-form free log-negativity ``1/2 log2[(1 + 2 chi)(1 + 2 (N-1) chi)]`` (balanced split)."""
    _require_stable(n_modes, chi)
    return 0.5 * math.log2((1 + 2 * chi) * (1 + 2 * (n_modes - 1) * chi))


def parametric_bound(n_modes, chi):
    """Closed-form ceiling ``-1/2 [log2(1 - 2 chi) + log2(1 - 2 (N-1) chi)]`` in ebits."""
    _require_stable(n_modes, chi)
    return -0.5 * (math.log2(1 - 2 * chi) + math.log2(1 - 2 * (n_modes - 1) * chi))


def optimal_cm(A, tol=1e-8):
    """
    Stabilising state that minimises the entangled symplectic eigenvalue.

    ``A`` must be symmetric with decoupled position and momentum sectors,
    ``A_qq = K - 1/2`` and ``A_pp = -K - 1/2`` (the reduced parametric form
    and the full all-to-all drift both qualify). In the eigenmodes of ``K``
    each mode has one quadrature with drift ``|k| - 1/2``; that quadrature
    gets the largest variance compatible with ``A s + s A^T + 1 >= 0``,
    namely ``1/(1 - 2|k|)``, and its conjugate the reciprocal, so both
    inequalities are saturated.

    Raises
    ------
    ConstructionFailedError
        If ``A`` lacks the required structure or the result fails the
        stabilising-solution test.
    """
    A = as_matrix(A)
    dim = A.shape[0]
    scale = max(1.0, float(np.max(np.abs(A))))
    if not np.allclose(A, A.T, rtol=0.0, atol=1e-12 * scale):
        raise ConstructionFailedError("drift must be symmetric")
    Aqq, App, Aqp = A[0::2, 0::2], A[1::2, 1::2], A[0::2, 1::2]
    n = dim // 2
    if np.max(np.abs(Aqp)) > 1e-12 * scale or not np.allclose(
        Aqq + App, -np.eye(n), rtol=0.0, atol=1e-12 * scale
    ):
        raise ConstructionFailedError("drift must have the form (K - 1/2) (+) (-K - 1/2)")
    stability = is_stable(A)
    if not stability:
        raise UnstableError(f"drift is not stable: max eig(A + A^T) = {stability.margin:.6g}")

    k, O = sym_eig(sym(Aqq - App) / 2.0)
    # the anti-squeezed quadrature of each eigenmode takes 1/(1 - 2|k|)
    vq = np.where(k >= 0, 1.0 / (1.0 - 2.0 * k), 1.0 + 2.0 * k)
    vp = 1.0 / vq
    sigma = np.zeros_like(A)
    sigma[0::2, 0::2] = (O * vq) @ O.T
    sigma[1::2, 1::2] = (O * vp) @ O.T
    sigma = sym(sigma)

    report = is_stabilising_solution(sigma, A, tol)
    if not report:
        raise ConstructionFailedError(
            f"optimal state is not stabilising: lyapunov margin {report.lyapunov_margin:.3e}, "
            f"physical margin {report.physical_margin:.3e}"
        )
    return sigma


@dataclass(frozen=True)
class LocalFeedbackScheme:
    """Momentum homodyne on both reduced modes, crossed back as ``mu2`` onto mode 1 and ``mu1`` onto mode 2."""

    mu1: float
    mu2: float
    U: np.ndarray
    M: np.ndarray


def local_feedback_scheme(m, n, mu1):
    mu2 = mu1 * n / m
    U = np.diag([0.0, 0.0, 1.0, 1.0])
    M = np.zeros((4, 4))
    M[1, 3] = mu2 / math.sqrt(2.0)
    M[3, 2] = mu1 / math.sqrt(2.0)
    return LocalFeedbackScheme(mu1, mu2, U, M)


def local_closed_loop(m, n, chi, mu1):
    """Closed-loop ``(A', D')`` of the reduced model under the local scheme."""
    scheme = local_feedback_scheme(m, n, mu1)
    C = measurement_matrix(scheme.U)
    return modified_dynamics(reduced_drift(m, n, chi), scheme.M, C)


def _loop_margin(m, n, chi, mu1):
    A_loop, _ = local_closed_loop(m, n, chi, mu1)
    return is_stable(A_loop).margin


def local_feedback_steady(m, n, chi, mu1):
    """
    Steady state under local Markovian feedback with gain ``mu1``.

    Returns
    -------
    sigma : ndarray
        4 x 4 closed-loop covariance matrix.
    nu_sq : float
        Squared smallest partially transposed symplectic eigenvalue.

    Raises
    ------
    UnstableLoopError
        If ``A' + A'^T`` is not negative definite.
    """
    A_loop, D_loop = local_closed_loop(m, n, chi, mu1)
    stability = is_stable(A_loop)
    if not stability:
        raise UnstableLoopError(
            f"closed loop unstable at mu1 = {mu1:.6g}: max eig(A' + A'^T) = {stability.margin:.6g}"
        )
    sigma = solve_lyapunov(A_loop, D_loop)
    nu = pt_min_symplectic(sigma, Bipartition.split(1, 1))
    return sigma, nu * nu


def stable_gain_interval(m, n, chi, tol=1e-10):
    """
    Interval of ``mu1`` with a stable closed loop.

    The stable set is convex in ``mu1`` (largest eigenvalue of an affine
    symmetric family), so it is bracketed from ``mu1 = 0`` outward in both
    directions. The returned ends are inside the region.
    """
    _require_stable(m + n, chi)

    def inside(mu):
        return _loop_margin(m, n, chi, mu) < 0.0

    lo = bisect_boundary(inside, 0.0, find_exit(inside, 0.0, -1.0), tol)[0]
    hi = bisect_boundary(inside, 0.0, find_exit(inside, 0.0, 1.0), tol)[0]
    return lo, hi


@dataclass(frozen=True)
class LocalOptimum:
    mu1: float
    mu2: float
    nu_sq: float
    interval: tuple

    @property
    def log_neg(self):
        return max(0.0, -0.5 * math.log2(self.nu_sq))


def optimize_local_feedback(m, n, chi, tol=1e-8):
    """
    Minimise the entangled symplectic eigenvalue over the stable gains.

    The stable ``mu1`` interval is bracketed by bisection on the loop's
    stability margin and then searched by golden section to ``tol``.
    """
    lo, hi = stable_gain_interval(m, n, chi)
    if not hi > lo:
        raise UnstableLoopError("empty stable gain interval")

    def objective(mu):
        try:
            return local_feedback_steady(m, n, chi, mu)[1]
        except FeedbackEntanglementError:
            return math.inf

    mu1, nu_sq = golden_section(objective, lo, hi, tol)
    return LocalOptimum(mu1, mu1 * n / m, nu_sq, (lo, hi))


@dataclass(frozen=True)
class SweepRow:
    chi: float
    nu_free: float
    nu_local: float
    nu_bound: float
    mu1_star: float
    status: str = "ok"

    @property
    def ok(self):
        return self.status == "ok"


def sweep_point(m, n, chi):
    """One sweep row; failures are recorded in ``status`` rather than raised."""
    nan = float("nan")
    try:
        _require_stable(m + n, chi)
        nu_free = pt_min_symplectic(free_cm(m, n, chi), Bipartition.split(1, 1)) ** 2
        best = optimize_local_feedback(m, n, chi)
        nu_bound = entanglement_bound(full_drift(m + n, chi)).nu_sq_bound
    except (FeedbackEntanglementError, ValueError, ArithmeticError) as exc:
        return SweepRow(chi, nan, nan, nan, nan, f"error: {exc}".replace(",", ";"))
    return SweepRow(chi, nu_free, best.nu_sq, nu_bound, best.mu1)


def _sweep_point_args(args):
    return sweep_point(*args)


def sweep_chi(m, n, chi_grid, workers=None):
    """
    Free, locally controlled and bound values of ``nu^2`` over a grid of ``chi``.

    Rows come back in grid order. ``workers > 1`` evaluates points in
    separate processes.
    """
    jobs = [(m, n, float(chi)) for chi in chi_grid]
    if workers and workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_sweep_point_args, jobs))
    return [sweep_point(*job) for job in jobs]


def format_float(x):
    return f"{x:.12g}"


def _csv_values(row):
    return [format_float(row.chi), format_float(row.nu_free), format_float(row.nu_local),
            format_float(row.nu_bound), format_float(row.mu1_star), row.status]


def write_sweep_csv(rows, fh):
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(SWEEP_HEADER)
    for row in rows:
        writer.writerow(_csv_values(row))


def write_combined_csv(tables, fh):
    """Write ``(label, rows)`` pairs into one CSV with a leading ``bipartition`` column."""
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(("bipartition",) + SWEEP_HEADER)
    for label, rows in tables:
        for row in rows:
            writer.writerow([label] + _csv_values(row))
