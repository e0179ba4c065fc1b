"""Maximal steady-state Gaussian entanglement under continuous feedback."""

from .dynamics import drift_from_hamiltonian, evolve_cm, evolve_mean, is_stable, modified_dynamics, steady_state_cm
from .feedback import (
    BoundReport,
    cbar,
    entanglement_bound,
    is_stabilising_solution,
    measurement_matrix,
    optimal_unravelling,
    unravelling_from_upsilon,
)
from .parametric import (
    full_drift,
    optimal_cm,
    optimize_local_feedback,
    parametric_bound,
    parametric_hamiltonian,
    reduced_drift,
    sweep_chi,
)
from .symplectic import (
    Bipartition,
    check_physical,
    log_negativity,
    omega,
    pt_min_symplectic,
    symplectic_spectrum,
)

__version__ = "0.1.0"
