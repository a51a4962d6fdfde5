"""Dynamics of N qubits coupled to a resonator with switched coupling.

Three independent pipelines compute the same excitation probabilities:
exact piecewise-constant propagation, a general order-by-order perturbation
engine over exact exponential-polynomial coefficients, and closed-form
second-order solutions for the two-qubit case.
"""

from .closedform2q import (
    ClosedFormParams,
    DivergencePole,
    ResonanceError,
    alpha1_eg1,
    alpha1_ge1,
    alpha2_ee0,
    alpha2_gg0,
    closedform_state,
    divergence_locations,
    scan_divergence_locations,
)
from .engine import (
    PerturbativeSolution,
    next_order,
    pert_excitation_probability,
    run_to_order,
    zeroth_order,
)
from .exppoly import ExpPoly, linear_combination
from .hilbert import (
    BasisState,
    HilbertSpace,
    StateVector,
    basis_vector,
    enumerate_basis,
    excitation_probability,
    ground_state,
    index_of,
    photon_expectation,
)
from .model import (
    CouplingSchedule,
    LaplacePoleError,
    SystemParams,
    coupling_at,
    hamiltonian_matrix,
    laplace_coupling,
    switching_grid,
)
from .propagator import (
    ConvergenceReport,
    Trajectory,
    convergence_check,
    evolve_segment,
    propagate,
)

__all__ = [
    "BasisState",
    "ClosedFormParams",
    "ConvergenceReport",
    "CouplingSchedule",
    "DivergencePole",
    "ExpPoly",
    "HilbertSpace",
    "LaplacePoleError",
    "PerturbativeSolution",
    "ResonanceError",
    "StateVector",
    "SystemParams",
    "Trajectory",
    "alpha1_eg1",
    "alpha1_ge1",
    "alpha2_ee0",
    "alpha2_gg0",
    "basis_vector",
    "closedform_state",
    "convergence_check",
    "coupling_at",
    "divergence_locations",
    "enumerate_basis",
    "evolve_segment",
    "excitation_probability",
    "ground_state",
    "hamiltonian_matrix",
    "index_of",
    "laplace_coupling",
    "linear_combination",
    "next_order",
    "pert_excitation_probability",
    "photon_expectation",
    "propagate",
    "run_to_order",
    "scan_divergence_locations",
    "switching_grid",
    "zeroth_order",
]

__version__ = "0.1.0"
