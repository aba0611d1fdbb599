"""Entanglement capacities of two-qubit Hamiltonians."""

from .canonical import CanonicalForm, build, canonical_form, pauli_coefficients
from .capacity import (
    Constants,
    OptimizationResult,
    OptimizerConfig,
    RateResult,
    constants,
    drho_dt,
    m_matrix,
    optimize_rate,
    psi_max,
    rate,
    single_shot_no_ancilla,
    verify_bound_chain,
)
from .commrate import Ensemble, comm_rate, ensemble_E1, ensemble_E2, holevo
from .conjecture import ConjectureParams, conjecture_objective, conjectured_capacity, sweep
from .qmath import PureState, entanglement_entropy, evolve, schmidt, von_neumann_entropy

__version__ = "0.1.0"
