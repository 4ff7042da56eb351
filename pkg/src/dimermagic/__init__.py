"""Exact magic, non-Gaussianity and entanglement of the two-site Hubbard model."""

from .dimer import (
    DimerEigensystem,
    DimerParams,
    analytic_eigensystem,
    build_hamiltonian,
    double_occupancy,
    ground_state,
    local_rdm,
    numeric_eigensystem,
    thermal_state,
)
from .l1 import L1Problem, L1Solution, L1SolverError, InfeasibleError, IterationLimitError, solve_l1, verify_certificate
from .magic import MagicReport, log_free_robustness, magic_report, mixed_sre_2, robustness, sre
from .pauli import MajoranaString, PauliString, jordan_wigner_majorana, majorana_string_matrix, majorana_to_pauli, pauli_decompose
from .quench import QuenchSpec, evolve_dephased, evolve_pure, long_time_state, mixing_state, overlap_coefficients
from .resources import (
    intersite_entanglement,
    non_gaussianity,
    nssr_entanglement,
    one_body_dm,
    pssr_entanglement,
    von_neumann_entropy,
)
from .stabilizers import (
    AMatrix,
    StabilizerCatalog,
    StabilizerTableau,
    build_a_matrix,
    enumerate_stabilizer_groups,
    enumerate_stabilizer_states,
    load_catalog,
    render_stabilizer_projector,
)
from .states import QuantumState, load_state, save_state

__version__ = "0.1.0"
