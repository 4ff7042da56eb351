"""Robustness of magic, log-free robustness and stabilizer Renyi entropies.

All entropic quantities are in bits.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .l1 import DEFAULT_TOL, L1Problem, L1Solution, solve_l1
from .pauli import majorana_expectations, pauli_decompose
from .stabilizers import StabilizerCatalog, load_catalog
from .states import PURITY_TOL, QuantumState

# alpha = 1 convention 0 log 0 = 0
_SHANNON_CUTOFF = 1e-300
# alpha = 0 counts Pauli weights above rounding noise
_SUPPORT_CUTOFF = 1e-14


class MixedStateError(ValueError):
    """Raised where a quantity is defined only for pure states."""


def _as_state(rho) -> QuantumState:
    return rho if isinstance(rho, QuantumState) else QuantumState(rho)


def _catalog_for(state: QuantumState, catalog: StabilizerCatalog | None) -> StabilizerCatalog:
    if catalog is None:
        return load_catalog(state.n_qubits)
    if catalog.n != state.n_qubits:
        raise ValueError(f"catalog is for {catalog.n} qubits, state has {state.n_qubits}")
    return catalog


def robustness_solution(
    rho,
    catalog: StabilizerCatalog | None = None,
    warm_start: L1Solution | np.ndarray | None = None,
    tolerance: float = DEFAULT_TOL,
) -> L1Solution:
    """Certified LP solution behind :func:`robustness` (for warm-started scans)."""
    state = _as_state(rho)
    cat = _catalog_for(state, catalog)
    problem = L1Problem(cat.a_matrix, pauli_decompose(state), tolerance)
    return solve_l1(problem, warm_start=warm_start)


def robustness(rho, catalog: StabilizerCatalog | None = None, tolerance: float = DEFAULT_TOL) -> float:
    """Robustness of magic ``R(rho)``: minimal L1 norm over pure stabilizer decompositions.

    ``catalog`` defaults to the cached catalog for the state's qubit count.
    """
    return robustness_solution(rho, catalog, tolerance=tolerance).l1_norm


def lr_from_robustness(r: float, tolerance: float = DEFAULT_TOL) -> float:
    """``log2 R`` with values inside the LP gap tolerance reported as exactly 0."""
    if r <= 1.0 + tolerance:
        return 0.0
    return float(np.log2(r))


def log_free_robustness(rho, catalog: StabilizerCatalog | None = None, tolerance: float = DEFAULT_TOL) -> float:
    """Log-free robustness ``LR = log2 R`` in bits, clamped to 0 within the gap tolerance."""
    return lr_from_robustness(robustness(rho, catalog, tolerance), tolerance)


def pauli_distribution(rho, frame: str = "pauli") -> np.ndarray:
    """``pi(P) = Tr(rho P)^2 / d`` over all Pauli (or Majorana) strings."""
    state = _as_state(rho)
    if frame == "pauli":
        b = pauli_decompose(state)
    elif frame == "majorana":
        b = majorana_expectations(state)
    else:
        raise ValueError(f"unknown frame {frame!r}")
    return b**2 / state.dim


def sre(rho, alpha: float, frame: str = "pauli") -> float:
    """Stabilizer Renyi entropy ``M_alpha`` of a pure state, in bits.

    ``alpha = 1`` is the Shannon limit and ``alpha = 0`` counts the nonzero
    Pauli expectations.  Mixed input raises :class:`MixedStateError`; use
    :func:`mixed_sre_2` instead.
    """
    state = _as_state(rho)
    if alpha < 0:
        raise ValueError("alpha must be nonnegative")
    if abs(state.purity - 1.0) > PURITY_TOL:
        raise MixedStateError("SRE undefined for mixed states (purity %.12g); use mixed_sre_2" % state.purity)
    n = state.n_qubits
    pi = pauli_distribution(state, frame)
    if alpha == 1:
        p = pi[pi >= _SHANNON_CUTOFF]
        return float(-np.sum(p * np.log2(p)) - n)
    if alpha == 0:
        return float(np.log2(np.count_nonzero(pi > _SUPPORT_CUTOFF)) - n)
    return float(np.log2(np.sum(pi**alpha)) / (1.0 - alpha) - n)


def mixed_sre_2(rho, frame: str = "pauli") -> float:
    """``M2 - S2``: ``-log2(sum_P Tr^4(rho P) / sum_P Tr^2(rho P))``, defined for any state."""
    state = _as_state(rho)
    b = pauli_decompose(state) if frame == "pauli" else majorana_expectations(state)
    b2 = b**2
    return float(-np.log2(np.sum(b2**2) / np.sum(b2)))


@dataclass
class MagicReport:
    robustness: float
    log_free_robustness: float
    sre: dict[float, float] = field(default_factory=dict)
    mixed_sre_2: float = 0.0


def magic_report(
    rho,
    catalog: StabilizerCatalog | None = None,
    alphas: Iterable[float] = (1, 2),
    tolerance: float = DEFAULT_TOL,
) -> MagicReport:
    """All magic measures of one state; ``sre`` is left empty for mixed states."""
    state = _as_state(rho)
    r = robustness(state, catalog, tolerance)
    pure = abs(state.purity - 1.0) <= PURITY_TOL
    return MagicReport(
        robustness=r,
        log_free_robustness=lr_from_robustness(r, tolerance),
        sre={float(a): sre(state, a) for a in alphas} if pure else {},
        mixed_sre_2=mixed_sre_2(state),
    )
