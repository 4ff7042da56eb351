"""Interaction quench ``U_i -> U_f`` of the dimer ground state, with optional dephasing.

Units: hbar = 1 and time in units of 1 / t_hop.  Dephasing damps the coherence
between the two post-quench eigenstates psi_- and psi_+ by ``exp(-gamma t)``;
the closed form is used directly, no master equation is integrated.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .dimer import DimerEigensystem, DimerParams, delta_pm, numeric_eigensystem
from .states import QuantumState


@dataclass(frozen=True)
class QuenchSpec:
    """Quench from ``U_i`` to ``U_f`` at hopping ``t_hop`` with dephasing rate ``gamma``."""

    U_i: float
    U_f: float
    t_hop: float = 1.0
    gamma: float = 0.0
    _eig: DimerEigensystem = field(init=False, repr=False, compare=False)
    _coef: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        # validates U_i, U_f, t_hop and gamma
        DimerParams(t=self.t_hop, U=self.U_i, gamma=self.gamma)
        final = numeric_eigensystem(DimerParams(t=self.t_hop, U=self.U_f))
        psi0 = numeric_eigensystem(DimerParams(t=self.t_hop, U=self.U_i)).psi_minus
        object.__setattr__(self, "_eig", final)
        object.__setattr__(self, "_coef", (np.vdot(final.psi_minus, psi0), np.vdot(final.psi_plus, psi0)))

    @property
    def alpha(self) -> float:
        return overlap_coefficients(self.U_i, self.U_f, self.t_hop)[0]

    @property
    def beta(self) -> float:
        return overlap_coefficients(self.U_i, self.U_f, self.t_hop)[1]

    @property
    def eigensystem(self) -> DimerEigensystem:
        """Eigenstates of the post-quench Hamiltonian."""
        return self._eig

    @property
    def frequency(self) -> float:
        return self._eig.E_plus - self._eig.E_minus

    @property
    def period(self) -> float:
        return 2 * math.pi / self.frequency


def overlap_coefficients(U_i: float, U_f: float, t_hop: float = 1.0) -> tuple[float, float]:
    """``(alpha, beta)``: overlaps of the pre-quench ground state with post-quench psi_- and psi_+."""
    d0, _ = delta_pm(t_hop, U_i)
    dp, dm = delta_pm(t_hop, U_f)
    n0 = math.sqrt(2 * (1 + d0 * d0))
    np_, nm = math.sqrt(2 * (1 + dp * dp)), math.sqrt(2 * (1 + dm * dm))
    return 2 / n0 * (1 + d0 * dp) / np_, 2 / n0 * (1 + d0 * dm) / nm


def _two_level(spec: QuenchSpec, time: float, damping: float) -> QuantumState:
    a, b = spec._coef
    e = spec._eig
    vm = a * np.exp(-1j * e.E_minus * time) * e.psi_minus
    vp = b * np.exp(-1j * e.E_plus * time) * e.psi_plus
    coh = np.outer(vm, vp.conj())
    m = np.outer(vm, vm.conj()) + np.outer(vp, vp.conj()) + damping * (coh + coh.conj().T)
    return QuantumState(m)


def evolve_pure(spec: QuenchSpec, time: float) -> QuantumState:
    """Unitary evolution: ``|psi(t)> = alpha e^{-i E_- t}|psi_-> + beta e^{-i E_+ t}|psi_+>``."""
    return _two_level(spec, time, 1.0)


def evolve_dephased(spec: QuenchSpec, time: float) -> QuantumState:
    """Dephased evolution; coherences between psi_- and psi_+ decay as ``exp(-gamma t)``."""
    if time < 0:
        raise ValueError("time must be nonnegative")
    return _two_level(spec, time, math.exp(-spec.gamma * time))


def long_time_state(spec: QuenchSpec) -> QuantumState:
    """``alpha^2 P_- + beta^2 P_+``, the saturated state for ``gamma > 0``."""
    if spec.gamma <= 0:
        raise ValueError("long-time state needs a positive dephasing rate (gamma = 0 never saturates)")
    return _two_level(spec, 0.0, 0.0)


def time_grid(spec: QuenchSpec, n_points: int = 400, periods: float = 6.0) -> np.ndarray:
    """Default output grid: ``n_points`` times over ``periods`` oscillation periods."""
    return np.linspace(0.0, periods * spec.period, n_points)


MIXING_PAIRS = ("plus", "D")


def mixing_state(pair: str, lam: float, U: float, t_hop: float = 1.0) -> QuantumState:
    """``lam |X><X| + (1 - lam) |psi_-><psi_-|`` with ``X = psi_+`` (``"plus"``) or ``D`` (``"D"``)."""
    if pair not in MIXING_PAIRS:
        raise ValueError(f"pair must be one of {MIXING_PAIRS}, got {pair!r}")
    if not 0.0 <= lam <= 1.0:
        raise ValueError(f"lambda must lie in [0, 1], got {lam}")
    e = numeric_eigensystem(DimerParams(t=t_hop, U=U))
    other = e.psi_plus if pair == "plus" else e.D
    m = lam * np.outer(other, other.conj()) + (1 - lam) * np.outer(e.psi_minus, e.psi_minus.conj())
    return QuantumState(m)
