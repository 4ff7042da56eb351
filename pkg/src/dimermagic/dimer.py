"""Two-site Hubbard model at half filling: Hamiltonian, eigenstates, thermal states.

Spin-orbitals are mapped to qubits in the order (1 up, 1 down, 2 up, 2 down)
by Jordan-Wigner; an occupied mode is qubit state |1> and the annihilator of
mode k is ``Z x ... x Z x |0><1| x 1 x ...``.  A computational basis label such
as ``"1001"`` lists ``n_1up n_1dn n_2up n_2dn`` (site 1 up, site 2 down).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .pauli import I2, Z
from .states import QuantumState, partial_trace

N_MODES = 4
DIM = 2**N_MODES
MODE_NAMES = ("1up", "1dn", "2up", "2dn")

# the (N_up, N_dn) = (1, 1) sector in the order |up dn, o>, |up, dn>, |dn, up>, |o, up dn>
SECTOR_LABELS = ("1100", "1001", "0110", "0011")
SECTOR_INDEX = tuple(int(s, 2) for s in SECTOR_LABELS)

PARITY_TOL = 1e-12
# weight of S^2 in the joint diagonalization; separates t0 from D at U = 0
_SPIN_SHIFT = 0.7310585786300049

_LOWER = np.array([[0, 1], [0, 0]], dtype=complex)  # |0><1|


def _kron(*ops) -> np.ndarray:
    out = np.eye(1, dtype=complex)
    for op in ops:
        out = np.kron(out, op)
    return out


@lru_cache(maxsize=None)
def _annihilators(n_modes: int) -> tuple[np.ndarray, ...]:
    ops = []
    for k in range(n_modes):
        m = _kron(*([Z] * k + [_LOWER] + [I2] * (n_modes - k - 1)))
        m.setflags(write=False)
        ops.append(m)
    return tuple(ops)


def annihilator(mode: int, n_modes: int = N_MODES) -> np.ndarray:
    """Jordan-Wigner matrix of ``c_mode`` (0-based) on ``n_modes`` qubits."""
    if not 0 <= mode < n_modes:
        raise ValueError(f"mode {mode} out of range for {n_modes} modes")
    return _annihilators(n_modes)[mode]


def number_operator(mode: int, n_modes: int = N_MODES) -> np.ndarray:
    c = annihilator(mode, n_modes)
    return c.conj().T @ c


def total_number() -> np.ndarray:
    return sum(number_operator(k) for k in range(N_MODES))


def total_sz() -> np.ndarray:
    return 0.5 * (number_operator(0) - number_operator(1) + number_operator(2) - number_operator(3))


@lru_cache(maxsize=1)
def total_spin_squared() -> np.ndarray:
    c = _annihilators(N_MODES)
    s_plus = c[0].conj().T @ c[1] + c[2].conj().T @ c[3]
    sz = total_sz()
    s2 = s_plus.conj().T @ s_plus + sz @ sz + sz
    s2.setflags(write=False)
    return s2


def parity_operator() -> np.ndarray:
    """Total fermion parity ``(-1)^N``, i.e. ``Z x Z x Z x Z``."""
    return _kron(Z, Z, Z, Z)


def basis_vector(label: str) -> np.ndarray:
    if len(label) != N_MODES or set(label) - {"0", "1"}:
        raise ValueError(f"bad occupation label {label!r}")
    v = np.zeros(DIM, dtype=complex)
    v[int(label, 2)] = 1.0
    return v


@dataclass(frozen=True)
class DimerParams:
    """Hopping ``t`` (> 0), repulsion ``U``, temperature ``T`` and dephasing rate ``gamma`` (all >= 0)."""

    t: float = 1.0
    U: float = 0.0
    T: float = 0.0
    gamma: float = 0.0

    def __post_init__(self):
        for name in ("t", "U", "T", "gamma"):
            val = getattr(self, name)
            if not math.isfinite(val):
                raise ValueError(f"{name} must be finite, got {val}")
        if self.t <= 0:
            raise ValueError(f"hopping t must be positive, got {self.t}")
        if self.U < 0:
            raise ValueError(f"U must be nonnegative, got {self.U}")
        if self.T < 0:
            raise ValueError(f"temperature must be nonnegative, got {self.T}")
        if self.gamma < 0:
            raise ValueError(f"dephasing rate must be nonnegative, got {self.gamma}")


def build_hamiltonian(p: DimerParams) -> np.ndarray:
    """Dense 16 x 16 Hubbard dimer Hamiltonian from Jordan-Wigner fermion operators."""
    c = _annihilators(N_MODES)
    h = np.zeros((DIM, DIM), dtype=complex)
    for s in (0, 1):  # spin up, spin down
        hop = c[s].conj().T @ c[s + 2]
        h -= p.t * (hop + hop.conj().T)
    n = [ci.conj().T @ ci for ci in c]
    h += p.U * (n[0] @ n[1] + n[2] @ n[3])
    return h


@dataclass(frozen=True)
class DimerEigensystem:
    """The four half-filled eigenstates (16-dim vectors) with their energies."""

    psi_minus: np.ndarray
    psi_plus: np.ndarray
    D: np.ndarray
    t0: np.ndarray
    E_minus: float
    E_plus: float
    E_D: float
    E_t0: float
    delta_plus: float = float("nan")
    delta_minus: float = float("nan")
    norm_plus: float = float("nan")
    norm_minus: float = float("nan")

    def states(self) -> tuple[np.ndarray, ...]:
        return (self.psi_minus, self.psi_plus, self.D, self.t0)

    def energies(self) -> np.ndarray:
        return np.array([self.E_minus, self.E_plus, self.E_D, self.E_t0])

    def projector(self, name: str) -> np.ndarray:
        v = getattr(self, name)
        return np.outer(v, v.conj())


def delta_pm(t: float, U: float) -> tuple[float, float]:
    x = U / (4 * t)
    r = math.sqrt(1 + x * x)
    # the minus root via -1/(x + r) avoids cancellation at large U
    return x + r, -1.0 / (x + r)


def energies_pm(t: float, U: float) -> tuple[float, float]:
    x = U / (4 * t)
    r = 2 * t * math.sqrt(1 + x * x)
    return U / 2 - r, U / 2 + r


def analytic_eigensystem(p: DimerParams) -> DimerEigensystem:
    """Closed-form eigenstates of the (1, 1) sector."""
    dp, dm = delta_pm(p.t, p.U)
    np_, nm = math.sqrt(2 * (1 + dp * dp)), math.sqrt(2 * (1 + dm * dm))
    e_m, e_p = energies_pm(p.t, p.U)
    k = {lab: basis_vector(lab) for lab in SECTOR_LABELS}
    psi_m = (k["1100"] + dp * k["1001"] - dp * k["0110"] + k["0011"]) / np_
    psi_p = (k["1100"] + dm * k["1001"] - dm * k["0110"] + k["0011"]) / nm
    d = (k["1100"] - k["0011"]) / math.sqrt(2)
    t0 = (k["1001"] + k["0110"]) / math.sqrt(2)
    return DimerEigensystem(psi_m, psi_p, d, t0, e_m, e_p, p.U, 0.0, dp, dm, np_, nm)


def _fix_gauge(v: np.ndarray) -> np.ndarray:
    # first sizeable amplitude (in sector order) made real positive
    for idx in SECTOR_INDEX:
        if abs(v[idx]) > 1e-8:
            return v * (abs(v[idx]) / v[idx])
    return v


def numeric_eigensystem(p: DimerParams) -> DimerEigensystem:
    """Eigensystem from dense diagonalization of the (1, 1) sector block.

    ``H + c S^2`` is diagonalized so the triplet ``t0`` never mixes with the
    singlet ``D`` when they are degenerate at ``U = 0``; energies are then
    ``<v|H|v>``.  Singlets are ordered ``E_- < U < E_+``.
    """
    h = build_hamiltonian(p)
    idx = np.array(SECTOR_INDEX)
    block = (h + _SPIN_SHIFT * total_spin_squared())[np.ix_(idx, idx)]
    _, vecs = np.linalg.eigh(block)
    full = np.zeros((DIM, 4), dtype=complex)
    full[idx, :] = vecs
    s2 = np.einsum("ik,ij,jk->k", full.conj(), total_spin_squared(), full).real
    energy = np.einsum("ik,ij,jk->k", full.conj(), h, full).real
    triplet = int(np.argmax(s2))
    singlets = sorted((k for k in range(4) if k != triplet), key=lambda k: energy[k])
    vm, vd, vp = (_fix_gauge(full[:, k]) for k in singlets)
    dp, dm = delta_pm(p.t, p.U)
    return DimerEigensystem(
        vm, vp, vd, _fix_gauge(full[:, triplet]),
        float(energy[singlets[0]]), float(energy[singlets[2]]), float(energy[singlets[1]]), float(energy[triplet]),
        dp, dm, math.sqrt(2 * (1 + dp * dp)), math.sqrt(2 * (1 + dm * dm)),
    )


def ground_state(p: DimerParams) -> QuantumState:
    return QuantumState.from_vector(numeric_eigensystem(p).psi_minus)


def _matrix(rho) -> np.ndarray:
    return rho.matrix if isinstance(rho, QuantumState) else np.asarray(rho)


def double_occupancy(rho) -> float:
    """Per-site double occupancy ``(1/2) Tr[rho (n1up n1dn + n2up n2dn)]``."""
    m = _matrix(rho)
    if m.shape != (DIM, DIM):
        raise ValueError(f"expected a {DIM}x{DIM} dimer state, got {m.shape}")
    n = [number_operator(k) for k in range(N_MODES)]
    op = n[0] @ n[1] + n[2] @ n[3]
    return float(0.5 * np.real(np.einsum("ij,ji->", m, op)))


def thermal_weights(p: DimerParams) -> np.ndarray:
    """Normalized weights of ``(psi_-, psi_+, D, t0)`` in the sector ensemble."""
    if p.T < 0:
        raise ValueError("temperature must be nonnegative")
    es = numeric_eigensystem(p)
    if p.T == 0:
        return np.array([1.0, 0.0, 0.0, 0.0])
    # Boltzmann factors relative to the ground state; t0 gets exp(E_- / T)
    w = np.exp(-(es.energies() - es.E_minus) / p.T)
    return w / w.sum()


def thermal_state(p: DimerParams) -> QuantumState:
    """Sector ensemble over the four half-filled eigenstates; ``T = 0`` is the ground projector."""
    es = numeric_eigensystem(p)
    w = thermal_weights(p)
    m = sum(wk * np.outer(v, v.conj()) for wk, v in zip(w, es.states()) if wk > 0)
    return QuantumState(m)


def is_parity_symmetric(rho, tol: float = PARITY_TOL) -> bool:
    m = _matrix(rho)
    par = parity_operator()
    return bool(np.max(np.abs(par @ m - m @ par)) <= tol)


def local_rdm(rho) -> QuantumState:
    """Reduced state of site 1 (modes 1up, 1dn), basis ``|n_up n_dn>``.

    A plain qubit partial trace, valid because the input is checked to commute
    with the total fermion parity.
    """
    m = _matrix(rho)
    if m.shape != (DIM, DIM):
        raise ValueError(f"expected a {DIM}x{DIM} dimer state, got {m.shape}")
    if not is_parity_symmetric(m):
        raise ValueError("state does not commute with fermion parity; qubit partial trace would be wrong")
    return QuantumState(partial_trace(m, keep=(0, 1), n_qubits=N_MODES))


def local_delta(d: float) -> float:
    """``delta = 1 - 4 <d>``: the LRDM is ``(1 - delta P) / 4``."""
    return 1.0 - 4.0 * d
