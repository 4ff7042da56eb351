"""Non-Gaussianity, entropies and superselected inter-site entanglement (bits)."""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .dimer import annihilator, local_rdm
from .states import PURITY_TOL, QuantumState, partial_trace

EIG_TOL = 1e-10
ZERO_SNAP = 1e-12


def _matrix(rho) -> np.ndarray:
    return rho.matrix if isinstance(rho, QuantumState) else np.asarray(rho)


def _n_modes(m: np.ndarray) -> int:
    d = m.shape[0]
    n = d.bit_length() - 1
    if m.shape != (d, d) or d != 1 << n:
        raise ValueError(f"expected a 2^N x 2^N matrix, got {m.shape}")
    return n


def von_neumann_entropy(m) -> float:
    """``-sum lambda log2 lambda`` over the eigenvalues of a Hermitian matrix.

    Works for density matrices and for one-body matrices with spectrum in
    [0, 1]; ``0 log 0 = 0``.  Raises on eigenvalues below ``-1e-10``.
    """
    lam = np.linalg.eigvalsh(_matrix(m))
    if lam.size and lam[0] < -EIG_TOL:
        raise ValueError(f"negative eigenvalue {lam[0]:.3e}")
    lam = lam[lam > 0]
    return float(-np.sum(lam * np.log2(lam)))


def fermionic_swap() -> np.ndarray:
    """fSWAP on two adjacent modes: swaps them and signs the doubly occupied state."""
    f = np.zeros((4, 4), dtype=complex)
    f[0, 0] = 1
    f[1, 2] = f[2, 1] = 1
    f[3, 3] = -1
    return f


def mode_permutation(order: Sequence[int], n_modes: int) -> np.ndarray:
    """Unitary moving modes ``order`` to the front (in that order) by adjacent fSWAPs.

    Conjugation by it relabels Jordan-Wigner modes without touching the physics,
    so the selected modes become a prefix and a qubit partial trace is exact.
    """
    perm = list(order) + [k for k in range(n_modes) if k not in order]
    u = np.eye(2**n_modes, dtype=complex)
    cur = list(range(n_modes))
    fs = fermionic_swap()
    # bubble sort cur into perm; each adjacent transposition is one fSWAP
    for target, mode in enumerate(perm):
        pos = cur.index(mode)
        while pos > target:
            gate = np.kron(np.kron(np.eye(2**(pos - 1)), fs), np.eye(2**(n_modes - pos - 1)))
            u = gate @ u
            cur[pos - 1], cur[pos] = cur[pos], cur[pos - 1]
            pos -= 1
    return u


def reduced_modes(rho, modes: Sequence[int]) -> np.ndarray:
    """Fermionic reduced state of ``modes`` (0-based), returned in that mode order."""
    m = _matrix(rho)
    n = _n_modes(m)
    modes = list(modes)
    if len(set(modes)) != len(modes) or any(not 0 <= k < n for k in modes):
        raise ValueError(f"invalid modes {modes} for {n} modes")
    if modes == list(range(n)):
        return m
    if modes != list(range(len(modes))):
        u = mode_permutation(modes, n)
        m = u @ m @ u.conj().T
    return partial_trace(m, keep=tuple(range(len(modes))), n_qubits=n)


def one_body_dm(rho, modes: Sequence[int] | None = None) -> np.ndarray:
    """``gamma_ij = <c_j^dag c_i>`` over the selected modes (0-based, default all)."""
    m = _matrix(rho)
    n = _n_modes(m)
    modes = list(range(n)) if modes is None else list(modes)
    if any(not 0 <= k < n for k in modes):
        raise ValueError(f"invalid modes {modes} for {n} modes")
    c = [annihilator(k, n) for k in modes]
    g = np.empty((len(modes), len(modes)), dtype=complex)
    for i, ci in enumerate(c):
        for j, cj in enumerate(c):
            g[i, j] = np.einsum("ab,ba->", m, cj.conj().T @ ci)
    return 0.5 * (g + g.conj().T)


def non_gaussianity(rho, modes: Sequence[int] | None = None) -> float:
    """Non-freeness ``s(gamma) + s(1 - gamma) - s(rho)`` of the state on ``modes``, in bits."""
    m = _matrix(rho)
    n = _n_modes(m)
    modes = list(range(n)) if modes is None else list(modes)
    red = reduced_modes(m, modes)
    g = one_body_dm(red)
    k = g.shape[0]
    val = von_neumann_entropy(g) + von_neumann_entropy(np.eye(k) - g) - von_neumann_entropy(red)
    # entropy differences of a Gaussian state cancel only to rounding
    return 0.0 if abs(val) < ZERO_SNAP else val


def nssr_entanglement(d: float) -> float:
    """Number-superselected inter-site entanglement of the pure ground state, ``1 - 2<d>`` bits."""
    if not -1e-12 <= d <= 0.5 + 1e-12:
        raise ValueError(f"double occupancy {d} outside [0, 1/2]")
    return float(1.0 - 2.0 * d)


def pssr_entanglement() -> float:
    """Parity-superselected inter-site entanglement of the pure ground state: 1 bit."""
    return 1.0


def intersite_entanglement(psi) -> float:
    """Entropy of the site-1 reduced state of a pure dimer state, in bits."""
    state = psi if isinstance(psi, QuantumState) else QuantumState(psi)
    if abs(state.purity - 1.0) > PURITY_TOL:
        raise ValueError(
            "inter-site entanglement is implemented for pure states only; "
            "mixed-state superselected formulas are not provided"
        )
    return von_neumann_entropy(local_rdm(state))
