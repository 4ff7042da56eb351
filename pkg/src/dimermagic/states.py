"""Density matrices on N qubits, partial traces and the JSON state file format."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-12
PSD_TOL = 1e-10
PURITY_TOL = 1e-10


class InvalidStateError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class QuantumState:
    """Validated density matrix on ``n_qubits`` qubits.

    The matrix is copied and made read-only on construction.  Construction fails
    with :class:`InvalidStateError` unless the matrix is Hermitian and unit-trace
    (1e-12 absolute) and its smallest eigenvalue is at least -1e-10.
    """

    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise InvalidStateError(f"density matrix must be square, got shape {m.shape}")
        d = m.shape[0]
        if d < 2 or d & (d - 1):
            raise InvalidStateError(f"dimension {d} is not a power of two")
        herm = np.max(np.abs(m - m.conj().T))
        if herm > HERMITIAN_TOL:
            raise InvalidStateError(f"matrix not Hermitian (max deviation {herm:.3e})")
        tr = np.trace(m)
        if abs(tr - 1) > TRACE_TOL:
            raise InvalidStateError(f"trace is {tr.real:.15g}, expected 1")
        m = 0.5 * (m + m.conj().T)
        lo = np.linalg.eigvalsh(m)[0]
        if lo < -PSD_TOL:
            raise InvalidStateError(f"matrix not positive semidefinite (min eigenvalue {lo:.3e})")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @classmethod
    def from_vector(cls, psi: Sequence[complex]) -> "QuantumState":
        psi = np.asarray(psi, dtype=complex)
        nrm = np.linalg.norm(psi)
        if nrm == 0:
            raise InvalidStateError("zero vector")
        psi = psi / nrm
        return cls(np.outer(psi, psi.conj()))

    @classmethod
    def maximally_mixed(cls, n_qubits: int) -> "QuantumState":
        d = 2**n_qubits
        return cls(np.eye(d) / d)

    @classmethod
    def mixture(cls, weights: Sequence[float], states: Sequence["QuantumState"]) -> "QuantumState":
        m = sum(w * s.matrix for w, s in zip(weights, states))
        return cls(m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def n_qubits(self) -> int:
        return self.dim.bit_length() - 1

    @property
    def purity(self) -> float:
        return float(np.real(np.einsum("ij,ji->", self.matrix, self.matrix)))

    @property
    def is_pure(self) -> bool:
        return abs(self.purity - 1.0) <= PURITY_TOL

    def eigvalsh(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.matrix)

    def expectation(self, op: np.ndarray) -> complex:
        return complex(np.einsum("ij,ji->", self.matrix, op))

    def conjugate_by(self, unitary: np.ndarray) -> "QuantumState":
        u = np.asarray(unitary)
        return QuantumState(u @ self.matrix @ u.conj().T)

    def tensor(self, other: "QuantumState") -> "QuantumState":
        return QuantumState(np.kron(self.matrix, other.matrix))

    def trace_distance(self, other: "QuantumState") -> float:
        ev = np.linalg.eigvalsh(self.matrix - other.matrix)
        return 0.5 * float(np.sum(np.abs(ev)))


def partial_trace(rho, keep: Sequence[int], n_qubits: int | None = None) -> np.ndarray:
    """Qubit partial trace keeping the (zero-based) qubits in ``keep``, in their given order."""
    m = rho.matrix if isinstance(rho, QuantumState) else np.asarray(rho)
    n = n_qubits if n_qubits is not None else m.shape[0].bit_length() - 1
    keep = list(keep)
    drop = [q for q in range(n) if q not in keep]
    t = m.reshape((2,) * (2 * n))
    perm = keep + drop + [n + q for q in keep] + [n + q for q in drop]
    t = t.transpose(perm)
    dk, dd = 2 ** len(keep), 2 ** len(drop)
    t = t.reshape(dk, dd, dk, dd)
    return np.einsum("ajbj->ab", t)


def save_state(state: QuantumState, path: str | Path) -> None:
    """Write ``{"n_qubits": N, "matrix": [[re, im], ...]}`` (row-major, d*d pairs)."""
    flat = state.matrix.reshape(-1)
    doc = {"n_qubits": state.n_qubits, "matrix": [[float(z.real), float(z.imag)] for z in flat]}
    Path(path).write_text(json.dumps(doc))


def load_state(path: str | Path) -> QuantumState:
    doc = json.loads(Path(path).read_text())
    return state_from_document(doc)


def state_from_document(doc: dict) -> QuantumState:
    try:
        n = int(doc["n_qubits"])
        entries = doc["matrix"]
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidStateError(f"state document missing field: {exc}") from None
    d = 2**n
    arr = np.asarray(entries, dtype=float)
    if arr.shape == (d, d, 2):
        arr = arr.reshape(d * d, 2)
    if arr.shape != (d * d, 2):
        raise InvalidStateError(f"expected {d * d} [real, imag] pairs for n_qubits={n}, got array of shape {arr.shape}")
    return QuantumState((arr[:, 0] + 1j * arr[:, 1]).reshape(d, d))
