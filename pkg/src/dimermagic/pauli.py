"""Pauli and Majorana strings, Jordan-Wigner rendering and Pauli decomposition.

Conventions
-----------
A Pauli string is stored in binary-symplectic form ``(x, z)`` together with a
phase exponent ``k`` and denotes ``i**k * P(x, z)`` where ``P(x, z)`` is the
tensor product of the Hermitian single-qubit labels

    (0, 0) -> I,  (1, 0) -> X,  (1, 1) -> Y,  (0, 1) -> Z.

Qubit 1 is the leftmost tensor factor (most significant bit of a basis index).

Pauli strings are indexed 0 .. 4**N - 1 by base-4 digits (I, X, Y, Z) = (0, 1,
2, 3), qubit 1 most significant, so the identity has index 0.  All Pauli
vectors (decompositions, A-matrix rows) use this ordering.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from .states import QuantumState

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)

_LOCAL = (I2, X, Y, Z)
_LABELS = "IXYZ"
# digit -> (x, z) and back
_DIGIT_XZ = ((0, 0), (1, 0), (1, 1), (0, 1))
_XZ_DIGIT = {xz: d for d, xz in enumerate(_DIGIT_XZ)}


def _g(x1: int, z1: int, x2: int, z2: int) -> int:
    """Power of i picked up by sigma(x1, z1) @ sigma(x2, z2)."""
    if x1 == 0 and z1 == 0:
        return 0
    if x1 == 1 and z1 == 1:
        return z2 - x2
    if x1 == 1:
        return z2 * (2 * x2 - 1)
    return x2 * (1 - 2 * z2)


@dataclass(frozen=True)
class PauliString:
    """Signed N-qubit Pauli operator ``i**phase * P(x, z)``."""

    x: tuple[int, ...]
    z: tuple[int, ...]
    phase: int = 0

    def __post_init__(self):
        if len(self.x) != len(self.z):
            raise ValueError("x and z parts must have the same length")
        object.__setattr__(self, "x", tuple(int(b) & 1 for b in self.x))
        object.__setattr__(self, "z", tuple(int(b) & 1 for b in self.z))
        object.__setattr__(self, "phase", int(self.phase) % 4)

    @property
    def n_qubits(self) -> int:
        return len(self.x)

    # long-form names
    x_bits = property(lambda self: self.x)
    z_bits = property(lambda self: self.z)
    phase_exponent = property(lambda self: self.phase)

    @classmethod
    def from_label(cls, label: str, phase: int = 0) -> "PauliString":
        """Build from a label such as ``"XZ"`` or ``"-IY"``."""
        label = label.strip()
        if label.startswith("-"):
            phase += 2
            label = label[1:]
        elif label.startswith("+"):
            label = label[1:]
        xz = [_DIGIT_XZ[_LABELS.index(ch)] for ch in label.upper()]
        return cls(tuple(a for a, _ in xz), tuple(b for _, b in xz), phase)

    @classmethod
    def from_index(cls, index: int, n_qubits: int) -> "PauliString":
        if not 0 <= index < 4**n_qubits:
            raise ValueError(f"Pauli index {index} out of range for {n_qubits} qubits")
        digits = []
        for _ in range(n_qubits):
            digits.append(index % 4)
            index //= 4
        xz = [_DIGIT_XZ[d] for d in reversed(digits)]
        return cls(tuple(a for a, _ in xz), tuple(b for _, b in xz))

    @property
    def index(self) -> int:
        """Base-4 index of the unsigned string (identity is 0)."""
        idx = 0
        for a, b in zip(self.x, self.z):
            idx = 4 * idx + _XZ_DIGIT[(a, b)]
        return idx

    @property
    def label(self) -> str:
        body = "".join(_LABELS[_XZ_DIGIT[(a, b)]] for a, b in zip(self.x, self.z))
        prefix = {0: "", 1: "i", 2: "-", 3: "-i"}[self.phase]
        return prefix + body

    @property
    def is_hermitian(self) -> bool:
        return self.phase % 2 == 0

    def unsigned(self) -> "PauliString":
        return PauliString(self.x, self.z, 0)

    def __mul__(self, other: "PauliString") -> "PauliString":
        if self.n_qubits != other.n_qubits:
            raise ValueError("qubit count mismatch")
        k = self.phase + other.phase
        for x1, z1, x2, z2 in zip(self.x, self.z, other.x, other.z):
            k += _g(x1, z1, x2, z2)
        x = tuple(a ^ b for a, b in zip(self.x, other.x))
        z = tuple(a ^ b for a, b in zip(self.z, other.z))
        return PauliString(x, z, k)

    def __neg__(self) -> "PauliString":
        return PauliString(self.x, self.z, self.phase + 2)

    def commutes_with(self, other: "PauliString") -> bool:
        s = sum(x1 * z2 + z1 * x2 for x1, z1, x2, z2 in zip(self.x, self.z, other.x, other.z))
        return s % 2 == 0

    def matrix(self) -> np.ndarray:
        m = np.array([[1.0 + 0j]])
        for a, b in zip(self.x, self.z):
            m = np.kron(m, _LOCAL[_XZ_DIGIT[(a, b)]])
        return (1j**self.phase) * m


@lru_cache(maxsize=None)
def pauli_matrices(n_qubits: int) -> np.ndarray:
    """All ``4**n`` unsigned Pauli matrices, stacked in index order (read-only)."""
    mats = np.ones((1, 1, 1), dtype=complex)
    for _ in range(n_qubits):
        mats = np.einsum("aij,bkl->abikjl", mats, np.stack(_LOCAL))
        s = mats.shape
        mats = mats.reshape(s[0] * s[1], s[2] * s[3], s[4] * s[5])
    mats.setflags(write=False)
    return mats


def jordan_wigner_majorana(i: int, n_qubits: int) -> np.ndarray:
    """Dense matrix of the Majorana operator gamma_i, ``1 <= i <= 2N``.

    gamma_{2k-1} = Z..Z X 1..1 and gamma_{2k} = Z..Z Y 1..1 with the X/Y on qubit k.
    """
    return majorana_pauli(i, n_qubits).matrix()


def majorana_pauli(i: int, n_qubits: int) -> PauliString:
    if not 1 <= i <= 2 * n_qubits:
        raise ValueError(f"Majorana index {i} out of range 1..{2 * n_qubits}")
    k = (i - 1) // 2  # zero-based qubit carrying X or Y
    x = [0] * n_qubits
    z = [0] * n_qubits
    for q in range(k):
        z[q] = 1
    x[k] = 1
    if i % 2 == 0:
        z[k] = 1
    return PauliString(tuple(x), tuple(z))


@dataclass(frozen=True)
class MajoranaString:
    """Hermitian Majorana string ``i**(v^T w_L v) gamma_1^v_1 ... gamma_2N^v_2N``."""

    v: tuple[int, ...]

    def __post_init__(self):
        if len(self.v) % 2:
            raise ValueError("Majorana occupation vector must have even length 2N")
        object.__setattr__(self, "v", tuple(int(b) & 1 for b in self.v))

    @property
    def n_qubits(self) -> int:
        return len(self.v) // 2

    @property
    def phase_exponent(self) -> int:
        # v^T w_L v with w_L strictly lower-triangular ones = number of occupied pairs
        k = sum(self.v)
        return (k * (k - 1) // 2) % 4

    def matrix(self) -> np.ndarray:
        return majorana_string_matrix(self.v)

    def to_pauli(self) -> tuple[PauliString, int]:
        return majorana_to_pauli(self)


def majorana_string_matrix(v: Sequence[int] | MajoranaString, n_qubits: int | None = None) -> np.ndarray:
    """Dense matrix of the Majorana string with occupation vector ``v``."""
    ms = v if isinstance(v, MajoranaString) else MajoranaString(tuple(v))
    if n_qubits is not None and ms.n_qubits != n_qubits:
        raise ValueError(f"vector of length {len(ms.v)} does not match N={n_qubits}")
    n = ms.n_qubits
    m = np.eye(2**n, dtype=complex)
    for i, bit in enumerate(ms.v, start=1):
        if bit:
            m = m @ jordan_wigner_majorana(i, n)
    return (1j**ms.phase_exponent) * m


def majorana_to_pauli(v: Sequence[int] | MajoranaString) -> tuple[PauliString, int]:
    """Return ``(P, sign)`` with ``sign * P.matrix() == M_v`` and P unsigned Hermitian."""
    ms = v if isinstance(v, MajoranaString) else MajoranaString(tuple(v))
    n = ms.n_qubits
    acc = PauliString((0,) * n, (0,) * n, ms.phase_exponent)
    for i, bit in enumerate(ms.v, start=1):
        if bit:
            acc = acc * majorana_pauli(i, n)
    if acc.phase % 2:
        raise AssertionError("Majorana string came out anti-Hermitian")  # pragma: no cover
    return acc.unsigned(), 1 if acc.phase == 0 else -1


@lru_cache(maxsize=None)
def majorana_pauli_table(n_qubits: int) -> tuple[np.ndarray, np.ndarray]:
    """Pauli index and sign for every Majorana vector, ordered by ``v`` read as a binary number."""
    size = 4**n_qubits
    idx = np.empty(size, dtype=np.int64)
    sign = np.empty(size, dtype=np.int8)
    for code in range(size):
        v = tuple((code >> (2 * n_qubits - 1 - b)) & 1 for b in range(2 * n_qubits))
        p, s = majorana_to_pauli(v)
        idx[code] = p.index
        sign[code] = s
    idx.setflags(write=False)
    sign.setflags(write=False)
    return idx, sign


def _as_matrix(rho) -> np.ndarray:
    return rho.matrix if isinstance(rho, QuantumState) else np.asarray(rho)


def pauli_decompose(rho) -> np.ndarray:
    """Pauli vector ``b_j = Tr(rho P_j)`` in index order; ``rho = sum_j b_j P_j / d``."""
    m = _as_matrix(rho)
    n = int(round(np.log2(m.shape[0])))
    mats = pauli_matrices(n)
    # Tr(rho P) = sum_ij rho_ij P_ji
    b = np.einsum("ij,aji->a", m, mats)
    return b.real.copy()


def pauli_reconstruct(b: np.ndarray) -> np.ndarray:
    b = np.asarray(b, dtype=float)
    n = int(round(np.log(b.size) / np.log(4)))
    return np.einsum("a,aij->ij", b, pauli_matrices(n)) / 2**n


def majorana_expectations(rho) -> np.ndarray:
    """``Tr(rho M_v)`` for every Majorana vector ``v`` (binary order), computed in the Majorana frame."""
    m = _as_matrix(rho)
    n = int(round(np.log2(m.shape[0])))
    out = np.empty(4**n)
    for code in range(4**n):
        v = tuple((code >> (2 * n - 1 - b)) & 1 for b in range(2 * n))
        out[code] = np.trace(m @ majorana_string_matrix(v)).real
    return out
