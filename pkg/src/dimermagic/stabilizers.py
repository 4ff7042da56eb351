"""Enumeration of pure stabilizer states and the stabilizer/Pauli expectation matrix.

A stabilizer group on N qubits is stored as N binary-symplectic rows packed into
integers: bit ``2N-1-k`` holds ``x_{k+1}`` and bit ``N-1-k`` holds ``z_{k+1}``, so
reading a row as a binary number left to right gives ``(x_1..x_N, z_1..z_N)``.
Groups are enumerated directly in reduced row echelon form, which is also the
canonical form used for ordering and lookup.
"""

from __future__ import annotations

import hashlib
import logging
import os
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations
from pathlib import Path
from typing import Iterator, Sequence

import numpy as np
import scipy.sparse as sp

from .pauli import PauliString, pauli_matrices
from .states import QuantumState

logger = logging.getLogger(__name__)

MAX_QUBITS = 4
CATALOG_VERSION = 1
CACHE_ENV = "DIMERMAGIC_CACHE_DIR"


class CatalogError(ValueError):
    pass


def n_stabilizer_states(n: int) -> int:
    count = 2**n
    for k in range(1, n + 1):
        count *= 2**k + 1
    return count


def n_stabilizer_groups(n: int) -> int:
    return n_stabilizer_states(n) // 2**n


def _check_n(n: int) -> None:
    if not 1 <= n <= MAX_QUBITS:
        raise CatalogError(f"stabilizer catalogs are supported for 1 <= N <= {MAX_QUBITS}, got N={n}")


def _symp(a: int, b: int, n: int) -> int:
    mask = (1 << n) - 1
    ax, az = a >> n, a & mask
    bx, bz = b >> n, b & mask
    return bin((ax & bz) ^ (az & bx)).count("1") & 1


def row_to_pauli(row: int, n: int, phase: int = 0) -> PauliString:
    x = tuple((row >> (2 * n - 1 - k)) & 1 for k in range(n))
    z = tuple((row >> (n - 1 - k)) & 1 for k in range(n))
    return PauliString(x, z, phase)


def pauli_to_row(p: PauliString) -> int:
    row = 0
    for b in p.x + p.z:
        row = (row << 1) | b
    return row


def rref_rows(rows: Sequence[int], n: int) -> tuple[int, ...]:
    """Reduced row echelon form over GF(2) of packed rows; raises on rank deficiency."""
    rows = list(rows)
    out: list[int] = []
    for bit in range(2 * n - 1, -1, -1):
        piv = next((i for i, r in enumerate(rows) if (r >> bit) & 1), None)
        if piv is None:
            continue
        pr = rows.pop(piv)
        rows = [r ^ pr if (r >> bit) & 1 else r for r in rows]
        out = [r ^ pr if (r >> bit) & 1 else r for r in out]
        out.append(pr)
    if len(out) != n or any(rows):
        raise CatalogError("generators are not independent")
    return tuple(out)


def enumerate_stabilizer_groups(n: int) -> list[tuple[int, ...]]:
    """All maximal isotropic subspaces of the 2N-dim symplectic space, as RREF row tuples.

    The list is sorted lexicographically by the row tuple and has
    ``prod_k (2^k + 1)`` entries.
    """
    _check_n(n)
    width = 2 * n
    found: list[tuple[int, ...]] = []
    for pivots in combinations(range(width), n):
        pivot_set = set(pivots)
        free_cols = [[c for c in range(p + 1, width) if c not in pivot_set] for p in pivots]

        def extend(rows: list[int], r: int) -> None:
            if r == n:
                found.append(tuple(rows))
                return
            base = 1 << (width - 1 - pivots[r])
            cols = free_cols[r]
            for fill in range(1 << len(cols)):
                row = base
                for i, c in enumerate(cols):
                    if (fill >> i) & 1:
                        row |= 1 << (width - 1 - c)
                if all(_symp(row, prev, n) == 0 for prev in rows):
                    rows.append(row)
                    extend(rows, r + 1)
                    rows.pop()

        extend([], 0)
    found.sort()
    if len(found) != n_stabilizer_groups(n):  # pragma: no cover - structural guard
        raise AssertionError(f"found {len(found)} groups, expected {n_stabilizer_groups(n)}")
    return found


def _group_elements(rows: Sequence[int], n: int) -> tuple[np.ndarray, np.ndarray]:
    """Pauli indices and +-1 phases of all 2^N products of the (unsigned) generators.

    Element ``mask`` is the ordered product of generators k with bit ``N-1-k`` of
    ``mask`` set; element 0 is the identity.
    """
    gens = [row_to_pauli(r, n) for r in rows]
    elems: list[PauliString] = [PauliString((0,) * n, (0,) * n)]
    for mask in range(1, 1 << n):
        low = mask & -mask
        k = n - 1 - (low.bit_length() - 1)
        # lowest set bit is the last generator in product order
        elems.append(elems[mask ^ low] * gens[k])
    idx = np.array([e.index for e in elems], dtype=np.int32)
    phase = np.array([1 if e.phase == 0 else -1 for e in elems], dtype=np.int8)
    if any(e.phase % 2 for e in elems):
        raise CatalogError("generators do not commute")
    return idx, phase


@lru_cache(maxsize=None)
def _sign_parity(n: int) -> np.ndarray:
    m = np.arange(1 << n)
    par = np.array([[bin(a & s).count("1") & 1 for a in m] for s in m], dtype=np.int8)
    return (1 - 2 * par).astype(np.int8)  # [sign_int, mask] -> (-1)^{popcount}


@dataclass(frozen=True)
class StabilizerTableau:
    """N commuting, independent, signed Pauli generators.

    ``rows`` are packed binary-symplectic rows; ``signs[k]`` is the +-1 sign of
    generator k.
    """

    n: int
    rows: tuple[int, ...]
    signs: tuple[int, ...]

    def __post_init__(self):
        if len(self.rows) != self.n or len(self.signs) != self.n:
            raise CatalogError("tableau needs exactly N generators and N signs")
        if any(s not in (1, -1) for s in self.signs):
            raise CatalogError("signs must be +1 or -1")
        for i, a in enumerate(self.rows):
            for b in self.rows[i + 1:]:
                if _symp(a, b, self.n):
                    raise CatalogError("generators do not commute")
        rref_rows(self.rows, self.n)  # independence

    @classmethod
    def from_paulis(cls, generators: Sequence[PauliString | str]) -> "StabilizerTableau":
        ps = [PauliString.from_label(g) if isinstance(g, str) else g for g in generators]
        n = ps[0].n_qubits
        signs = []
        for p in ps:
            if p.phase % 2:
                raise CatalogError(f"generator {p.label} is not Hermitian")
            signs.append(1 if p.phase == 0 else -1)
        return cls(n, tuple(pauli_to_row(p) for p in ps), tuple(signs))

    @property
    def sign_int(self) -> int:
        s = 0
        for sg in self.signs:
            s = (s << 1) | (sg < 0)
        return s

    def generators(self) -> list[PauliString]:
        return [row_to_pauli(r, self.n, 0 if s > 0 else 2) for r, s in zip(self.rows, self.signs)]

    def canonical(self) -> "StabilizerTableau":
        """Same signed group with generators in RREF (signs follow the row operations)."""
        gens = self.generators()
        out: list[PauliString] = []
        n = self.n
        for bit in range(2 * n - 1, -1, -1):
            piv = next((i for i, g in enumerate(gens) if (pauli_to_row(g) >> bit) & 1), None)
            if piv is None:
                continue
            pg = gens.pop(piv)
            gens = [g * pg if (pauli_to_row(g) >> bit) & 1 else g for g in gens]
            out = [g * pg if (pauli_to_row(g) >> bit) & 1 else g for g in out]
            out.append(pg)
        return StabilizerTableau.from_paulis(out)

    def elements(self) -> tuple[np.ndarray, np.ndarray]:
        """Pauli indices and signed +-1 values of the full signed stabilizer group."""
        idx, phase = _group_elements(self.rows, self.n)
        vals = phase * _sign_parity(self.n)[self.sign_int]
        return idx, vals.astype(np.int8)

    def projector(self) -> QuantumState:
        return render_stabilizer_projector(self)


def render_stabilizer_projector(tab: StabilizerTableau) -> QuantumState:
    """``sigma = (1/d) sum_{g in G} phi_g g`` over the signed group."""
    idx, vals = tab.elements()
    mats = pauli_matrices(tab.n)
    return QuantumState(np.einsum("a,aij->ij", vals.astype(float), mats[idx]) / 2**tab.n)


@dataclass(frozen=True, eq=False)
class AMatrix:
    """Sparse ``4^N x |S_N|`` matrix of stabilizer Pauli expectations ``Tr(sigma_i P_j)``.

    Column c is stored as ``2^N`` (row, value) pairs in ``rows[c]``, ``vals[c]``;
    entry 0 of every column is the identity row with value +1.
    """

    n_qubits: int
    rows: np.ndarray
    vals: np.ndarray

    @property
    def n_rows(self) -> int:
        return 4**self.n_qubits

    @property
    def n_cols(self) -> int:
        return self.rows.shape[0]

    @property
    def shape(self) -> tuple[int, int]:
        return (self.n_rows, self.n_cols)

    def checksum(self) -> str:
        h = hashlib.sha256()
        h.update(np.ascontiguousarray(self.rows, dtype=np.int32).tobytes())
        h.update(np.ascontiguousarray(self.vals, dtype=np.int8).tobytes())
        return h.hexdigest()

    def to_sparse(self) -> sp.csc_matrix:
        k = self.rows.shape[1]
        indptr = np.arange(0, self.n_cols * k + 1, k)
        order = np.argsort(self.rows, axis=1, kind="stable")
        r = np.take_along_axis(self.rows, order, 1).ravel()
        v = np.take_along_axis(self.vals, order, 1).ravel().astype(float)
        return sp.csc_matrix((v, r, indptr), shape=self.shape)

    def dense(self) -> np.ndarray:
        return self.to_sparse().toarray()

    def column(self, c: int) -> np.ndarray:
        col = np.zeros(self.n_rows)
        col[self.rows[c]] = self.vals[c]
        return col


@dataclass(eq=False)
class StabilizerCatalog:
    """All pure stabilizer states on N qubits in catalog order plus their A-matrix.

    Catalog order: groups sorted by RREF encoding, then the 2^N sign patterns in
    increasing sign integer (generator 1 is the most significant sign bit).
    """

    n: int
    groups: list[tuple[int, ...]]
    a_matrix: AMatrix
    _lookup: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        self._lookup = {g: i for i, g in enumerate(self.groups)}

    def __len__(self) -> int:
        return len(self.groups) << self.n

    def tableau(self, col: int) -> StabilizerTableau:
        g, s = divmod(col, 1 << self.n)
        signs = tuple(-1 if (s >> (self.n - 1 - k)) & 1 else 1 for k in range(self.n))
        return StabilizerTableau(self.n, self.groups[g], signs)

    def __iter__(self) -> Iterator[StabilizerTableau]:
        for c in range(len(self)):
            yield self.tableau(c)

    def column_index(self, tab: StabilizerTableau) -> int:
        can = tab.canonical()
        return (self._lookup[can.rows] << self.n) | can.sign_int


def enumerate_stabilizer_states(n: int) -> list[StabilizerTableau]:
    """Every pure stabilizer state on N qubits, in catalog order."""
    _check_n(n)
    out = []
    for rows in enumerate_stabilizer_groups(n):
        for s in range(1 << n):
            signs = tuple(-1 if (s >> (n - 1 - k)) & 1 else 1 for k in range(n))
            out.append(StabilizerTableau(n, rows, signs))
    return out


def build_a_matrix(n: int, groups: list[tuple[int, ...]] | None = None) -> AMatrix:
    _check_n(n)
    if groups is None:
        groups = enumerate_stabilizer_groups(n)
    k = 1 << n
    rows = np.empty((len(groups) * k, k), dtype=np.int32)
    vals = np.empty((len(groups) * k, k), dtype=np.int8)
    par = _sign_parity(n)
    for g, grp in enumerate(groups):
        idx, phase = _group_elements(grp, n)
        rows[g * k:(g + 1) * k] = idx
        vals[g * k:(g + 1) * k] = phase[None, :] * par
    rows.setflags(write=False)
    vals.setflags(write=False)
    return AMatrix(n, rows, vals)


def cache_dir() -> Path:
    env = os.environ.get(CACHE_ENV)
    return Path(env) if env else Path.home() / ".cache" / "dimermagic"


def _cache_path(n: int, directory: Path | None) -> Path:
    return (directory or cache_dir()) / f"amatrix_n{n}_v{CATALOG_VERSION}.npz"


def save_a_matrix(a: AMatrix, path: str | Path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(".tmp.npz")
    np.savez_compressed(
        tmp,
        n_qubits=np.int64(a.n_qubits),
        n_states=np.int64(a.n_cols),
        version=np.int64(CATALOG_VERSION),
        checksum=np.array(a.checksum()),
        rows=a.rows,
        vals=a.vals,
    )
    os.replace(tmp, path)


def load_a_matrix(path: str | Path) -> AMatrix:
    with np.load(path, allow_pickle=False) as f:
        n = int(f["n_qubits"])
        n_states = int(f["n_states"])
        version = int(f["version"])
        checksum = str(f["checksum"])
        rows = f["rows"].astype(np.int32)
        vals = f["vals"].astype(np.int8)
    if version != CATALOG_VERSION:
        raise CatalogError(f"cache version {version} != {CATALOG_VERSION}")
    if n_states != n_stabilizer_states(n) or rows.shape != (n_states, 2**n):
        raise CatalogError(f"cache holds {n_states} states, expected {n_stabilizer_states(n)} for N={n}")
    rows.setflags(write=False)
    vals.setflags(write=False)
    a = AMatrix(n, rows, vals)
    if a.checksum() != checksum:
        raise CatalogError("cache checksum mismatch")
    return a


@lru_cache(maxsize=None)
def load_catalog(n: int, use_cache: bool = True) -> StabilizerCatalog:
    """Catalog for N qubits; the A-matrix is read from / written to the disk cache."""
    _check_n(n)
    groups = enumerate_stabilizer_groups(n)
    a = None
    path = _cache_path(n, None)
    if use_cache and path.exists():
        try:
            a = load_a_matrix(path)
        except (CatalogError, OSError, KeyError, ValueError) as exc:
            logger.warning("ignoring stale A-matrix cache %s: %s", path, exc)
    if a is None:
        a = build_a_matrix(n, groups)
        if use_cache:
            try:
                save_a_matrix(a, path)
            except OSError as exc:
                logger.warning("could not write A-matrix cache %s: %s", path, exc)
    return StabilizerCatalog(n, groups, a)


def rebuild_cache(n: int) -> tuple[StabilizerCatalog, Path]:
    """Build the N-qubit A-matrix from scratch and overwrite its cache file."""
    _check_n(n)
    groups = enumerate_stabilizer_groups(n)
    a = build_a_matrix(n, groups)
    path = _cache_path(n, None)
    save_a_matrix(a, path)
    load_catalog.cache_clear()
    return StabilizerCatalog(n, groups, a), path
