import numpy as np
import pytest
from hypothesis import given, strategies as st

from dimermagic import stabilizers
from dimermagic.pauli import PauliString, pauli_decompose, pauli_matrices
from dimermagic.stabilizers import (
    AMatrix,
    CatalogError,
    StabilizerTableau,
    build_a_matrix,
    enumerate_stabilizer_groups,
    enumerate_stabilizer_states,
    load_a_matrix,
    load_catalog,
    n_stabilizer_states,
    rebuild_cache,
    save_a_matrix,
)

EXPECTED = {1: 6, 2: 60, 3: 1080, 4: 36720}


def formula(n):
    # 2^N prod_{k=1}^{N} (2^k + 1), written out independently
    out = 2**n
    for k in range(1, n + 1):
        out *= 2**k + 1
    return out


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_state_counts(n):
    assert n_stabilizer_states(n) == formula(n) == EXPECTED[n]
    assert len(enumerate_stabilizer_groups(n)) * 2**n == EXPECTED[n]
    if n <= 3:
        assert len(enumerate_stabilizer_states(n)) == EXPECTED[n]


def test_unsupported_sizes():
    for n in (0, 5):
        with pytest.raises(CatalogError):
            enumerate_stabilizer_states(n)


def test_single_qubit_catalog_is_the_octahedron():
    bloch = sorted(
        tuple(np.round(pauli_decompose(t.projector())[1:], 12)) for t in enumerate_stabilizer_states(1)
    )
    axes = sorted(tuple(s * e) for e in np.eye(3) for s in (1, -1))
    assert np.allclose(bloch, axes)


@pytest.mark.parametrize("n", [1, 2])
def test_projectors_pure_and_distinct(n):
    projs = [t.projector().matrix for t in enumerate_stabilizer_states(n)]
    for p in projs:
        assert np.allclose(p @ p, p, atol=1e-13)
        assert np.trace(p).real == pytest.approx(1.0)
    flat = np.array([p.ravel() for p in projs])
    overlaps = np.abs(flat.conj() @ flat.T)
    np.fill_diagonal(overlaps, 0)
    assert overlaps.max() < 1 - 1e-9


@pytest.mark.parametrize("n", [1, 2])
def test_a_matrix_matches_dense_traces(n):
    a = build_a_matrix(n).dense()
    mats = pauli_matrices(n)
    for c, tab in enumerate(enumerate_stabilizer_states(n)):
        rho = tab.projector().matrix
        expect = np.real(np.einsum("ij,aji->a", rho, mats))
        assert np.allclose(a[:, c], expect, atol=1e-13)
        # entries are exactly +-1 on the group and 0 elsewhere
        assert set(np.unique(a[:, c])) <= {-1.0, 0.0, 1.0}
        assert np.count_nonzero(a[:, c]) == 2**n


@pytest.mark.parametrize("n", [3, 4])
def test_a_matrix_sampled_columns(n):
    a = build_a_matrix(n)
    mats = pauli_matrices(n)
    rng = np.random.default_rng(n)
    cat = load_catalog(n)
    for c in rng.choice(a.n_cols, size=12, replace=False):
        rho = cat.tableau(int(c)).projector().matrix
        expect = np.real(np.einsum("ij,aji->a", rho, mats))
        assert np.allclose(a.column(int(c)), expect, atol=1e-12)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_sign_completeness(n):
    states = enumerate_stabilizer_states(n)
    k = 2**n
    for g in range(0, len(states) // k, max(1, len(states) // k // 7)):
        projs = [states[g * k + s].projector().matrix for s in range(k)]
        assert np.allclose(sum(projs), np.eye(k), atol=1e-13)
        for i in range(k):
            for j in range(i + 1, k):
                assert np.max(np.abs(projs[i] @ projs[j])) < 1e-13


@given(st.integers(0, 1079))
def test_canonical_idempotent_and_lookup(col):
    cat = load_catalog(3)
    tab = cat.tableau(col)
    can = tab.canonical()
    assert can.canonical() == can
    assert np.allclose(can.projector().matrix, tab.projector().matrix, atol=1e-13)
    assert cat.column_index(tab) == col


def test_non_rref_generators_are_found():
    cat = load_catalog(2)
    tab = StabilizerTableau.from_paulis(["-XX", "YY"])  # the group of -|Phi+>-type states
    col = cat.column_index(tab)
    assert np.allclose(cat.tableau(col).projector().matrix, tab.projector().matrix, atol=1e-13)


def test_tableau_validation():
    with pytest.raises(CatalogError):
        StabilizerTableau.from_paulis(["XI", "ZI"])  # anticommuting
    with pytest.raises(CatalogError):
        StabilizerTableau.from_paulis(["XX", "XX"])  # dependent
    with pytest.raises(CatalogError):
        StabilizerTableau.from_paulis([PauliString.from_label("X") * PauliString.from_label("Z")])


def test_catalog_order_is_deterministic():
    assert enumerate_stabilizer_groups(3) == enumerate_stabilizer_groups(3)
    assert build_a_matrix(3).checksum() == build_a_matrix(3).checksum()
    groups = enumerate_stabilizer_groups(3)
    assert groups == sorted(groups)


def test_cache_round_trip(tmp_path):
    a = build_a_matrix(2)
    path = tmp_path / "a.npz"
    save_a_matrix(a, path)
    b = load_a_matrix(path)
    assert b.checksum() == a.checksum() and np.array_equal(b.dense(), a.dense())


def test_cache_detects_corruption(tmp_path):
    a = build_a_matrix(2)
    rows = np.array(a.rows)
    rows[0, 1], rows[0, 2] = rows[0, 2], rows[0, 1]
    vals = np.array(a.vals)
    vals[3, 1] *= -1
    bad = AMatrix(2, rows, vals)
    path = tmp_path / "bad.npz"
    save_a_matrix(bad, path)
    with np.load(path) as f:
        content = dict(f)
    content["checksum"] = np.array(a.checksum())
    np.savez(path, **content)
    with pytest.raises(CatalogError):
        load_a_matrix(path)


def test_cache_rejects_wrong_count(tmp_path):
    a = build_a_matrix(2)
    short = AMatrix(2, a.rows[:-4], a.vals[:-4])
    path = tmp_path / "short.npz"
    save_a_matrix(short, path)
    with pytest.raises(CatalogError):
        load_a_matrix(path)


def test_load_catalog_uses_env_dir_and_repairs_stale_file(_isolated_cache):
    _, path = rebuild_cache(2)
    assert path.parent == _isolated_cache and path.exists()
    path.write_bytes(b"garbage")
    load_catalog.cache_clear()
    cat = load_catalog(2)
    assert len(cat) == 60
    assert load_a_matrix(path).checksum() == cat.a_matrix.checksum()
