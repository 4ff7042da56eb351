import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import random_density
from dimermagic.dimer import DIM, SECTOR_INDEX, DimerParams, annihilator, double_occupancy, ground_state, local_rdm
from dimermagic.resources import (
    fermionic_swap,
    intersite_entanglement,
    mode_permutation,
    non_gaussianity,
    nssr_entanglement,
    one_body_dm,
    pssr_entanglement,
    reduced_modes,
    von_neumann_entropy,
)
from dimermagic.states import QuantumState

U_GRID = np.arange(0, 50.5, 0.5)


def sector_state(rng, rank=None):
    m = np.zeros((DIM, DIM), dtype=complex)
    idx = np.array(SECTOR_INDEX)
    m[np.ix_(idx, idx)] = random_density(rng, 2, rank)
    return m


def h2(p):
    p = np.asarray(p, dtype=float)
    p = p[p > 0]
    return float(-np.sum(p * np.log2(p)))


def test_entropy_basics():
    assert von_neumann_entropy(np.eye(4) / 4) == pytest.approx(2.0)
    assert von_neumann_entropy(np.diag([1.0, 0.0])) == 0.0
    with pytest.raises(ValueError):
        von_neumann_entropy(np.diag([1.1, -0.1]))


def test_mode_permutation_is_unitary_and_fswap_squares_to_one():
    f = fermionic_swap()
    assert np.allclose(f @ f, np.eye(4))
    u = mode_permutation([2, 0], 4)
    assert np.allclose(u @ u.conj().T, np.eye(16))


@given(st.integers(0, 2**32 - 1))
def test_reduced_modes_match_fermionic_expectations(seed):
    rng = np.random.default_rng(seed)
    rho = sector_state(rng)
    modes = [int(k) for k in rng.permutation(4)[:2]]
    red = reduced_modes(rho, modes)
    for i, a in enumerate(modes):
        for j, b in enumerate(modes):
            full = np.trace(rho @ annihilator(a).conj().T @ annihilator(b))
            local = np.trace(red @ annihilator(i, 2).conj().T @ annihilator(j, 2))
            assert local == pytest.approx(full, abs=1e-12)
    na, nb = (annihilator(k).conj().T @ annihilator(k) for k in modes)
    n0, n1 = (annihilator(k, 2).conj().T @ annihilator(k, 2) for k in range(2))
    assert np.trace(red @ n0 @ n1) == pytest.approx(np.trace(rho @ na @ nb), abs=1e-12)


def test_reduced_modes_validation():
    with pytest.raises(ValueError):
        reduced_modes(np.eye(16) / 16, [0, 0])
    with pytest.raises(ValueError):
        reduced_modes(np.eye(16) / 16, [4])


def test_non_gaussianity_nonnegative_on_500_sector_states():
    rng = np.random.default_rng(99)
    for _ in range(500):
        rho = sector_state(rng, rank=int(rng.integers(1, 5)))
        assert non_gaussianity(rho) >= -1e-12


def test_gaussian_ground_state_at_zero_interaction():
    psi = ground_state(DimerParams(U=0.0))
    assert non_gaussianity(psi) == 0.0
    g = one_body_dm(psi)
    assert np.allclose(g @ g, g, atol=1e-12)  # pure Gaussian: projector


def test_non_gaussianity_grows_with_U():
    full = [non_gaussianity(ground_state(DimerParams(U=u))) for u in U_GRID]
    local = [non_gaussianity(local_rdm(ground_state(DimerParams(U=u)))) for u in U_GRID]
    assert all(b >= a - 1e-12 for a, b in zip(full, full[1:]))
    assert all(b >= a - 1e-12 for a, b in zip(local, local[1:]))


def test_strong_coupling_limits():
    psi = ground_state(DimerParams(U=1000.0))
    assert non_gaussianity(psi) / 2 == pytest.approx(2.0, abs=0.01)
    assert non_gaussianity(local_rdm(psi)) == pytest.approx(1.0, abs=0.01)


@pytest.mark.parametrize("U", [0.0, 0.7, 4.0, 25.0])
def test_local_non_gaussianity_closed_form(U):
    rho1 = local_rdm(ground_state(DimerParams(U=U)))
    g = one_body_dm(rho1)
    assert np.allclose(g, np.eye(2) / 2, atol=1e-13)
    assert non_gaussianity(rho1) == pytest.approx(2 - von_neumann_entropy(rho1), abs=1e-12)
    d = double_occupancy(ground_state(DimerParams(U=U)))
    assert von_neumann_entropy(rho1) == pytest.approx(h2([d, d, 0.5 - d, 0.5 - d]), abs=1e-12)


@given(st.floats(0, 1000))
def test_superselected_entanglement_bounds(U):
    psi = ground_state(DimerParams(U=U))
    d = double_occupancy(psi)
    e_n = nssr_entanglement(d)
    assert e_n == pytest.approx(1 - 2 * d)
    assert e_n <= pssr_entanglement() <= intersite_entanglement(psi) + 1e-12


def test_nssr_range_and_mixed_refusal():
    with pytest.raises(ValueError):
        nssr_entanglement(0.6)
    with pytest.raises(ValueError):
        intersite_entanglement(QuantumState.maximally_mixed(4))
