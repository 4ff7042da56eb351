"""Reference values for each module: trivial cases, closed forms and limits."""

import math

import numpy as np
import pytest

from dimermagic.dimer import (
    DimerParams,
    analytic_eigensystem,
    basis_vector,
    build_hamiltonian,
    double_occupancy,
    ground_state,
    local_rdm,
    numeric_eigensystem,
    thermal_state,
    total_number,
)
from dimermagic.l1 import L1Problem, L1Solution, solve_l1, verify_certificate
from dimermagic.magic import log_free_robustness, mixed_sre_2, robustness, sre
from dimermagic.pauli import pauli_decompose
from dimermagic.quench import QuenchSpec, evolve_dephased, evolve_pure, long_time_state, mixing_state, overlap_coefficients
from dimermagic.resources import intersite_entanglement, non_gaussianity, nssr_entanglement, one_body_dm, von_neumann_entropy
from dimermagic.scan import critical_lambda, ground_scan, quench_saturation_scan, thermal_scan
from dimermagic.stabilizers import StabilizerTableau, build_a_matrix, enumerate_stabilizer_groups, load_catalog
from dimermagic.states import QuantumState

SQ2 = math.sqrt(2)


def bloch_state(r):
    x, y, z = r
    return np.array([[1 + z, x - 1j * y], [x + 1j * y, 1 - z]]) / 2


# stabilizer catalog ------------------------------------------------------------

@pytest.mark.parametrize("n, groups", [(1, 3), (2, 15), (4, 2295)])
def test_group_counts(n, groups):
    assert len(enumerate_stabilizer_groups(n)) == groups


def test_small_projectors():
    assert np.allclose(StabilizerTableau.from_paulis(["Z"]).projector().matrix, np.diag([1, 0]))
    bell = np.array([1, 0, 0, 1]) / SQ2
    assert np.allclose(StabilizerTableau.from_paulis(["ZZ", "XX"]).projector().matrix, np.outer(bell, bell))


def test_single_qubit_a_matrix_shape():
    a = build_a_matrix(1).dense()
    assert a.shape == (4, 6)
    assert np.all(np.count_nonzero(a, axis=0) == 2)


# l1 solver -----------------------------------------------------------------------

def test_bloch_oracle_and_interior():
    a = load_catalog(1).a_matrix
    sol = solve_l1(L1Problem(a, [1, 1 / SQ2, 0, 1 / SQ2]))
    assert sol.l1_norm == pytest.approx(SQ2, abs=1e-10)
    assert solve_l1(L1Problem(a, [1, 0, 0, 0])).l1_norm == pytest.approx(1.0, abs=1e-12)


def test_certificate_perturbations():
    a = load_catalog(1).a_matrix
    prob = L1Problem(a, [1, 1 / SQ2, 0, 1 / SQ2])
    sol = solve_l1(prob)
    assert verify_certificate(prob, sol)
    x = sol.x.copy()
    x[int(np.argmax(np.abs(x)))] += 1e-3
    assert not verify_certificate(prob, L1Solution(**{**sol.__dict__, "x": x}))
    assert not verify_certificate(prob, L1Solution(**{**sol.__dict__, "dual_certificate": 2 * sol.dual_certificate}))


# magic measures ------------------------------------------------------------------

def test_robustness_reference_values():
    for tab in list(load_catalog(2))[::5]:
        assert robustness(tab.projector()) == pytest.approx(1.0, abs=1e-10)
    assert robustness(bloch_state((1 / SQ2, 0, 1 / SQ2))) == pytest.approx(SQ2, abs=1e-10)
    assert robustness(ground_state(DimerParams(U=0.0))) == pytest.approx(1.0, abs=1e-10)


def test_lr_reference_values():
    rng = np.random.default_rng(4)
    cat = load_catalog(2)
    w = rng.dirichlet(np.ones(5))
    mix = sum(wi * cat.tableau(int(c)).projector().matrix for wi, c in zip(w, rng.choice(60, 5, replace=False)))
    assert log_free_robustness(mix) == 0.0
    t = bloch_state((1 / SQ2, 1 / SQ2, 0))
    assert log_free_robustness(np.kron(t, t)) <= 2 * log_free_robustness(t) + 1e-6
    for U in (0.0, 1.0, 4.0, 100.0):
        assert log_free_robustness(local_rdm(ground_state(DimerParams(U=U)))) == 0.0


def test_sre_reference_values():
    assert sre(np.diag([1.0, 0.0]), 2) == 0.0
    psi = np.array([math.cos(math.pi / 8), math.sin(math.pi / 8)])
    assert sre(np.outer(psi, psi), 2) == pytest.approx(2 - math.log2(3), abs=1e-12)
    assert mixed_sre_2(QuantumState.maximally_mixed(2)) == 0.0
    assert mixed_sre_2(local_rdm(ground_state(DimerParams(U=0.0)))) == pytest.approx(0.0, abs=1e-14)
    assert mixed_sre_2(local_rdm(ground_state(DimerParams(U=1e6)))) == pytest.approx(0.0, abs=1e-6)


def test_dimer_sre_vanishes_at_both_limits_and_peaks_between():
    us = np.geomspace(0.1, 100, 40)
    for alpha in (1, 2):
        vals = [sre(ground_state(DimerParams(U=u)), alpha) for u in us]
        k = int(np.argmax(vals))
        assert 0 < k < len(us) - 1
        assert sre(ground_state(DimerParams(U=0.0)), alpha) == 0.0
        assert sre(ground_state(DimerParams(U=1e5)), alpha) < 1e-4


# hubbard dimer -------------------------------------------------------------------

def test_spectrum_references():
    assert np.allclose(sorted(analytic_eigensystem(DimerParams(U=0.0)).energies()), [-2, 0, 0, 2], atol=1e-14)
    e = numeric_eigensystem(DimerParams(U=4.0))
    assert e.E_minus == pytest.approx(2 - 2 * SQ2, abs=1e-12)
    assert e.E_plus == pytest.approx(2 + 2 * SQ2, abs=1e-12)
    h = build_hamiltonian(DimerParams(t=0.7, U=3.3))
    assert np.array_equal(h @ total_number() - total_number() @ h, np.zeros((16, 16)))


def test_strong_coupling_singlet():
    singlet = (basis_vector("1001") - basis_vector("0110")) / SQ2
    psi = numeric_eigensystem(DimerParams(U=1e6)).psi_minus
    assert abs(np.vdot(singlet, psi)) ** 2 == pytest.approx(1.0, abs=1e-10)


def test_double_occupancy_of_d_state():
    d = numeric_eigensystem(DimerParams(U=2.0)).D
    assert double_occupancy(np.outer(d, d.conj())) == pytest.approx(0.5, abs=1e-14)


def test_thermal_limits():
    low = thermal_state(DimerParams(U=4.0, T=1e-4)).matrix
    assert np.max(np.abs(low - ground_state(DimerParams(U=4.0)).matrix)) < 1e-12
    high = thermal_state(DimerParams(U=4.0, T=1e6)).matrix
    ev = np.sort(np.linalg.eigvalsh(high))[-4:]
    assert np.allclose(ev, 0.25, atol=1e-5)
    assert double_occupancy(high) == pytest.approx(0.25, abs=1e-5)


@pytest.mark.parametrize("U", [0.0, 1.0, 4.0, 50.0])
def test_local_rdm_form(U):
    psi = ground_state(DimerParams(U=U))
    d = double_occupancy(psi)
    assert np.allclose(local_rdm(psi).matrix, np.diag([d, 0.5 - d, 0.5 - d, d]), atol=1e-14)
    if U == 0:
        assert np.allclose(local_rdm(psi).matrix, np.eye(4) / 4, atol=1e-14)


# resources -----------------------------------------------------------------------

def test_one_body_references():
    psi = ground_state(DimerParams(U=3.0))
    assert np.allclose(np.diag(one_body_dm(psi)), 0.5, atol=1e-14)
    assert np.allclose(one_body_dm(local_rdm(psi)), np.eye(2) / 2, atol=1e-14)
    ev = np.linalg.eigvalsh(one_body_dm(ground_state(DimerParams(U=0.0))))
    assert np.allclose(ev, [0, 0, 1, 1], atol=1e-14)


def test_entropy_references():
    assert von_neumann_entropy(np.diag([1.0, 0, 0, 0])) == 0.0
    assert von_neumann_entropy(np.eye(4) / 4) == pytest.approx(2.0)
    assert von_neumann_entropy(np.eye(2) / 2) == pytest.approx(1.0)
    assert non_gaussianity(ground_state(DimerParams(U=0.0))) == 0.0


def test_entanglement_references():
    assert nssr_entanglement(0.25) == 0.5
    assert nssr_entanglement(0.0) == 1.0
    assert nssr_entanglement(0.5) == 0.0
    assert intersite_entanglement(ground_state(DimerParams(U=0.0))) == pytest.approx(2.0, abs=1e-12)
    assert intersite_entanglement(ground_state(DimerParams(U=1e6))) == pytest.approx(1.0, abs=1e-6)
    d = numeric_eigensystem(DimerParams(U=1.0)).D
    assert intersite_entanglement(np.outer(d, d.conj())) == pytest.approx(1.0, abs=1e-12)


# quench dynamics -----------------------------------------------------------------

def test_quench_references():
    assert overlap_coefficients(2.5, 2.5) == pytest.approx((1.0, 0.0), abs=1e-14)
    spec = QuenchSpec(100.0, 5.0)
    e = spec.eigensystem
    psi0 = numeric_eigensystem(DimerParams(U=100.0)).psi_minus
    assert abs(np.vdot(e.psi_minus, psi0)) == pytest.approx(abs(spec.alpha), abs=1e-12)
    assert abs(np.vdot(e.psi_plus, psi0)) == pytest.approx(abs(spec.beta), abs=1e-12)
    d0 = double_occupancy(evolve_pure(spec, 0.0))
    assert double_occupancy(evolve_pure(spec, spec.period)) == pytest.approx(d0, abs=1e-10)
    assert double_occupancy(evolve_pure(spec, spec.period / 2)) != pytest.approx(d0, abs=1e-3)


def test_dephasing_references():
    spec = QuenchSpec(100.0, 5.0, gamma=0.3)
    gs = ground_state(DimerParams(U=100.0)).matrix
    assert np.allclose(evolve_dephased(spec, 0.0).matrix, gs, atol=1e-12)
    assert evolve_dephased(spec, 10 / spec.gamma).trace_distance(long_time_state(spec)) < 1e-3
    assert np.linalg.matrix_rank(long_time_state(spec).matrix, tol=1e-10) == 2
    same = QuenchSpec(3.0, 3.0, gamma=0.3)
    assert np.allclose(long_time_state(same).matrix, ground_state(DimerParams(U=3.0)).matrix, atol=1e-12)
    assert np.allclose(mixing_state("D", 0.0, 2.0).matrix, ground_state(DimerParams(U=2.0)).matrix, atol=1e-12)


# scans ---------------------------------------------------------------------------

def test_ground_scan_rows():
    zero, big = ground_scan([0.0, 1e3])
    assert zero.values["LR"] == 0.0
    assert zero.values["d"] == pytest.approx(0.25, abs=1e-14)
    assert zero.values["E_NSSR"] == pytest.approx(0.5, abs=1e-14)
    assert zero.values["NG_per_site"] == 0.0
    assert big.values["LR"] < 0.02


def test_thermal_scan_rows():
    rows = thermal_scan([4.0], [0.01, 1.0, 3.0, 5.0, 10.0])
    lr = [r.values["LR"] for r in rows]
    assert lr[0] > 0 and lr[-1] == 0.0 and lr[-2] == 0.0
    small_u = thermal_scan([0.05, 0.1, 2.0], [1.0])
    assert [r.values["LR"] == 0 for r in small_u] == [True, True, False]
    hot = thermal_scan([1.0, 10.0], [1e4])
    assert all(abs(r.values["d"] - 0.25) < 1e-3 for r in hot)


def test_d_family_crosses_only_at_one():
    b = critical_lambda("D", 4.0, 0.0, 1.0, tol=1e-5)
    assert b.value > 1 - 1e-4
    assert all(flag for lam, flag in b.coarse if lam < 1.0)


def test_saturation_diagonal_equals_ground_lr():
    rows = quench_saturation_scan([1.0, 4.0], [1.0, 4.0], gamma=0.1)
    ground = {r.params["U"]: r.values["LR"] for r in ground_scan([1.0, 4.0])}
    for r in rows:
        if r.params["Ui"] == r.params["Uf"]:
            assert r.values["LR"] == pytest.approx(ground[r.params["Ui"]], abs=1e-9)
