import numpy as np
import pytest
from hypothesis import given, strategies as st

from dimermagic.dimer import DimerParams, double_occupancy, ground_state
from dimermagic.magic import log_free_robustness
from dimermagic.quench import (
    QuenchSpec,
    evolve_dephased,
    evolve_pure,
    long_time_state,
    mixing_state,
    overlap_coefficients,
    time_grid,
)
from dimermagic.scan import LPContext

U_GRID = np.linspace(0, 20, 11)


def local_maxima(v):
    # interior strict maxima of a periodic sample (wraps around)
    return [i for i in range(len(v)) if v[i] > v[i - 1] and v[i] >= v[(i + 1) % len(v)]]


def test_alpha_beta_normalized_and_match_numerics():
    for ui in U_GRID:
        for uf in U_GRID:
            a, b = overlap_coefficients(ui, uf)
            assert a * a + b * b == pytest.approx(1.0, abs=1e-12)
            num = QuenchSpec(ui, uf)._coef
            assert abs(num[0]) == pytest.approx(abs(a), abs=1e-12)
            assert abs(num[1]) == pytest.approx(abs(b), abs=1e-12)


def test_trivial_quench_and_strong_coupling_limit():
    a, b = overlap_coefficients(3.0, 3.0)
    assert (a, b) == pytest.approx((1.0, 0.0), abs=1e-12)
    a, b = overlap_coefficients(0.0, 1e6)
    assert b * b == pytest.approx(0.5, abs=1e-5)


def test_initial_state_is_pre_quench_ground_state():
    spec = QuenchSpec(100.0, 5.0)
    rho0 = evolve_pure(spec, 0.0).matrix
    assert np.allclose(rho0, ground_state(DimerParams(U=100.0)).matrix, atol=1e-12)


@given(st.floats(0, 50), st.floats(0, 50), st.floats(0, 100))
def test_pure_evolution_is_periodic(ui, uf, t):
    spec = QuenchSpec(ui, uf)
    a, b = evolve_pure(spec, t).matrix, evolve_pure(spec, t + spec.period).matrix
    assert np.max(np.abs(a - b)) < 1e-8
    assert evolve_pure(spec, t).purity == pytest.approx(1.0, abs=1e-12)


@given(st.floats(0, 30), st.floats(0, 30), st.floats(0.01, 2.0), st.floats(0, 20))
def test_dephasing_channel_is_valid(ui, uf, gamma, gt):
    rho = evolve_dephased(QuenchSpec(ui, uf, gamma=gamma), gt / gamma)
    ev = np.linalg.eigvalsh(rho.matrix)
    assert ev[0] >= -1e-12
    assert np.trace(rho.matrix).real == pytest.approx(1.0, abs=1e-12)


def test_dephased_double_occupancy_matches_pure():
    # dephasing in the energy basis only removes coherences; <d> oscillation is damped
    spec = QuenchSpec(100.0, 5.0, gamma=0.2)
    inf = double_occupancy(long_time_state(spec))
    for t in (0.5, 3.0, 7.0):
        pure = double_occupancy(evolve_pure(spec, t))
        damped = double_occupancy(evolve_dephased(spec, t))
        assert damped - inf == pytest.approx((pure - inf) * np.exp(-spec.gamma * t), abs=1e-12)


def test_long_time_state_needs_dephasing():
    with pytest.raises(ValueError):
        long_time_state(QuenchSpec(1.0, 2.0))
    with pytest.raises(ValueError):
        evolve_dephased(QuenchSpec(1.0, 2.0, gamma=0.1), -1.0)


def test_default_time_grid():
    spec = QuenchSpec(100.0, 5.0)
    g = time_grid(spec)
    assert len(g) == 400 and g[0] == 0 and g[-1] == pytest.approx(6 * spec.period)
    assert spec.frequency == pytest.approx(spec.eigensystem.E_plus - spec.eigensystem.E_minus)


def test_twofold_magic_oscillation():
    spec = QuenchSpec(100.0, 5.0)
    times = np.linspace(0, spec.period, 64, endpoint=False)
    ctx = LPContext()
    lr = np.array([ctx.lr(evolve_pure(spec, t))[0] for t in times])
    d = np.array([double_occupancy(evolve_pure(spec, t)) for t in times])
    assert len(local_maxima(d)) == 1
    assert len(local_maxima(lr)) == 2


def test_saturation_at_gamma_t_10():
    ctx = LPContext()
    for ui, uf in [(100.0, 5.0), (0.0, 10.0), (8.0, 1.0)]:
        spec = QuenchSpec(ui, uf, gamma=0.1)
        late = ctx.lr(evolve_dephased(spec, 10 / spec.gamma))[0]
        inf = ctx.lr(long_time_state(spec))[0]
        assert abs(late - inf) < 1e-3


def test_mixing_states():
    for pair in ("plus", "D"):
        rho = mixing_state(pair, 0.3, 4.0)
        assert rho.purity < 1
        assert np.allclose(mixing_state(pair, 0.0, 4.0).matrix, ground_state(DimerParams(U=4.0)).matrix, atol=1e-12)
    with pytest.raises(ValueError):
        mixing_state("t0", 0.5, 4.0)
    with pytest.raises(ValueError):
        mixing_state("plus", 1.5, 4.0)


def test_mixing_endpoints_magic():
    # both singlets psi_+- are magic at U = 4, D is a stabilizer state
    assert log_free_robustness(mixing_state("plus", 1.0, 4.0)) > 0
    assert log_free_robustness(mixing_state("D", 1.0, 4.0)) == 0.0
