import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from thermovar import discrete as D
from thermovar.discrete_models import GasChamber, HeatBlock, make_adiabatic_piston, make_piston, make_two_cells
from thermovar.errors import InversionError, ModelError, SimulationError, StateError


def test_two_cell_closed_form():
    model, state = make_two_cells(heat_capacity=2.0, kappa=0.3, T_a=1.0, T_b=2.0)
    traj = D.simulate(model, state, 1e-2, 100)
    T = traj[-1].T
    assert T[1] - T[0] == pytest.approx(np.exp(-2 * 0.3 * 1.0 / 2.0), rel=1e-9)
    assert T.sum() == pytest.approx(3.0, rel=1e-14)


def test_heat_supply_raises_temperature_in_both_forms():
    model, state = make_two_cells(kappa=0.0, T_a=1.0, T_b=1.0, heat_supply=(0.5, 0.0))
    for form in D.FORMS:
        T = D.current_temperatures(model, D.simulate(model, state, 1e-2, 100, form=form)[-1])
        assert T[0] == pytest.approx(1.5, rel=1e-10)
        assert T[1] == pytest.approx(1.0, rel=1e-12)


def test_forms_agree(gas):
    model, state = make_adiabatic_piston(gas, kappa=0.2, velocity=0.3)
    a = D.simulate(model, state, 1e-2, 200, form=D.FREE_ENERGY)[-1]
    b = D.simulate(model, state, 1e-2, 200, form=D.ENTROPY)[-1]
    np.testing.assert_allclose(a.q, b.q, rtol=1e-9)
    np.testing.assert_allclose(a.T, D.current_temperatures(model, b), rtol=1e-9)
    np.testing.assert_allclose(a.Sigma, b.Sigma, atol=1e-10)


def test_sigma_rate_is_entropy_rate_when_isolated_pair(gas):
    model, state = make_adiabatic_piston(gas, kappa=0.2, velocity=0.3)
    ent = D.to_entropy_form(model, state)
    r = D.rhs(model, ent)
    np.testing.assert_allclose(r.dSigma, r.dtheta, rtol=1e-13)
    assert r.dSigma.sum() == pytest.approx(D.entropy_production(model, ent).sum(), rel=1e-12)


def test_piston_energy_and_entropy(gas):
    model, state = make_piston(gas)
    traj = D.simulate(model, state, 1e-2, 500)
    assert D.energy_drift(model, traj) < 1e-9
    d = D.diagnostics(model, traj)
    assert np.all(np.diff(d["S_tot"]) > -1e-14)
    assert np.all(d["P_fr"] <= 0)
    # friction dissipates the oscillation
    assert abs(traj[-1].v[0]) < 0.1


def test_legendre_free_lagrangian(gas):
    model, state = make_piston(gas)
    q, v, T = state.q, state.v, np.array([1.3])
    val, S = D.legendre_free_lagrangian(model, q, v, T)
    sub = model.subsystems[0]
    assert sub.temperature(q, S[0]) == pytest.approx(1.3, rel=1e-12)
    assert val == pytest.approx(model.free_lagrangian(q, v, T), rel=1e-12)


def test_partials_of_bundled_subsystems(gas):
    ch = GasChamber(gas, 1.0, 0.2, (1.5,))
    ch.check_partials(np.array([0.7]), 0.4)
    HeatBlock(2.0, 1.0).check_partials(np.zeros(0), 0.3)


def test_entropy_inversion_errors(gas):
    ch = GasChamber(gas, 1.0, 0.0, (1.0,))
    with pytest.raises(InversionError):
        ch.solve_entropy(np.array([1.0]), 1e-300)


def test_volume_must_stay_positive(gas):
    ch = GasChamber(gas, 1.0, 0.0, (1.0,))
    with pytest.raises(StateError):
        ch.energy(np.array([-0.1]), 0.0)


def test_runaway_aborts_with_context(gas):
    model, state = make_piston(gas, velocity=-20.0, friction=0.0)
    with pytest.raises(SimulationError) as err:
        D.simulate(model, state, 1e-2, 200)
    assert err.value.step is not None and err.value.scenario == "piston"


@pytest.mark.parametrize("mass", [np.zeros((1, 1)), np.ones((1, 2)), np.array([[1.0, 1.0], [1.0, 1.0 + 1e-15]])])
def test_bad_mass_matrix(mass):
    with pytest.raises(ModelError):
        D.DiscreteModel(mass=mass, subsystems=(HeatBlock(1.0, 1.0),))


@pytest.mark.parametrize("kappa", [[[0, 1], [2, 0]], [[0, -1], [-1, 0]], [[1, 0], [0, 0]]])
def test_bad_kappa(kappa):
    with pytest.raises(ModelError):
        D.DiscreteModel(mass=np.zeros((0, 0)), subsystems=(HeatBlock(1.0, 1.0), HeatBlock(1.0, 1.0)),
                        kappa=np.array(kappa, float))


def test_state_needs_one_thermal_variable():
    with pytest.raises(StateError):
        D.DiscreteState(q=[], v=[], Gamma=[0.0], Sigma=[0.0])
    with pytest.raises(StateError):
        D.DiscreteState(q=[], v=[], Gamma=[0.0], Sigma=[0.0], T=[-1.0])


@given(Ta=st.floats(0.5, 3.0), Tb=st.floats(0.5, 3.0), kappa=st.floats(0.0, 2.0))
@settings(max_examples=30, deadline=None)
def test_exchange_production_non_negative(Ta, Tb, kappa):
    model, state = make_two_cells(kappa=kappa, T_a=Ta, T_b=Tb)
    prod = D.entropy_production(model, state)
    assert np.all(prod >= 0)
    r = D.rhs(model, state)
    assert r.dSigma.sum() >= -1e-15
    # heat is conserved by the exchange
    assert r.dtheta.sum() == pytest.approx(0.0, abs=1e-12)
