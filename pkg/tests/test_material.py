import numpy as np
import pytest

from thermovar import nsf_material as M
from thermovar.errors import CFLWarning, MeshTanglingError, ModelError, ShapeError, SimulationError
from thermovar.harness.checks import run_tube, tube
from thermovar.stencils import Grid, first_derivative, integrate, quadrature_weights


def test_summation_by_parts(rng):
    h = 0.1
    u, f = rng.normal(size=11), rng.normal(size=11)
    w = quadrature_weights(11, h)
    lhs = w @ (u * first_derivative(f, h) + f * first_derivative(u, h))
    assert lhs == pytest.approx(u[-1] * f[-1] - u[0] * f[0], abs=1e-13)
    assert integrate(np.ones(11), h) == pytest.approx(1.0)


def test_energy_conserved_and_entropy_grows():
    model, traj, _ = run_tube(64, "material", t_end=0.05)
    E = [M.total_energy(model, s) for s in traj]
    S = [M.total_entropy(model, s) for s in traj]
    assert np.max(np.abs(np.array(E) - E[0])) / E[0] < 1e-12
    assert np.all(np.diff(S) >= -1e-15)
    k = M.terms(model, traj[-1])
    assert np.all(k["dSigma"] >= 0)
    assert np.all(traj[-1].V[[0, -1]] == 0)


def test_heat_supply_balance():
    from thermovar.eos import GasEos

    grid = Grid.uniform(32)
    model = M.MaterialModel(grid, 1.0, GasEos(2.5, 3.5, 1.0, 1.0), kappa_th=0.01,
                            R_supply=lambda t, X: 0.2 * np.ones_like(X))
    state = M.initial_state(model)
    traj = M.simulate(model, state, 1e-3, 100)
    dE = M.total_energy(model, traj[-1]) - M.total_energy(model, state)
    assert dE == pytest.approx(0.2 * 0.1, rel=1e-10)
    assert not model.is_isolated()


def test_pressure_identity():
    model, state = tube(16, "material")
    assert M.pressure_identity_check(model, state) < 1e-8


def test_tangled_mesh():
    model, state = tube(8, "material")
    phi = state.phi.copy()
    phi[4] = phi[2] - 0.01
    with pytest.raises(MeshTanglingError) as err:
        M.deformation_jacobian(model.grid, phi)
    assert err.value.node == 3


def test_abort_carries_node():
    model, state = tube(16, "material")
    V = np.zeros(17)
    V[8] = -50.0
    bad = M.MaterialState(phi=state.phi, V=V, Ttemp=state.Ttemp, Gamma=state.Gamma, Sigma=state.Sigma)
    with pytest.raises(SimulationError) as err:
        M.simulate(model, bad, 0.01, 20, cfl=10.0)
    assert err.value.scenario == "gas_tube_material" and err.value.step is not None


def test_cfl_warning():
    model, state = tube(16, "material")
    with pytest.warns(CFLWarning):
        M.step(model, state, 10 * M.max_stable_dt(model, state))


def test_zero_step_is_identity():
    model, state = tube(8, "material")
    assert M.step(model, state, 0.0) is state


def test_validation():
    from thermovar.eos import GasEos

    with pytest.raises(ModelError):
        M.MaterialModel(Grid.uniform(8), -1.0, GasEos(2.5, 3.5, 1.0, 1.0))
    with pytest.raises(ModelError):
        M.MaterialModel(Grid.uniform(8), 1.0, GasEos(2.5, 3.5, 1.0, 1.0), mu=-0.1)
    with pytest.raises(ShapeError):
        M.MaterialState(phi=np.zeros(3), V=np.zeros(4), Ttemp=np.ones(3), Gamma=np.zeros(3), Sigma=np.zeros(3))


def test_state_is_read_only():
    _, state = tube(8, "material")
    with pytest.raises(ValueError):
        state.V[0] = 1.0
