import numpy as np
import pytest

from thermovar import nsf_spatial as S
from thermovar.errors import ModelError, ShapeError, SimulationError, StateError
from thermovar.harness.checks import run_tube, specific_entropy_rate, tube
from thermovar.harness.compare import relative_difference


def test_energy_mass_entropy():
    model, traj, _ = run_tube(64, "spatial", t_end=0.05)
    E = np.array([S.total_energy(model, s) for s in traj])
    m = np.array([S.total_mass(model, s) for s in traj])
    Sg = np.array([S.total_entropy(model, s) for s in traj])
    assert np.max(np.abs(E - E[0])) / E[0] < 1e-12
    assert np.max(np.abs(m - m[0])) / m[0] < 1e-13
    assert np.all(np.diff(Sg) >= -1e-15)
    assert np.min(S.entropy_production(model, traj[-1])) >= 0


def test_forms_agree():
    model, a, dt = run_tube(32, "spatial", t_end=0.02)
    _, b, _ = run_tube(32, "spatial", t_end=0.02, dt=dt, form=S.ENTROPY)
    for x, y in zip(a, b):
        assert relative_difference(x.T, y.T) < 1e-7
        assert relative_difference(x.v, y.v) < 1e-6


def test_heat_equation_rewrite():
    model, traj, _ = run_tube(32, "spatial", t_end=0.01)
    assert max(S.heat_equation_rewrite_residual(model, s) for s in traj) < 1e-12


def test_unreduced_momentum_form_converges():
    gaps = []
    for nx in (32, 64, 128):
        model, state = tube(nx, "spatial", amplitude=0.1)
        gaps.append(S.unreduced_momentum_gap(model, state))
    assert gaps[0] / gaps[1] == pytest.approx(4.0, rel=0.1)
    assert gaps[1] / gaps[2] == pytest.approx(4.0, rel=0.1)


def test_uniform_state_is_steady():
    model, state = tube(16, "spatial", amplitude=0.0)
    r = S.rhs(model, state)
    for f in (r.dv, r.drho, r.dtheta, r.dsigma):
        assert np.max(np.abs(f)) < 1e-14
    np.testing.assert_allclose(r.dgamma, state.T)


def test_material_to_spatial_at_rest():
    mmodel, ms = tube(16, "material")
    smodel, ss = tube(16, "spatial")
    mapped = S.material_to_spatial(mmodel, ms, smodel.grid)
    np.testing.assert_allclose(mapped.rho, ss.rho, rtol=1e-12)
    np.testing.assert_allclose(mapped.T, ss.T, rtol=1e-12)


def test_material_to_spatial_outside_image():
    mmodel, ms = tube(16, "material")
    from thermovar.stencils import Grid

    with pytest.raises(ShapeError):
        S.material_to_spatial(mmodel, ms, Grid.uniform(16, 1.5))


def test_reversible_specific_entropy():
    phen = dict(mu=0.0, zeta=0.0, kappa_th=0.0)
    model, state = tube(32, "spatial", phen=phen)
    # isentropic start: eta uniform, transported exactly
    assert specific_entropy_rate(model, state) < 1e-13
    _, traj, _ = run_tube(32, "material", phen=phen, initial="density", t_end=0.02)
    assert max(float(np.max(np.abs(s.Sigma))) for s in traj) == 0.0


def test_conduction_mode_decays():
    phen = dict(mu=0.0, zeta=0.0, kappa_th=0.05)
    model, traj, _ = run_tube(32, "spatial", phen=phen, initial="thermal", pin_velocity=True, t_end=0.2)
    assert np.all(traj[-1].v == 0)
    amp0 = np.ptp(traj[0].T)
    amp = np.ptp(traj[-1].T)
    assert amp == pytest.approx(amp0 * np.exp(-0.05 * np.pi ** 2 / 2.5 * 0.2), rel=1e-2)


def test_errors():
    model, state = tube(8, "spatial")
    with pytest.raises(ModelError):
        S.Phenomenology(kappa_th=-1.0)
    with pytest.raises(StateError):
        S.check_state(model, S.SpatialState(v=np.ones(9), rho=state.rho, T=state.T, gamma=state.gamma,
                                            sigma=state.sigma))
    bad = S.SpatialState(v=state.v, rho=state.rho, T=-state.T, gamma=state.gamma, sigma=state.sigma)
    with pytest.raises(StateError) as err:
        S.check_state(model, bad)
    assert err.value.node == 0
    with pytest.raises(ValueError):
        S.rhs(model, state, form="pressure")


def test_abort_context():
    model, state = tube(16, "spatial")
    v = np.zeros(17)
    v[5:12] = -30.0
    bad = S.SpatialState(v=v, rho=state.rho, T=state.T, gamma=state.gamma, sigma=state.sigma)
    with pytest.raises(SimulationError) as err:
        S.simulate(model, bad, 0.01, 50, cfl=100.0)
    assert "scenario=gas_tube_spatial" in str(err.value)


def test_material_to_spatial_uniform_compression():
    from thermovar import nsf_material as M
    from thermovar.stencils import Grid

    mmodel, ms = tube(16, "material", amplitude=0.0)
    X = mmodel.grid.nodes
    squeezed = M.MaterialState(phi=X / 2, V=ms.V, Ttemp=ms.Ttemp, Gamma=ms.Gamma, Sigma=ms.Sigma)
    mapped = S.material_to_spatial(mmodel, squeezed, Grid.uniform(8, 0.5))
    np.testing.assert_allclose(mapped.rho, 2 * mmodel.rho_ref[:9], rtol=1e-12)
