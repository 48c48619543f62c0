import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from thermovar import constraints as C
from thermovar import discrete as D
from thermovar.discrete_models import make_adiabatic_piston, make_two_cells
from thermovar.errors import PreconditionError, ShapeError
from thermovar.harness.checks import tube


def _cases(gas):
    cases = [make_two_cells(), make_adiabatic_piston(gas, kappa=0.3, velocity=0.2)]
    for solver in ("material", "spatial"):
        model, state = tube(16, solver)
        cases.append((model, state))
    return cases


def test_zero_variation(gas):
    for model, state in _cases(gas):
        n = model.n if isinstance(model, D.DiscreteModel) else model.grid.n_nodes
        N = model.N if isinstance(model, D.DiscreteModel) else n
        var = C.VariationTriple(np.zeros(n), np.zeros(N), np.zeros(N))
        assert C.variational_residual(model, state, var).max_abs == 0.0


def test_uniform_gamma_two_cells():
    model, state = make_two_cells()
    var = C.VariationTriple(np.zeros(0), np.array([0.7, 0.7]), np.zeros(2))
    assert C.variational_residual(model, state, var).max_abs == 0.0
    var = C.VariationTriple(np.zeros(0), np.array([0.7, 0.7]), np.array([1.0, 0.0]))
    np.testing.assert_allclose(C.variational_residual(model, state, var).value, [300.0, 0.0])


@given(seed=st.integers(0, 10_000))
@settings(max_examples=25, deadline=None)
def test_solved_sigma_is_member(seed):
    from thermovar.eos import GasEos

    gas = GasEos(2.5, 3.5, 1.0, 1.0)
    rng = np.random.default_rng(seed)
    model, state = make_adiabatic_piston(gas, kappa=0.4, velocity=0.5)
    dq, dG = rng.normal(size=1), rng.normal(size=2)
    for form in D.FORMS:
        st_ = D.to_entropy_form(model, state) if form == D.ENTROPY else state
        dS = C.solve_variation_sigma(model, st_, dq, dG)
        assert C.variational_residual(model, st_, C.VariationTriple(dq, dG, dS)).max_abs <= 1e-14


def test_phenomenological_along_rhs(gas):
    for model, state in _cases(gas):
        assert C.phenomenological_residual(model, state).max_abs <= 1e-12


def test_thermodynamic_type_identity(gas):
    for model, state in _cases(gas):
        assert C.thermodynamic_type_check(model, state).max_abs <= 1e-13


def test_reversible_sigma_rate_vanishes(gas):
    model, state = tube(16, "material", phen=dict(mu=0.0, zeta=0.0, kappa_th=0.0))
    r = __import__("thermovar.nsf_material", fromlist=["rhs"]).rhs(model, state)
    assert np.max(np.abs(r.dSigma)) == 0.0


def test_supply_breaks_precondition():
    model, state = make_two_cells(heat_supply=(1.0, 0.0))
    with pytest.raises(PreconditionError):
        C.thermodynamic_type_check(model, state)


def test_shape_errors(gas):
    model, state = make_two_cells()
    with pytest.raises(ShapeError):
        C.variational_residual(model, state, C.VariationTriple(np.zeros(0), np.zeros(3), np.zeros(2)))
    mmodel, mstate = tube(8, "material")
    dq = np.ones(9)
    with pytest.raises(PreconditionError):
        C.variational_residual(mmodel, mstate, C.VariationTriple(dq, np.zeros(9), np.zeros(9)))


def test_unsupported_model():
    with pytest.raises(TypeError):
        C.variational_residual(object(), None, C.VariationTriple([0.0], [0.0], [0.0]))
