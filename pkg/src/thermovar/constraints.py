"""
Variational and phenomenological constraints.

For every model type the two constraints share one linear form. Writing
``Gdot`` for the rate of the thermal displacement, the free-energy flavour
reads, per subsystem or node::

    variational:        Gdot dSigma = -<F_fr, dq> + sum_B kappa_AB (dGamma_B - dGamma_A)
    phenomenological:   Gdot Sigma_dot = -<F_fr, q_dot> + sum_B kappa_AB (Gdot_B - Gdot_A) + P_ext

and the continuum versions replace the right-hand sides by
``P_fr D(dphi) - J_S D(dGamma)`` (material) or
``sigma_fr D(zeta) - j_s D(D_delta gamma)`` (spatial). Substituting the rates
for the variations maps one constraint onto the other exactly when no heat
is supplied; :func:`thermodynamic_type_check` evaluates that identity.

Residuals are LHS minus RHS. The discrete entropy flavour multiplies
``dSigma`` by ``dL/dS = -T`` and flips the right-hand side accordingly.
"""

from dataclasses import dataclass

import numpy as np

from . import discrete, nsf_material, nsf_spatial
from .errors import PreconditionError, ShapeError
from .stencils import first_derivative


@dataclass(frozen=True)
class VariationTriple:
    """Variations ``(dq, dGamma, dSigma)``; ``dq`` is ``zeta`` for spatial states."""

    dq: np.ndarray
    dGamma: np.ndarray
    dSigma: np.ndarray

    def __post_init__(self):
        for name in ("dq", "dGamma", "dSigma"):
            object.__setattr__(self, name, np.atleast_1d(np.asarray(getattr(self, name), dtype=float)))

    def __add__(self, other):
        return VariationTriple(self.dq + other.dq, self.dGamma + other.dGamma, self.dSigma + other.dSigma)

    def scaled(self, c):
        return VariationTriple(c * self.dq, c * self.dGamma, c * self.dSigma)


@dataclass(frozen=True)
class ConstraintResidual:
    value: np.ndarray
    max_abs: float

    @classmethod
    def of(cls, value):
        value = np.atleast_1d(np.asarray(value, dtype=float))
        return cls(value=value, max_abs=float(np.max(np.abs(value))) if value.size else 0.0)


def _kind(model):
    if isinstance(model, discrete.DiscreteModel):
        return "discrete"
    if isinstance(model, nsf_material.MaterialModel):
        return "material"
    if isinstance(model, nsf_spatial.SpatialModel):
        return "spatial"
    raise TypeError(f"unsupported model type {type(model).__name__}")


def _check_shapes(model, state, var):
    kind = _kind(model)
    if kind == "discrete":
        shapes = {"dq": (model.n,), "dGamma": (model.N,), "dSigma": (model.N,)}
    else:
        n = model.grid.n_nodes
        shapes = {"dq": (n,), "dGamma": (n,), "dSigma": (n,)}
    for name, shape in shapes.items():
        got = getattr(var, name).shape
        if got != shape:
            raise ShapeError(f"{name} has shape {got}, expected {shape}")
    if kind != "discrete" and (var.dq[0] != 0.0 or var.dq[-1] != 0.0):
        raise PreconditionError("mechanical variations must vanish on the boundary")


def _discrete_flavour(state, form):
    form = state.form if form is None else form
    if form not in discrete.FORMS:
        raise ValueError(f"unknown formulation {form!r}")
    return form


# shared linear forms; `supply` is zero for the variational constraint

def _discrete_form(model, state, dq, dG, dS, supply, form):
    T = discrete.current_temperatures(model, state)
    Ffr = model.friction_forces(state.q, state.v, T)
    work = Ffr @ dq if model.n else np.zeros(model.N)
    exch = model.exchange(dG)
    if form == discrete.FREE_ENERGY:
        return T * dS - (-work + exch + supply)
    return -T * dS - (work - exch - supply)


def _material_form(model, state, dphi, dG, dS, supply, k):
    h = model.grid.h
    return state.Ttemp * dS - (k["P_fr"] * first_derivative(dphi, h) - k["J_S"] * first_derivative(dG, h) + supply)


def _spatial_form(model, state, zeta, dgamma, dsigma, supply, k, Dt_gamma):
    h = model.grid.h
    Dgamma = first_derivative(state.gamma, h)
    D_delta_gamma = dgamma + zeta * Dgamma
    Dbar_delta_sigma = dsigma + first_derivative(state.sigma * zeta, h)
    return Dt_gamma * Dbar_delta_sigma - (
        k["sigma_fr"] * first_derivative(zeta, h) - k["j_s"] * first_derivative(D_delta_gamma, h) + supply)


def _spatial_Dt_gamma(model, state, rates):
    if rates is None:
        return state.T.copy()
    return rates.dgamma + state.v * first_derivative(state.gamma, model.grid.h)


def _spatial_terms(model, state):
    return nsf_spatial._common(model, state.t, state.v, state.rho, state.T)


def variational_residual(model, state, var, form=None, rates=None):
    """LHS minus RHS of the variational constraint, per subsystem or node.

    ``form`` selects the discrete flavour (defaults to the state's own
    formulation). For spatial states the factor ``D_t gamma`` is taken from
    ``rates`` when given, otherwise it equals ``T``.
    """
    _check_shapes(model, state, var)
    kind = _kind(model)
    if kind == "discrete":
        f = _discrete_flavour(state, form)
        return ConstraintResidual.of(_discrete_form(model, state, var.dq, var.dGamma, var.dSigma, 0.0, f))
    if kind == "material":
        k = nsf_material.terms(model, state)
        return ConstraintResidual.of(_material_form(model, state, var.dq, var.dGamma, var.dSigma, 0.0, k))
    k = _spatial_terms(model, state)
    Dt_gamma = _spatial_Dt_gamma(model, state, rates)
    return ConstraintResidual.of(_spatial_form(model, state, var.dq, var.dGamma, var.dSigma, 0.0, k, Dt_gamma))


def _rates(model, state, rates):
    if rates is not None:
        return rates
    kind = _kind(model)
    if kind == "discrete":
        return discrete.rhs(model, state)
    if kind == "material":
        return nsf_material.rhs(model, state)
    return nsf_spatial.rhs_temperature_form(model, state)


def rate_variation(model, state, rates=None):
    """The variation obtained by substituting rates: ``(q_dot, Gamma_dot, Sigma_dot)``."""
    r = _rates(model, state, rates)
    kind = _kind(model)
    if kind == "discrete":
        return VariationTriple(r.dq, r.dGamma, r.dSigma)
    if kind == "material":
        return VariationTriple(r.dphi, r.dGamma, r.dSigma)
    return VariationTriple(state.v, r.dgamma, r.dsigma)


def phenomenological_residual(model, state, rates=None, form=None):
    """LHS minus RHS of the phenomenological constraint.

    ``rates`` defaults to the solver's own right-hand side; pass externally
    estimated rates (for instance finite differences along a trajectory) to
    measure how well a trajectory satisfies the constraint.
    """
    r = _rates(model, state, rates)
    kind = _kind(model)
    if kind == "discrete":
        f = _discrete_flavour(state, form)
        return ConstraintResidual.of(
            _discrete_form(model, state, r.dq, r.dGamma, r.dSigma, model.p_ext(state.t), f))
    if kind == "material":
        k = nsf_material.terms(model, state)
        return ConstraintResidual.of(
            _material_form(model, state, r.dphi, r.dGamma, r.dSigma, model.rho_ref * k["R"], k))
    k = _spatial_terms(model, state)
    Dt_gamma = _spatial_Dt_gamma(model, state, r)
    return ConstraintResidual.of(
        _spatial_form(model, state, state.v, r.dgamma, r.dsigma, state.rho * k["r"], k, Dt_gamma))


def thermodynamic_type_check(model, state, form=None):
    """Variational residual at ``delta := rate`` minus the phenomenological residual.

    Defined for isolated systems only; raises :class:`PreconditionError`
    when heat is supplied.
    """
    kind = _kind(model)
    isolated = model.is_isolated(state.t)
    if not isolated:
        raise PreconditionError("the thermodynamic-type identity requires zero external heat supply")
    r = _rates(model, state, None)
    var = rate_variation(model, state, r)
    if kind == "discrete":
        a = variational_residual(model, state, var, form=form)
        b = phenomenological_residual(model, state, r, form=form)
    else:
        a = variational_residual(model, state, var, rates=r)
        b = phenomenological_residual(model, state, r)
    return ConstraintResidual.of(a.value - b.value)


def solve_variation_sigma(model, state, dq, dGamma, form=None, rates=None):
    """The ``dSigma`` that puts ``(dq, dGamma, dSigma)`` in the variational constraint set."""
    kind = _kind(model)
    dq = np.atleast_1d(np.asarray(dq, dtype=float))
    dGamma = np.atleast_1d(np.asarray(dGamma, dtype=float))
    zero = VariationTriple(dq, dGamma, np.zeros_like(dGamma))
    # the residual is affine in dSigma with slope given by the LHS factor
    r0 = variational_residual(model, state, zero, form=form, rates=rates).value
    if kind == "discrete":
        T = discrete.current_temperatures(model, state)
        slope = T if _discrete_flavour(state, form) == discrete.FREE_ENERGY else -T
    elif kind == "material":
        slope = state.Ttemp
    else:
        slope = _spatial_Dt_gamma(model, state, rates)
    return -r0 / slope
