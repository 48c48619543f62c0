"""
1D Navier-Stokes-Fourier equations in spatial (Eulerian) form.

The primary unknowns are ``(v, rho, T)``; ``gamma`` and ``sigma`` are carried
as diagnostics (``D_t gamma = T`` and the phenomenological constraint solved
for ``sigma``) and never feed back. In the temperature formulation::

    d_t rho = -D(rho v)
    rho (d_t v + v Dv) = -Dp + D sigma_fr,          sigma_fr = mu_t Dv
    rho Cv (D_t T + rho cs2 Gamma Dv) = sigma_fr Dv - D(T j_s) + rho r
    T (d_t sigma + D(sigma v)) = sigma_fr Dv - j_s DT + rho r

with ``T j_s = -kappa DT`` (zero at the walls) and ``v = 0`` at the walls.
The entropy formulation evolves ``s`` instead of ``T``::

    d_t s = -D(s v) - D j_s + (sigma_fr Dv - j_s DT + rho r)/T

and is used to cross-validate the temperature formulation.
"""

import warnings
from dataclasses import dataclass, replace
from typing import Callable, Optional

import numpy as np
from scipy.interpolate import CubicSpline, PchipInterpolator

from .eos import StateEquation
from .errors import (
    CFLWarning,
    ModelError,
    ShapeError,
    SimulationError,
    StateError,
    ThermodynamicStabilityError,
    ThermoError,
)
from .integrate import rk4_step
from .stencils import Grid, first_derivative

SpatialGrid = Grid

TEMPERATURE = "temperature"
ENTROPY = "entropy"
DEFAULT_CFL = 0.25


@dataclass(frozen=True, eq=False)
class Phenomenology:
    """Newtonian viscosity, Fourier conduction and heat supply ``r(t, x)``."""

    mu: float = 0.0
    zeta: float = 0.0
    kappa_th: float = 0.0
    r_supply: Optional[Callable] = None

    def __post_init__(self):
        for name in ("mu", "zeta", "kappa_th"):
            if not getattr(self, name) >= 0:
                raise ModelError(f"{name} must be non-negative, got {getattr(self, name)}")

    @property
    def mu_tilde(self):
        """1D viscosity 4/3 mu + zeta."""
        return 4.0 / 3.0 * self.mu + self.zeta


@dataclass(frozen=True, eq=False)
class SpatialModel:
    grid: Grid
    eos: StateEquation
    phen: Phenomenology = Phenomenology()
    pin_velocity: bool = False

    def supply(self, t):
        if self.phen.r_supply is None:
            return np.zeros(self.grid.n_nodes)
        return np.broadcast_to(np.asarray(self.phen.r_supply(t, self.grid.nodes), dtype=float), (self.grid.n_nodes,))

    def is_isolated(self, t=0.0):
        return self.phen.r_supply is None or not np.any(self.supply(t))


@dataclass(frozen=True)
class SpatialState:
    """Eulerian fields on the spatial grid."""

    v: np.ndarray
    rho: np.ndarray
    T: np.ndarray
    gamma: np.ndarray
    sigma: np.ndarray
    t: float = 0.0

    def __post_init__(self):
        n = None
        for name in ("v", "rho", "T", "gamma", "sigma"):
            a = np.array(getattr(self, name), dtype=float)
            if a.ndim != 1 or (n is not None and a.size != n):
                raise ShapeError(f"field {name} has shape {a.shape}, expected ({n},)")
            n = a.size
            a.setflags(write=False)
            object.__setattr__(self, name, a)

    @property
    def n_nodes(self):
        return self.v.size


@dataclass(frozen=True)
class SpatialRates:
    """Partial time derivatives; ``dtheta`` is d_t T or d_t s depending on ``form``."""

    dv: np.ndarray
    drho: np.ndarray
    dtheta: np.ndarray
    dgamma: np.ndarray
    dsigma: np.ndarray
    form: str


def viscous_stress(phen, grid, v):
    """sigma_fr = (4/3 mu + zeta) dv/dx."""
    return phen.mu_tilde * first_derivative(v, grid.h)


def entropy_flux(phen, grid, T):
    """j_s = -kappa (dT/dx)/T, zero at the walls."""
    js = -phen.kappa_th * first_derivative(T, grid.h) / np.asarray(T, dtype=float)
    js[0] = js[-1] = 0.0
    return js


def initial_state(model, v=None, rho=None, T=None, t=0.0):
    n = model.grid.n_nodes
    z = np.zeros(n)
    return SpatialState(
        v=z if v is None else v,
        rho=np.full(n, model.eos.rho0) if rho is None else rho,
        T=np.full(n, model.eos.T0) if T is None else T,
        gamma=z,
        sigma=z,
        t=t,
    )


def _first_bad(mask, values, what):
    bad = np.flatnonzero(~mask)
    if bad.size:
        err = StateError(f"{what} {values[bad[0]]:.3g} <= 0 at node {bad[0]}")
        err.node = int(bad[0])
        raise err


def check_state(model, state):
    if state.n_nodes != model.grid.n_nodes:
        raise ShapeError(f"state has {state.n_nodes} nodes, grid has {model.grid.n_nodes}")
    _first_bad(state.rho > 0, state.rho, "density")
    _first_bad(state.T > 0, state.T, "temperature")
    if state.v[0] != 0.0 or state.v[-1] != 0.0:
        raise StateError("wall velocity must vanish")


def _common(model, t, v, rho, T):
    h = model.grid.h
    phen = model.phen
    _first_bad(rho > 0, rho, "density")
    _first_bad(T > 0, T, "temperature")
    p = np.asarray(model.eos.pressure(rho, T))
    Dv = first_derivative(v, h)
    DT = first_derivative(T, h)
    sfr = phen.mu_tilde * Dv
    Tjs = -phen.kappa_th * DT
    Tjs[0] = Tjs[-1] = 0.0
    js = Tjs / T
    r = model.supply(t)
    drho = -first_derivative(rho * v, h)
    dv = -v * Dv + (-first_derivative(p, h) + first_derivative(sfr, h)) / rho
    if model.pin_velocity:
        dv[:] = 0.0
    dv[0] = dv[-1] = 0.0
    heat = sfr * Dv - js * DT + rho * r
    return {"p": p, "Dv": Dv, "DT": DT, "sigma_fr": sfr, "Tj_s": Tjs, "j_s": js, "r": r,
            "drho": drho, "dv": dv, "heat": heat}


def _diagnostic_rates(model, k, v, T, gamma, sigma):
    h = model.grid.h
    dgamma = T - v * first_derivative(gamma, h)
    dsigma = -first_derivative(sigma * v, h) + k["heat"] / T
    return dgamma, dsigma


def terms_temperature_form(model, state):
    """Intermediate quantities of the temperature formulation (dict of arrays)."""
    v, rho, T = state.v, state.rho, state.T
    k = _common(model, state.t, v, rho, T)
    co = model.eos.coefficients(rho, T)
    cv = np.asarray(co.cv_coeff)
    if not np.all(cv > 0):
        raise ThermodynamicStabilityError("non-positive specific heat")
    k["cv"], k["cs2"], k["gamma_ad"] = cv, np.asarray(co.cs2), np.asarray(co.gamma_ad)
    k["dT"] = -v * k["DT"] - rho * k["cs2"] * k["gamma_ad"] * k["Dv"] + (
        k["sigma_fr"] * k["Dv"] - first_derivative(k["Tj_s"], model.grid.h) + rho * k["r"]) / (rho * cv)
    k["dgamma"], k["dsigma"] = _diagnostic_rates(model, k, v, T, state.gamma, state.sigma)
    return k


def rhs_temperature_form(model, state):
    k = terms_temperature_form(model, state)
    return SpatialRates(dv=k["dv"], drho=k["drho"], dtheta=k["dT"], dgamma=k["dgamma"],
                        dsigma=k["dsigma"], form=TEMPERATURE)


def _entropy_terms(model, t, v, rho, s, gamma, sigma):
    T = np.asarray(model.eos.temperature_from_s(rho, s))
    k = _common(model, t, v, rho, T)
    h = model.grid.h
    k["T"] = T
    k["ds"] = -first_derivative(s * v, h) - first_derivative(k["j_s"], h) + k["heat"] / T
    k["dgamma"], k["dsigma"] = _diagnostic_rates(model, k, v, T, gamma, sigma)
    return k


def entropy_density(model, state):
    return np.asarray(model.eos.entropy_from_T(state.rho, state.T))


def rhs_entropy_form(model, state, s=None):
    """Rates with ``dtheta = d_t s``. ``s`` defaults to s(rho, T) of the state."""
    s = entropy_density(model, state) if s is None else np.asarray(s, dtype=float)
    k = _entropy_terms(model, state.t, state.v, state.rho, s, state.gamma, state.sigma)
    return SpatialRates(dv=k["dv"], drho=k["drho"], dtheta=k["ds"], dgamma=k["dgamma"],
                        dsigma=k["dsigma"], form=ENTROPY)


def rhs(model, state, form=TEMPERATURE):
    if form == TEMPERATURE:
        return rhs_temperature_form(model, state)
    if form == ENTROPY:
        return rhs_entropy_form(model, state)
    raise ValueError(f"unknown formulation {form!r}")


def heat_equation_rewrite_residual(model, state):
    """Gap between the two temperature rates implied by the heat equation.

    The coefficient form ``rho Cv (D_t T + rho cs2 Gamma Dv) = Q`` is compared
    with the rate obtained from the entropy balance
    ``T (d_t s + D(s v)) = Q`` by the chain rule ``s = s(rho, T)``. Both use
    the same nodal derivatives, with ``D(s v)`` and ``D(rho v)`` expanded by
    the product rule, so the result is an algebraic identity of the equation
    of state. Returns ``max |dT_a - dT_b| / max |dT_a|``.
    """
    v, rho, T = state.v, state.rho, state.T
    eos = model.eos
    h = model.grid.h
    k = terms_temperature_form(model, state)
    Q = k["sigma_fr"] * k["Dv"] - first_derivative(k["Tj_s"], h) + rho * k["r"]
    dT_a = -v * k["DT"] - rho * k["cs2"] * k["gamma_ad"] * k["Dv"] + Q / (rho * k["cv"])
    s = np.asarray(eos.entropy_from_T(rho, T))
    s_T = np.asarray(eos.entropy_dT(rho, T))
    s_rho = np.asarray(eos.entropy_drho(rho, T))
    Drho = first_derivative(rho, h)
    Ds = s_rho * Drho + s_T * k["DT"]
    ds = -(v * Ds + s * k["Dv"]) + Q / T
    drho = -(v * Drho + rho * k["Dv"])
    dT_b = (ds - s_rho * drho) / s_T
    scale = max(float(np.max(np.abs(dT_a))), np.finfo(float).tiny)
    return float(np.max(np.abs(dT_a - dT_b)) / scale)


def unreduced_momentum_gap(model, state):
    """Compare Dp with its unreduced form rho D(dpsi/drho) + s DT.

    The two agree in the continuum; on the grid they differ at the stencil's
    truncation order. Returns ``max |gap| / max |Dp|`` over interior nodes.
    """
    from .eos import free_energy_drho

    h = model.grid.h
    rho, T = state.rho, state.T
    s = np.asarray(model.eos.entropy_from_T(rho, T))
    Dp = first_derivative(np.asarray(model.eos.pressure(rho, T)), h)
    alt = rho * first_derivative(np.asarray(free_energy_drho(model.eos, rho, T)), h) + s * first_derivative(T, h)
    gap = np.abs(Dp - alt)[1:-1]
    return float(np.max(gap) / max(float(np.max(np.abs(Dp))), np.finfo(float).tiny))


def max_stable_dt(model, state, cfl=DEFAULT_CFL):
    """Explicit time-step bound from advection, conduction and viscosity."""
    h = model.grid.h
    rho, T = state.rho, state.T
    cs = np.asarray(model.eos.sound_speed(rho, T))
    bounds = [np.min(h / (np.abs(state.v) + cs))]
    if model.phen.kappa_th > 0:
        cv = np.asarray(model.eos.coefficients(rho, T).cv_coeff)
        bounds.append(np.min(rho * cv * h ** 2 / (2 * model.phen.kappa_th)))
    if model.phen.mu_tilde > 0:
        bounds.append(np.min(rho * h ** 2 / (2 * model.phen.mu_tilde)))
    return cfl * float(min(bounds))


def _f_temperature(model):
    def f(t, y):
        st = SpatialState(v=y[0], rho=y[1], T=y[2], gamma=y[3], sigma=y[4], t=t)
        r = rhs_temperature_form(model, st)
        return np.stack([r.dv, r.drho, r.dtheta, r.dgamma, r.dsigma])

    return f


def _f_entropy(model):
    def f(t, y):
        k = _entropy_terms(model, t, y[0], y[1], y[2], y[3], y[4])
        return np.stack([k["dv"], k["drho"], k["ds"], k["dgamma"], k["dsigma"]])

    return f


def step(model, state, dt, form=TEMPERATURE, cfl=DEFAULT_CFL):
    """One RK4 step in the chosen formulation; the returned state carries T."""
    if dt == 0:
        return state
    if not dt > 0:
        raise ValueError(f"dt must be non-negative, got {dt}")
    bound = max_stable_dt(model, state, cfl)
    if dt > bound * (1 + 1e-12):
        warnings.warn(f"dt={dt:.3g} exceeds the stability bound {bound:.3g}", CFLWarning, stacklevel=2)
    if form == TEMPERATURE:
        y = np.stack([state.v, state.rho, state.T, state.gamma, state.sigma])
        y = rk4_step(_f_temperature(model), state.t, y, dt)
        T = y[2]
    elif form == ENTROPY:
        y = np.stack([state.v, state.rho, entropy_density(model, state), state.gamma, state.sigma])
        y = rk4_step(_f_entropy(model), state.t, y, dt)
        _first_bad(y[1] > 0, y[1], "density")
        T = np.asarray(model.eos.temperature_from_s(y[1], y[2]))
    else:
        raise ValueError(f"unknown formulation {form!r}")
    new = SpatialState(v=y[0], rho=y[1], T=T, gamma=y[3], sigma=y[4], t=state.t + dt)
    check_state(model, new)
    return new


def simulate(model, state0, dt, steps, form=TEMPERATURE, every=1, scenario="gas_tube_spatial", cfl=DEFAULT_CFL):
    """Trajectory of ``steps`` RK4 steps, keeping every ``every``-th state."""
    check_state(model, state0)
    traj = [state0]
    state = state0
    t0 = state0.t
    for k in range(int(steps)):
        try:
            state = step(model, state, dt, form=form, cfl=cfl)
            state = replace(state, t=t0 + (k + 1) * dt)
        except ThermoError as exc:
            raise SimulationError(exc, step=k + 1, scenario=scenario, node=getattr(exc, "node", None)) from exc
        if (k + 1) % every == 0 or k + 1 == steps:
            traj.append(state)
    return traj


def material_to_spatial(mmodel, mstate, sgrid):
    """Spatial fields of a material state on ``sgrid``.

    The inverse motion ``X = phi^-1(x)`` is built with a monotone cubic
    (PCHIP through the points ``(phi_i, X_i)``), so it is itself strictly
    increasing. The material fields are then evaluated at ``X`` with cubic
    splines on the reference grid. Densities pick up the factor ``1/J``.
    """
    from .nsf_material import deformation_jacobian

    J = deformation_jacobian(mmodel.grid, mstate.phi)
    x = sgrid.nodes
    lo, hi = mstate.phi[0], mstate.phi[-1]
    tol = 1e-12 * max(abs(lo), abs(hi), 1.0)
    if x[0] < lo - tol or x[-1] > hi + tol:
        raise ShapeError(f"spatial grid [{x[0]}, {x[-1]}] is not inside the image [{lo}, {hi}]")
    X_nodes = mmodel.grid.nodes
    X = PchipInterpolator(mstate.phi, X_nodes)(np.clip(x, lo, hi))
    X = np.clip(X, X_nodes[0], X_nodes[-1])

    def pull(f):
        return CubicSpline(X_nodes, f)(X)

    v = pull(mstate.V)
    for end in (0, -1):
        if abs(x[end] - mstate.phi[end]) <= tol and mstate.V[end] == 0.0:
            v[end] = 0.0
    return SpatialState(
        v=v,
        rho=pull(mmodel.rho_ref / J),
        T=pull(mstate.Ttemp),
        gamma=pull(mstate.Gamma),
        sigma=pull(mstate.Sigma / J),
        t=mstate.t,
    )


def entropy_production(model, state):
    """Pointwise (sigma_fr Dv - j_s DT)/T, non-negative for dissipative coefficients."""
    k = _common(model, state.t, state.v, state.rho, state.T)
    return (k["sigma_fr"] * k["Dv"] - k["j_s"] * k["DT"]) / state.T


def total_energy(model, state):
    e = 0.5 * state.rho * state.v ** 2 + np.asarray(model.eos.internal_energy_T(state.rho, state.T))
    return float(model.grid.weights @ e)


def total_entropy(model, state):
    return float(model.grid.weights @ entropy_density(model, state))


def total_mass(model, state):
    return float(model.grid.weights @ state.rho)


def diagnostics(model, state):
    """Mass, energy, entropy, min production and constraint residuals."""
    from .constraints import phenomenological_residual, rate_variation, variational_residual

    r = rhs_temperature_form(model, state)
    return {
        "mass": total_mass(model, state),
        "energy": total_energy(model, state),
        "entropy": total_entropy(model, state),
        "prod_min": float(np.min(entropy_production(model, state))),
        "cv_residual_max": variational_residual(model, state, rate_variation(model, state, r)).max_abs,
        "ck_residual_max": phenomenological_residual(model, state, r).max_abs,
    }
