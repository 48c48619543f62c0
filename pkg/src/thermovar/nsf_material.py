"""
1D Navier-Stokes-Fourier equations in material (Lagrangian-coordinate) form.

The fields ``phi`` (particle position), ``V`` (material velocity), ``Ttemp``
(material temperature), ``Gamma`` (thermal displacement) and ``Sigma`` live
on a fixed reference grid. With ``J = d phi/dX``, ``rho = rho_ref/J`` and
``mu_t = 4/3 mu + zeta`` the semi-discrete system is::

    rho_ref dV/dt = D(-p + mu_t DV/J)
    S = J s(rho, Ttemp),  dS/dt = dSigma/dt - D J_S,  J_S = -kappa D(Ttemp)/(J Ttemp)
    Ttemp dSigma/dt = mu_t (DV)^2/J - J_S D(Ttemp) + rho_ref R
    dGamma/dt = Ttemp,  dphi/dt = V

with ``V = 0`` and ``J_S = 0`` at both ends. ``D`` is the summation-by-parts
operator of :mod:`thermovar.stencils`, so the discrete energy is conserved and
the discrete entropy cannot decrease (for ``R = 0``) up to time-integration
error.
"""

import warnings
from dataclasses import dataclass, replace
from typing import Callable, Optional

import numpy as np

from .eos import StateEquation
from .errors import (
    CFLWarning,
    MeshTanglingError,
    ModelError,
    ShapeError,
    SimulationError,
    StateError,
    ThermodynamicStabilityError,
    ThermoError,
)
from .integrate import rk4_step
from .stencils import Grid, first_derivative

MaterialGrid = Grid

DEFAULT_CFL = 0.25


@dataclass(frozen=True, eq=False)
class MaterialModel:
    """Reference density, equation of state and phenomenology.

    ``R_supply`` is a callable ``(t, X) -> array`` giving the heat supply per
    unit mass; ``pin_velocity`` freezes the gas at rest (pure conduction).
    """

    grid: Grid
    rho_ref: np.ndarray
    eos: StateEquation
    mu: float = 0.0
    zeta: float = 0.0
    kappa_th: float = 0.0
    R_supply: Optional[Callable] = None
    pin_velocity: bool = False

    def __post_init__(self):
        rho_ref = np.broadcast_to(np.asarray(self.rho_ref, dtype=float), (self.grid.n_nodes,)).copy()
        if not np.all(rho_ref > 0):
            raise ModelError("reference density must be positive")
        rho_ref.setflags(write=False)
        object.__setattr__(self, "rho_ref", rho_ref)
        for name in ("mu", "zeta", "kappa_th"):
            if not getattr(self, name) >= 0:
                raise ModelError(f"{name} must be non-negative, got {getattr(self, name)}")

    @property
    def mu_tilde(self):
        return 4.0 / 3.0 * self.mu + self.zeta

    def supply(self, t):
        if self.R_supply is None:
            return np.zeros(self.grid.n_nodes)
        return np.broadcast_to(np.asarray(self.R_supply(t, self.grid.nodes), dtype=float), (self.grid.n_nodes,))

    def is_isolated(self, t=0.0):
        return self.R_supply is None or not np.any(self.supply(t))


@dataclass(frozen=True)
class MaterialState:
    """Material fields on the reference grid."""

    phi: np.ndarray
    V: np.ndarray
    Ttemp: np.ndarray
    Gamma: np.ndarray
    Sigma: np.ndarray
    t: float = 0.0

    def __post_init__(self):
        n = None
        for name in ("phi", "V", "Ttemp", "Gamma", "Sigma"):
            a = np.array(getattr(self, name), dtype=float)
            if a.ndim != 1 or (n is not None and a.size != n):
                raise ShapeError(f"field {name} has shape {a.shape}, expected ({n},)")
            n = a.size
            a.setflags(write=False)
            object.__setattr__(self, name, a)

    @property
    def n_nodes(self):
        return self.phi.size


@dataclass(frozen=True)
class MaterialRates:
    dphi: np.ndarray
    dV: np.ndarray
    dTtemp: np.ndarray
    dGamma: np.ndarray
    dSigma: np.ndarray


def deformation_jacobian(grid, phi):
    """J = d phi/dX on the nodes; raises :class:`MeshTanglingError` if J <= 0."""
    J = first_derivative(phi, grid.h)
    bad = np.flatnonzero(~(J > 0))
    if bad.size:
        err = MeshTanglingError(f"deformation Jacobian {J[bad[0]]:.3g} <= 0 at node {bad[0]}")
        err.node = int(bad[0])
        raise err
    return J


def initial_state(model, phi=None, V=None, Ttemp=None, t=0.0):
    n = model.grid.n_nodes
    z = np.zeros(n)
    return MaterialState(
        phi=model.grid.nodes if phi is None else phi,
        V=z if V is None else V,
        Ttemp=np.full(n, model.eos.T0) if Ttemp is None else Ttemp,
        Gamma=z,
        Sigma=z,
        t=t,
    )


def check_state(model, state):
    """Validate the state's invariants, raising on the first violation."""
    if state.n_nodes != model.grid.n_nodes:
        raise ShapeError(f"state has {state.n_nodes} nodes, grid has {model.grid.n_nodes}")
    deformation_jacobian(model.grid, state.phi)
    bad = np.flatnonzero(~(state.Ttemp > 0))
    if bad.size:
        err = StateError(f"temperature {state.Ttemp[bad[0]]:.3g} <= 0 at node {bad[0]}")
        err.node = int(bad[0])
        raise err
    L = model.grid.length
    if abs(state.phi[0]) > 1e-12 * L or abs(state.phi[-1] - L) > 1e-12 * L:
        raise StateError("boundary particles moved")
    if state.V[0] != 0.0 or state.V[-1] != 0.0:
        raise StateError("boundary velocity must vanish")


def _fields(model, state):
    J = deformation_jacobian(model.grid, state.phi)
    rho = model.rho_ref / J
    return J, rho


def stress_total(model, state):
    """Total first Piola-Kirchhoff stress -p + mu_t (dV/dX)/J per node."""
    J, rho = _fields(model, state)
    p = np.asarray(model.eos.pressure(rho, state.Ttemp))
    DV = first_derivative(state.V, model.grid.h)
    return -p + model.mu_tilde * DV / J


def entropy_flux_material(model, state):
    """J_S = -kappa (dT/dX)/(J T), zero at the boundary nodes."""
    J, _ = _fields(model, state)
    DT = first_derivative(state.Ttemp, model.grid.h)
    JS = -model.kappa_th * DT / (J * state.Ttemp)
    JS[0] = JS[-1] = 0.0
    return JS


def terms(model, state):
    """All intermediate quantities of the right-hand side (dict of arrays)."""
    h = model.grid.h
    T = state.Ttemp
    J, rho = _fields(model, state)
    if not np.all(T > 0):
        raise StateError("non-positive temperature")
    eos = model.eos
    p = np.asarray(eos.pressure(rho, T))
    DV = first_derivative(state.V, h)
    DT = first_derivative(T, h)
    Pfr = model.mu_tilde * DV / J
    sig = -p + Pfr
    JS = -model.kappa_th * DT / (J * T)
    JS[0] = JS[-1] = 0.0
    R = model.supply(state.t)
    dV = first_derivative(sig, h) / model.rho_ref
    if model.pin_velocity:
        dV[:] = 0.0
    dV[0] = dV[-1] = 0.0
    dSigma = (Pfr * DV - JS * DT + model.rho_ref * R) / T
    dS = dSigma - first_derivative(JS, h)
    s_T = np.asarray(eos.entropy_dT(rho, T))
    if not np.all(s_T > 0):
        raise ThermodynamicStabilityError("non-positive specific heat")
    p_T = np.asarray(eos.pressure_dT(rho, T))
    dT = (dS - p_T * DV) / (J * s_T)
    return {
        "J": J, "rho": rho, "p": p, "DV": DV, "DT": DT, "P_fr": Pfr, "stress": sig,
        "J_S": JS, "R": R, "dV": dV, "dSigma": dSigma, "dS": dS, "dTtemp": dT,
    }


def rhs(model, state):
    """Rates (phi, V, Ttemp, Gamma, Sigma) of the semi-discrete system."""
    k = terms(model, state)
    return MaterialRates(dphi=state.V.copy(), dV=k["dV"], dTtemp=k["dTtemp"],
                         dGamma=state.Ttemp.copy(), dSigma=k["dSigma"])


def max_stable_dt(model, state, cfl=DEFAULT_CFL):
    """Explicit time-step bound from advection, conduction and viscosity."""
    J, rho = _fields(model, state)
    hJ = model.grid.h * J
    cs = np.asarray(model.eos.sound_speed(rho, state.Ttemp))
    bounds = [np.min(hJ / (np.abs(state.V) + cs))]
    if model.kappa_th > 0:
        cv = np.asarray(model.eos.coefficients(rho, state.Ttemp).cv_coeff)
        bounds.append(np.min(rho * cv * hJ ** 2 / (2 * model.kappa_th)))
    if model.mu_tilde > 0:
        bounds.append(np.min(rho * hJ ** 2 / (2 * model.mu_tilde)))
    return cfl * float(min(bounds))


def _pack(state):
    return np.stack([state.phi, state.V, state.Ttemp, state.Gamma, state.Sigma])


def _unpack(y, t):
    return MaterialState(phi=y[0], V=y[1], Ttemp=y[2], Gamma=y[3], Sigma=y[4], t=t)


def _f(model):
    def f(t, y):
        r = rhs(model, _unpack(y, t))
        return np.stack([r.dphi, r.dV, r.dTtemp, r.dGamma, r.dSigma])

    return f


def step(model, state, dt, cfl=DEFAULT_CFL):
    """One RK4 step. Warns with :class:`CFLWarning` above the stability bound."""
    if dt == 0:
        return state
    if not dt > 0:
        raise ValueError(f"dt must be non-negative, got {dt}")
    bound = max_stable_dt(model, state, cfl)
    if dt > bound * (1 + 1e-12):
        warnings.warn(f"dt={dt:.3g} exceeds the stability bound {bound:.3g}", CFLWarning, stacklevel=2)
    y = rk4_step(_f(model), state.t, _pack(state), dt)
    new = _unpack(y, state.t + dt)
    check_state(model, new)
    return new


def simulate(model, state0, dt, steps, every=1, scenario="gas_tube_material", cfl=DEFAULT_CFL):
    """Trajectory of ``steps`` RK4 steps, keeping every ``every``-th state.

    The first and last states are always kept. Errors abort with a
    :class:`SimulationError` carrying the step index and node.
    """
    check_state(model, state0)
    pressure_identity_check(model, state0)
    traj = [state0]
    state = state0
    t0 = state0.t
    for k in range(int(steps)):
        try:
            state = step(model, state, dt, cfl)
            state = replace(state, t=t0 + (k + 1) * dt)
        except ThermoError as exc:
            raise SimulationError(exc, step=k + 1, scenario=scenario, node=getattr(exc, "node", None)) from exc
        if (k + 1) % every == 0 or k + 1 == steps:
            traj.append(state)
    return traj


def free_energy_material(model, J, Ttemp):
    """Material free energy density Psi = J psi(rho_ref/J, Ttemp)."""
    return J * np.asarray(model.eos.free_energy(model.rho_ref / J, Ttemp))


def pressure_identity_residual(model, state, rel_step=1e-6):
    """max relative gap between dPsi/dJ (central differences) and -p."""
    J, rho = _fields(model, state)
    T = state.Ttemp
    hJ = rel_step * J
    dPsi = (free_energy_material(model, J + hJ, T) - free_energy_material(model, J - hJ, T)) / (2 * hJ)
    p = np.asarray(model.eos.pressure(rho, T))
    return float(np.max(np.abs(dPsi + p) / np.abs(p)))


def pressure_identity_check(model, state, tol=1e-6):
    res = pressure_identity_residual(model, state)
    if res > tol:
        raise ModelError(f"stress from the free energy disagrees with -p (relative gap {res:.3g})")
    return res


def entropy_field(model, state):
    """Per-node material entropy S = J s(rho, Ttemp)."""
    J, rho = _fields(model, state)
    return J * np.asarray(model.eos.entropy_from_T(rho, state.Ttemp))


def total_energy(model, state):
    J, rho = _fields(model, state)
    w = model.grid.weights
    e = 0.5 * model.rho_ref * state.V ** 2 + J * np.asarray(model.eos.internal_energy_T(rho, state.Ttemp))
    return float(w @ e)


def total_entropy(model, state):
    return float(model.grid.weights @ entropy_field(model, state))


def diagnostics(model, state):
    """Mass, energy, entropy, min entropy production and constraint residuals."""
    from .constraints import phenomenological_residual

    k = terms(model, state)
    return {
        "mass": float(model.grid.weights @ model.rho_ref),
        "energy": total_energy(model, state),
        "entropy": total_entropy(model, state),
        "sigma_dot_min": float(np.min(k["dSigma"])),
        "ck_residual_max": phenomenological_residual(model, state).max_abs,
    }


def heat_input_rate(model, state):
    """Total external heat power sum w rho_ref R."""
    return float(model.grid.weights @ (model.rho_ref * model.supply(state.t)))
