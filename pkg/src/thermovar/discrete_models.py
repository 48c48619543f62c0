"""
Built-in discrete thermodynamic systems.

* :class:`GasChamber` - a perfect gas filling a volume that depends affinely
  on the mechanical coordinates,
* :class:`HeatBlock` - a rigid body with constant heat capacity,
* builders for the piston, two-cell and adiabatic-piston scenarios.

All partials are analytic and are checked against finite differences when a
builder constructs its model.
"""

from dataclasses import dataclass

import numpy as np

from .discrete import DiscreteModel, Subsystem, initial_state
from .eos import StateEquation
from .errors import ModelError, StateError


@dataclass(frozen=True, eq=False)
class GasChamber(Subsystem):
    """Gas of fixed mass in the volume ``V(q) = volume_offset + volume_coeffs . q``."""

    eos: StateEquation
    gas_mass: float
    volume_offset: float
    volume_coeffs: tuple
    bracket_width: float = 40.0

    def __post_init__(self):
        if not self.gas_mass > 0:
            raise ModelError(f"gas mass must be positive, got {self.gas_mass}")
        object.__setattr__(self, "volume_coeffs", np.asarray(self.volume_coeffs, dtype=float))

    @property
    def entropy_bracket(self):
        # s/rho is measured from s0/rho0; a width of many m*Cv covers
        # temperature ratios far beyond anything physical
        centre = self.gas_mass * self.eos.s0 / self.eos.rho0
        w = self.bracket_width * self.gas_mass * self.eos.Cv
        return (centre - w, centre + w)

    def volume(self, q):
        V = self.volume_offset + float(self.volume_coeffs @ np.asarray(q, dtype=float))
        if not V > 0:
            raise StateError(f"chamber volume {V} is not positive")
        return V

    def _rho(self, q):
        V = self.volume(q)
        return V, self.gas_mass / V

    def energy(self, q, S):
        V, rho = self._rho(q)
        return V * self.eos.internal_energy(rho, S / V)

    def temperature(self, q, S):
        V, rho = self._rho(q)
        return self.eos.temperature_from_s(rho, S / V)

    def energy_dq(self, q, S):
        V, rho = self._rho(q)
        return -self.eos.pressure_from_s(rho, S / V) * self.volume_coeffs

    def temperature_dS(self, q, S):
        V, rho = self._rho(q)
        T = self.eos.temperature_from_s(rho, S / V)
        return 1.0 / (V * self.eos.entropy_dT(rho, T))

    def temperature_dq(self, q, S):
        # dT/dV at fixed S is -p_T / (V s_T)
        V, rho = self._rho(q)
        T = self.eos.temperature_from_s(rho, S / V)
        return -self.eos.pressure_dT(rho, T) / (V * self.eos.entropy_dT(rho, T)) * self.volume_coeffs

    # closed-form free-energy side

    def entropy(self, q, T):
        V, rho = self._rho(q)
        return V * self.eos.entropy_from_T(rho, T)

    def free_energy(self, q, T):
        V, rho = self._rho(q)
        return V * self.eos.free_energy(rho, T)

    def free_energy_dq(self, q, T):
        V, rho = self._rho(q)
        return -self.eos.pressure(rho, T) * self.volume_coeffs

    def entropy_dT(self, q, T):
        V, rho = self._rho(q)
        return V * self.eos.entropy_dT(rho, T)

    def entropy_dq(self, q, T):
        V, rho = self._rho(q)
        return self.eos.pressure_dT(rho, T) * self.volume_coeffs


@dataclass(frozen=True, eq=False)
class HeatBlock(Subsystem):
    """Rigid body with constant heat capacity ``C``: ``T = T_ref exp((S - S_ref)/C)``."""

    heat_capacity: float
    T_ref: float
    S_ref: float = 0.0
    n_dof: int = 0

    def __post_init__(self):
        if not (self.heat_capacity > 0 and self.T_ref > 0):
            raise ModelError("heat capacity and reference temperature must be positive")

    @property
    def entropy_bracket(self):
        w = 40.0 * self.heat_capacity
        return (self.S_ref - w, self.S_ref + w)

    def temperature(self, q, S):
        return self.T_ref * np.exp((S - self.S_ref) / self.heat_capacity)

    def energy(self, q, S):
        return self.heat_capacity * self.temperature(q, S)

    def energy_dq(self, q, S):
        return np.zeros(self.n_dof)

    def temperature_dS(self, q, S):
        return self.temperature(q, S) / self.heat_capacity

    def temperature_dq(self, q, S):
        return np.zeros(self.n_dof)

    def entropy(self, q, T):
        if not T > 0:
            raise StateError(f"temperature must be positive, got {T}")
        return self.S_ref + self.heat_capacity * np.log(T / self.T_ref)

    def free_energy(self, q, T):
        return self.heat_capacity * T - T * self.entropy(q, T)

    def free_energy_dq(self, q, T):
        return np.zeros(self.n_dof)

    def entropy_dT(self, q, T):
        return self.heat_capacity / T

    def entropy_dq(self, q, T):
        return np.zeros(self.n_dof)


def _check(model, state):
    S = model.entropies(state.q, state.T)
    for sub, S_A in zip(model.subsystems, S):
        sub.check_partials(state.q, S_A)


def _constant(values):
    values = np.atleast_1d(np.asarray(values, dtype=float))

    def supply(t):
        return values

    return supply


def make_piston(eos, piston_mass=1.0, area=1.0, spring=10.0, position=1.0, velocity=0.5,
                friction=0.5, heat_supply=0.0, temperature=None):
    """Gas-filled cylinder closed by a spring-loaded, damped piston.

    The spring rest length is chosen so that the piston is in mechanical
    equilibrium at ``position`` for the reference gas state. Returns
    ``(model, state0)`` with the state in the temperature formulation.
    """
    T0 = eos.T0 if temperature is None else float(temperature)
    m_gas = eos.rho0 * area * position
    chamber = GasChamber(eos, m_gas, 0.0, (area,))
    p0 = eos.pressure(eos.rho0, T0)
    rest = position - p0 * area / spring
    k, lam = float(spring), float(friction)
    model = DiscreteModel(
        mass=np.array([[piston_mass]]),
        subsystems=(chamber,),
        potential=lambda q: 0.5 * k * (q[0] - rest) ** 2,
        potential_grad=lambda q: np.array([k * (q[0] - rest)]),
        friction=lambda q, v, T: np.array([[-lam * v[0]]]),
        heat_supply=_constant([heat_supply]),
        name="piston",
    )
    state = initial_state(model, [position], [velocity], [T0])
    _check(model, state)
    return model, state


def make_two_cells(heat_capacity=1.0, kappa=0.5, T_a=300.0, T_b=310.0, heat_supply=(0.0, 0.0)):
    """Two rigid bodies exchanging heat, no mechanical degrees of freedom."""
    cells = (HeatBlock(heat_capacity, T_a), HeatBlock(heat_capacity, T_a))
    K = np.array([[0.0, kappa], [kappa, 0.0]])
    model = DiscreteModel(
        mass=np.zeros((0, 0)),
        subsystems=cells,
        kappa=K,
        heat_supply=_constant(heat_supply),
        name="two_cells",
    )
    state = initial_state(model, np.zeros(0), np.zeros(0), [T_a, T_b])
    _check(model, state)
    return model, state


def make_adiabatic_piston(eos, length=2.0, area=1.0, wall_mass=1.0, position=1.0, velocity=0.0,
                          friction=0.5, kappa=0.0, pressure_ratio=2.0, heat_supply=(0.0, 0.0)):
    """Two gases separated by a movable wall in a closed cylinder.

    The left gas starts at ``pressure_ratio`` times the right pressure (same
    temperature). Friction on the wall is shared equally by the two gases; heat
    may leak through the wall with coefficient ``kappa``.
    """
    if not 0 < position < length:
        raise ModelError(f"wall position {position} outside (0, {length})")
    T0 = eos.T0
    m1 = eos.rho0 * pressure_ratio * area * position
    m2 = eos.rho0 * area * (length - position)
    gas1 = GasChamber(eos, m1, 0.0, (area,))
    gas2 = GasChamber(eos, m2, area * length, (-area,))
    lam = float(friction)
    model = DiscreteModel(
        mass=np.array([[wall_mass]]),
        subsystems=(gas1, gas2),
        friction=lambda q, v, T: np.array([[-0.5 * lam * v[0]], [-0.5 * lam * v[0]]]),
        kappa=np.array([[0.0, kappa], [kappa, 0.0]]),
        heat_supply=_constant(heat_supply),
        name="adiabatic_piston",
    )
    state = initial_state(model, [position], [velocity], [T0, T0])
    _check(model, state)
    return model, state
