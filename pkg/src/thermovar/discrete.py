"""
Finite-dimensional nonequilibrium thermodynamic systems.

A model couples ``n`` mechanical coordinates ``q`` to ``N`` simple
subsystems, each carrying one thermal variable. The Lagrangian has the
standard separable form::

    L(q, v, S) = 1/2 v.M.v - W(q) - sum_A U_A(q, S_A)

and its free energy counterpart replaces ``U_A(q, S_A)`` by the free energy
``F_A(q, T_A) = U_A - T_A S_A``. The same model can therefore be integrated
in the entropy formulation (state ``S``) or in the temperature formulation
(state ``T``). Thermal displacements ``Gamma`` (rate = temperature) and the
accumulators ``Sigma`` (rate from the phenomenological constraint) are
carried along with zero initial values.
"""

from abc import ABC, abstractmethod
from collections.abc import Sequence
from dataclasses import dataclass, field, replace
from typing import Callable, Optional

import numpy as np

from .errors import (
    InversionError,
    ModelError,
    SimulationError,
    StateError,
    ThermodynamicStabilityError,
    ThermoError,
)
from .integrate import rk4_step

ENTROPY = "entropy"
FREE_ENERGY = "free_energy"
FORMS = (ENTROPY, FREE_ENERGY)

NEWTON_RTOL = 1e-12
NEWTON_MAXITER = 50


class Subsystem(ABC):
    """A simple thermodynamic system with internal energy ``U(q, S)``.

    Subclasses implement the entropy side. The free-energy side defaults to
    a numerical Legendre transform (safeguarded Newton on ``dU/dS = T``
    inside :attr:`entropy_bracket`) and should be overridden by closed forms
    whenever they exist.
    """

    #: search interval for the entropy inversion
    entropy_bracket = (-1e3, 1e3)

    @abstractmethod
    def energy(self, q, S):
        """Internal energy U(q, S)."""

    @abstractmethod
    def energy_dq(self, q, S):
        """dU/dq at fixed S, shape (n,)."""

    @abstractmethod
    def temperature(self, q, S):
        """dU/dS."""

    @abstractmethod
    def temperature_dS(self, q, S):
        """d2U/dS2."""

    @abstractmethod
    def temperature_dq(self, q, S):
        """d2U/dq dS, shape (n,)."""

    def solve_entropy(self, q, T, guess=None):
        """Invert ``temperature(q, S) = T`` for S.

        Newton steps are accepted while they stay inside the current bracket
        and shrink it fast enough; otherwise the step falls back to bisection.
        """
        lo, hi = self.entropy_bracket
        t_lo, t_hi = self.temperature(q, lo), self.temperature(q, hi)
        if not t_hi > t_lo:
            raise ModelError(
                f"temperature is not increasing in S on [{lo}, {hi}] "
                f"(T(lo)={t_lo}, T(hi)={t_hi}); Legendre transform undefined"
            )
        if not (t_lo <= T <= t_hi):
            raise InversionError(f"T={T} not bracketed by [{t_lo}, {t_hi}] on S in [{lo}, {hi}]")
        S = 0.5 * (lo + hi) if guess is None else float(np.clip(guess, lo, hi))
        dx_old = hi - lo
        dx = dx_old
        for _ in range(NEWTON_MAXITER):
            r = self.temperature(q, S) - T
            if abs(r) < NEWTON_RTOL * T:
                return S
            if r > 0:
                hi = S
            else:
                lo = S
            d = self.temperature_dS(q, S)
            if not d > 0:
                raise ModelError(f"d2U/dS2 = {d} <= 0 at S={S}; temperature not monotone")
            step = r / d
            newton = S - step
            if lo < newton < hi and abs(2.0 * step) < abs(dx_old):
                dx_old, dx = dx, step
                S = newton
            else:
                dx_old = dx
                dx = 0.5 * (hi - lo)
                S = lo + dx
        raise InversionError(f"entropy inversion did not converge for T={T} in {NEWTON_MAXITER} iterations")

    # free-energy side (numerical Legendre transform unless overridden)

    def entropy(self, q, T):
        """S(q, T) = -dF/dT."""
        return self.solve_entropy(q, T)

    def free_energy(self, q, T):
        S = self.entropy(q, T)
        return self.energy(q, S) - T * S

    def free_energy_dq(self, q, T):
        return self.energy_dq(q, self.entropy(q, T))

    def entropy_dT(self, q, T):
        """dS/dT = -d2F/dT2."""
        return 1.0 / self.temperature_dS(q, self.entropy(q, T))

    def entropy_dq(self, q, T):
        """dS/dq at fixed T = -d2F/dq dT."""
        S = self.entropy(q, T)
        return -np.asarray(self.temperature_dq(q, S)) / self.temperature_dS(q, S)

    def specific_heat(self, q, T):
        """c_v = -T d2F/dT2."""
        return T * self.entropy_dT(q, T)

    def check_partials(self, q, S, rtol=1e-6):
        """Compare the analytic partials against central finite differences.

        Raises :class:`ModelError` on the first mismatch.
        """
        q = np.asarray(q, dtype=float)
        T = self.temperature(q, S)
        hS = 1e-6 * max(abs(S), 1.0)
        hT = 1e-6 * T

        def fd_q(fun):
            out = np.zeros(q.size)
            for i in range(q.size):
                hq = 1e-6 * max(abs(q[i]), 1.0)
                e = np.zeros(q.size)
                e[i] = hq
                out[i] = (fun(q + e) - fun(q - e)) / (2 * hq)
            return out

        pairs = [
            ("dU/dS", T, (self.energy(q, S + hS) - self.energy(q, S - hS)) / (2 * hS)),
            ("d2U/dS2", self.temperature_dS(q, S),
             (self.temperature(q, S + hS) - self.temperature(q, S - hS)) / (2 * hS)),
            ("dU/dq", self.energy_dq(q, S), fd_q(lambda x: self.energy(x, S))),
            ("d2U/dqdS", self.temperature_dq(q, S), fd_q(lambda x: self.temperature(x, S))),
            ("-dF/dT", self.entropy(q, T), -(self.free_energy(q, T + hT) - self.free_energy(q, T - hT)) / (2 * hT)),
            ("dS/dT", self.entropy_dT(q, T), (self.entropy(q, T + hT) - self.entropy(q, T - hT)) / (2 * hT)),
            ("dF/dq", self.free_energy_dq(q, T), fd_q(lambda x: self.free_energy(x, T))),
            ("dS/dq", self.entropy_dq(q, T), fd_q(lambda x: self.entropy(x, T))),
        ]
        scale = abs(self.energy(q, S)) + abs(T * S) + 1.0
        for name, exact, approx in pairs:
            exact = np.atleast_1d(np.asarray(exact, dtype=float))
            approx = np.atleast_1d(np.asarray(approx, dtype=float))
            if not np.allclose(exact, approx, rtol=rtol, atol=1e-9 * scale):
                raise ModelError(f"partial {name} disagrees with finite differences: {exact} vs {approx}")


def _zeros_force(n, N):
    def friction(q, v, T):
        return np.zeros((N, n))

    return friction


@dataclass(frozen=True)
class DiscreteModel:
    """Mechanical part, subsystems and phenomenology of a discrete system.

    Parameters
    ----------
    mass : (n, n) array
        Constant, invertible mass matrix of the kinetic energy.
    subsystems : sequence of Subsystem
    potential, potential_grad : callable, optional
        Mechanical potential W(q) and its gradient.
    friction : callable ``(q, v, T) -> (N, n)``
        Friction force acting through each subsystem (one covector per row).
    external_force : callable ``(t, q, v, T) -> (n,)``
    kappa : (N, N) array
        Symmetric, non-negative heat exchange coefficients with zero diagonal.
    heat_supply : callable ``t -> (N,)``
        External heat power into each subsystem.
    """

    mass: np.ndarray
    subsystems: tuple
    potential: Optional[Callable] = None
    potential_grad: Optional[Callable] = None
    friction: Optional[Callable] = None
    external_force: Optional[Callable] = None
    kappa: Optional[np.ndarray] = None
    heat_supply: Optional[Callable] = None
    name: str = "custom"
    _mass_inv: np.ndarray = field(default=None, init=False, repr=False, compare=False)
    _kappa_rows: np.ndarray = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        M = np.atleast_2d(np.asarray(self.mass, dtype=float)) if np.size(self.mass) else np.zeros((0, 0))
        if M.ndim != 2 or M.shape[0] != M.shape[1]:
            raise ModelError(f"mass matrix must be square, got shape {M.shape}")
        try:
            Minv = np.linalg.inv(M) if M.size else M.copy()
        except np.linalg.LinAlgError as exc:
            raise ModelError("singular mass matrix") from exc
        if M.size and np.linalg.cond(M) > 1e12:
            raise ModelError(f"mass matrix is numerically singular (cond={np.linalg.cond(M):.3g})")
        object.__setattr__(self, "mass", M)
        object.__setattr__(self, "_mass_inv", Minv)
        object.__setattr__(self, "subsystems", tuple(self.subsystems))
        N = len(self.subsystems)
        if N == 0:
            raise ModelError("a discrete model needs at least one subsystem")
        K = np.zeros((N, N)) if self.kappa is None else np.asarray(self.kappa, dtype=float)
        if K.shape != (N, N):
            raise ModelError(f"kappa must have shape {(N, N)}, got {K.shape}")
        if not np.allclose(K, K.T, rtol=0, atol=0):
            raise ModelError("kappa must be symmetric")
        if np.any(K < 0):
            raise ModelError("kappa entries must be non-negative")
        if np.any(np.diag(K) != 0):
            raise ModelError("kappa must have a zero diagonal")
        object.__setattr__(self, "kappa", K)
        object.__setattr__(self, "_kappa_rows", K.sum(axis=1))
        if self.friction is None:
            object.__setattr__(self, "friction", _zeros_force(self.n, N))

    @property
    def n(self):
        return self.mass.shape[0]

    @property
    def N(self):
        return len(self.subsystems)

    # pieces of the Lagrangians

    def W(self, q):
        return 0.0 if self.potential is None else float(self.potential(q))

    def W_grad(self, q):
        return np.zeros(self.n) if self.potential_grad is None else np.asarray(self.potential_grad(q), dtype=float)

    def kinetic(self, v):
        return 0.5 * float(v @ self.mass @ v) if self.n else 0.0

    def temperatures(self, q, S):
        return np.array([sub.temperature(q, S_A) for sub, S_A in zip(self.subsystems, S)])

    def entropies(self, q, T):
        return np.array([sub.entropy(q, T_A) for sub, T_A in zip(self.subsystems, T)])

    def lagrangian(self, q, v, S):
        """L(q, v, S)."""
        return self.kinetic(v) - self.W(q) - sum(sub.energy(q, S_A) for sub, S_A in zip(self.subsystems, S))

    def free_lagrangian(self, q, v, T):
        """Free energy Lagrangian built from the subsystems' free energies."""
        return self.kinetic(v) - self.W(q) - sum(sub.free_energy(q, T_A) for sub, T_A in zip(self.subsystems, T))

    def friction_forces(self, q, v, T):
        F = np.asarray(self.friction(q, v, T), dtype=float).reshape(self.N, self.n)
        return F

    def ext_force(self, t, q, v, T):
        if self.external_force is None:
            return np.zeros(self.n)
        return np.asarray(self.external_force(t, q, v, T), dtype=float).reshape(self.n)

    def p_ext(self, t):
        if self.heat_supply is None:
            return np.zeros(self.N)
        return np.asarray(self.heat_supply(t), dtype=float).reshape(self.N)

    def exchange(self, x):
        """sum_B kappa_AB (x_B - x_A) for each A."""
        return self.kappa @ x - self._kappa_rows * x

    def is_isolated(self, t):
        return not np.any(self.p_ext(t))


@dataclass(frozen=True)
class DiscreteState:
    """State of a discrete model in either formulation.

    Exactly one of ``S`` (entropy formulation) and ``T`` (temperature
    formulation) is set.
    """

    q: np.ndarray
    v: np.ndarray
    Gamma: np.ndarray
    Sigma: np.ndarray
    t: float = 0.0
    S: Optional[np.ndarray] = None
    T: Optional[np.ndarray] = None

    def __post_init__(self):
        if (self.S is None) == (self.T is None):
            raise StateError("exactly one of S and T must be given")
        for name in ("q", "v", "Gamma", "Sigma", "S", "T"):
            val = getattr(self, name)
            if val is not None and not (isinstance(val, np.ndarray) and val.dtype == np.float64 and val.ndim == 1):
                object.__setattr__(self, name, np.atleast_1d(np.asarray(val, dtype=float)))
        if self.q.shape != self.v.shape:
            raise StateError(f"q and v shapes differ: {self.q.shape} vs {self.v.shape}")
        if self.T is not None and not (self.T > 0).all():
            raise StateError(f"temperatures must be positive, got {self.T}")

    @property
    def form(self):
        return ENTROPY if self.S is not None else FREE_ENERGY

    @property
    def thermal(self):
        return self.S if self.S is not None else self.T


@dataclass(frozen=True)
class DiscreteRates:
    """Time derivatives of a discrete state; ``dtheta`` is dS/dt or dT/dt."""

    dq: np.ndarray
    dv: np.ndarray
    dtheta: np.ndarray
    dGamma: np.ndarray
    dSigma: np.ndarray
    form: str


def initial_state(model, q, v, T, t=0.0, form=FREE_ENERGY):
    """State with the given temperatures and ``Gamma = Sigma = 0``."""
    z = np.zeros(model.N)
    st = DiscreteState(q=q, v=v, Gamma=z, Sigma=z.copy(), t=t, T=T)
    return st if form == FREE_ENERGY else to_entropy_form(model, st)


def to_free_energy_form(model, state):
    if state.form == FREE_ENERGY:
        return state
    T = model.temperatures(state.q, state.S)
    return replace(state, S=None, T=T)


def to_entropy_form(model, state):
    if state.form == ENTROPY:
        return state
    S = model.entropies(state.q, state.T)
    return replace(state, S=S, T=None)


def current_temperatures(model, state):
    if state.form == FREE_ENERGY:
        return state.T
    T = model.temperatures(state.q, state.S)
    if not np.all(T > 0):
        raise StateError(f"non-positive temperature {T}")
    return T


def current_entropies(model, state):
    return state.S if state.form == ENTROPY else model.entropies(state.q, state.T)


def legendre_free_lagrangian(model, q, v, T):
    """Free energy Lagrangian value and entropies at given temperatures.

    Solves ``-dL/dS_A = T_A`` numerically for every subsystem and returns
    ``(L(q, v, S) + sum_A T_A S_A, S)``.
    """
    q = np.asarray(q, dtype=float)
    T = np.atleast_1d(np.asarray(T, dtype=float))
    if not np.all(T > 0):
        raise StateError(f"temperatures must be positive, got {T}")
    S = np.array([sub.solve_entropy(q, T_A) for sub, T_A in zip(model.subsystems, T)])
    return model.lagrangian(q, v, S) + float(T @ S), S


def _mechanics(model, t, q, v, T, dU_dq):
    Ffr = model.friction_forces(q, v, T)
    force = -dU_dq - model.W_grad(q) + Ffr.sum(axis=0) + model.ext_force(t, q, v, T)
    return model._mass_inv @ force if model.n else np.zeros(0), Ffr


def rhs_entropy_form(model, state):
    """Rates of the entropy formulation.

    The thermal equations read ``dL/dS_A dS_A/dt = <F_fr(A), v>
    + sum_B kappa_AB (dL/dS_B - dL/dS_A) - P_ext(A)`` with ``dL/dS = -T``.
    """
    if state.form != ENTROPY:
        raise StateError("rhs_entropy_form needs a state carrying entropies")
    q, v, S = state.q, state.v, state.S
    T = current_temperatures(model, state)
    dU_dq = sum((np.asarray(sub.energy_dq(q, S_A)) for sub, S_A in zip(model.subsystems, S)), np.zeros(model.n))
    vdot, Ffr = _mechanics(model, state.t, q, v, T, dU_dq)
    dL_dS = -T
    power_fr = Ffr @ v if model.n else np.zeros(model.N)
    P = model.p_ext(state.t)
    Sdot = (power_fr + model.exchange(dL_dS) - P) / dL_dS
    Gdot = -dL_dS
    Sigdot = (power_fr - model.exchange(Gdot) - P) / dL_dS
    return DiscreteRates(dq=v.copy(), dv=vdot, dtheta=Sdot, dGamma=Gdot, dSigma=Sigdot, form=ENTROPY)


def rhs_free_energy_form(model, state):
    """Rates of the temperature formulation (heat equations).

    ``c_vA dT_A/dt = T_A d2F_A/dq dT_A . v - <F_fr(A), v>
    + sum_B kappa_AB (T_B - T_A) + P_ext(A)``.
    """
    if state.form != FREE_ENERGY:
        raise StateError("rhs_free_energy_form needs a state carrying temperatures")
    q, v, T = state.q, state.v, state.T
    dF_dq = sum((np.asarray(sub.free_energy_dq(q, T_A)) for sub, T_A in zip(model.subsystems, T)), np.zeros(model.n))
    vdot, Ffr = _mechanics(model, state.t, q, v, T, dF_dq)
    cv = np.array([sub.specific_heat(q, T_A) for sub, T_A in zip(model.subsystems, T)])
    if not np.all(cv > 0):
        raise ThermodynamicStabilityError(f"non-positive heat capacity {cv}")
    # d2F/dq dT = -dS/dq
    F_qT = -np.array([np.asarray(sub.entropy_dq(q, T_A), dtype=float).reshape(model.n)
                      for sub, T_A in zip(model.subsystems, T)])
    power_fr = Ffr @ v if model.n else np.zeros(model.N)
    P = model.p_ext(state.t)
    mech_heat = T * (F_qT @ v) if model.n else np.zeros(model.N)
    Tdot = (mech_heat - power_fr + model.exchange(T) + P) / cv
    Gdot = T.copy()
    Sigdot = (-power_fr + model.exchange(Gdot) + P) / Gdot
    return DiscreteRates(dq=v.copy(), dv=vdot, dtheta=Tdot, dGamma=Gdot, dSigma=Sigdot, form=FREE_ENERGY)


def rhs(model, state):
    return rhs_entropy_form(model, state) if state.form == ENTROPY else rhs_free_energy_form(model, state)


def temperature_rate(model, state):
    """dT/dt implied by the state's own formulation."""
    r = rhs(model, state)
    if state.form == FREE_ENERGY:
        return r.dtheta
    q, S = state.q, state.S
    out = np.empty(model.N)
    for A, (sub, S_A) in enumerate(zip(model.subsystems, S)):
        out[A] = sub.temperature_dS(q, S_A) * r.dtheta[A] + np.dot(np.asarray(sub.temperature_dq(q, S_A)), state.v)
    return out


def _pack(state):
    return np.concatenate([state.q, state.v, state.thermal, state.Gamma, state.Sigma])


def _unpack(model, y, t, form):
    n, N = model.n, model.N
    q, v = y[:n], y[n:2 * n]
    th, G, Sg = y[2 * n:2 * n + N], y[2 * n + N:2 * n + 2 * N], y[2 * n + 2 * N:]
    if form == ENTROPY:
        return DiscreteState(q=q, v=v, Gamma=G, Sigma=Sg, t=t, S=th)
    return DiscreteState(q=q, v=v, Gamma=G, Sigma=Sg, t=t, T=th)


def _pack_rates(r):
    return np.concatenate([r.dq, r.dv, r.dtheta, r.dGamma, r.dSigma])


def simulate(model, state0, dt, steps, form=None):
    """Fixed-step RK4 trajectory ``[state0, state1, ..., state_steps]``.

    ``form`` selects the formulation ({'entropy', 'free_energy'}); the
    initial state is converted if needed.
    """
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    form = state0.form if form is None else form
    if form not in FORMS:
        raise ValueError(f"unknown formulation {form!r}")
    state = to_entropy_form(model, state0) if form == ENTROPY else to_free_energy_form(model, state0)

    def f(t, y):
        return _pack_rates(rhs(model, _unpack(model, y, t, form)))

    traj = [state]
    y = _pack(state)
    t0 = state.t
    for k in range(int(steps)):
        try:
            y = rk4_step(f, t0 + k * dt, y, dt)
            state = _unpack(model, y, t0 + (k + 1) * dt, form)
            current_temperatures(model, state)
        except ThermoError as exc:
            raise SimulationError(exc, step=k + 1, scenario=model.name) from exc
        traj.append(state)
    return traj


def energy(model, state):
    """Total energy <dL/dv, v> - L = 1/2 v.M.v + W(q) + sum_A U_A."""
    S = current_entropies(model, state)
    U = sum(sub.energy(state.q, S_A) for sub, S_A in zip(model.subsystems, S))
    return model.kinetic(state.v) + model.W(state.q) + U


def entropy_production(model, state):
    """Local entropy production terms, each non-negative for dissipative closures.

    Per subsystem ``-<F_fr(A), v> / T_A``, then per exchanging pair ``A < B``
    ``kappa_AB (T_B - T_A)(1/T_A - 1/T_B)``. Their sum equals ``sum_A Sigma_dot_A``
    of an isolated system; the individual ``Sigma_dot_A`` are not
    sign-definite because they include exchanged heat.
    """
    T = current_temperatures(model, state)
    Ffr = model.friction_forces(state.q, state.v, T)
    friction = -(Ffr @ state.v) / T if model.n else np.zeros(model.N)
    A, B = np.triu_indices(model.N, k=1)
    pairs = model.kappa[A, B] * (T[B] - T[A]) * (1.0 / T[A] - 1.0 / T[B])
    return np.concatenate([friction, pairs])


def diagnostics(model, states):
    """Energy, entropy and second-law diagnostics along a trajectory.

    Returns a dict of arrays (one entry per state): ``t``, ``E``, ``S_tot``,
    ``P_fr`` (friction power, <= 0 for dissipative friction), ``power_in``
    (external mechanical plus heat power), ``entropy_rate`` (sum of dS_A/dt),
    ``sigma_dot_sum``, ``sigma_dot_min``, ``production_min`` (see
    :func:`entropy_production`) and ``balance_residual``
    ``|dE/dt - power_in|`` with dE/dt finite-differenced along the trajectory
    (analytic for fewer than three states).
    """
    if isinstance(states, DiscreteState):
        states = [states]
    states = list(states)
    rows = {k: [] for k in ("t", "E", "S_tot", "P_fr", "power_in", "entropy_rate",
                            "sigma_dot_sum", "sigma_dot_min", "production_min", "dE_dt")}
    for st in states:
        T = current_temperatures(model, st)
        r = rhs(model, st)
        S_entropies = current_entropies(model, st)
        Ffr = model.friction_forces(st.q, st.v, T)
        P_fr = float(Ffr.sum(axis=0) @ st.v) if model.n else 0.0
        power_in = (float(model.ext_force(st.t, st.q, st.v, T) @ st.v) if model.n else 0.0) + float(model.p_ext(st.t).sum())
        # mechanical power plus heat from the temperature formulation
        Sdot = r.dtheta if st.form == ENTROPY else np.array(
            [sub.entropy_dT(st.q, T_A) * Td + np.dot(np.asarray(sub.entropy_dq(st.q, T_A)), st.v)
             for sub, T_A, Td in zip(model.subsystems, T, r.dtheta)])
        dE = float(st.v @ model.mass @ r.dv) if model.n else 0.0
        q_dot = st.v
        dU_dq = sum((np.asarray(sub.energy_dq(st.q, S_A)) for sub, S_A in zip(model.subsystems, S_entropies)), np.zeros(model.n))
        dE += float((model.W_grad(st.q) + dU_dq) @ q_dot) if model.n else 0.0
        dE += float(T @ Sdot)
        rows["t"].append(st.t)
        rows["E"].append(energy(model, st))
        rows["S_tot"].append(float(np.sum(S_entropies)))
        rows["P_fr"].append(P_fr)
        rows["power_in"].append(power_in)
        rows["entropy_rate"].append(float(np.sum(Sdot)))
        rows["sigma_dot_sum"].append(float(np.sum(r.dSigma)))
        rows["sigma_dot_min"].append(float(np.min(r.dSigma)))
        rows["production_min"].append(float(np.min(entropy_production(model, st))))
        rows["dE_dt"].append(dE)
    out = {k: np.array(v) for k, v in rows.items()}
    if len(states) >= 3:
        dE_fd = np.gradient(out["E"], out["t"], edge_order=2)
    else:
        dE_fd = out["dE_dt"]
    out["balance_residual"] = np.abs(dE_fd - out["power_in"])
    return out


def energy_drift(model, traj):
    """max |E(t) - E(0)| / |E(0)| along a trajectory."""
    E = np.array([energy(model, st) for st in traj])
    return float(np.max(np.abs(E - E[0])) / abs(E[0]))
