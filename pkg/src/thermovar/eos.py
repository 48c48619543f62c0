"""
Equations of state in entropy and temperature variables.

All energies and entropies are densities (per unit volume); the heat
capacities ``Cv`` and ``Cp`` are per unit mass. The entropy form
``eps(rho, s)`` and the temperature form ``psi(rho, T)`` are Legendre
duals of each other in the thermal slot::

    psi(rho, T) = eps(rho, s) - T s,   T = d eps/ds,   s = -d psi/dT

Every function accepts scalars or numpy arrays and broadcasts.
"""

from abc import ABC, abstractmethod
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, EosConstructionError


def _out(x):
    """Return a Python float for 0-d results, the array otherwise."""
    x = np.asarray(x)
    return float(x) if x.ndim == 0 else x


def _positive(name, x):
    if isinstance(x, float) and x > 0:  # scalar fast path for the discrete models
        return x
    x = np.asarray(x, dtype=float)
    if not np.all(x > 0):
        raise DomainError(f"{name} must be strictly positive, got min {np.min(x)!r}")
    return x


@dataclass(frozen=True)
class ThermoCoefficients:
    """Coefficients entering the temperature form of the heat equation.

    ``cv_coeff`` is the specific heat at constant volume, ``cs2`` the squared
    adiabatic sound speed and ``gamma_ad`` the adiabatic temperature gradient
    dT/dp at constant specific entropy.
    """

    cv_coeff: np.ndarray
    cs2: np.ndarray
    gamma_ad: np.ndarray


class StateEquation(ABC):
    """Interface shared by all equations of state.

    Subclasses supply the closed forms; the solvers only rely on the methods
    declared here.
    """

    @abstractmethod
    def internal_energy(self, rho, s):
        """Internal energy density eps(rho, s)."""

    @abstractmethod
    def free_energy(self, rho, T):
        """Helmholtz free energy density psi(rho, T)."""

    @abstractmethod
    def entropy_from_T(self, rho, T):
        """Entropy density s = -d psi/dT."""

    @abstractmethod
    def temperature_from_s(self, rho, s):
        """Temperature T = d eps/ds."""

    @abstractmethod
    def pressure(self, rho, T):
        """Pressure p = rho d psi/d rho - psi."""

    @abstractmethod
    def pressure_from_s(self, rho, s):
        """Pressure p = rho d eps/d rho + s d eps/ds - eps."""

    @abstractmethod
    def coefficients(self, rho, T) -> ThermoCoefficients:
        """Specific heat, squared sound speed and adiabatic gradient."""

    @abstractmethod
    def entropy_dT(self, rho, T):
        """ds/dT at constant density (= -d2 psi/dT2)."""

    @abstractmethod
    def entropy_drho(self, rho, T):
        """ds/d rho at constant temperature."""

    @abstractmethod
    def pressure_dT(self, rho, T):
        """dp/dT at constant density."""

    def internal_energy_T(self, rho, T):
        """Internal energy density as a function of (rho, T): psi + T s."""
        return _out(np.asarray(self.free_energy(rho, T)) + np.asarray(T) * self.entropy_from_T(rho, T))

    def sound_speed(self, rho, T):
        return _out(np.sqrt(self.coefficients(rho, T).cs2))


@dataclass(frozen=True)
class GasEos(StateEquation):
    """Perfect gas with constant heat capacities.

    Parameters
    ----------
    Cv, Cp : float
        Specific heats at constant volume and pressure, ``Cp > Cv > 0``.
    rho0, T0, s0 : float
        Reference density, temperature and entropy density.
    eps0, psi0 : float, optional
        Reference internal and free energy densities. They are fixed by the
        two closed forms (``eps0 = rho0 Cv T0``, ``psi0 = eps0 - T0 s0``);
        passing inconsistent values raises :class:`EosConstructionError`.
    """

    Cv: float
    Cp: float
    rho0: float
    T0: float
    s0: float = 0.0
    eps0: float = field(default=None)
    psi0: float = field(default=None)

    def __post_init__(self):
        if not (self.Cv > 0 and self.Cp > self.Cv):
            raise EosConstructionError(f"need Cp > Cv > 0, got Cv={self.Cv}, Cp={self.Cp}")
        if not (self.rho0 > 0 and self.T0 > 0):
            raise EosConstructionError(f"need rho0 > 0 and T0 > 0, got {self.rho0}, {self.T0}")
        eps0 = self.rho0 * self.Cv * self.T0
        psi0 = eps0 - self.T0 * self.s0
        for name, given, forced in (("eps0", self.eps0, eps0), ("psi0", self.psi0, psi0)):
            if given is not None and not np.isclose(given, forced, rtol=1e-12, atol=1e-12 * abs(eps0)):
                raise EosConstructionError(f"{name}={given} inconsistent with Legendre duality (expected {forced})")
        object.__setattr__(self, "eps0", eps0)
        object.__setattr__(self, "psi0", psi0)

    @property
    def Rgas(self):
        return self.Cp - self.Cv

    @property
    def gamma(self):
        """Ratio of specific heats."""
        return self.Cp / self.Cv

    # entropy variables

    def internal_energy(self, rho, s):
        rho = _positive("rho", rho)
        s = np.asarray(s, dtype=float)
        return _out(
            self.eps0
            * np.exp((s / rho - self.s0 / self.rho0) / self.Cv)
            * (rho / self.rho0) ** (self.Cp / self.Cv)
        )

    def temperature_from_s(self, rho, s):
        rho = _positive("rho", rho)
        return _out(np.asarray(self.internal_energy(rho, s)) / (rho * self.Cv))

    def pressure_from_s(self, rho, s):
        # rho eps_rho + s eps_s - eps collapses to (Cp/Cv - 1) eps
        return _out(np.asarray(self.internal_energy(rho, s)) * (self.Rgas / self.Cv))

    # temperature variables

    def free_energy(self, rho, T):
        rho = _positive("rho", rho)
        T = _positive("T", T)
        return _out(
            rho
            * T
            * (
                self.psi0 / (self.rho0 * self.T0)
                + self.Rgas * np.log(rho / self.rho0)
                - self.Cv * np.log(T / self.T0)
            )
        )

    def entropy_from_T(self, rho, T):
        rho = _positive("rho", rho)
        T = _positive("T", T)
        return _out(-np.asarray(self.free_energy(rho, T)) / T + rho * self.Cv)

    def pressure(self, rho, T):
        rho = _positive("rho", rho)
        T = _positive("T", T)
        return _out(rho * self.Rgas * T)

    def internal_energy_T(self, rho, T):
        rho = _positive("rho", rho)
        T = _positive("T", T)
        return _out(rho * self.Cv * T)

    def coefficients(self, rho, T):
        rho = _positive("rho", rho)
        T = _positive("T", T)
        p = rho * self.Rgas * T
        return ThermoCoefficients(
            cv_coeff=np.broadcast_to(np.float64(self.Cv), np.broadcast(rho, T).shape).copy(),
            cs2=self.gamma * self.Rgas * T * np.ones_like(rho),
            gamma_ad=(self.Rgas / self.Cp) * T / p,
        )

    def entropy_dT(self, rho, T):
        rho = _positive("rho", rho)
        T = _positive("T", T)
        return _out(rho * self.Cv / T)

    def entropy_drho(self, rho, T):
        s = np.asarray(self.entropy_from_T(rho, T))
        return _out(s / np.asarray(rho, dtype=float) - self.Rgas)

    def pressure_dT(self, rho, T):
        rho = _positive("rho", rho)
        _positive("T", T)
        return _out(rho * self.Rgas * np.ones_like(np.asarray(T, dtype=float)))


def free_energy_drho(eos, rho, T):
    """d psi/d rho at constant T, by identity (p + psi)/rho."""
    rho = np.asarray(rho, dtype=float)
    return _out((np.asarray(eos.pressure(rho, T)) + eos.free_energy(rho, T)) / rho)
