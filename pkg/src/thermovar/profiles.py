"""Smooth initial profiles for the gas-tube scenarios."""

import numpy as np

PROFILES = ("cosine", "gaussian")


def density_shape(x, length, profile="cosine"):
    """Unit-amplitude perturbation shape with zero slope at both walls."""
    if profile == "cosine":
        return np.cos(np.pi * x / length)
    if profile == "gaussian":
        return np.exp(-((x - 0.5 * length) / (0.1 * length)) ** 2)
    raise ValueError(f"unknown profile {profile!r}; valid: {', '.join(PROFILES)}")


def isentropic_pulse(grid, eos, amplitude=0.01, profile="cosine"):
    """Density ``rho0 (1 + a f(x))`` with the temperature of the reference isentrope."""
    x = grid.nodes
    rho = eos.rho0 * (1.0 + amplitude * density_shape(x, grid.length, profile))
    T = eos.T0 * (rho / eos.rho0) ** (eos.Rgas / eos.Cv)
    return rho, T


def thermal_mode(grid, eos, amplitude=0.01, profile="cosine"):
    """Uniform density with temperature ``T0 (1 + a f(x))``."""
    x = grid.nodes
    rho = np.full(grid.n_nodes, eos.rho0)
    T = eos.T0 * (1.0 + amplitude * density_shape(x, grid.length, profile))
    return rho, T
