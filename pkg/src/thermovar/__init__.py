"""
thermovar: variational thermodynamics of simple and continuum systems.

Submodules
----------
eos
    Perfect-gas equation of state in entropy and temperature variables.
discrete
    Finite-dimensional systems with friction and heat exchange.
constraints
    Variational and phenomenological constraint residuals.
nsf_material, nsf_spatial
    1D Navier-Stokes-Fourier solvers in material and spatial form.
harness
    Configuration, scenarios, comparison and check suites.
"""

from . import constraints, discrete, eos, nsf_material, nsf_spatial
from .eos import GasEos, StateEquation
from .errors import ThermoError

__version__ = "0.1.0"

__all__ = ["GasEos", "StateEquation", "ThermoError", "constraints", "discrete", "eos", "nsf_material",
           "nsf_spatial", "__version__"]
