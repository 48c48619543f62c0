"""Exception and warning types shared across the package."""


class ThermoError(Exception):
    """Base class for all errors raised by :mod:`thermovar`."""


class DomainError(ThermoError, ValueError):
    """A thermodynamic function was evaluated outside its domain (rho <= 0, T <= 0)."""


class EosConstructionError(ThermoError, ValueError):
    """Inconsistent equation-of-state constants."""


class ModelError(ThermoError):
    """A model is ill-posed (singular mass matrix, non-monotone temperature, ...)."""


class ThermodynamicStabilityError(ModelError):
    """Non-positive heat capacity encountered."""


class InversionError(ThermoError):
    """Temperature/entropy inversion failed (root not bracketed or no convergence)."""


class StateError(ThermoError):
    """A state violates its invariants (non-positive temperature, ...)."""


class MeshTanglingError(StateError):
    """The deformation Jacobian became non-positive."""


class ShapeError(ThermoError, ValueError):
    """Array shapes do not match the associated state."""


class PreconditionError(ThermoError, ValueError):
    """An operation was called outside the regime where it is defined."""


class SimulationError(ThermoError):
    """A time integration aborted.

    Carries the failing step index and, when known, the scenario and node.
    """

    def __init__(self, message, step=None, scenario=None, node=None):
        self.step = step
        self.scenario = scenario
        self.node = node
        parts = []
        if scenario is not None:
            parts.append(f"scenario={scenario}")
        if step is not None:
            parts.append(f"step={step}")
        if node is not None:
            parts.append(f"node={node}")
        prefix = f"[{', '.join(parts)}] " if parts else ""
        super().__init__(prefix + str(message))


class ConfigError(ThermoError, ValueError):
    """Malformed or invalid run configuration."""

    def __init__(self, message, key=None, line=None):
        self.key = key
        self.line = line
        where = []
        if line is not None:
            where.append(f"line {line}")
        if key is not None:
            where.append(f"key {key!r}")
        prefix = f"{', '.join(where)}: " if where else ""
        super().__init__(prefix + message)


class SchemaMismatchError(ThermoError, ValueError):
    """Two CSV outputs cannot be compared column by column."""


class CFLWarning(UserWarning):
    """The requested time step exceeds the explicit stability bound."""
