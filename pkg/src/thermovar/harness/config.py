"""
Run configuration: flat ``key = value`` text with dotted keys.

Example::

    scenario = gas_tube_spatial
    phenomenology.kappa = 0.02   # thermal conductivity
    numerics.nx = 128

Lines are parsed with :mod:`configparser` (``#`` starts a comment, strings
may be bare or quoted). Every key is typed and validated against
:data:`SCHEMA`; unknown keys are rejected. Missing keys take the scenario's
defaults.
"""

import configparser
from dataclasses import dataclass, field
from pathlib import Path

from ..errors import ConfigError

SCENARIOS = ("piston", "two_cells", "adiabatic_piston", "gas_tube_material", "gas_tube_spatial", "cross_check")
DISCRETE_SCENARIOS = ("piston", "two_cells", "adiabatic_piston")

_SECTION = "run"


def _positive(x):
    return x > 0


def _non_negative(x):
    return x >= 0


# key -> (type, validator or allowed values, description)
SCHEMA = {
    "scenario": (str, SCENARIOS, "scenario identifier"),
    "output": (str, None, "output directory"),
    "seed": (int, None, "seed for randomized checks"),
    "eos.Cv": (float, _positive, "specific heat at constant volume"),
    "eos.Cp": (float, _positive, "specific heat at constant pressure"),
    "eos.rho0": (float, _positive, "reference density"),
    "eos.T0": (float, _positive, "reference temperature"),
    "eos.s0": (float, None, "reference entropy density"),
    "phenomenology.mu": (float, _non_negative, "shear viscosity"),
    "phenomenology.zeta": (float, _non_negative, "bulk viscosity"),
    "phenomenology.kappa": (float, _non_negative, "thermal conductivity or heat exchange coefficient"),
    "phenomenology.friction": (float, _non_negative, "linear friction coefficient"),
    "numerics.nx": (int, lambda n: n >= 2, "number of grid intervals"),
    "numerics.dt": (float, _positive, "time step"),
    "numerics.cfl": (float, _positive, "CFL number"),
    "numerics.t_end": (float, _positive, "final time"),
    "numerics.snapshot_every": (int, _non_negative, "snapshot interval in steps (0 = off)"),
    "numerics.form": (str, ("temperature", "entropy", "free_energy"), "formulation"),
    "numerics.length": (float, _positive, "tube length"),
    "supply.profile": (str, ("none", "uniform", "cosine"), "heat supply profile"),
    "supply.amplitude": (float, None, "heat supply amplitude"),
    "initial.profile": (str, ("cosine", "gaussian"), "initial perturbation shape"),
    "initial.amplitude": (float, None, "initial perturbation amplitude"),
    "initial.velocity": (float, None, "initial piston or wall velocity"),
    "discrete.mass": (float, _positive, "piston or wall mass"),
    "discrete.area": (float, _positive, "cylinder cross section"),
    "discrete.spring": (float, _positive, "spring stiffness"),
    "discrete.length": (float, _positive, "cylinder length"),
    "discrete.position": (float, _positive, "initial piston or wall position"),
    "discrete.heat_capacity": (float, _positive, "heat capacity of each cell"),
    "discrete.T_a": (float, _positive, "initial temperature of cell A"),
    "discrete.T_b": (float, _positive, "initial temperature of cell B"),
    "discrete.pressure_ratio": (float, _positive, "initial left/right pressure ratio"),
}

COMMON_DEFAULTS = {
    "output": "out",
    "seed": 0,
    "eos.Cv": 2.5,
    "eos.Cp": 3.5,
    "eos.rho0": 1.0,
    "eos.T0": 1.0,
    "eos.s0": 0.0,
    "phenomenology.mu": 0.01,
    "phenomenology.zeta": 0.0,
    "phenomenology.kappa": 0.01,
    "phenomenology.friction": 0.5,
    "numerics.cfl": 0.25,
    "numerics.snapshot_every": 0,
    "numerics.length": 1.0,
    "supply.profile": "none",
    "supply.amplitude": 0.0,
    "initial.profile": "cosine",
    "initial.amplitude": 0.01,
}

SCENARIO_DEFAULTS = {
    "piston": {
        "numerics.dt": 1e-3, "numerics.t_end": 5.0, "numerics.form": "free_energy",
        "initial.velocity": 0.5, "discrete.mass": 1.0, "discrete.area": 1.0, "discrete.spring": 10.0,
        "discrete.position": 1.0,
    },
    "two_cells": {
        "numerics.dt": 1e-3, "numerics.t_end": 2.0, "numerics.form": "free_energy",
        "phenomenology.kappa": 0.5, "discrete.heat_capacity": 1.0, "discrete.T_a": 300.0, "discrete.T_b": 310.0,
    },
    "adiabatic_piston": {
        "numerics.dt": 1e-3, "numerics.t_end": 10.0, "numerics.form": "free_energy",
        "phenomenology.kappa": 0.0, "initial.velocity": 0.0, "discrete.mass": 1.0, "discrete.area": 1.0,
        "discrete.length": 2.0, "discrete.position": 1.0, "discrete.pressure_ratio": 2.0,
    },
    "gas_tube_material": {"numerics.nx": 128, "numerics.t_end": 0.1, "numerics.form": "temperature"},
    "gas_tube_spatial": {"numerics.nx": 128, "numerics.t_end": 0.1, "numerics.form": "temperature"},
    "cross_check": {"numerics.nx": 128, "numerics.t_end": 0.05, "numerics.form": "temperature"},
}


@dataclass(frozen=True)
class RunConfig:
    """Validated configuration, every key resolved (``dt`` may stay unset for continuum runs)."""

    values: dict = field(default_factory=dict)

    def __getitem__(self, key):
        return self.values[key]

    def get(self, key, default=None):
        return self.values.get(key, default)

    @property
    def scenario(self):
        return self.values["scenario"]

    @property
    def is_discrete(self):
        return self.scenario in DISCRETE_SCENARIOS

    def with_values(self, **updates):
        """Copy with dotted keys given as ``section__name`` keyword arguments."""
        vals = dict(self.values)
        for k, v in updates.items():
            vals[k.replace("__", ".")] = v
        return build_config(vals)


def _coerce(key, raw, line=None):
    typ = SCHEMA[key][0]
    text = raw.strip()
    if len(text) >= 2 and text[0] == text[-1] and text[0] in "\"'":
        text = text[1:-1]
    if typ is str:
        return text
    try:
        if typ is int:
            return int(text)
        return float(text)
    except ValueError:
        raise ConfigError(f"expected {typ.__name__}, got {raw!r}", key=key, line=line) from None


def _validate(key, value, line=None):
    if key not in SCHEMA:
        raise ConfigError(f"unknown key; valid keys: {', '.join(sorted(SCHEMA))}", key=key, line=line)
    typ, rule, _ = SCHEMA[key]
    if typ is float and isinstance(value, int) and not isinstance(value, bool):
        value = float(value)
    if not isinstance(value, typ) or isinstance(value, bool):
        raise ConfigError(f"expected {typ.__name__}, got {value!r}", key=key, line=line)
    if typ is float and value != value:
        raise ConfigError("NaN is not allowed", key=key, line=line)
    if isinstance(rule, tuple):
        if value not in rule:
            raise ConfigError(f"invalid value {value!r}; valid: {', '.join(rule)}", key=key, line=line)
    elif rule is not None and not rule(value):
        raise ConfigError(f"invalid value {value!r} ({SCHEMA[key][2]})", key=key, line=line)
    return value


def build_config(values, lines=None):
    """Validate a mapping of dotted keys and fill in defaults."""
    lines = lines or {}
    checked = {k: _validate(k, v, lines.get(k)) for k, v in values.items()}
    if "scenario" not in checked:
        raise ConfigError(f"missing; valid identifiers: {', '.join(SCENARIOS)}", key="scenario")
    resolved = dict(COMMON_DEFAULTS)
    resolved.update(SCENARIO_DEFAULTS[checked["scenario"]])
    resolved.update(checked)
    if not resolved["eos.Cp"] > resolved["eos.Cv"]:
        raise ConfigError("must exceed eos.Cv", key="eos.Cp", line=lines.get("eos.Cp"))
    scen = resolved["scenario"]
    form = resolved["numerics.form"]
    if scen in DISCRETE_SCENARIOS:
        if form not in ("free_energy", "entropy"):
            raise ConfigError(f"discrete scenarios use 'free_energy' or 'entropy', got {form!r}",
                              key="numerics.form", line=lines.get("numerics.form"))
    elif form not in ("temperature", "entropy"):
        raise ConfigError(f"continuum scenarios use 'temperature' or 'entropy', got {form!r}",
                          key="numerics.form", line=lines.get("numerics.form"))
    if scen == "adiabatic_piston" and not resolved["discrete.position"] < resolved["discrete.length"]:
        raise ConfigError("must lie inside the cylinder", key="discrete.position", line=lines.get("discrete.position"))
    return RunConfig(values=resolved)


def parse_config(text, source="<string>"):
    """Parse configuration text and return the validated :class:`RunConfig`."""
    parser = configparser.ConfigParser(
        delimiters=("=",), comment_prefixes=("#",), inline_comment_prefixes=("#",),
        interpolation=None, strict=True, empty_lines_in_values=False,
    )
    parser.optionxform = str
    lines = {}
    for i, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if stripped.startswith("["):
            raise ConfigError(f"sections are not supported ({stripped!r})", line=i)
        if stripped and not stripped.startswith("#"):
            if "=" not in stripped:
                raise ConfigError(f"expected 'key = value', got {stripped!r}", line=i)
            if line[0].isspace():
                raise ConfigError("continuation lines are not supported", line=i)
            lines.setdefault(stripped.split("=", 1)[0].strip(), i)
    try:
        parser.read_string(f"[{_SECTION}]\n" + text, source=source)
    except configparser.DuplicateOptionError as exc:
        raise ConfigError("duplicate key", key=exc.option, line=exc.lineno - 1) from None
    except configparser.Error as exc:
        raise ConfigError(f"malformed configuration: {exc.message}",
                          line=getattr(exc, "lineno", 1) - 1 if hasattr(exc, "lineno") else None) from None
    raw = {}
    for key, value in parser.items(_SECTION):
        line = lines.get(key)
        if key not in SCHEMA:
            raise ConfigError(f"unknown key; valid keys: {', '.join(sorted(SCHEMA))}", key=key, line=line)
        if value is None or value.strip() == "":
            raise ConfigError("missing value", key=key, line=line)
        raw[key] = _coerce(key, value, line)
    return build_config(raw, lines)


def load_config(path):
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from None
    return parse_config(text, source=str(path))


def dump_config(config):
    """Serialize a config to text that :func:`parse_config` maps back to an equal config."""
    out = []
    for key in sorted(config.values):
        value = config.values[key]
        if isinstance(value, float):
            text = repr(value)
        elif isinstance(value, str):
            text = f'"{value}"'
        else:
            text = str(value)
        out.append(f"{key} = {text}")
    return "\n".join(out) + "\n"
