"""Experiment configuration: TOML ingestion, validation, serialization.

Config files carry physical inputs in laboratory units (ordinary Hz, ohm,
farad, seconds); conversion to the internal angular-frequency convention
happens exactly once, inside the accessors that build domain objects.  The
stored representation is the raw (validated) table, so parse(serialize(c))
round-trips exactly.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field

import tomli

from .classical import IntegratorConfig
from .core import TWO_PI, CircuitParams, ParameterError
from .noise import DEFAULT_HOLD_DT, NoiseModel

EXPERIMENT_KINDS = (
    "prepare_cat_quantum",
    "classical_locking",
    "arnold_tongue",
    "frequency_scan",
    "noise_drift",
    "dephasing_check",
)

CONFIG_SCHEMA_VERSION = 1


class ConfigError(ValueError):
    """Invalid configuration; the message names the offending field."""


def _fmt_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        if not math.isfinite(v):
            raise ConfigError(f"non-finite float {v!r} cannot be serialized")
        out = repr(v)
        return out if ("." in out or "e" in out or "E" in out) else out + ".0"
    if isinstance(v, str):
        escaped = v.replace("\\", "\\\\").replace('"', '\\"')
        return f'"{escaped}"'
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_fmt_value(x) for x in v) + "]"
    raise ConfigError(f"unsupported config value type {type(v).__name__}")


def dumps_toml(table: dict) -> str:
    """Serialize a two-level dict as TOML (sorted keys, deterministic)."""
    buf = io.StringIO()
    scalars = {k: v for k, v in table.items() if not isinstance(v, dict)}
    subtables = {k: v for k, v in table.items() if isinstance(v, dict)}
    for key in sorted(scalars):
        buf.write(f"{key} = {_fmt_value(scalars[key])}\n")
    for name in sorted(subtables):
        buf.write(f"\n[{name}]\n")
        for key in sorted(subtables[name]):
            v = subtables[name][key]
            if isinstance(v, dict):
                raise ConfigError(f"{name}.{key}: tables nested deeper than one level")
            buf.write(f"{key} = {_fmt_value(v)}\n")
    return buf.getvalue()


_CIRCUIT_DEFAULTS = {
    "omega_a": 1.1e9,
    "omega_b": 9.2e9,
    "omega_dc": 7.0e9,
    "omega_d": 9.2e9,
    "omega_L": 7.0e9,
    "phi_zpf_a": 0.24,
    "phi_zpf_b": 0.29,
    "E_J": 2.3e9,
    "kappa_b": 20e6,
    "eps_d": 0.0,
    "n_photons": -1.0,  # >= 0 sets eps_d for |alpha_ss|^2 = n_photons
    "R0": 0.0,
    "C0": 0.0,
    "eps_L": 0.0,
    "matched": True,
}

_NOISE_DEFAULTS = {
    "kind": "none",
    "sigma": 0.0,  # Hz
    "hold_dt": DEFAULT_HOLD_DT,
    "offset": 0.0,  # Hz
}

_SOLVER_DEFAULTS = {
    "dt": 0.5e-12,
    "out_dt": 1e-10,
    "guard": 1e3,
    "ramp_time": 0.0,
}


def _merged(defaults: dict, given: dict, table: str) -> dict:
    out = dict(defaults)
    for key, val in given.items():
        if key not in defaults:
            raise ConfigError(f"unknown field {table}.{key}")
        if isinstance(defaults[key], bool) != isinstance(val, bool):
            raise ConfigError(f"{table}.{key}: expected {type(defaults[key]).__name__}")
        if isinstance(defaults[key], float) and isinstance(val, int) and not isinstance(val, bool):
            val = float(val)
        if not isinstance(val, type(defaults[key])) and not (
            key == "eps_d" and isinstance(val, list)
        ):
            raise ConfigError(f"{table}.{key}: expected {type(defaults[key]).__name__}")
        out[key] = val
    return out


@dataclass(frozen=True)
class ExperimentConfig:
    """One experiment: kind, circuit, noise, solver settings and extras.

    ``table`` is the canonical (lab-unit) representation; accessors convert
    to internal angular units on demand.
    """

    table: dict = field(repr=False)

    @property
    def kind(self) -> str:
        return self.table["kind"]

    @property
    def seed(self) -> int:
        return self.table["seed"]

    @property
    def name(self) -> str:
        return self.table["name"]

    def extra(self) -> dict:
        """The experiment-specific sub-table (may be empty)."""
        return dict(self.table.get(self.kind, {}))

    def circuit(self) -> CircuitParams:
        c = _merged(_CIRCUIT_DEFAULTS, self.table.get("circuit", {}), "circuit")
        eps_d = c["eps_d"]
        if isinstance(eps_d, list):
            if len(eps_d) != 2:
                raise ConfigError("circuit.eps_d: expected [re, im]")
            eps_d = complex(float(eps_d[0]), float(eps_d[1]))
        eps_d = complex(eps_d) * TWO_PI
        try:
            params = CircuitParams(
                omega_a=TWO_PI * c["omega_a"],
                omega_b=TWO_PI * c["omega_b"],
                omega_dc=TWO_PI * c["omega_dc"],
                omega_d=TWO_PI * c["omega_d"],
                omega_L=TWO_PI * c["omega_L"],
                phi_zpf_a=c["phi_zpf_a"],
                phi_zpf_b=c["phi_zpf_b"],
                E_J=TWO_PI * c["E_J"],
                kappa_b=TWO_PI * c["kappa_b"],
                eps_d=eps_d,
                R0=c["R0"],
                C0=c["C0"],
                eps_L=c["eps_L"],
                matched=c["matched"],
            )
            if c["n_photons"] >= 0.0:
                from .core import derive

                g2 = derive(params).g2
                if g2 == 0:
                    raise ConfigError("circuit.n_photons: g2 = 0, drive undefined")
                params = params.replace(eps_d=c["n_photons"] * abs(g2))
        except ParameterError as err:
            raise ConfigError(f"circuit: {err}") from err
        return params

    def noise_model(self) -> NoiseModel:
        n = _merged(_NOISE_DEFAULTS, self.table.get("noise", {}), "noise")
        try:
            return NoiseModel(
                kind=n["kind"],
                sigma=TWO_PI * n["sigma"],
                hold_dt=n["hold_dt"],
                seed=self.seed,
                offset=TWO_PI * n["offset"],
            )
        except ValueError as err:
            raise ConfigError(f"noise: {err}") from err

    def integrator(self) -> IntegratorConfig:
        s = _merged(_SOLVER_DEFAULTS, self.table.get("solver", {}), "solver")
        try:
            return IntegratorConfig(
                dt=s["dt"], out_dt=s["out_dt"], guard=s["guard"], ramp_time=s["ramp_time"]
            )
        except ValueError as err:
            raise ConfigError(f"solver: {err}") from err

    def serialize(self) -> str:
        return dumps_toml(self.table)


def _validate_table(table: dict) -> dict:
    out = dict(table)
    if "kind" not in out:
        raise ConfigError("missing required field: kind")
    if out["kind"] not in EXPERIMENT_KINDS:
        raise ConfigError(
            f"kind: {out['kind']!r} is not one of {', '.join(EXPERIMENT_KINDS)}"
        )
    out.setdefault("schema_version", CONFIG_SCHEMA_VERSION)
    if out["schema_version"] != CONFIG_SCHEMA_VERSION:
        raise ConfigError(
            f"schema_version: {out['schema_version']} unsupported "
            f"(expected {CONFIG_SCHEMA_VERSION})"
        )
    out.setdefault("seed", 0)
    if not isinstance(out["seed"], int) or isinstance(out["seed"], bool):
        raise ConfigError("seed: expected an integer")
    out.setdefault("name", out["kind"])
    known = {"kind", "seed", "name", "schema_version", "circuit", "noise", "solver"}
    known.update(EXPERIMENT_KINDS)
    for key in out:
        if key not in known:
            raise ConfigError(f"unknown top-level field {key}")
    return out


def from_table(table: dict) -> ExperimentConfig:
    cfg = ExperimentConfig(_validate_table(table))
    # force eager validation of the standard sections
    cfg.circuit()
    cfg.noise_model()
    cfg.integrator()
    return cfg


def parse(text: str) -> ExperimentConfig:
    try:
        table = tomli.loads(text)
    except tomli.TOMLDecodeError as err:
        raise ConfigError(f"TOML parse error: {err}") from err
    return from_table(table)


def load(path) -> ExperimentConfig:
    try:
        fh = open(path, "rb")
    except OSError as err:
        raise ConfigError(f"cannot read config: {err}") from err
    with fh:
        try:
            table = tomli.load(fh)
        except tomli.TOMLDecodeError as err:
            raise ConfigError(f"{path}: TOML parse error: {err}") from err
    return from_table(table)


def set_override(table: dict, dotted: str, raw_value: str) -> None:
    """Apply a --set table.key=value override (value parsed as TOML)."""
    dotted = dotted.strip()
    raw_value = raw_value.strip()
    try:
        parsed = tomli.loads(f"v = {raw_value}")["v"]
    except tomli.TOMLDecodeError:
        parsed = raw_value  # bare string
    parts = dotted.split(".")
    if len(parts) == 1:
        table[parts[0]] = parsed
    elif len(parts) == 2:
        table.setdefault(parts[0], {})[parts[1]] = parsed
    else:
        raise ConfigError(f"--set {dotted}: at most one dot supported")
