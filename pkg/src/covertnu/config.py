"""TOML experiment files.

A file names its ``command`` and carries one section of values::

    command = "threshold"

    [params]
    model = "logn"
    sigma_n_db = -100.0
    sigma_delta_db = 0.5
    epsilon = 0.2

Sweeps use a ``[sweep]`` section for the grid and a ``[fixed]`` section for
the remaining parameters.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass

import tomli_w

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .experiments import PARAMS, ParameterError, SweepSpec, coerce

COMMANDS = ("metrics", "threshold", "rate", "simulate", "sweep")
REQUIRED = {
    "metrics": ("model", "p_w"),
    "threshold": ("model", "epsilon"),
    "rate": ("model", "epsilon"),
    "simulate": ("sigma_w_sq", "p_w", "n_samples", "gamma"),
}
SWEEP_KEYS = ("name", "axis", "start", "stop", "points", "outputs")
SWEEP_REQUIRED = ("axis", "start", "stop", "points")


class ConfigError(ParameterError):
    pass


@dataclass
class CommandConfig:
    command: str
    params: dict


def _unknown(keys, valid, where):
    extra = sorted(set(keys) - set(valid))
    if extra:
        raise ConfigError(
            f"unknown key(s) {', '.join(map(repr, extra))} in {where}; "
            f"valid keys: {', '.join(valid)}")


def parse_config(text: str, require: bool = True):
    try:
        doc = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        # the decoder message carries "(at line L, column C)"
        raise ConfigError(f"config parse error: {exc}") from None
    command = doc.get("command")
    if command not in COMMANDS:
        raise ConfigError(f"config needs command = one of {COMMANDS}, got {command!r}")
    if command == "sweep":
        _unknown(doc, ("command", "sweep", "fixed"), "top level")
        grid = doc.get("sweep", {})
        _unknown(grid, SWEEP_KEYS, "[sweep]")
        for key in SWEEP_REQUIRED:
            if key not in grid:
                raise ConfigError(f"missing required key {key!r} in [sweep]")
        fixed = doc.get("fixed", {})
        _unknown(fixed, tuple(PARAMS), "[fixed]")
        return SweepSpec(fixed=fixed, **grid)
    _unknown(doc, ("command", "params"), "top level")
    params = doc.get("params", {})
    _unknown(params, tuple(PARAMS), "[params]")
    params = {k: coerce(k, v) for k, v in params.items()}
    if require:
        check_required(command, params)
    return CommandConfig(command, params)


def check_required(command: str, params: dict) -> None:
    for key in REQUIRED.get(command, ()):
        if params.get(key) is None:
            raise ConfigError(f"missing required key {key!r} for {command} experiment")


def load_config(path, require: bool = True):
    """Read a TOML experiment file into a :class:`SweepSpec` or :class:`CommandConfig`."""
    with open(path, "rb") as fh:
        text = fh.read().decode("utf-8")
    return parse_config(text, require=require)


def dump_config(obj, path) -> None:
    if isinstance(obj, SweepSpec):
        grid = obj.to_dict()
        fixed = {k: v for k, v in grid.pop("fixed").items() if v is not None}
        doc = {"command": "sweep", "sweep": grid, "fixed": fixed}
    else:
        doc = {"command": obj.command,
               "params": {k: v for k, v in obj.params.items() if v is not None}}
    with open(path, "wb") as fh:
        tomli_w.dump(doc, fh)
