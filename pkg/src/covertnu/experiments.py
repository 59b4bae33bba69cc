"""Parameter handling, sweeps and figure presets behind the command line.

A run is described by a flat mapping of named parameters (see
:data:`PARAMS`).  Noise levels are given in dB, as on the axes of the
usual rate-versus-uncertainty plots; linear values are derived here.
"""

from __future__ import annotations

import csv
import datetime as _dt
import json
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from . import __version__, metrics, montecarlo, thresholds
from .noise import GaussianApprox, LogNormalModel, LogUniformModel
from .special import DomainError, db_to_linear

OUTPUT_DIR_ENV = "COVERTNU_OUTPUT_DIR"

# name -> (type, default)
PARAMS: dict[str, tuple[type, object]] = {
    "model": (str, "logu"),
    "sigma_n_db": (float, 0.0),
    "rho_db": (float, None),
    "sigma_delta_db": (float, None),
    "p_w": (float, None),
    "gamma": (float, None),
    "epsilon": (float, None),
    "method": (str, "closed"),
    "rb": (float, 1.0),
    "rw": (float, 1.0),
    "alpha": (float, 2.0),
    "sigma_b_db": (float, None),
    "seed": (int, 0),
    "trials": (int, 100_000),
    "workers": (int, 1),
    "sigma_w_sq": (float, None),
    "n_samples": (int, None),
}

MODELS = ("logu", "logn", "gauss")
METHODS = ("closed", "oracle", "mc")
AXES = ("rho_db", "sigma_delta_db", "epsilon", "p_w")
OUTPUTS = ("xi_avg", "p_out", "threshold_approx", "threshold_oracle",
           "threshold_mc", "rate", "rate_worst_case", "gamma_star")
CI_OUTPUTS = ("threshold_mc",)
SIG_DIGITS = 12


class ParameterError(DomainError):
    """A parameter is missing, unknown, or of the wrong type."""


def coerce(name: str, value):
    if name not in PARAMS:
        raise ParameterError(f"unknown parameter {name!r}; valid keys: {', '.join(PARAMS)}")
    typ = PARAMS[name][0]
    if value is None:
        return None
    if typ is float:
        if isinstance(value, bool) or not isinstance(value, (int, float, str)):
            raise ParameterError(f"{name} expects a number, got {value!r}")
        try:
            return float(value)
        except ValueError:
            raise ParameterError(f"{name} expects a number, got {value!r}") from None
    if typ is int:
        if isinstance(value, float) and value.is_integer():
            value = int(value)
        if isinstance(value, bool) or not isinstance(value, (int, str)):
            raise ParameterError(f"{name} expects an integer, got {value!r}")
        try:
            return int(value)
        except ValueError:
            raise ParameterError(f"{name} expects an integer, got {value!r}") from None
    if not isinstance(value, str):
        raise ParameterError(f"{name} expects a string, got {value!r}")
    return value


def resolve(params: dict) -> dict:
    """Fill defaults and coerce types; rejects unknown keys."""
    out = {name: default for name, (_, default) in PARAMS.items()}
    for name, value in params.items():
        out[name] = coerce(name, value)
    if out["model"] not in MODELS:
        raise ParameterError(f"model must be one of {MODELS}, got {out['model']!r}")
    if out["method"] not in METHODS:
        raise ParameterError(f"method must be one of {METHODS}, got {out['method']!r}")
    return out


def require(params: dict, *names: str):
    for name in names:
        if params.get(name) is None:
            raise ParameterError(f"missing required parameter {name!r}")


def build_model(params: dict):
    """Noise model for the parameters, or ``None`` at zero uncertainty."""
    kind = params["model"]
    if kind == "logu":
        require(params, "rho_db")
        if params["rho_db"] < 0:
            raise ParameterError("rho_db must be nonnegative")
        if params["rho_db"] == 0:
            return None
        return LogUniformModel.from_db(params["sigma_n_db"], params["rho_db"])
    require(params, "sigma_delta_db")
    if params["sigma_delta_db"] < 0:
        raise ParameterError("sigma_delta_db must be nonnegative")
    if params["sigma_delta_db"] == 0:
        return None
    base = LogNormalModel(params["sigma_n_db"], params["sigma_delta_db"])
    return GaussianApprox(base) if kind == "gauss" else base


def exact_model(model):
    return model.base if isinstance(model, GaussianApprox) else model


def build_geometry(params: dict) -> thresholds.LinkGeometry:
    sigma_b_db = params["sigma_b_db"]
    if sigma_b_db is None:
        sigma_b_db = params["sigma_n_db"]
    return thresholds.LinkGeometry.from_db(params["rb"], params["rw"], params["alpha"], sigma_b_db)


def mc_config(params: dict) -> montecarlo.MonteCarloConfig:
    return montecarlo.MonteCarloConfig(seed=params["seed"], trials=params["trials"],
                                       workers=params["workers"])


def threshold(params: dict, method: Optional[str] = None) -> float:
    """Power threshold at the warden by the requested method."""
    require(params, "epsilon")
    method = method or params["method"]
    eps = params["epsilon"]
    thresholds.CovertnessRequirement(eps)
    model = build_model(params)
    if model is None:
        return 0.0
    if method == "closed":
        return thresholds.covert_threshold(model, eps)
    if method == "oracle":
        return thresholds.p_threshold_oracle(model, eps)
    if isinstance(model, GaussianApprox):
        raise ParameterError("method 'mc' needs a physical prior (logu or logn), not the gauss surrogate")
    return montecarlo.mc_threshold(model, eps, mc_config(params))


def rate(params: dict) -> float:
    geometry = build_geometry(params)
    return thresholds.covert_rate(threshold(params, "closed"), geometry)


def report(params: dict) -> dict:
    """Covertness figures for one received power, optionally at a fixed gamma."""
    require(params, "p_w")
    p_w = params["p_w"]
    if p_w < 0:
        raise ParameterError("p_w must be nonnegative")
    model = build_model(params)
    if model is None:
        xi = 1.0 if p_w == 0 else 0.0
        gamma = params["gamma"] if params["gamma"] is not None else db_to_linear(params["sigma_n_db"]) + p_w
        return {"gamma_star": gamma, "xi_avg": xi, "p_out": 1.0 - xi,
                "xi_up": xi, "method": metrics.Method.CLOSED_FORM.value}
    if params["gamma"] is None:
        return metrics.xi_avg(model, p_w).to_dict()
    xi = metrics.xi_avg_at_gamma(model, p_w, params["gamma"])
    return {"gamma_star": params["gamma"], "xi_avg": xi, "p_out": 1.0 - xi,
            "xi_up": metrics.xi_up(model, p_w), "method": metrics.Method.CLOSED_FORM.value}


def evaluate(outputs, params: dict) -> dict:
    """Named outputs for one parameter point; CI half-widths under ``<name>_ci``."""
    row = {}
    rep = None
    for name in outputs:
        if name in ("xi_avg", "p_out", "gamma_star"):
            rep = rep or report(params)
            row[name] = rep[name]
        elif name == "threshold_approx":
            row[name] = threshold(params, "closed")
        elif name == "threshold_oracle":
            row[name] = threshold(params, "oracle")
        elif name == "threshold_mc":
            require(params, "epsilon")
            model = build_model(params)
            if model is None:
                row[name], row[name + "_ci"] = 0.0, 0.0
            else:
                est = montecarlo.mc_threshold_ci(exact_model(model), params["epsilon"],
                                                 mc_config(params))
                row[name], row[name + "_ci"] = est.estimate, est.half_width
        elif name == "rate":
            row[name] = rate(params)
        elif name == "rate_worst_case":
            model = build_model(params)
            if params["model"] != "logu":
                raise ParameterError("rate_worst_case is only defined for the bounded (logu) model")
            bound = 0.0 if model is None else metrics.worst_case_power_bound(model)
            row[name] = thresholds.covert_rate(bound, build_geometry(params))
        else:
            raise ParameterError(f"unknown output {name!r}; valid outputs: {', '.join(OUTPUTS)}")
    return row


@dataclass
class SweepSpec:
    axis: str
    start: float
    stop: float
    points: int
    outputs: tuple = ("rate",)
    fixed: dict = field(default_factory=dict)
    name: str = "sweep"

    def __post_init__(self):
        self.outputs = tuple(self.outputs)
        self.start, self.stop, self.points = float(self.start), float(self.stop), int(self.points)
        if self.axis not in AXES:
            raise ParameterError(f"axis must be one of {AXES}, got {self.axis!r}")
        if not self.start < self.stop:
            raise ParameterError("sweep needs start < stop")
        if self.points < 2:
            raise ParameterError("sweep needs at least 2 points")
        if self.axis in self.fixed:
            raise ParameterError(f"axis {self.axis!r} cannot also be a fixed parameter")
        if not self.outputs:
            raise ParameterError("sweep needs at least one output")
        for o in self.outputs:
            if o not in OUTPUTS:
                raise ParameterError(f"unknown output {o!r}; valid outputs: {', '.join(OUTPUTS)}")
        self.fixed = {k: coerce(k, v) for k, v in self.fixed.items()}

    def grid(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.points)

    def columns(self) -> list[str]:
        cols = [self.axis]
        for o in self.outputs:
            cols.append(o)
            if o in CI_OUTPUTS:
                cols.append(o + "_ci")
        return cols

    def to_dict(self) -> dict:
        return {"name": self.name, "axis": self.axis, "start": self.start,
                "stop": self.stop, "points": self.points,
                "outputs": list(self.outputs), "fixed": dict(self.fixed)}


@dataclass
class SweepResult:
    spec: SweepSpec
    rows: list
    provenance: dict

    def to_json(self) -> dict:
        return {"spec": self.spec.to_dict(), "columns": self.spec.columns(),
                "rows": self.rows, "provenance": self.provenance}


def _now() -> str:
    return _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")


def run_sweep(spec: SweepSpec) -> SweepResult:
    started = _now()
    base = dict(spec.fixed)
    rows = []
    for value in spec.grid():
        params = resolve({**base, spec.axis: float(value)})
        row = {spec.axis: float(value)}
        row.update(evaluate(spec.outputs, params))
        rows.append(row)
    resolved = resolve(base)
    provenance = {"tool": "covertnu", "version": __version__,
                  "seed": resolved["seed"], "trials": resolved["trials"],
                  "started": started, "finished": _now()}
    return SweepResult(spec, rows, provenance)


def fmt(value) -> str:
    return format(float(value), f".{SIG_DIGITS}g")


def write_csv(result: SweepResult, path) -> None:
    cols = result.spec.columns()
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(cols)
        for row in result.rows:
            writer.writerow([fmt(row[c]) for c in cols])


def write_json(result: SweepResult, path) -> None:
    with open(path, "w") as fh:
        json.dump(result.to_json(), fh, indent=2)
        fh.write("\n")


def write_gnuplot(result: SweepResult, csv_path, path) -> None:
    cols = result.spec.columns()
    series = [c for c in cols[1:] if not c.endswith("_ci")]
    plots = ", ".join(
        f"'{Path(csv_path).name}' using 1:{cols.index(c) + 1} with linespoints title '{c}'"
        for c in series)
    with open(path, "w") as fh:
        fh.write("set datafile separator ','\nset key autotitle columnhead\n")
        fh.write(f"set xlabel '{cols[0]}'\nset terminal pngcairo\n")
        fh.write(f"set output '{Path(path).with_suffix('.png').name}'\n")
        fh.write(f"plot {plots}\n")


def default_output_dir() -> Path:
    return Path(os.environ.get(OUTPUT_DIR_ENV, "."))


def save(result: SweepResult, out_dir=None, gnuplot: bool = False) -> dict:
    out = Path(out_dir) if out_dir is not None else default_output_dir()
    out.mkdir(parents=True, exist_ok=True)
    csv_path = out / f"{result.spec.name}.csv"
    json_path = out / f"{result.spec.name}.json"
    write_csv(result, csv_path)
    write_json(result, json_path)
    paths = {"csv": str(csv_path), "json": str(json_path)}
    if gnuplot:
        gp = out / f"{result.spec.name}.gp"
        write_gnuplot(result, csv_path, gp)
        paths["gnuplot"] = str(gp)
    return paths


FIG2_EPSILONS = (0.1, 0.3, 0.5)
FIG2A_STOP_DB = 4.0
NOMINAL_DB = -100.0


def preset(figure: str, epsilons=FIG2_EPSILONS) -> list[SweepSpec]:
    """Sweep specs regenerating the standard figures.

    ``fig1``: surrogate vs numeric vs Monte Carlo thresholds over epsilon for
    a log-normal prior at -100 dB nominal, spreads 0.5 and 2 dB.
    ``fig2a``/``fig2b``: covert rate over the uncertainty level for the
    bounded/unbounded prior, one run per epsilon, with ``r_b = r_w`` and
    Bob's noise equal to the warden's nominal noise.
    """
    if figure == "fig1":
        return [SweepSpec(axis="epsilon", start=0.05, stop=0.9, points=18,
                          outputs=("threshold_approx", "threshold_oracle", "threshold_mc"),
                          fixed={"model": "logn", "sigma_n_db": NOMINAL_DB,
                                 "sigma_delta_db": sd, "seed": 1, "trials": 200_000},
                          name=f"fig1_sd{sd:g}")
                for sd in (0.5, 2.0)]
    link = {"sigma_n_db": NOMINAL_DB, "sigma_b_db": NOMINAL_DB, "rb": 1.0, "rw": 1.0}
    if figure == "fig2a":
        # stays below the rate peak of the smallest default epsilon (4.85 dB at 0.1)
        return [SweepSpec(axis="rho_db", start=0.0, stop=FIG2A_STOP_DB, points=21,
                          outputs=("rate", "rate_worst_case"),
                          fixed={"model": "logu", "epsilon": eps, **link},
                          name=f"fig2a_eps{eps:g}")
                for eps in epsilons]
    if figure == "fig2b":
        return [SweepSpec(axis="sigma_delta_db", start=0.0, stop=3.0, points=31,
                          outputs=("rate",),
                          fixed={"model": "logn", "epsilon": eps, **link},
                          name=f"fig2b_eps{eps:g}")
                for eps in epsilons]
    raise ParameterError(f"unknown figure {figure!r}; choose fig1, fig2a or fig2b")
