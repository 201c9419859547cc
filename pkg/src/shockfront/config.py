"""Run configuration: TOML or JSON files with validated sections."""

from __future__ import annotations

import json
import os
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .errors import ParseError, ValidationError
from .model import (
    MetricModel,
    calibrated_shock_model,
    normalize_time_component,
    quadratic_model,
)
from .solver2d import DataSpec, Grid2D

try:
    import tomllib as _toml
except ModuleNotFoundError:         # Python < 3.11
    import tomli as _toml


@dataclass
class RunConfig:
    """Everything a run needs, with defaults filled and values validated."""

    model: dict = field(default_factory=dict)
    grid: dict = field(default_factory=dict)
    run: dict = field(default_factory=dict)
    data: dict = field(default_factory=dict)
    euler: dict = field(default_factory=dict)
    output: dict = field(default_factory=dict)
    diagnostics: dict = field(default_factory=dict)
    seed: int = 0

    def resolved(self) -> dict:
        return asdict(self)


_MODEL_DEFAULTS = dict(kind=None, strength=1.0, psi_max=0.6, A=None)
_GRID_DEFAULTS = dict(nx=2048, ny=8, x_min=None, x_max=None)
_RUN_DEFAULTS = dict(t_max=2.5, cfl=0.4, mu_stop=0.05, dissipation=0.1,
                     mu_floor=1e-4)
_DATA_DEFAULTS = dict(kind="simple_wave", profile="plateau",
                      amplitude=0.085, center=0.5, width=0.185,
                      slope=1.0, u_up=0.05, u_down=0.5, plateau=0.25,
                      edge=0.1, eps0=0.0, theta_amp=0.25, pi_amp=1.0,
                      ky=1, pert_center=0.5, pert_width=0.3, injection=0.0)
_EULER_DEFAULTS = dict(s=1.0, k=1.0, eps0=0.01, delta0=1.0,
                       bump=dict(center=0.5, width=0.05, profile="plateau"),
                       nx=8192, t_max=8.0, mu_stop=0.05)
_OUTPUT_DEFAULTS = dict(dir="out", stride=0)
_DIAG_DEFAULTS = dict(eps0=None, tol_lifespan=0.1, c_prop=5.0,
                      regularity_limit=3.0, n_u_curves=33, n_th_curves=8,
                      checks=["lifespan", "rate", "regularity", "smallness",
                              "trigger"])


def _merge(defaults: dict, given: dict, section: str) -> dict:
    out = dict(defaults)
    for key, val in (given or {}).items():
        if key not in defaults:
            raise ValidationError(f"{section}.{key}: unknown key")
        if isinstance(defaults[key], dict) and isinstance(val, dict):
            out[key] = _merge(defaults[key], val, f"{section}.{key}")
        else:
            out[key] = val
    return out


def parse_config(path) -> RunConfig:
    """Load and validate a TOML or JSON config file."""
    path = Path(path)
    if not path.exists():
        raise ParseError(f"config file not found: {path}")
    text = path.read_bytes()
    try:
        if path.suffix.lower() == ".json":
            raw = json.loads(text)
        else:
            raw = _toml.loads(text.decode())
    except (json.JSONDecodeError, _toml.TOMLDecodeError) as exc:
        raise ParseError(f"{path}: {exc}") from exc
    return validate_config(raw)


def validate_config(raw: dict) -> RunConfig:
    for key in raw:
        if key not in ("model", "grid", "run", "data", "euler", "output",
                       "diagnostics", "seed"):
            raise ValidationError(f"{key}: unknown section")
    cfg = RunConfig(
        model=_merge(_MODEL_DEFAULTS, raw.get("model", {}), "model"),
        grid=_merge(_GRID_DEFAULTS, raw.get("grid", {}), "grid"),
        run=_merge(_RUN_DEFAULTS, raw.get("run", {}), "run"),
        data=_merge(_DATA_DEFAULTS, raw.get("data", {}), "data"),
        euler=_merge(_EULER_DEFAULTS, raw.get("euler", {}), "euler"),
        output=_merge(_OUTPUT_DEFAULTS, raw.get("output", {}), "output"),
        diagnostics=_merge(_DIAG_DEFAULTS, raw.get("diagnostics", {}),
                           "diagnostics"),
        seed=int(raw.get("seed", 0)),
    )
    if cfg.model["kind"] is None:
        raise ValidationError("model.kind: required")
    if cfg.model["kind"] not in ("calibrated", "quadratic", "linear"):
        raise ValidationError("model.kind: expected calibrated | quadratic | linear")
    if cfg.model["kind"] == "quadratic" and cfg.model["A"] is None:
        raise ValidationError("model.A: required for quadratic models "
                              "(6 reals, upper triangle row-major)")
    if not 0.0 < cfg.run["cfl"] <= 0.9:
        raise ValidationError("run.cfl: expected in (0, 0.9]")
    if cfg.run["t_max"] <= 0.0:
        raise ValidationError("run.t_max: must be positive")
    t_max = cfg.run["t_max"]
    if cfg.grid["x_min"] is None:
        cfg.grid["x_min"] = -t_max - 0.1
    if cfg.grid["x_max"] is None:
        cfg.grid["x_max"] = 1.0 + t_max + 0.1
    if cfg.grid["x_max"] - cfg.grid["x_min"] < 1.0 + 2.0 * t_max:
        raise ValidationError(
            "grid.x_max: grid.x_max - grid.x_min must be >= 1 + 2*run.t_max "
            "(domain contains the support cone)")
    if cfg.grid["ny"] < 8:
        raise ValidationError("grid.ny: need ny >= 8")
    if cfg.diagnostics["eps0"] is None:
        cfg.diagnostics["eps0"] = cfg.data["eps0"]
    return cfg


def build_model(cfg: RunConfig) -> MetricModel:
    m = cfg.model
    if m["kind"] == "calibrated":
        return calibrated_shock_model(m["strength"], psi_max=m["psi_max"])
    if m["kind"] == "linear":
        return quadratic_model(np.zeros((3, 3)), psi_max=m["psi_max"])
    a = np.asarray(m["A"], dtype=float)
    if a.size != 6:
        raise ValidationError("model.A: expected 6 reals (upper triangle row-major)")
    A = np.zeros((3, 3))
    A[0, 0], A[0, 1], A[0, 2] = a[0], a[1], a[2]
    A[1, 1], A[1, 2], A[2, 2] = a[3], a[4], a[5]
    A = A + np.triu(A, 1).T
    return normalize_time_component(quadratic_model(A, psi_max=m["psi_max"]))


def build_grid(cfg: RunConfig) -> Grid2D:
    g = cfg.grid
    return Grid2D(nx=int(g["nx"]), ny=int(g["ny"]),
                  x_min=float(g["x_min"]), x_max=float(g["x_max"]))


def build_data_spec(cfg: RunConfig) -> DataSpec:
    d = cfg.data
    return DataSpec(kind=d["kind"], profile=d["profile"],
                    amplitude=d["amplitude"], center=d["center"],
                    width=d["width"], slope=d["slope"], u_up=d["u_up"],
                    u_down=d["u_down"], plateau=d["plateau"], edge=d["edge"],
                    eps0=d["eps0"], theta_amp=d["theta_amp"],
                    pi_amp=d["pi_amp"], ky=int(d["ky"]),
                    pert_center=d["pert_center"], pert_width=d["pert_width"],
                    injection=d["injection"])


def output_dir(cfg: RunConfig, override=None) -> Path:
    if override:
        return Path(override)
    env = os.environ.get("SHOCK_OUT")
    if env:
        return Path(env)
    return Path(cfg.output["dir"])
