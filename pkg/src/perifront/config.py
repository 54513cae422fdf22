"""Scenario files: the reproducibility unit of the laboratory.

A scenario bundles the coefficient fields, competition parameters, initial
shapes, grid resolution and horizon for one run.  Files are TOML (or JSON,
chosen by extension); every physical quantity has an explicit key and the
parse -> serialize -> parse round trip is the identity on the resolved dict.
"""

from __future__ import annotations

import json
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .errors import ConfigError
from .fields import (BoundaryOp, CompetitionParams, InitialData, PeriodicField,
                     bump_profile, constant_field, cosine_profile, decay_field,
                     time_modulated_field)
from .freeboundary import FrontTrajectory, Resolution, simulate_coupled, \
    simulate_single


def field_from_spec(spec: dict) -> PeriodicField:
    """Rebuild a preset coefficient field from its serialized spec."""
    kind = spec.get("type")
    if kind == "constant":
        return constant_field(float(spec["value"]),
                              float(spec.get("period", 1.0)))
    if kind == "time-sin":
        return time_modulated_field(float(spec["base"]),
                                    float(spec["amplitude"]),
                                    float(spec.get("period", 1.0)))
    if kind == "decay":
        return decay_field(float(spec["kappa"]), float(spec["coef"]),
                           float(spec.get("power", 1.0)),
                           float(spec.get("amplitude", 0.0)),
                           float(spec.get("period", 1.0)))
    raise ConfigError(f"unknown field type {kind!r}")


def _bc_from_name(name: str) -> BoundaryOp:
    if name == "dirichlet":
        return BoundaryOp.dirichlet()
    if name == "neumann":
        return BoundaryOp.neumann()
    raise ConfigError(f"unknown boundary condition {name!r}")


def _bc_name(bc: BoundaryOp) -> str:
    return "dirichlet" if bc.is_dirichlet else "neumann"


@dataclass(frozen=True)
class Scenario:
    name: str
    problem: str                # "coupled" | "single"
    field_a: dict
    field_b: dict
    params: CompetitionParams
    init: dict                  # {"shape": ..., "height": ..., "v_level": ...}
    resolution: Resolution
    t_end: float
    L: Optional[float] = None   # half-line truncation, single problem only

    def __post_init__(self):
        if self.problem not in ("coupled", "single"):
            raise ConfigError("problem must be 'coupled' or 'single'")
        if self.t_end <= 0:
            raise ConfigError("t_end must be positive")
        if self.problem == "single" and (self.L is None or self.L <= 0):
            raise ConfigError("the single-front problem needs a positive L")
        ta = self.field_a.get("period", 1.0)
        tb = self.field_b.get("period", 1.0)
        if abs(ta - tb) > 1e-12:
            raise ConfigError("fields a and b must share the same period")

    def make_fields(self) -> tuple[PeriodicField, PeriodicField]:
        return field_from_spec(self.field_a), field_from_spec(self.field_b)

    def make_init(self, s0: Optional[float] = None) -> InitialData:
        shape = self.init.get("shape", "bump")
        height = float(self.init.get("height", 0.5))
        s0 = s0 if s0 is not None else self.params.s0
        maker = {"bump": bump_profile, "cosine": cosine_profile}.get(shape)
        if maker is None:
            raise ConfigError(f"unknown initial shape {shape!r}")
        u0 = maker(height, s0)
        if self.problem == "single":
            level = float(self.init.get("v_level", 1.0))
            if level <= 0:
                raise ConfigError("v_level must be positive")
            v0 = lambda x: np.full_like(np.asarray(x, dtype=float), level)
        else:
            v_shape = self.init.get("v_shape", shape)
            v_height = float(self.init.get("v_height", height))
            v_maker = {"bump": bump_profile, "cosine": cosine_profile}.get(v_shape)
            if v_maker is None:
                raise ConfigError(f"unknown initial shape {v_shape!r}")
            v0 = v_maker(v_height, s0)
        return InitialData(u0=u0, v0=v0, spec=dict(self.init))

    def run(self, mu: Optional[float] = None, t_end: Optional[float] = None,
            s0: Optional[float] = None,
            stop_when_s: Optional[float] = None) -> FrontTrajectory:
        """Simulate the scenario, optionally overriding mu, s0 or the horizon."""
        params = self.params
        if mu is not None or s0 is not None:
            d = params.to_dict()
            d["bc1"], d["bc2"] = params.bc1, params.bc2
            if mu is not None:
                d["mu"] = mu
            if s0 is not None:
                d["s0"] = s0
            params = CompetitionParams(**d)
        a, b = self.make_fields()
        init = self.make_init(s0=params.s0)
        horizon = t_end if t_end is not None else self.t_end
        if self.problem == "coupled":
            return simulate_coupled(a, b, params, init, horizon,
                                    self.resolution, stop_when_s=stop_when_s)
        return simulate_single(a, b, params, init, horizon, self.L,
                               self.resolution, stop_when_s=stop_when_s)

    def to_dict(self) -> dict:
        d = {
            "name": self.name,
            "problem": self.problem,
            "t_end": self.t_end,
            "field_a": dict(self.field_a),
            "field_b": dict(self.field_b),
            "params": {
                **{k: getattr(self.params, k) for k in
                   ("d1", "d2", "k", "h", "mu", "rho", "s0")},
                "bc1": _bc_name(self.params.bc1),
                "bc2": _bc_name(self.params.bc2),
            },
            "init": dict(self.init),
            "resolution": {
                "nx": self.resolution.nx,
                "nt": self.resolution.nt,
                "snapshot_every": self.resolution.snapshot_every,
            },
        }
        if self.resolution.nx_v is not None:
            d["resolution"]["nx_v"] = self.resolution.nx_v
        if self.L is not None:
            d["L"] = self.L
        return d


def scenario_from_dict(data: dict) -> Scenario:
    try:
        p = data["params"]
        params = CompetitionParams(
            d1=float(p["d1"]), d2=float(p["d2"]), k=float(p["k"]),
            h=float(p["h"]), mu=float(p["mu"]), rho=float(p.get("rho", 0.0)),
            s0=float(p["s0"]),
            bc1=_bc_from_name(p.get("bc1", "dirichlet")),
            bc2=_bc_from_name(p.get("bc2", "dirichlet")))
        r = data.get("resolution", {})
        resolution = Resolution(
            nx=int(r.get("nx", 128)), nt=int(r.get("nt", 64)),
            snapshot_every=int(r.get("snapshot_every", 0)),
            nx_v=int(r["nx_v"]) if "nx_v" in r else None)
        return Scenario(
            name=str(data.get("name", "unnamed")),
            problem=str(data["problem"]),
            field_a=dict(data["field_a"]), field_b=dict(data["field_b"]),
            params=params, init=dict(data.get("init", {})),
            resolution=resolution, t_end=float(data["t_end"]),
            L=float(data["L"]) if "L" in data else None)
    except KeyError as exc:
        raise ConfigError(f"scenario is missing required key {exc}") from exc
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"malformed scenario value: {exc}") from exc


def load_scenario(path) -> Scenario:
    path = Path(path)
    raw = path.read_bytes()
    if path.suffix == ".json":
        data = json.loads(raw.decode())
    elif path.suffix == ".toml":
        try:
            data = tomllib.loads(raw.decode())
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError(f"invalid TOML in {path}: {exc}") from exc
    else:
        raise ConfigError(f"unsupported config extension {path.suffix!r}")
    return scenario_from_dict(data)


def save_scenario(sc: Scenario, path) -> None:
    path = Path(path)
    if path.suffix == ".json":
        path.write_text(json.dumps(sc.to_dict(), indent=2, sort_keys=True) + "\n")
    elif path.suffix == ".toml":
        path.write_text(_to_toml(sc.to_dict()))
    else:
        raise ConfigError(f"unsupported config extension {path.suffix!r}")


def _toml_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (int, float)):
        return repr(v)
    if isinstance(v, str):
        return json.dumps(v)
    if isinstance(v, list):
        return "[" + ", ".join(_toml_value(x) for x in v) + "]"
    raise ConfigError(f"cannot serialize {type(v).__name__} to TOML")


def _to_toml(data: dict) -> str:
    """Minimal TOML writer for the flat-tables shape scenarios use."""
    lines = []
    tables = []
    for key in sorted(data):
        val = data[key]
        if isinstance(val, dict):
            tables.append((key, val))
        else:
            lines.append(f"{key} = {_toml_value(val)}")
    for key, val in tables:
        lines.append("")
        lines.append(f"[{key}]")
        for sub in sorted(val):
            lines.append(f"{sub} = {_toml_value(val[sub])}")
    return "\n".join(lines) + "\n"
