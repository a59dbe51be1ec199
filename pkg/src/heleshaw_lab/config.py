"""TOML experiment configuration parsing and validation."""

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import ConfigError, InvalidLawError
from .laws import GrowthLaw, NutrientLaw, max_density
from .meshes import Mesh
from .solver import SimConfig

_SECTIONS = {"model", "mesh", "time", "initial", "diagnostics", "msweep", "sharp", "check"}
_MODEL_KEYS = {"m", "law", "a", "p_M", "knots", "nutrients"}
_NUTRIENT_KEYS = {"c_B", "c1", "c2", "c0"}
_MESH_KEYS = {"geometry", "N", "L", "n_cells"}
_TIME_KEYS = {"T", "cfl_theta", "scheme", "snapshots", "snapshot_count"}
_INITIAL_KEYS = {"kind", "R", "level", "R1", "R2", "q", "c0", "points", "C", "t0"}
_DIAG_KEYS = {"eps_rho", "eps_p", "jump_delta"}
_MSWEEP_KEYS = {"m_list"}
_SHARP_KEYS = {"R0", "R1", "R2", "q0", "N", "T", "dt", "s_min", "n"}
_CHECK_KEYS = {"kind", "tol", "rtol", "window"}


@dataclass
class ExperimentConfig:
    sim: Optional[SimConfig]
    m_list: list = field(default_factory=list)
    sharp: dict = field(default_factory=dict)
    check: dict = field(default_factory=dict)
    raw: dict = field(default_factory=dict)


def _require(table, key, path):
    if key not in table:
        raise ConfigError(f"{path}.{key}: required key missing")
    return table[key]


def _check_keys(table, allowed, path):
    for k in table:
        if k not in allowed:
            raise ConfigError(f"{path}.{k}: unknown key")


def parse_config(text: str) -> ExperimentConfig:
    """Parse and validate a TOML experiment configuration."""
    try:
        raw = tomllib.loads(text)
    except tomllib.TOMLDecodeError as e:
        raise ConfigError(f"TOML syntax error: {e}") from e
    _check_keys(raw, _SECTIONS, "<root>")

    sim = None
    if "model" in raw or "mesh" in raw or "time" in raw or "initial" in raw:
        for sec in ("model", "mesh", "time", "initial"):
            if sec not in raw:
                raise ConfigError(f"{sec}: section required for simulation configs")
        sim = _parse_sim(raw)

    m_list = []
    if "msweep" in raw:
        _check_keys(raw["msweep"], _MSWEEP_KEYS, "msweep")
        m_list = list(_require(raw["msweep"], "m_list", "msweep"))
        if not m_list or any(not m > 1 for m in m_list):
            raise ConfigError("msweep.m_list: every exponent must exceed 1")
        if sorted(m_list) != m_list:
            raise ConfigError("msweep.m_list: must be sorted increasing")

    sharp = dict(raw.get("sharp", {}))
    _check_keys(sharp, _SHARP_KEYS, "sharp")
    check = dict(raw.get("check", {}))
    _check_keys(check, _CHECK_KEYS, "check")
    return ExperimentConfig(sim=sim, m_list=m_list, sharp=sharp, check=check, raw=raw)


def _parse_sim(raw) -> SimConfig:
    model = raw["model"]
    _check_keys(model, _MODEL_KEYS, "model")
    m = float(_require(model, "m", "model"))
    if not m > 1:
        raise ConfigError(f"model.m: m must exceed 1, got {m}")

    law_kind = model.get("law", "linear")
    growth = None
    nutrients = None
    c0_value = None
    try:
        if law_kind == "linear":
            base = GrowthLaw(a=float(_require(model, "a", "model")), p_M=float(_require(model, "p_M", "model")))
        elif law_kind == "tabulated":
            base = GrowthLaw(knots=np.asarray(_require(model, "knots", "model"), dtype=float))
        elif law_kind == "none":
            base = None
        else:
            raise ConfigError(f"model.law: unknown law kind {law_kind!r}")
        if "nutrients" in model:
            if base is None:
                raise ConfigError("model.nutrients: nutrient coupling needs a growth law")
            nt = model["nutrients"]
            _check_keys(nt, _NUTRIENT_KEYS, "model.nutrients")
            nutrients = NutrientLaw(
                base,
                c1=float(_require(nt, "c1", "model.nutrients")),
                c2=float(_require(nt, "c2", "model.nutrients")),
                c_B=float(_require(nt, "c_B", "model.nutrients")),
            )
            c0_value = float(nt["c0"]) if "c0" in nt else None
        else:
            growth = base
    except InvalidLawError as e:
        raise ConfigError(f"model: {e}") from e

    mesh_t = raw["mesh"]
    _check_keys(mesh_t, _MESH_KEYS, "mesh")
    geometry = _require(mesh_t, "geometry", "mesh")
    try:
        mesh = Mesh(
            geometry=geometry,
            n_cells=int(_require(mesh_t, "n_cells", "mesh")),
            L=float(_require(mesh_t, "L", "mesh")),
            dim=int(mesh_t.get("N", 1)),
        )
    except Exception as e:
        raise ConfigError(f"mesh: {e}") from e

    time_t = raw["time"]
    _check_keys(time_t, _TIME_KEYS, "time")
    T = float(_require(time_t, "T", "time"))
    if not T > 0:
        raise ConfigError(f"time.T: must be positive, got {T}")
    if "snapshots" in time_t and "snapshot_count" in time_t:
        raise ConfigError("time: give snapshots or snapshot_count, not both")
    if "snapshots" in time_t:
        snaps = tuple(float(t) for t in time_t["snapshots"])
    elif "snapshot_count" in time_t:
        k = int(time_t["snapshot_count"])
        if k < 2:
            raise ConfigError("time.snapshot_count: need at least 2")
        snaps = tuple(np.linspace(0.0, T, k))
    else:
        snaps = (0.0, T)

    initial = dict(raw["initial"])
    _check_keys(initial, _INITIAL_KEYS, "initial")
    p_M = nutrients.p_M if nutrients is not None else (growth.p_M if growth is not None else None)
    if initial.get("level") == "max":
        if p_M is None:
            raise ConfigError("initial.level: 'max' needs a growth law")
        initial["level"] = max_density(m, p_M)

    diag = raw.get("diagnostics", {})
    _check_keys(diag, _DIAG_KEYS, "diagnostics")

    try:
        cfg = SimConfig(
            m=m,
            mesh=mesh,
            T=T,
            growth=growth,
            nutrients=nutrients,
            c0_value=c0_value,
            cfl_theta=float(time_t.get("cfl_theta", 0.4)),
            scheme=time_t.get("scheme", "explicit"),
            snapshot_times=snaps,
            initial=initial,
            eps_p=float(diag["eps_p"]) if "eps_p" in diag else None,
            eps_rho=float(diag.get("eps_rho", 1e-3)),
            jump_delta=float(diag["jump_delta"]) if "jump_delta" in diag else None,
        )
    except ConfigError:
        raise
    except Exception as e:
        raise ConfigError(f"time/model: {e}") from e
    # fail fast on inadmissible initial data
    from .solver import make_initial_data

    make_initial_data(cfg.initial, cfg.mesh, cfg)
    return cfg
