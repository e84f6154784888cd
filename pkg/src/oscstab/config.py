"""Run configuration: TOML parsing, overrides, canonical serialization.

A config selects a built-in scenario by name or defines an inline system,
then optionally overrides law parameters, initial data, multipliers, sweep
grids, and output paths.  Serialization is canonical (fixed key order,
shortest round-trip floats), so normalizing a config once is idempotent.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional

try:
    import tomllib as _toml
except ModuleNotFoundError:  # pragma: no cover - python < 3.11
    import tomli as _toml

import numpy as np

from .errors import ConfigError
from .exprs import (
    compile_field,
    compile_noise,
    compile_state_map,
    compile_time_signal,
    parse_number,
    parse_vector,
)
from .jets import SmoothVectorField
from .liealg import IndexSets
from .resonance import KappaAssignment, search_kappa
from .simulator import ControlSystem, DriftModel
from .systems import SCENARIOS, Scenario, load_scenario

KAPPA_SEARCH_BOUND = 60


@dataclass
class RunConfig:
    scenario: Optional[str] = None
    system_spec: Optional[dict] = None
    eps: Optional[float] = None
    gamma: Optional[float] = None
    horizon: Optional[float] = None
    substeps: Optional[int] = None
    rho: Optional[float] = None
    x0: Optional[list] = None
    x_star: Optional[list] = None
    kappa_s2: Optional[list] = None
    kappa_s3: Optional[list] = None
    amplitude_rule: Optional[str] = None
    csv: Optional[str] = None
    svg: Optional[str] = None
    report: Optional[str] = None
    sweep_eps: Optional[list] = None
    sweep_gamma: Optional[list] = None
    workers: Optional[int] = None


_OVERRIDE_KEYS = {
    "eps", "gamma", "horizon", "substeps", "rho", "x0", "x_star",
    "kappa_s2", "kappa_s3", "amplitude_rule",
}
_OUTPUT_KEYS = {"csv", "svg", "report"}
_SWEEP_KEYS = {"eps", "gamma", "workers"}


def parse_config(text: str) -> RunConfig:
    try:
        data = _toml.loads(text)
    except _toml.TOMLDecodeError as err:
        raise ConfigError(f"invalid config: {err}") from None
    cfg = RunConfig()
    scenario = data.pop("scenario", None)
    if scenario is not None:
        if scenario not in SCENARIOS:
            raise ConfigError(
                f"unknown scenario {scenario!r}; available: {', '.join(sorted(SCENARIOS))}"
            )
        cfg.scenario = scenario
    system = data.pop("system", None)
    if system is not None:
        if not isinstance(system, dict):
            raise ConfigError("[system] must be a table")
        cfg.system_spec = system
    overrides = data.pop("overrides", {})
    if not isinstance(overrides, dict):
        raise ConfigError("[overrides] must be a table")
    for key, value in overrides.items():
        if key not in _OVERRIDE_KEYS:
            raise ConfigError(f"unknown override key {key!r}")
        setattr(cfg, key, value)
    outputs = data.pop("outputs", {})
    for key, value in outputs.items():
        if key not in _OUTPUT_KEYS:
            raise ConfigError(f"unknown output key {key!r}")
        setattr(cfg, key, str(value))
    sweep = data.pop("sweep", {})
    for key, value in sweep.items():
        if key not in _SWEEP_KEYS:
            raise ConfigError(f"unknown sweep key {key!r}")
        if key == "workers":
            cfg.workers = int(value)
        else:
            setattr(cfg, f"sweep_{key}", value)
    if data:
        raise ConfigError(f"unknown config sections: {', '.join(sorted(data))}")
    _normalize_numbers(cfg)
    return cfg


def _normalize_numbers(cfg: RunConfig) -> None:
    for key in ("eps", "gamma", "horizon", "rho"):
        value = getattr(cfg, key)
        if value is not None:
            setattr(cfg, key, parse_number(value))
    if cfg.substeps is not None:
        cfg.substeps = int(cfg.substeps)
    if cfg.x0 is not None:
        cfg.x0 = parse_vector(cfg.x0)
    if cfg.x_star is not None:
        cfg.x_star = parse_vector(cfg.x_star)
    if cfg.kappa_s2 is not None:
        cfg.kappa_s2 = [int(v) for v in cfg.kappa_s2]
    if cfg.kappa_s3 is not None:
        pairs = []
        for entry in cfg.kappa_s3:
            if not isinstance(entry, (list, tuple)) or len(entry) != 2:
                raise ConfigError(f"kappa_s3 entries must be [k1, k2] pairs, got {entry!r}")
            pairs.append([int(entry[0]), int(entry[1])])
        cfg.kappa_s3 = pairs
    if cfg.amplitude_rule is not None and cfg.amplitude_rule not in ("product", "difference"):
        raise ConfigError(f"amplitude_rule must be 'product' or 'difference', got {cfg.amplitude_rule!r}")
    if cfg.sweep_eps is not None:
        cfg.sweep_eps = [parse_number(v) for v in cfg.sweep_eps]
        if any(v <= 0 for v in cfg.sweep_eps):
            raise ConfigError("sweep eps grid must contain positive values only")
    if cfg.sweep_gamma is not None:
        cfg.sweep_gamma = [parse_number(v) for v in cfg.sweep_gamma]
        if any(v <= 0 for v in cfg.sweep_gamma):
            raise ConfigError("sweep gamma grid must contain positive values only")


def _build_inline_system(spec: dict):
    for key in ("n", "m", "fields"):
        if key not in spec:
            raise ConfigError(f"inline system needs {key!r}")
    n = int(spec["n"])
    m = int(spec["m"])
    rows = spec["fields"]
    if len(rows) != m:
        raise ConfigError(f"inline system declares m = {m} but {len(rows)} fields")
    fields = []
    for i, comps in enumerate(rows):
        if len(comps) != n:
            raise ConfigError(f"field {i + 1} must have {n} components")
        fields.append(SmoothVectorField(n, compile_field([str(c) for c in comps], n), name=f"f{i + 1}"))
    sets = IndexSets(
        s1=spec.get("s1", []),
        s2=[tuple(p) for p in spec.get("s2", [])],
        s3=[tuple(t) for t in spec.get("s3", [])],
    )
    sets.validate(n, m)
    kind = spec.get("drift", "none")
    m_g = parse_number(spec.get("drift_m_g", 0.0))
    if kind == "none":
        drift = DriftModel.none()
    elif kind == "time_signal":
        comps = [str(c) for c in spec["drift_components"]]
        if len(comps) != n:
            raise ConfigError(f"drift_components must have {n} entries")
        drift = DriftModel.time_signal(compile_time_signal(comps), m_g=m_g)
    elif kind == "state_cubic":
        comps = [str(c) for c in spec["drift_components"]]
        if len(comps) != n:
            raise ConfigError(f"drift_components must have {n} entries")
        drift = DriftModel.state_cubic(
            compile_state_map(comps, n), m_g=m_g,
            l_g=parse_number(spec.get("drift_l_g", 0.0)),
        )
    elif kind == "actuator_noise":
        exprs = [str(c) for c in spec["drift_noise"]]
        if len(exprs) != m:
            raise ConfigError(f"drift_noise must have {m} entries (one per input)")
        drift = DriftModel.actuator_noise([compile_noise(e, n) for e in exprs], m_g=m_g)
    else:
        raise ConfigError(f"unknown drift kind {kind!r}")
    system = ControlSystem(
        n=n, m=m, fields=tuple(fields), drift=drift,
        domain_guard=lambda x: True, name=str(spec.get("name", "inline")),
    )
    return system, sets


def build_scenario(cfg: RunConfig) -> Scenario:
    """Materialize the configured scenario with every override applied."""
    if cfg.scenario is None and cfg.system_spec is None:
        raise ConfigError("config selects no scenario: set `scenario` or define [system]")
    if cfg.scenario is not None and cfg.system_spec is not None:
        raise ConfigError("set either `scenario` or [system], not both")

    if cfg.scenario is not None:
        base = load_scenario(cfg.scenario)
    else:
        system, sets = _build_inline_system(cfg.system_spec)
        if cfg.x0 is None:
            raise ConfigError("inline systems need overrides.x0")
        if cfg.eps is None or cfg.gamma is None:
            raise ConfigError("inline systems need overrides.eps and overrides.gamma")
        kappa = _kappa_from_config(cfg, sets)
        x0 = tuple(cfg.x0)
        base = Scenario(
            name=system.name,
            system=system,
            sets=sets,
            kappa=kappa,
            eps=cfg.eps,
            gamma=cfg.gamma,
            x_star=tuple(cfg.x_star) if cfg.x_star else (0.0,) * system.n,
            x0=x0,
            horizon=cfg.horizon if cfg.horizon is not None else 100.0 * cfg.eps,
            rho=cfg.rho if cfg.rho is not None else 0.2 * float(np.linalg.norm(x0)),
            provenance="inline system from config",
            rank_points=(tuple(x0),),
            amplitude_rule=cfg.amplitude_rule or "product",
            acknowledge_kappa_warnings=True,
        )
        return base

    changes = {}
    if cfg.eps is not None:
        changes["eps"] = cfg.eps
    if cfg.gamma is not None:
        changes["gamma"] = cfg.gamma
    if cfg.horizon is not None:
        changes["horizon"] = cfg.horizon
    if cfg.rho is not None:
        changes["rho"] = cfg.rho
    if cfg.amplitude_rule is not None:
        changes["amplitude_rule"] = cfg.amplitude_rule
    if cfg.x0 is not None:
        if len(cfg.x0) != base.system.n:
            raise ConfigError(
                f"x0 has {len(cfg.x0)} entries, scenario state dimension is {base.system.n}"
            )
        changes["x0"] = tuple(cfg.x0)
    if cfg.x_star is not None:
        if len(cfg.x_star) != base.system.n:
            raise ConfigError(
                f"x_star has {len(cfg.x_star)} entries, scenario state dimension is {base.system.n}"
            )
        changes["x_star"] = tuple(cfg.x_star)
    if cfg.kappa_s2 is not None or cfg.kappa_s3 is not None:
        changes["kappa"] = _kappa_from_config(cfg, base.sets, base.kappa)
    scenario = replace(base, **changes) if changes else base
    if scenario.eps <= 0:
        raise ConfigError(f"eps must be positive, got {scenario.eps}")
    if scenario.gamma <= 0:
        raise ConfigError(f"gamma must be positive, got {scenario.gamma}")
    return scenario


def _kappa_from_config(cfg: RunConfig, sets: IndexSets, base: Optional[KappaAssignment] = None):
    if cfg.kappa_s2 is None and cfg.kappa_s3 is None:
        if base is not None:
            return base
        if not sets.s2 and not sets.s3:
            return KappaAssignment.assign(sets)
        return search_kappa(sets, KAPPA_SEARCH_BOUND)
    second = cfg.kappa_s2
    third = cfg.kappa_s3
    if second is None:
        second = list(base.second_order.values()) if base else None
    if third is None:
        third = [ks[:2] for ks in base.third_order.values()] if base else None
    if second is None or third is None:
        raise ConfigError("inline systems need both kappa_s2 and kappa_s3 when overriding multipliers")
    return KappaAssignment.assign(sets, second=second, third=third)


def substeps_for(cfg: RunConfig) -> Optional[int]:
    return cfg.substeps


# -- canonical serialization ---------------------------------------------


def _fmt_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, str):
        return '"' + v.replace("\\", "\\\\").replace('"', '\\"') + '"'
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_fmt_value(x) for x in v) + "]"
    raise ConfigError(f"cannot serialize {v!r}")


def serialize_config(cfg: RunConfig) -> str:
    """Canonical TOML text; parse(serialize(cfg)) reproduces cfg exactly."""
    lines = []
    if cfg.scenario is not None:
        lines.append(f"scenario = {_fmt_value(cfg.scenario)}")
    if cfg.system_spec is not None:
        lines.append("")
        lines.append("[system]")
        for key in sorted(cfg.system_spec):
            lines.append(f"{key} = {_fmt_value(cfg.system_spec[key])}")
    override_items = [
        (k, getattr(cfg, k))
        for k in ("eps", "gamma", "horizon", "substeps", "rho", "x0", "x_star",
                  "kappa_s2", "kappa_s3", "amplitude_rule")
        if getattr(cfg, k) is not None
    ]
    if override_items:
        lines.append("")
        lines.append("[overrides]")
        for key, value in override_items:
            lines.append(f"{key} = {_fmt_value(value)}")
    output_items = [(k, getattr(cfg, k)) for k in ("csv", "svg", "report") if getattr(cfg, k)]
    if output_items:
        lines.append("")
        lines.append("[outputs]")
        for key, value in output_items:
            lines.append(f"{key} = {_fmt_value(value)}")
    sweep_items = []
    if cfg.sweep_eps is not None:
        sweep_items.append(("eps", cfg.sweep_eps))
    if cfg.sweep_gamma is not None:
        sweep_items.append(("gamma", cfg.sweep_gamma))
    if cfg.workers is not None:
        sweep_items.append(("workers", cfg.workers))
    if sweep_items:
        lines.append("")
        lines.append("[sweep]")
        for key, value in sweep_items:
            lines.append(f"{key} = {_fmt_value(value)}")
    return "\n".join(lines).lstrip("\n") + "\n"


def scenario_to_config(name: str) -> RunConfig:
    """Config reproducing a built-in scenario, ready for user modification."""
    sc = load_scenario(name)
    cfg = RunConfig(scenario=name)
    cfg.eps = sc.eps
    cfg.gamma = sc.gamma
    cfg.horizon = sc.horizon
    cfg.rho = sc.rho
    cfg.x0 = [float(v) for v in sc.x0]
    cfg.x_star = [float(v) for v in sc.x_star]
    cfg.kappa_s2 = [sc.kappa.second_order[p] for p in sc.sets.s2]
    cfg.kappa_s3 = [list(sc.kappa.third_order[t][:2]) for t in sc.sets.s3]
    if not cfg.kappa_s3:
        cfg.kappa_s3 = None
    if not cfg.kappa_s2:
        cfg.kappa_s2 = None
    return cfg


def apply_set_overrides(cfg: RunConfig, assignments) -> RunConfig:
    """Apply `--set key=value` pairs; keys may be dotted (outputs.csv=...)."""
    for item in assignments:
        if "=" not in item:
            raise ConfigError(f"--set expects key=value, got {item!r}")
        key, _, raw = item.partition("=")
        key = key.strip()
        section, _, leaf = key.partition(".")
        if not leaf:
            section, leaf = "overrides", section
        if section == "overrides" and leaf in _OVERRIDE_KEYS:
            setattr(cfg, leaf, _parse_set_value(leaf, raw))
        elif section == "outputs" and leaf in _OUTPUT_KEYS:
            setattr(cfg, leaf, raw)
        elif section == "sweep" and leaf in _SWEEP_KEYS:
            if leaf == "workers":
                cfg.workers = int(raw)
            else:
                setattr(cfg, f"sweep_{leaf}", [v for v in raw.split(",") if v])
        elif section == "scenario" and not leaf:
            cfg.scenario = raw
        else:
            raise ConfigError(f"unknown --set key {key!r}")
    _normalize_numbers(cfg)
    return cfg


def _parse_set_value(key, raw):
    if key in ("x0", "x_star"):
        return [v for v in raw.split(",") if v]
    if key in ("kappa_s2",):
        return [int(v) for v in raw.split(",") if v]
    if key in ("kappa_s3",):
        pairs = []
        for chunk in raw.split(";"):
            if not chunk:
                continue
            parts = chunk.split(",")
            pairs.append([int(p) for p in parts])
        return pairs
    if key == "substeps":
        return int(raw)
    if key == "amplitude_rule":
        return raw
    return raw  # numbers go through parse_number in _normalize_numbers
