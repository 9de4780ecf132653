"""Scenario files: TOML with one table per subsystem.

Every key is optional and falls back to the documented default; unknown
keys are rejected.  Errors carry the dotted key path so the CLI can point
at the offending entry.
"""

import math
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .contact import ElasticPlane
from .control import HybridControllerConfig, PidGains, default_force_gains, default_position_gains
from .errors import ConfigError, Unreachable
from .kinematics import EEPosition, RobotGeometry, is_reachable
from .sea_joint import SeaJointParams
from .simulator import Scenario, SimConfig
from .trajectories import MassagePrimitive, Variant, check_reachable, from_waypoints, generate_sequence

MODES = ("hybrid", "position")


def _num(path, value):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(path, f"expected a number, got {value!r}")
    value = float(value)
    if not math.isfinite(value):
        raise ConfigError(path, "must be finite")
    return value


def _positive(path, value):
    value = _num(path, value)
    if not value > 0:
        raise ConfigError(path, f"must be positive, got {value}")
    return value


def _nonneg(path, value):
    value = _num(path, value)
    if value < 0:
        raise ConfigError(path, f"must be non-negative, got {value}")
    return value


def _int(path, value):
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(path, f"expected an integer, got {value!r}")
    return value


def _bool(path, value):
    if not isinstance(value, bool):
        raise ConfigError(path, f"expected true or false, got {value!r}")
    return value


def _str(path, value):
    if not isinstance(value, str):
        raise ConfigError(path, f"expected a string, got {value!r}")
    return value


def _vec3(path, value):
    if not isinstance(value, list) or len(value) != 3:
        raise ConfigError(path, f"expected [x, y, z], got {value!r}")
    return EEPosition(*(_num(f"{path}[{i}]", c) for i, c in enumerate(value)))


def _table(path, value):
    if not isinstance(value, dict):
        raise ConfigError(path, "expected a table")
    return value


def _take(path, table, schema):
    """Check ``table`` against ``{key: parser}`` and return the parsed subset."""
    out = {}
    for key, value in table.items():
        full = f"{path}.{key}" if path else key
        if key not in schema:
            raise ConfigError(full, "unknown key")
        out[key] = schema[key](full, value)
    return out


GEOMETRY_KEYS = {"a": _positive, "b": _positive, "l_a": _positive, "l_b": _positive}
SEA_KEYS = {"k_s": _positive, "N": _num, "eta": _positive}
CONTACT_KEYS = {"z_s": _num, "k_c": _positive, "mu": _nonneg, "v_eps": _positive,
                "scale_resolution": _nonneg}
GAIN_KEYS = {"k_p": _nonneg, "k_i": _nonneg, "k_d": _nonneg, "i_max": _positive, "out_max": _positive}
SIM_KEYS = {"dt": _positive, "theta_dot_max": _positive, "tolerance": _positive,
            "max_iterations": _int, "seed": _int, "encoder_bits": _int,
            "ee_weight": _nonneg, "t_end": _positive}
PRIMITIVE_KEYS = {
    "variant": _str, "target": _vec3, "duration": _positive, "hold_force": _positive,
    "approach_speed": _positive, "hover_height": _nonneg, "retract": _bool,
    "pre_tap_height": _positive, "descent_speed": _positive, "tap_dwell": _nonneg,
    "hover_dwell": _nonneg, "circle_radius": _positive, "angular_rate": _positive,
    "end_point": _vec3, "push_speed": _positive,
}
OUTPUT_KEYS = {"dir": _str, "trace": _str, "metrics": _str, "figure": _str}


@dataclass(frozen=True)
class OutputPaths:
    dir: str = "out"
    trace: str = "trace.csv"
    metrics: str = "metrics.txt"
    figure: str = "trace.png"


@dataclass(frozen=True)
class ScenarioConfig:
    name: str
    geometry: RobotGeometry
    sea: SeaJointParams
    plane: ElasticPlane
    controller: HybridControllerConfig
    mode: str
    sim: SimConfig
    primitives: Sequence[MassagePrimitive] = ()
    waypoints: Optional[List[tuple]] = None
    start: Optional[EEPosition] = None
    output: OutputPaths = OutputPaths()
    source: Optional[str] = None

    def samples(self, check=True):
        geom = self.geometry if check else None
        if self.waypoints is not None:
            return from_waypoints(self.waypoints, self.sim.dt, geom=geom)
        return generate_sequence(self.primitives, self.sim.dt, start=self.start, geom=geom)

    def scenario(self, mode: Optional[str] = None) -> Scenario:
        mode = mode or self.mode
        if mode not in MODES:
            raise ConfigError("control.mode", f"must be one of {MODES}, got {mode!r}")
        ctrl = replace(self.controller, force_enabled=(mode == "hybrid"))
        return Scenario(
            samples=self.samples(), geometry=self.geometry, sea=self.sea, plane=self.plane,
            controller=ctrl, sim=self.sim, name=self.name,
        )


def _build(path, factory, kwargs):
    try:
        return factory(**kwargs)
    except ValueError as exc:
        raise ConfigError(path, str(exc)) from None


def parse_config(data: Dict[str, Any], source: Optional[str] = None) -> ScenarioConfig:
    top = {"name", "geometry", "sea", "contact", "control", "sim", "trajectory", "output"}
    for key in data:
        if key not in top:
            raise ConfigError(key, "unknown key")
    name = _str("name", data.get("name", Path(source).stem if source else "scenario"))

    geometry = _build("geometry", RobotGeometry,
                      _take("geometry", _table("geometry", data.get("geometry", {})), GEOMETRY_KEYS))

    sea_kw = _take("sea", _table("sea", data.get("sea", {})), SEA_KEYS)
    if "k_s" in sea_kw:
        sea_kw["k_s"] *= 1000.0  # file uses N*m/rad
    if "N" in sea_kw and sea_kw["N"] < 1:
        raise ConfigError("sea.N", f"reduction ratio must be >= 1, got {sea_kw['N']}")
    if "eta" in sea_kw and sea_kw["eta"] > 1:
        raise ConfigError("sea.eta", f"efficiency must lie in (0, 1], got {sea_kw['eta']}")
    sea = _build("sea", SeaJointParams, sea_kw)

    contact_kw = _take("contact", _table("contact", data.get("contact", {})), CONTACT_KEYS)
    if "scale_resolution" in contact_kw:
        contact_kw["resolution"] = contact_kw.pop("scale_resolution")
    plane = _build("contact", ElasticPlane, contact_kw)

    sim_kw = _take("sim", _table("sim", data.get("sim", {})), SIM_KEYS)
    if sim_kw.get("max_iterations", 1) < 1:
        raise ConfigError("sim.max_iterations", "must be at least 1")
    if sim_kw.get("encoder_bits", 0) < 0:
        raise ConfigError("sim.encoder_bits", "must be non-negative")
    sim = _build("sim", SimConfig, sim_kw)

    controller, mode = _parse_control(_table("control", data.get("control", {})), sim.dt)
    primitives, waypoints, start = _parse_trajectory(
        _table("trajectory", data.get("trajectory", {})), controller)
    output = OutputPaths(**_take("output", _table("output", data.get("output", {})), OUTPUT_KEYS))
    return ScenarioConfig(name, geometry, sea, plane, controller, mode, sim,
                          primitives, waypoints, start, output, source)


def _parse_control(table, dt):
    schema = {"mode": _str, "f_z_ref": _positive, "f_trigger": _positive, "latch": _bool,
              "f_release": _nonneg, "force_gains": _table, "position_gains": _table}
    kw = _take("control", table, schema)
    mode = kw.pop("mode", "hybrid")
    if mode not in MODES:
        raise ConfigError("control.mode", f"must be one of {MODES}, got {mode!r}")
    for key, default in (("force_gains", default_force_gains()),
                         ("position_gains", default_position_gains())):
        if key in kw:
            gains = _take(f"control.{key}", kw[key], GAIN_KEYS)
            kw[key] = replace(default, **gains)
    ref = kw.get("f_z_ref", HybridControllerConfig.f_z_ref)
    trig = kw.get("f_trigger", HybridControllerConfig.f_trigger)
    if not trig < ref:
        raise ConfigError("control.f_trigger",
                          f"trigger threshold {trig} must be below the reference force f_z_ref={ref}")
    if kw.get("f_release", min(trig, HybridControllerConfig.f_release)) > trig:
        raise ConfigError("control.f_release", "release threshold must not exceed f_trigger")
    kw["dt"] = dt
    return _build("control", HybridControllerConfig, kw), mode


def _parse_trajectory(table, controller):
    schema = {"start": _vec3, "waypoints": lambda p, v: v, "primitives": lambda p, v: v}
    kw = _take("trajectory", table, schema)
    has_wp = "waypoints" in kw
    has_prim = "primitives" in kw
    if has_wp == has_prim:
        raise ConfigError("trajectory", "give exactly one of 'primitives' or 'waypoints'")
    if has_wp:
        raw = kw["waypoints"]
        if not isinstance(raw, list) or len(raw) < 2:
            raise ConfigError("trajectory.waypoints", "expected a list of at least two [t, x, y, z] rows")
        rows = []
        for i, row in enumerate(raw):
            path = f"trajectory.waypoints[{i}]"
            if not isinstance(row, list) or len(row) != 4:
                raise ConfigError(path, f"expected [t, x, y, z], got {row!r}")
            rows.append(tuple(_num(f"{path}[{j}]", c) for j, c in enumerate(row)))
        if rows[0][0] != 0.0:
            raise ConfigError("trajectory.waypoints[0]", "first waypoint must be at t = 0")
        for i in range(1, len(rows)):
            if not rows[i][0] > rows[i - 1][0]:
                raise ConfigError(f"trajectory.waypoints[{i}]", "waypoint times must increase")
        return (), rows, kw.get("start")

    raw = kw["primitives"]
    if not isinstance(raw, list) or not raw:
        raise ConfigError("trajectory.primitives", "expected at least one [[trajectory.primitives]] table")
    prims = []
    for i, entry in enumerate(raw):
        path = f"trajectory.primitives[{i}]"
        pk = _take(path, _table(path, entry), PRIMITIVE_KEYS)
        for req in ("variant", "target"):
            if req not in pk:
                raise ConfigError(f"{path}.{req}", "missing required key")
        try:
            Variant(pk["variant"])
        except ValueError:
            raise ConfigError(f"{path}.variant",
                              f"must be one of {[v.value for v in Variant]}, got {pk['variant']!r}") from None
        if pk["variant"] == Variant.PUSHING.value and "end_point" not in pk:
            raise ConfigError(f"{path}.end_point", "pushing needs an end_point")
        hf = pk.get("hold_force")
        if hf is not None and not controller.f_trigger < hf:
            raise ConfigError(f"{path}.hold_force", f"must exceed the trigger threshold {controller.f_trigger}")
        prims.append(_build(path, MassagePrimitive, pk))
    return prims, None, kw.get("start")


def load_config(path) -> ScenarioConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError("", f"cannot read config {path}: {exc.strerror or exc}") from None
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError("", f"{path}: {exc}") from None
    return parse_config(data, source=str(path))


def check_config(cfg: ScenarioConfig) -> None:
    """Reachability of every waypoint, primitive anchor and sampled setpoint."""
    geom = cfg.geometry
    if cfg.waypoints is not None:
        for i, row in enumerate(cfg.waypoints):
            if not is_reachable(geom, row[1:]):
                raise ConfigError(f"trajectory.waypoints[{i}]", f"waypoint {i} at {row[1:]} is unreachable")
    else:
        for i, prim in enumerate(cfg.primitives):
            for key in ("target", "end_point"):
                pt = getattr(prim, key)
                if pt is not None and not is_reachable(geom, pt):
                    raise ConfigError(f"trajectory.primitives[{i}].{key}", f"{tuple(pt)} is unreachable")
    if cfg.start is not None and not is_reachable(geom, cfg.start):
        raise ConfigError("trajectory.start", f"{tuple(cfg.start)} is unreachable")
    try:
        check_reachable(geom, cfg.samples(check=False))
    except Unreachable as exc:
        raise ConfigError("trajectory", str(exc)) from None
