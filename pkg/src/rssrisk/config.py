"""YAML configuration: canonical sections ``scenario``, ``rss``, ``risk``,
``experiment`` and ``output``.

Units are SI throughout (m, s, m/s, m/s^2). Validation errors name the
offending key path, e.g. ``rss.a_min_brake: must be > 0``.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from pathlib import Path

import yaml

from .experiments import BehaviorViolationModel, StateNoiseModel
from .geometry import VehicleState
from .rss_core import LateralPairState, LateralParams, LongitudinalPairState, LongitudinalParams, RiskParams
from .simulator import BehaviorSpec, ConfigError, Jitter, ScenarioConfig, VehicleSpec

DEFAULT_RSS = {
    "rho": 0.5,
    "a_max_accel": 2.0,
    "a_min_brake": 4.0,
    "a_max_brake": 6.0,
    "a_cap_brake": 8.0,
    "a_lat_max_accel": 0.2,
    "a_lat_min_brake": 0.8,
    "a_lat_cap_brake": 1.5,
}

# Two-lane car following: a scripted lead that brakes (never harder than
# a_max_brake; the per-episode scale decides whether it comes to a stop),
# waits and pulls away again, an RSS-following ego and follower behind it,
# and two vehicles in the neighbouring lane.
DEFAULT_SCENARIO = {
    "dt": 0.02,
    "horizon": 25.0,
    "lane_width": 3.5,
    "lane_count": 2,
    "vehicles": [
        {"id": "lead", "x": 60.0, "lane": 0, "v_x": 20.0,
         "behavior": {"kind": "scripted_accel_profile",
                      "profile": [[0.0, 0.0], [4.0, -6.0], [8.0, 0.0], [19.0, 1.5]]},
         "jitter": {"brake_scale": [0.4, 1.0]}},
        {"id": "ego", "ego": True, "x": 0.0, "lane": 0, "v_x": 20.0,
         "behavior": {"kind": "rss_follower", "target_speed": 25.0}},
        {"id": "follower", "x": -45.0, "lane": 0, "v_x": 20.0,
         "behavior": {"kind": "rss_follower", "target_speed": 25.0}},
        {"id": "side_front", "x": 30.0, "lane": 1, "v_x": 20.0,
         "behavior": {"kind": "rss_follower", "target_speed": 22.0}},
        {"id": "side_rear", "x": -20.0, "lane": 1, "v_x": 18.0,
         "behavior": {"kind": "constant_speed"}},
    ],
}

DEFAULT_EXPERIMENT = {
    "episodes": 500,
    "n_perms": 999,
    "behavior": {"rate": 0.15, "duration": 2.0, "brake_excess": 1.5, "accel_excess": 4.0},
    "state": {"sigma_pos": 0.5, "sigma_vel": 0.5, "sigma_acc": 0.0, "applies_to": "both", "period": 0.1},
    "verify": {"horizon": 10.0, "dt": 0.1, "grid_levels": 5},
}


@dataclass
class Config:
    scenario: ScenarioConfig
    behavior: BehaviorViolationModel
    noise: StateNoiseModel
    episodes: int = 500
    n_perms: int = 999
    verify: dict = field(default_factory=lambda: dict(DEFAULT_EXPERIMENT["verify"]))
    output_dir: str = "out"
    checksum: str = ""


def _num(section: dict, key: str, path: str, default=None) -> float:
    if key not in section:
        if default is None:
            raise ConfigError(f"{path}.{key}: missing")
        return float(default)
    value = section[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{path}.{key}: expected a number, got {value!r}")
    return float(value)


def _section(doc: dict, key: str) -> dict:
    value = doc.get(key) or {}
    if not isinstance(value, dict):
        raise ConfigError(f"{key}: expected a mapping")
    return value


def _wrap(path: str, fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"{path}: {exc}") from exc


def parse_params(doc: dict) -> tuple[LongitudinalParams, LateralParams, RiskParams, bool]:
    rss = {**DEFAULT_RSS, **_section(doc, "rss")}
    unknown = set(rss) - set(DEFAULT_RSS)
    if unknown:
        raise ConfigError(f"rss.{sorted(unknown)[0]}: unknown key")
    v = {k: _num(rss, k, "rss") for k in DEFAULT_RSS}
    lon = _wrap("rss", LongitudinalParams, v["rho"], v["a_max_accel"], v["a_min_brake"],
                v["a_max_brake"], v["a_cap_brake"])
    lat = _wrap("rss", LateralParams, v["rho"], v["a_lat_max_accel"], v["a_lat_min_brake"],
                v["a_lat_cap_brake"])
    risk = _section(doc, "risk")
    rp = _wrap("risk", RiskParams, _num(risk, "beta", "risk", 1.0), _num(risk, "gamma", "risk", 1.0))
    return lon, lat, rp, bool(risk.get("strict_branches", False))


def _behavior(raw, path) -> BehaviorSpec:
    raw = raw or {}
    profile = tuple((float(t), float(a)) for t, a in raw.get("profile", ()))
    target = raw.get("target_speed")
    spec = BehaviorSpec(
        kind=raw.get("kind", "constant_speed"),
        target_speed=None if target is None else float(target),
        speed_gain=float(raw.get("speed_gain", 0.5)),
        profile=profile,
        lane_keeping=bool(raw.get("lane_keeping", True)),
    )
    _wrap(path, spec.validate)
    return spec


def _jitter(raw, path) -> Jitter | None:
    if raw is None:
        return None
    if not isinstance(raw, dict):
        raise ConfigError(f"{path}: expected a mapping")
    scale = raw.get("brake_scale")
    if scale is not None:
        if not isinstance(scale, (list, tuple)) or len(scale) != 2:
            raise ConfigError(f"{path}.brake_scale: expected [lo, hi]")
        scale = (float(scale[0]), float(scale[1]))
    j = Jitter(x=_num(raw, "x", path, 0.0), brake_scale=scale)
    _wrap(path, j.validate)
    return j


def parse_scenario(doc: dict, lon, lat, rp, strict: bool) -> ScenarioConfig:
    sc = {**DEFAULT_SCENARIO, **_section(doc, "scenario")}
    lane_width = _num(sc, "lane_width", "scenario")
    vehicles = []
    for i, raw in enumerate(sc["vehicles"]):
        path = f"scenario.vehicles[{i}]"
        if not isinstance(raw, dict) or "id" not in raw:
            raise ConfigError(f"{path}: expected a mapping with an id")
        if "lane" in raw:
            lane = raw["lane"]
            if isinstance(lane, bool) or not isinstance(lane, int):
                raise ConfigError(f"{path}.lane: expected an integer, got {lane!r}")
            y = lane * lane_width
        else:
            y = _num(raw, "y", path, 0.0)
        state = _wrap(path, VehicleState, str(raw["id"]), _num(raw, "x", path), float(y),
                      _num(raw, "v_x", path), _num(raw, "v_y", path, 0.0), 0.0, 0.0,
                      _num(raw, "length", path, 4.5), _num(raw, "width", path, 1.8))
        vehicles.append(VehicleSpec(state, _behavior(raw.get("behavior"), path + ".behavior"),
                                    bool(raw.get("ego", False)), _jitter(raw.get("jitter"), path + ".jitter")))
    cfg = ScenarioConfig(
        vehicles=tuple(vehicles), lon=lon, lat=lat, risk=rp,
        lane_width=lane_width, lane_count=int(sc["lane_count"]),
        dt=_num(sc, "dt", "scenario"), horizon=_num(sc, "horizon", "scenario"),
        strict_branches=strict,
    )
    _wrap("scenario", cfg.validate)
    return cfg


def parse_config(doc: dict | None, checksum: str = "") -> Config:
    doc = doc or {}
    if not isinstance(doc, dict):
        raise ConfigError("top level: expected a mapping")
    lon, lat, rp, strict = parse_params(doc)
    scenario = parse_scenario(doc, lon, lat, rp, strict)
    exp = _section(doc, "experiment")
    beh = {**DEFAULT_EXPERIMENT["behavior"], **(exp.get("behavior") or {})}
    target = beh.get("target")
    behavior = _wrap("experiment.behavior", BehaviorViolationModel,
                     rate=_num(beh, "rate", "experiment.behavior"),
                     duration=_num(beh, "duration", "experiment.behavior"),
                     brake_excess=_num(beh, "brake_excess", "experiment.behavior"),
                     accel_excess=_num(beh, "accel_excess", "experiment.behavior"),
                     target=None if target is None else tuple(str(t) for t in target))
    st = {**DEFAULT_EXPERIMENT["state"], **(exp.get("state") or {})}
    noise = _wrap("experiment.state", StateNoiseModel,
                  sigma_pos=_num(st, "sigma_pos", "experiment.state"),
                  sigma_vel=_num(st, "sigma_vel", "experiment.state"),
                  sigma_acc=_num(st, "sigma_acc", "experiment.state"),
                  applies_to=str(st["applies_to"]),
                  period=_num(st, "period", "experiment.state"))
    verify = {**DEFAULT_EXPERIMENT["verify"], **(exp.get("verify") or {})}
    out = _section(doc, "output")
    return Config(
        scenario=scenario, behavior=behavior, noise=noise,
        episodes=int(exp.get("episodes", DEFAULT_EXPERIMENT["episodes"])),
        n_perms=int(exp.get("n_perms", DEFAULT_EXPERIMENT["n_perms"])),
        verify=verify, output_dir=str(out.get("dir", "out")), checksum=checksum,
    )


def read_yaml(path: str | Path) -> tuple[dict, str]:
    """Parse a YAML file, returning the document and the SHA-256 of its bytes."""
    data = Path(path).read_bytes()
    try:
        doc = yaml.safe_load(data.decode("utf-8"))
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        where = f"line {mark.line + 1}, column {mark.column + 1}" if mark else "unknown position"
        raise ConfigError(f"{path}: YAML parse error at {where}") from exc
    return doc, hashlib.sha256(data).hexdigest()


def load_config(path: str | Path | None = None) -> Config:
    if path is None:
        return default_config()
    doc, digest = read_yaml(path)
    return parse_config(doc, digest)


def default_config() -> Config:
    digest = hashlib.sha256(b"# built-in defaults\n").hexdigest()
    return parse_config({}, digest)


def parse_pair_state(doc: dict) -> tuple[LongitudinalPairState, LateralPairState]:
    """State file for one-shot risk evaluation: ``longitudinal`` and ``lateral`` sections."""
    if not isinstance(doc, dict):
        raise ConfigError("top level: expected a mapping")
    lon = _section(doc, "longitudinal")
    lat = _section(doc, "lateral")
    lps = _wrap("longitudinal", LongitudinalPairState, _num(lon, "v_rear", "longitudinal"),
                _num(lon, "v_front", "longitudinal"), _num(lon, "d_lon", "longitudinal"))
    tps = _wrap("lateral", LateralPairState, _num(lat, "v_left", "lateral"),
                _num(lat, "v_right", "lateral"), _num(lat, "d_lat", "lateral"))
    return lps, tps
