"""Fixed-step 2D kinematic traffic simulator on a straight multi-lane road."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

from . import rss_core
from .geometry import VehicleState, in_collision, order_lat, order_lon, raw_gaps
from .rss_core import LateralParams, LongitudinalParams, RiskBreakdown, RiskParams

BEHAVIOR_KINDS = ("constant_speed", "rss_follower", "scripted_accel_profile")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class BehaviorSpec:
    """Controller assignment for one vehicle.

    ``profile`` is a sequence of ``(t_start, a_x)`` breakpoints, held
    piecewise constant, used by ``scripted_accel_profile``.
    """

    kind: str = "constant_speed"
    target_speed: float | None = None
    speed_gain: float = 0.5
    profile: tuple[tuple[float, float], ...] = ()
    lane_keeping: bool = True

    def validate(self):
        if self.kind not in BEHAVIOR_KINDS:
            raise ConfigError(f"unknown behavior kind {self.kind!r}")
        if self.kind == "rss_follower":
            if self.target_speed is None or not self.target_speed >= 0:
                raise ConfigError("rss_follower needs target_speed >= 0")
            if not self.speed_gain > 0:
                raise ConfigError("speed_gain must be > 0")
        if self.kind == "scripted_accel_profile":
            if not self.profile:
                raise ConfigError("scripted_accel_profile needs a non-empty profile")
            times = [t for t, _ in self.profile]
            if times != sorted(times):
                raise ConfigError("profile breakpoints must be sorted by time")


@dataclass(frozen=True)
class Jitter:
    """Per-episode randomisation of one vehicle, drawn by the campaign runner.

    ``x`` shifts the initial position uniformly within ``+-x``;
    ``brake_scale`` multiplies the braking entries of a scripted profile by a
    factor drawn uniformly from ``[lo, hi]``.
    """

    x: float = 0.0
    brake_scale: tuple[float, float] | None = None

    def validate(self):
        if not self.x >= 0:
            raise ConfigError("jitter.x must be >= 0")
        if self.brake_scale is not None:
            lo, hi = self.brake_scale
            if not 0 <= lo <= hi:
                raise ConfigError("jitter.brake_scale must satisfy 0 <= lo <= hi")


@dataclass(frozen=True)
class VehicleSpec:
    state: VehicleState
    behavior: BehaviorSpec = BehaviorSpec()
    ego: bool = False
    jitter: Jitter | None = None


@dataclass(frozen=True)
class ScenarioConfig:
    vehicles: tuple[VehicleSpec, ...]
    lon: LongitudinalParams
    lat: LateralParams
    risk: RiskParams = RiskParams()
    lane_width: float = 3.5
    lane_count: int = 2
    dt: float = 0.01
    horizon: float = 20.0
    strict_branches: bool = False

    def validate(self):
        if not self.dt > 0:
            raise ConfigError("dt must be > 0")
        if not self.horizon >= self.dt:
            raise ConfigError("horizon must be >= dt")
        if self.lane_count < 1:
            raise ConfigError("lane_count must be >= 1")
        if not self.lane_width > 0:
            raise ConfigError("lane_width must be > 0")
        if not any(v.ego for v in self.vehicles):
            raise ConfigError("at least one vehicle must be marked ego")
        ids = [v.state.id for v in self.vehicles]
        if len(set(ids)) != len(ids):
            raise ConfigError("vehicle ids must be unique")
        for v in self.vehicles:
            v.behavior.validate()
            if v.jitter is not None:
                v.jitter.validate()

    @property
    def ego_ids(self) -> tuple[str, ...]:
        return tuple(v.state.id for v in self.vehicles if v.ego)

    def lane_center(self, y: float) -> float:
        lane = min(max(round(y / self.lane_width), 0), self.lane_count - 1)
        return lane * self.lane_width


@dataclass(frozen=True)
class PairSample:
    d_lon: float
    d_lat: float
    risk: RiskBreakdown


@dataclass(frozen=True)
class TraceSample:
    t: float
    states: tuple[VehicleState, ...]
    pairs: dict  # (id_i, id_j) in config order -> PairSample
    collision_pairs: tuple[tuple[str, str], ...] = ()

    @property
    def scene_risk(self) -> float:
        return max((p.risk.r for p in self.pairs.values()), default=0.0)


@dataclass
class ScenarioResult:
    trace: list[TraceSample]
    status: str  # "completed" or "collision"
    t_collision: float | None
    collision_pairs: tuple[tuple[str, str], ...]
    max_risk: float = 0.0
    max_r_lon: float = 0.0
    max_r_lat: float = 0.0
    min_d_lon: float = math.inf
    min_d_lat: float = math.inf
    samples: int = 0

    @property
    def collided(self) -> bool:
        return self.status == "collision"


class Hooks:
    """Experiment hooks; the defaults leave the scenario untouched.

    ``perceive`` returns the world as seen by one controller.
    ``override`` returns ``(a_x, a_y)`` replacing the controller output,
    with ``None`` meaning "no override" for that axis.
    """

    def perceive(self, observer: str, t: float, states: list[VehicleState]) -> list[VehicleState]:
        return states

    def override(self, vehicle_id: str, t: float) -> tuple[float | None, float | None]:
        return None, None


# -- kinematics --------------------------------------------------------------


def advance_lon(x: float, v: float, a: float, dt: float) -> tuple[float, float]:
    """Constant-acceleration update that stops at zero speed instead of reversing."""
    v_new = v + a * dt
    if v_new >= 0.0:
        return x + v * dt + 0.5 * a * dt * dt, v_new
    return x - v * v / (2.0 * a), 0.0


def advance_lat(y: float, v: float, a: float, dt: float) -> tuple[float, float]:
    return y + v * dt + 0.5 * a * dt * dt, v + a * dt


def saturate(a_x: float, a_y: float, lon: LongitudinalParams, lat: LateralParams) -> tuple[float, float]:
    cap, lcap = lon.a_cap_brake, lat.a_lat_cap_brake
    return min(max(a_x, -cap), cap), min(max(a_y, -lcap), lcap)


def step(states, accels, dt, lon: LongitudinalParams, lat: LateralParams) -> list[VehicleState]:
    """Advance every vehicle one step under its (saturated) acceleration command."""
    out = []
    for s, (ax, ay) in zip(states, accels):
        ax, ay = saturate(ax, ay, lon, lat)
        x, vx = advance_lon(s.x, s.v_x, ax, dt)
        y, vy = advance_lat(s.y, s.v_y, ay, dt)
        out.append(VehicleState(s.id, x, y, vx, vy, ax, ay, s.length, s.width))
    return out


# -- controllers ---------------------------------------------------------------


def _lat_risk(a: VehicleState, b: VehicleState, lat: LateralParams) -> float:
    left, right = order_lat(a, b)
    d_lat = max(0.0, raw_gaps(a, b)[1])
    dm = rss_core.lat_safe_distance(left.v_y, right.v_y, lat.rho, lat.a_lat_max_accel, lat.a_lat_min_brake)
    db = rss_core.lat_safe_distance(left.v_y, right.v_y, lat.rho, lat.a_lat_max_accel, lat.a_lat_cap_brake)
    return rss_core.ramp_risk(d_lat, dm, db)


def _lon_safe_after(me: VehicleState, lead: VehicleState, a_cmd: float, dt: float,
                    lon: LongitudinalParams) -> bool:
    # worst case for the lead over the coming step is maximum braking
    x_r, v_r = advance_lon(me.x, me.v_x, a_cmd, dt)
    x_f, v_f = advance_lon(lead.x, lead.v_x, -lon.a_max_brake, dt)
    gap = x_f - x_r - 0.5 * (me.length + lead.length)
    if gap <= 0.0:
        return False
    d_min = rss_core.lon_safe_distance(v_r, v_f, lon.rho, lon.a_max_accel, lon.a_min_brake, lon.a_max_brake)
    return gap >= d_min


def rss_follower_control(me: VehicleState, others, behavior: BehaviorSpec, dt: float,
                         lon: LongitudinalParams, lat: LateralParams) -> float:
    """Longitudinal command of an RSS-compliant follower.

    Tracks ``behavior.target_speed`` within ``[-a_min_brake, a_max_accel]``
    unless that command would leave the safe longitudinal distance to some
    laterally conflicting vehicle ahead by the end of the step, in which case
    it brakes at ``a_min_brake``. Braking at ``a_min_brake`` never shrinks the
    safety margin while the lead brakes no harder than ``a_max_brake``, so a
    follower starting safe stays safe.
    """
    a_cmd = behavior.speed_gain * (behavior.target_speed - me.v_x)
    a_cmd = min(max(a_cmd, -lon.a_min_brake), lon.a_max_accel)
    for other in others:
        if other.id == me.id or order_lon(me, other)[0] is not me:
            continue
        if _lat_risk(me, other, lat) == 0.0:
            continue
        if not _lon_safe_after(me, other, a_cmd, dt, lon):
            return -lon.a_min_brake
    return a_cmd


def lane_keeping_control(me: VehicleState, y_center: float, lat: LateralParams,
                         kp: float = 0.6, kd: float = 1.6) -> float:
    a = -kp * (me.y - y_center) - kd * me.v_y
    return min(max(a, -lat.a_lat_min_brake), lat.a_lat_min_brake)


def scripted_accel(profile, t: float) -> float:
    a = 0.0
    for t0, a0 in profile:
        if t + 1e-12 >= t0:
            a = a0
        else:
            break
    return a


# -- scenario driver -----------------------------------------------------------


def pair_sample(a: VehicleState, b: VehicleState, cfg: ScenarioConfig) -> PairSample:
    gx, gy = raw_gaps(a, b)
    rear, front = order_lon(a, b)
    left, right = order_lat(a, b)
    d_lon, d_lat = max(0.0, gx), max(0.0, gy)
    br = rss_core.breakdown_scalar(rear.v_x, front.v_x, d_lon, left.v_y, right.v_y, d_lat,
                                   cfg.lon, cfg.lat, cfg.risk, cfg.strict_branches)
    return PairSample(d_lon, d_lat, br)


def scene_risk(states, cfg: ScenarioConfig) -> float:
    """Largest unified risk over all vehicle pairs; 0 with fewer than two vehicles."""
    return max((pair_sample(a, b, cfg).risk.r for a, b in itertools.combinations(states, 2)),
               default=0.0)


def _commands(t, states, cfg: ScenarioConfig, centers, hooks: Hooks):
    accels = []
    for spec, me_true, y_c in zip(cfg.vehicles, states, centers):
        beh = spec.behavior
        seen = hooks.perceive(me_true.id, t, states)
        me = next(s for s in seen if s.id == me_true.id)
        if beh.kind == "rss_follower":
            ax = rss_follower_control(me, seen, beh, cfg.dt, cfg.lon, cfg.lat)
        elif beh.kind == "scripted_accel_profile":
            ax = scripted_accel(beh.profile, t)
        else:
            ax = 0.0
        ay = lane_keeping_control(me, y_c, cfg.lat) if beh.lane_keeping else 0.0
        ox, oy = hooks.override(me_true.id, t)
        accels.append((ax if ox is None else ox, ay if oy is None else oy))
    return accels


def run_scenario(cfg: ScenarioConfig, hooks: Hooks | None = None, keep_trace: bool = True) -> ScenarioResult:
    """Simulate until the first collision or the horizon.

    Controllers see ``hooks.perceive``'s view of the world; collision checks
    and recorded risks always use the true states. With ``keep_trace=False``
    only the aggregate fields of the result are filled in.
    """
    cfg.validate()
    hooks = hooks or Hooks()
    states = [v.state for v in cfg.vehicles]
    centers = [cfg.lane_center(s.y) for s in states]
    n_steps = int(round(cfg.horizon / cfg.dt))
    index_pairs = list(itertools.combinations(range(len(states)), 2))
    result = ScenarioResult([], "completed", None, ())

    for k in range(n_steps + 1):
        t = k * cfg.dt
        if k > 0:
            accels = _commands((k - 1) * cfg.dt, states, cfg, centers, hooks)
            states = step(states, accels, cfg.dt, cfg.lon, cfg.lat)
        pairs = {}
        hits = []
        for i, j in index_pairs:
            a, b = states[i], states[j]
            ps = pair_sample(a, b, cfg)
            pairs[(a.id, b.id)] = ps
            _accumulate(result, ps)
            if in_collision(a, b):
                hits.append((a.id, b.id))
        result.samples += 1
        if keep_trace:
            result.trace.append(TraceSample(t, tuple(states), pairs, tuple(hits)))
        if hits:
            result.status = "collision"
            result.t_collision = t
            result.collision_pairs = tuple(hits)
            break
    return result


def _accumulate(res: ScenarioResult, ps: PairSample) -> None:
    br = ps.risk
    if br.r > res.max_risk:
        res.max_risk = br.r
    # component extremes only count for pairs in conflict on the other axis
    if br.r_lat > 0.0:
        res.max_r_lon = max(res.max_r_lon, br.r_lon)
        res.min_d_lon = min(res.min_d_lon, ps.d_lon)
    if br.r_lon > 0.0:
        res.max_r_lat = max(res.max_r_lat, br.r_lat)
        res.min_d_lat = min(res.min_d_lat, ps.d_lat)
