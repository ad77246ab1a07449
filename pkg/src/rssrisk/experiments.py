"""Monte Carlo campaigns for the two perturbation experiments and the
zero-risk brute-force check.

Experiment "behavior": traffic vehicles occasionally drop their compliant
controller and brake, accelerate or swerve beyond the assumed bounds.
Experiment "state": controllers act on noisy copies of the vehicle states.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from . import stats
from .geometry import VehicleState, order_lat, order_lon, pair_states
from .rss_core import LateralParams, LongitudinalParams, RiskParams, risk_breakdown
from .simulator import Hooks, ScenarioConfig, run_scenario

VIOLATION_KINDS = ("brake", "accel", "swerve")
NOISE_TARGETS = ("ego", "traffic", "both")


@dataclass(frozen=True)
class BehaviorViolationModel:
    rate: float = 0.15
    duration: float = 2.0
    brake_excess: float = 1.5
    accel_excess: float = 4.0
    target: tuple[str, ...] | None = None  # None: every non-ego vehicle

    def __post_init__(self):
        if not self.rate >= 0:
            raise ValueError("rate must be >= 0")
        if not self.duration > 0:
            raise ValueError("duration must be > 0")
        if not (self.brake_excess > 1 and self.accel_excess > 1):
            raise ValueError("excess factors must be > 1")


@dataclass(frozen=True)
class StateNoiseModel:
    sigma_pos: float = 0.5
    sigma_vel: float = 0.5
    sigma_acc: float = 0.0
    applies_to: str = "both"
    period: float = 0.1  # sensor frame period, s; 0 draws fresh noise every step

    def __post_init__(self):
        if min(self.sigma_pos, self.sigma_vel, self.sigma_acc) < 0:
            raise ValueError("noise sigmas must be >= 0")
        if not self.period >= 0:
            raise ValueError("period must be >= 0")
        if self.applies_to not in NOISE_TARGETS:
            raise ValueError(f"applies_to must be one of {NOISE_TARGETS}")


@dataclass(frozen=True)
class ViolationEvent:
    vehicle_id: str
    start: float
    duration: float
    kind: str
    a_x: float | None
    a_y: float | None

    def active(self, t: float) -> bool:
        return self.start <= t < self.start + self.duration


def sample_violations(model: BehaviorViolationModel, horizon: float, rng: np.random.Generator,
                      vehicle_ids, lon: LongitudinalParams, lat: LateralParams) -> list[ViolationEvent]:
    """Poisson-timed violation schedule over ``[0, horizon)``.

    Each event picks an eligible vehicle and a kind uniformly. Commands are
    scaled past the assumed bounds and then saturated at the physical
    capability (``a_cap_brake`` / ``a_lat_cap_brake``).
    """
    eligible = list(vehicle_ids)
    if model.rate == 0 or not eligible:
        return []
    brake = -min(model.brake_excess * lon.a_max_brake, lon.a_cap_brake)
    accel = min(model.accel_excess * lon.a_max_accel, lon.a_cap_brake)
    swerve = min(model.accel_excess * lat.a_lat_max_accel, lat.a_lat_cap_brake)
    events = []
    t = rng.exponential(1.0 / model.rate)
    while t < horizon:
        vid = eligible[rng.integers(len(eligible))]
        kind = VIOLATION_KINDS[rng.integers(len(VIOLATION_KINDS))]
        if kind == "brake":
            ev = ViolationEvent(vid, t, model.duration, kind, brake, None)
        elif kind == "accel":
            ev = ViolationEvent(vid, t, model.duration, kind, accel, None)
        else:
            side = 1.0 if rng.random() < 0.5 else -1.0
            ev = ViolationEvent(vid, t, model.duration, kind, None, side * swerve)
        events.append(ev)
        t += rng.exponential(1.0 / model.rate)
    return events


def perturb_perception(true_state: VehicleState, model: StateNoiseModel,
                       rng: np.random.Generator) -> VehicleState:
    """Noisy copy of ``true_state``; perceived ``v_x`` is floored at zero."""
    n = rng.standard_normal(6)
    return VehicleState(
        true_state.id,
        true_state.x + model.sigma_pos * n[0],
        true_state.y + model.sigma_pos * n[1],
        max(0.0, true_state.v_x + model.sigma_vel * n[2]),
        true_state.v_y + model.sigma_vel * n[3],
        true_state.a_x + model.sigma_acc * n[4],
        true_state.a_y + model.sigma_acc * n[5],
        true_state.length,
        true_state.width,
    )


class ViolationHooks(Hooks):
    def __init__(self, events):
        self.events = sorted(events, key=lambda e: e.start)

    def override(self, vehicle_id, t):
        ax = ay = None
        for ev in self.events:
            if ev.start > t:
                break
            if ev.vehicle_id == vehicle_id and ev.active(t):
                # later events win per axis
                ax = ev.a_x if ev.a_x is not None else ax
                ay = ev.a_y if ev.a_y is not None else ay
        return ax, ay


class NoiseHooks(Hooks):
    """Each affected controller sees its own noisy copy of the world.

    A copy is drawn once per sensor frame and reused until the next frame,
    so the noise statistics do not depend on the integration step.
    """

    def __init__(self, model: StateNoiseModel, ego_ids, rng):
        self.model = model
        self.ego_ids = set(ego_ids)
        self.rng = rng
        self._frame = None
        self._seen = {}

    def perceive(self, observer, t, states):
        is_ego = observer in self.ego_ids
        mode = self.model.applies_to
        if not (mode == "both" or (mode == "ego") == is_ego):
            return states
        if self.model.period <= 0:
            return [perturb_perception(s, self.model, self.rng) for s in states]
        frame = int(math.floor(t / self.model.period + 1e-9))
        if frame != self._frame:
            self._frame = frame
            self._seen = {}
        if observer not in self._seen:
            self._seen[observer] = [perturb_perception(s, self.model, self.rng) for s in states]
        return self._seen[observer]


def randomize_scenario(base: ScenarioConfig, rng: np.random.Generator) -> ScenarioConfig:
    """Apply every vehicle's jitter with draws from ``rng`` (config order)."""
    vehicles = []
    changed = False
    for spec in base.vehicles:
        j = spec.jitter
        if j is None:
            vehicles.append(spec)
            continue
        changed = True
        state, beh = spec.state, spec.behavior
        if j.x > 0:
            state = state.evolve(x=state.x + rng.uniform(-j.x, j.x))
        if j.brake_scale is not None:
            k = rng.uniform(*j.brake_scale)
            beh = replace(beh, profile=tuple((t, a * k if a < 0 else a) for t, a in beh.profile))
        vehicles.append(replace(spec, state=state, behavior=beh))
    return replace(base, vehicles=tuple(vehicles)) if changed else base


@dataclass(frozen=True)
class EpisodeRecord:
    episode_id: int
    seed: int
    max_risk: float
    collision: bool
    t_collision: float | None
    min_d_lon: float
    min_d_lat: float
    max_r_lon: float
    max_r_lat: float


@dataclass
class CampaignResult:
    records: list[EpisodeRecord]
    point_biserial: float | None = None
    auc: float | None = None
    permutation_p: float | None = None
    degenerate: bool = True
    episodes: int = 0
    collisions: int = 0
    experiment: str = "baseline"
    master_seed: int = 0


def make_hooks(base: ScenarioConfig, experiment, rng: np.random.Generator) -> Hooks:
    if experiment is None:
        return Hooks()
    if isinstance(experiment, BehaviorViolationModel):
        ids = experiment.target
        if ids is None:
            ids = [v.state.id for v in base.vehicles if not v.ego]
        return ViolationHooks(sample_violations(experiment, base.horizon, rng, ids, base.lon, base.lat))
    if isinstance(experiment, StateNoiseModel):
        return NoiseHooks(experiment, base.ego_ids, rng)
    raise TypeError(f"unsupported experiment model {type(experiment).__name__}")


def run_episode(base: ScenarioConfig, experiment, episode_id: int, master_seed: int) -> EpisodeRecord:
    seed = master_seed + episode_id
    rng = np.random.default_rng(seed)
    cfg = randomize_scenario(base, rng)
    res = run_scenario(cfg, make_hooks(cfg, experiment, rng), keep_trace=False)
    return EpisodeRecord(episode_id, seed, res.max_risk, res.collided, res.t_collision,
                         res.min_d_lon, res.min_d_lat, res.max_r_lon, res.max_r_lat)


def _episode_task(args):
    return run_episode(*args)


def default_workers() -> int:
    env = os.environ.get("RSS_RISK_THREADS")
    if env:
        return max(1, int(env))
    return 1


def run_campaign(base: ScenarioConfig, experiment, episodes: int, master_seed: int,
                 n_perms: int = 999, workers: int | None = None) -> CampaignResult:
    """Run ``episodes`` seeded episodes (seed = master_seed + episode_id) and
    measure how episode max risk relates to collisions.

    Records come back in episode order whatever the worker count, so the
    result depends only on the inputs.
    """
    if episodes < 2:
        raise ValueError("episodes must be >= 2")
    base.validate()
    workers = workers or default_workers()
    tasks = [(base, experiment, i, master_seed) for i in range(episodes)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(_episode_task, tasks, chunksize=8))
    else:
        records = [_episode_task(t) for t in tasks]
    return summarize(records, n_perms, master_seed, _experiment_name(experiment))


def _experiment_name(experiment) -> str:
    if isinstance(experiment, BehaviorViolationModel):
        return "behavior"
    if isinstance(experiment, StateNoiseModel):
        return "state"
    return "baseline"


def summarize(records, n_perms: int = 999, master_seed: int = 0, experiment: str = "baseline") -> CampaignResult:
    risk = [r.max_risk for r in records]
    hit = [r.collision for r in records]
    result = CampaignResult(list(records), episodes=len(records), collisions=sum(hit),
                            experiment=experiment, master_seed=master_seed)
    if stats.is_degenerate(risk, hit):
        return result
    result.degenerate = False
    result.point_biserial = stats.point_biserial(risk, hit)
    result.auc = stats.auc(risk, hit)
    # the permutation stream is seeded apart from the episodes
    rng = np.random.default_rng([master_seed, len(records), 0x5EED])
    result.permutation_p = stats.permutation_p(risk, hit, n_perms, rng)
    return result


# -- brute-force check of the zero-risk claim ----------------------------------


class PreconditionError(ValueError):
    pass


@dataclass
class VerificationResult:
    verified: bool
    profiles_checked: int
    # (t, {vehicle_id: (x, y)}) up to the first contact
    counterexample: list[tuple[float, dict]] | None = None
    t_contact: float | None = None


def _const_accel(v0, a, t, clamp):
    """Displacement and speed under constant ``a``; with ``clamp`` the speed stops at 0."""
    if clamp:
        t_stop = np.where(a < 0, v0 / np.maximum(-a, 1e-300), np.inf)
        te = np.minimum(t, t_stop)
    else:
        te = t
    return v0 * te + 0.5 * a * te * te, v0 + a * te


def _brake_to_rest(v0, b, t):
    """Decelerate the magnitude of a signed speed at rate ``b`` until it is zero."""
    s = np.sign(v0)
    te = np.minimum(t, np.abs(v0) / b)
    return v0 * te - 0.5 * s * b * te * te, v0 - s * b * te


def _profiles(x0, v0, rho, times, phase1, phase2, mode, clamp):
    """Positions for every (phase-1, phase-2) level pair, shape (P, T).

    Phase 1 holds a constant acceleration for ``rho`` seconds; phase 2 either
    holds another constant acceleration (``mode="accel"``) or brakes to rest
    at a given rate (``mode="brake"``).
    """
    a1, p2 = np.meshgrid(phase1, phase2, indexing="ij")
    a1, p2 = a1.reshape(-1, 1), p2.reshape(-1, 1)
    t = times.reshape(1, -1)
    d1, v1 = _const_accel(v0, a1, np.minimum(t, rho), clamp)
    t2 = np.maximum(t - rho, 0.0)
    if mode == "brake":
        d2, _ = _brake_to_rest(v1, p2, t2)
    else:
        d2, _ = _const_accel(v1, p2, t2, clamp)
    return x0 + d1 + d2


def verify_zero_risk(a: VehicleState, b: VehicleState, lon: LongitudinalParams, lat: LateralParams,
                     rp: RiskParams = RiskParams(), horizon: float = 10.0, grid_levels: int = 5,
                     dt: float = 0.1) -> VerificationResult:
    """Search for a collision from a zero-risk pair under the RSS assumptions.

    Every vehicle follows a two-phase piecewise-constant profile switching at
    the response time. Longitudinally the rear car accelerates by at most
    ``a_max_accel`` and then brakes to rest at a rate in
    ``[a_min_brake, a_cap_brake]``; the front car stays within
    ``[-a_max_brake, a_max_accel]``. Laterally each car accelerates within
    ``+-a_lat_max_accel`` and then brakes its lateral speed to zero at a rate
    in ``[a_lat_min_brake, a_lat_cap_brake]``. Each range is split into
    ``grid_levels`` values.

    The two axes evolve independently, so contact is possible iff some
    instant has both a longitudinally and a laterally overlapping profile;
    this covers all combinations without enumerating their product.

    The safe longitudinal distance only bounds the gap at standstill, which
    is the minimum gap when ``a_min_brake <= a_max_brake``; outside that
    regime counterexamples are genuine.
    """
    lon_state, lat_state = pair_states(a, b)
    br = risk_breakdown(lon_state, lat_state, lon, lat, rp)
    if br.r > 0.0:
        raise PreconditionError(f"pair has nonzero risk r={br.r:.6g}")
    if grid_levels < 2 or dt <= 0 or horizon <= 0:
        raise ValueError("need grid_levels >= 2, dt > 0, horizon > 0")

    n = int(round(horizon / dt))
    times = np.arange(n + 1) * dt
    rear, front = order_lon(a, b)
    left, right = order_lat(a, b)
    L = grid_levels
    rho = lon.rho

    rear_acc = np.linspace(-lon.a_cap_brake, lon.a_max_accel, L)
    rear_brake = np.linspace(lon.a_min_brake, lon.a_cap_brake, L)
    front_acc = np.linspace(-lon.a_max_brake, lon.a_max_accel, L)
    xr = _profiles(rear.x, rear.v_x, rho, times, rear_acc, rear_brake, "brake", True)
    xf = _profiles(front.x, front.v_x, rho, times, front_acc, front_acc, "accel", True)
    half_len = 0.5 * (rear.length + front.length)
    lon_gap = np.abs(xf[None, :, :] - xr[:, None, :]) - half_len  # (Pr, Pf, T)
    lon_hit = lon_gap <= 0.0

    lat_acc = np.linspace(-lat.a_lat_max_accel, lat.a_lat_max_accel, L)
    lat_brake = np.linspace(lat.a_lat_min_brake, lat.a_lat_cap_brake, L)
    yl = _profiles(left.y, left.v_y, lat.rho, times, lat_acc, lat_brake, "brake", False)
    yr = _profiles(right.y, right.v_y, lat.rho, times, lat_acc, lat_brake, "brake", False)
    half_w = 0.5 * (left.width + right.width)
    lat_gap = np.abs(yr[None, :, :] - yl[:, None, :]) - half_w
    lat_hit = lat_gap <= 0.0

    checked = lon_hit.shape[0] * lon_hit.shape[1] * lat_hit.shape[0] * lat_hit.shape[1]
    both = lon_hit.any(axis=(0, 1)) & lat_hit.any(axis=(0, 1))
    if not both.any():
        return VerificationResult(True, checked)

    k = int(np.argmax(both))
    ir, jf = np.argwhere(lon_hit[:, :, k])[0]
    il, jr = np.argwhere(lat_hit[:, :, k])[0]
    x_of = {rear.id: xr[ir], front.id: xf[jf]}
    y_of = {left.id: yl[il], right.id: yr[jr]}
    counter = [
        (float(times[m]), {s.id: (float(x_of[s.id][m]), float(y_of[s.id][m])) for s in (a, b)})
        for m in range(k + 1)
    ]
    return VerificationResult(False, checked, counter, float(times[k]))


@dataclass
class VerificationReport:
    samples: int
    zero_risk: int
    verified: int
    counterexamples: list[tuple[VehicleState, VehicleState, VerificationResult]]


def sample_pair(rng: np.random.Generator, max_speed: float = 30.0, max_lat_speed: float = 1.5,
                lon_range: float = 80.0, lat_range: float = 5.0) -> tuple[VehicleState, VehicleState]:
    """Random two-vehicle state: uniform speeds, offsets and lateral velocities."""
    a = VehicleState("a", 0.0, 0.0, rng.uniform(0.0, max_speed), rng.uniform(-max_lat_speed, max_lat_speed))
    b = VehicleState("b", rng.uniform(-lon_range, lon_range), rng.uniform(-lat_range, lat_range),
                     rng.uniform(0.0, max_speed), rng.uniform(-max_lat_speed, max_lat_speed))
    return a, b


def verify_samples(lon: LongitudinalParams, lat: LateralParams, rp: RiskParams, samples: int,
                   rng: np.random.Generator, horizon: float = 10.0, grid_levels: int = 5,
                   dt: float = 0.1) -> VerificationReport:
    """Draw ``samples`` random pairs, keep the zero-risk ones and brute-force each."""
    report = VerificationReport(samples, 0, 0, [])
    for _ in range(samples):
        a, b = sample_pair(rng)
        lon_s, lat_s = pair_states(a, b)
        if risk_breakdown(lon_s, lat_s, lon, lat, rp).r > 0.0:
            continue
        report.zero_risk += 1
        res = verify_zero_risk(a, b, lon, lat, rp, horizon, grid_levels, dt)
        if res.verified:
            report.verified += 1
        else:
            report.counterexamples.append((a, b, res))
    return report
