import dataclasses

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.stats import pointbiserialr

from rssrisk import stats
from rssrisk.config import default_config
from rssrisk.experiments import (
    BehaviorViolationModel,
    EpisodeRecord,
    NoiseHooks,
    PreconditionError,
    StateNoiseModel,
    ViolationEvent,
    ViolationHooks,
    perturb_perception,
    run_campaign,
    run_episode,
    sample_pair,
    sample_violations,
    summarize,
    verify_samples,
    verify_zero_risk,
)
from rssrisk.geometry import VehicleState, pair_states
from rssrisk.rss_core import LateralParams, LongitudinalParams, RiskParams, risk_breakdown

from oracles import auc_pairs, point_biserial_textbook

LON = LongitudinalParams(rho=1.0, a_max_accel=2.0, a_min_brake=4.0, a_max_brake=8.0, a_cap_brake=10.0)
LAT = LateralParams(rho=0.5, a_lat_max_accel=1.0, a_lat_min_brake=2.0, a_lat_cap_brake=4.0)


class TestViolations:
    def test_rate_zero(self):
        rng = np.random.default_rng(0)
        assert sample_violations(BehaviorViolationModel(rate=0.0), 20.0, rng, ["a"], LON, LAT) == []

    def test_poisson_mean(self):
        rng = np.random.default_rng(1)
        model = BehaviorViolationModel(rate=0.25)
        counts = np.array([len(sample_violations(model, 20.0, rng, ["a", "b"], LON, LAT))
                           for _ in range(10_000)])
        se = np.sqrt(5.0 / counts.size)
        assert abs(counts.mean() - 5.0) < 3 * se

    def test_events_within_horizon(self):
        rng = np.random.default_rng(2)
        events = sample_violations(BehaviorViolationModel(rate=2.0), 10.0, rng, ["a", "b"], LON, LAT)
        assert events
        assert all(0 <= e.start < 10.0 and e.vehicle_id in ("a", "b") for e in events)
        assert [e.start for e in events] == sorted(e.start for e in events)

    def test_brake_command_saturated(self):
        rng = np.random.default_rng(3)
        events = sample_violations(BehaviorViolationModel(rate=5.0, brake_excess=1.5), 20.0, rng, ["a"], LON, LAT)
        brakes = {e.a_x for e in events if e.kind == "brake"}
        assert brakes == {-10.0}

    def test_commands_within_capability(self):
        rng = np.random.default_rng(4)
        model = BehaviorViolationModel(rate=5.0, brake_excess=3.0, accel_excess=50.0)
        for e in sample_violations(model, 20.0, rng, ["a"], LON, LAT):
            if e.a_x is not None:
                assert abs(e.a_x) <= LON.a_cap_brake
            if e.a_y is not None:
                assert abs(e.a_y) <= LAT.a_lat_cap_brake

    @pytest.mark.parametrize("kwargs", [dict(rate=-1), dict(duration=0), dict(brake_excess=1.0),
                                        dict(accel_excess=0.5)])
    def test_invalid_model(self, kwargs):
        with pytest.raises(ValueError):
            BehaviorViolationModel(**kwargs)

    def test_hooks_override_only_while_active(self):
        hooks = ViolationHooks([ViolationEvent("a", 1.0, 2.0, "brake", -9.0, None),
                                ViolationEvent("a", 2.0, 2.0, "swerve", None, 1.0)])
        assert hooks.override("a", 0.5) == (None, None)
        assert hooks.override("a", 1.5) == (-9.0, None)
        assert hooks.override("a", 2.5) == (-9.0, 1.0)
        assert hooks.override("a", 3.5) == (None, 1.0)
        assert hooks.override("b", 1.5) == (None, None)


class TestPerception:
    TRUE = VehicleState("a", 10.0, 1.0, 20.0, 0.5, 1.0, 0.1)

    def test_zero_sigmas_identity(self):
        rng = np.random.default_rng(0)
        model = StateNoiseModel(0.0, 0.0, 0.0)
        assert perturb_perception(self.TRUE, model, rng) == self.TRUE

    def test_position_noise_statistics(self):
        rng = np.random.default_rng(5)
        model = StateNoiseModel(sigma_pos=0.5, sigma_vel=0.0)
        dx = np.array([perturb_perception(self.TRUE, model, rng).x for _ in range(100_000)]) - self.TRUE.x
        n = dx.size
        assert abs(dx.mean()) < 3 * 0.5 / np.sqrt(n)
        # standard error of the sample std of a normal is sigma / sqrt(2 (n - 1))
        assert abs(dx.std(ddof=1) - 0.5) < 3 * 0.5 / np.sqrt(2 * (n - 1))

    def test_speed_floor(self):
        rng = np.random.default_rng(6)
        slow = dataclasses.replace(self.TRUE, v_x=0.1)
        model = StateNoiseModel(sigma_pos=0.0, sigma_vel=10.0)
        assert min(perturb_perception(slow, model, rng).v_x for _ in range(2000)) == 0.0

    def test_ground_truth_untouched(self):
        rng = np.random.default_rng(7)
        copy = dataclasses.replace(self.TRUE)
        perturb_perception(self.TRUE, StateNoiseModel(), rng)
        assert self.TRUE == copy

    def test_applies_to(self):
        states = [VehicleState("ego", 0, 0, 10), VehicleState("t", 30, 0, 10)]
        for mode, noisy in [("ego", {"ego"}), ("traffic", {"t"}), ("both", {"ego", "t"})]:
            hooks = NoiseHooks(StateNoiseModel(applies_to=mode), ["ego"], np.random.default_rng(0))
            for obs in ("ego", "t"):
                assert (hooks.perceive(obs, 0.0, states) != states) == (obs in noisy)

    def test_noise_held_within_frame(self):
        states = [VehicleState("ego", 0, 0, 10)]
        hooks = NoiseHooks(StateNoiseModel(period=0.1), ["ego"], np.random.default_rng(0))
        first = hooks.perceive("ego", 0.0, states)
        assert hooks.perceive("ego", 0.05, states) is first
        assert hooks.perceive("ego", 0.1, states) != first

    def test_invalid_noise(self):
        with pytest.raises(ValueError):
            StateNoiseModel(sigma_pos=-1.0)
        with pytest.raises(ValueError):
            StateNoiseModel(applies_to="nobody")


# -- statistics -------------------------------------------------------------------

PB_FIXTURE = ([0.9, 0.8, 0.2, 0.1], [1, 1, 0, 0])
AUC_FIXTURE = ([0.9, 0.2, 0.5, 0.5], [1, 0, 1, 0])


class TestStats:
    def test_point_biserial_fixture(self):
        x, y = PB_FIXTURE
        expected = point_biserial_textbook(x, y)
        assert expected == pytest.approx(0.9899494936611666, rel=1e-12)
        assert stats.point_biserial(x, y) == pytest.approx(expected, rel=1e-12)
        assert stats.point_biserial(x, y) == pytest.approx(pointbiserialr(y, x).statistic, rel=1e-12)

    def test_point_biserial_perfect(self):
        assert stats.point_biserial([1.0, 1.0, 0.0, 0.0], [1, 1, 0, 0]) == 1.0

    def test_degenerate(self):
        assert stats.point_biserial([0.3, 0.3, 0.3], [1, 0, 1]) is None
        assert stats.point_biserial([0.1, 0.3], [0, 0]) is None
        assert stats.is_degenerate([0.1, 0.3], [1, 1])

    def test_auc_fixture(self):
        x, y = AUC_FIXTURE
        assert auc_pairs(x, y) == 0.875
        assert stats.auc(x, y) == pytest.approx(0.875, abs=1e-15)

    def test_auc_extremes(self):
        assert stats.auc([0.9, 0.8, 0.1], [1, 1, 0]) == 1.0
        assert stats.auc([0.4, 0.4, 0.4, 0.4], [1, 0, 1, 0]) == 0.5

    def test_permutation_p_perfect_separation(self):
        x = np.linspace(0.0, 1.0, 20)
        y = x > 0.5
        p = stats.permutation_p(x, y, 999, np.random.default_rng(0))
        assert p == pytest.approx(1 / 1000)

    def test_permutation_p_exhaustive_small_case(self):
        # 4 choose 2 = 6 labellings, only the observed one reaches the maximum
        x, y = [0.9, 0.8, 0.2, 0.1], [1, 1, 0, 0]
        p = stats.permutation_p(x, y, 60_000, np.random.default_rng(1))
        assert p == pytest.approx(1 / 6, abs=0.01)

    def test_permutation_p_null(self):
        rng = np.random.default_rng(2)
        ps = []
        for _ in range(200):
            x = rng.normal(size=30)
            y = rng.permutation(np.arange(30) < 15)
            ps.append(stats.permutation_p(x, y, 199, rng))
        assert abs(np.mean(ps) - 0.5) < 0.06

    def test_permutation_p_needs_perms(self):
        with pytest.raises(ValueError):
            stats.permutation_p([0.1, 0.9], [0, 1], 0, np.random.default_rng(0))

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            stats.auc([0.1, 0.2], [1])


@settings(max_examples=100, deadline=None)
@given(st.lists(st.tuples(st.floats(0, 1), st.booleans()), min_size=2, max_size=40))
def test_statistic_ranges_and_oracles(rows):
    x = [r for r, _ in rows]
    y = [c for _, c in rows]
    if stats.is_degenerate(x, y):
        assert stats.point_biserial(x, y) is None
        return
    pb = stats.point_biserial(x, y)
    a = stats.auc(x, y)
    p = stats.permutation_p(x, y, 50, np.random.default_rng(0))
    assert -1.0 <= pb <= 1.0
    assert pb == pytest.approx(point_biserial_textbook(x, y), abs=1e-9)
    assert a == pytest.approx(auc_pairs(x, y), abs=1e-12)
    assert 1 / 51 <= p <= 1.0
    if min(r for r, c in rows if c) > max(r for r, c in rows if not c):
        assert a == 1.0


# -- campaigns -----------------------------------------------------------------


def rec(i, risk, hit):
    return EpisodeRecord(i, i, risk, hit, 1.0 if hit else None, 0.0, 0.0, risk, risk)


class TestCampaign:
    def test_hand_built_perfect_separation(self):
        res = summarize([rec(0, 1.0, True), rec(1, 0.0, False)], n_perms=99)
        assert not res.degenerate
        assert res.point_biserial == 1.0
        assert res.auc == 1.0
        assert (res.episodes, res.collisions) == (2, 1)

    def test_degenerate_flagged(self):
        res = summarize([rec(0, 0.0, False), rec(1, 0.0, False)])
        assert res.degenerate
        assert res.point_biserial is None and res.auc is None and res.permutation_p is None

    def test_baseline_campaign(self):
        cfg = default_config()
        res = run_campaign(cfg.scenario, None, 4, master_seed=3)
        assert res.degenerate
        assert res.collisions == 0
        assert all(r.max_risk == 0.0 for r in res.records)
        assert [r.seed for r in res.records] == [3, 4, 5, 6]

    def test_zero_rate_violations_equal_baseline(self):
        cfg = default_config()
        quiet = run_campaign(cfg.scenario, BehaviorViolationModel(rate=0.0), 2, master_seed=0)
        base = run_campaign(cfg.scenario, None, 2, master_seed=0)
        assert quiet.records == base.records

    def test_same_seed_same_result(self):
        cfg = default_config()
        a = run_campaign(cfg.scenario, BehaviorViolationModel(), 3, master_seed=9)
        b = run_campaign(cfg.scenario, BehaviorViolationModel(), 3, master_seed=9)
        assert a == b

    def test_episode_seed_stability(self):
        cfg = default_config()
        camp = run_campaign(cfg.scenario, StateNoiseModel(), 3, master_seed=20)
        assert run_episode(cfg.scenario, StateNoiseModel(), 2, 20) == camp.records[2]

    def test_parallel_matches_serial(self):
        cfg = default_config()
        model = BehaviorViolationModel()
        serial = run_campaign(cfg.scenario, model, 4, master_seed=1, workers=1)
        parallel = run_campaign(cfg.scenario, model, 4, master_seed=1, workers=2)
        assert serial == parallel

    def test_needs_two_episodes(self):
        with pytest.raises(ValueError):
            run_campaign(default_config().scenario, None, 1, master_seed=0)

    def test_collision_records_time(self):
        cfg = default_config()
        res = run_campaign(cfg.scenario, BehaviorViolationModel(rate=1.0), 6, master_seed=0)
        for r in res.records:
            assert (r.t_collision is not None) == r.collision
            assert 0.0 <= r.max_risk <= 1.0


# -- zero-risk verification -------------------------------------------------------


class TestVerify:
    def test_safe_following_pair(self):
        rear = VehicleState("rear", 0.0, 0.0, 20.0, length=5.0)
        front = VehicleState("front", 105.0, 0.0, 10.0, length=5.0)
        res = verify_zero_risk(rear, front, LON, LAT)
        assert res.verified
        assert res.counterexample is None
        assert res.profiles_checked == 25 * 25 * 25 * 25

    def test_full_risk_rejected(self):
        a = VehicleState("a", 0.0, 0.0, 10.0)
        with pytest.raises(PreconditionError):
            verify_zero_risk(a, VehicleState("b", 0.0, 0.0, 10.0), LON, LAT)

    def test_frozen_world(self):
        lon = LongitudinalParams(1.0, 0.0, 1.0, 1.0, 1.0)
        lat = LateralParams(1.0, 0.0, 1.0, 1.0)
        a, b = VehicleState("a", 0.0, 0.0, 0.0), VehicleState("b", 100.0, 0.0, 0.0)
        assert verify_zero_risk(a, b, lon, lat).verified

    def test_counterexample_when_assumptions_are_inconsistent(self):
        # the rear car brakes harder than the front one, so the gap is smallest
        # before standstill and a bound on the final gap is not enough
        lon = LongitudinalParams(0.5, 2.0, 10.0, 1.0, 12.0)
        rear = VehicleState("a", 0.0, 0.0, 20.0)
        front = VehicleState("b", 12.5, 0.0, 10.0)
        lon_s, lat_s = pair_states(rear, front)
        assert risk_breakdown(lon_s, lat_s, lon, LAT, RiskParams()).r == 0.0
        res = verify_zero_risk(rear, front, lon, LAT)
        assert not res.verified
        t, positions = res.counterexample[-1]
        assert t == res.t_contact
        assert abs(positions["b"][0] - positions["a"][0]) <= rear.length

    def test_default_params_sample(self):
        cfg = default_config().scenario
        rep = verify_samples(cfg.lon, cfg.lat, cfg.risk, 60, np.random.default_rng(0))
        assert rep.zero_risk > 0
        assert rep.verified == rep.zero_risk
        assert rep.counterexamples == []


@st.composite
def sound_params(draw):
    a_max_brake = draw(st.floats(1.0, 10.0))
    a_min_brake = draw(st.floats(0.5, 1.0)) * a_max_brake
    lon = LongitudinalParams(draw(st.floats(0.1, 2.0)), draw(st.floats(0.0, 4.0)), a_min_brake,
                             a_max_brake, a_max_brake * draw(st.floats(1.0, 1.5)))
    lat_min = draw(st.floats(0.2, 2.0))
    lat = LateralParams(draw(st.floats(0.1, 2.0)), draw(st.floats(0.0, 1.0)), lat_min,
                        lat_min * draw(st.floats(1.0, 2.0)))
    return lon, lat


@settings(max_examples=40, deadline=None)
@given(sound_params(), st.integers(0, 2**32 - 1))
def test_zero_risk_never_collides(params, seed):
    lon, lat = params
    rng = np.random.default_rng(seed)
    for _ in range(10):
        a, b = sample_pair(rng)
        lon_s, lat_s = pair_states(a, b)
        if risk_breakdown(lon_s, lat_s, lon, lat, RiskParams()).r > 0.0:
            continue
        assert verify_zero_risk(a, b, lon, lat, horizon=10.0, grid_levels=4, dt=0.1).verified
