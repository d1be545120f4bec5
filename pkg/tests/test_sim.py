import math

import numpy as np
import pytest

from proxigraph.errors import DegenerateTraining, InvalidConfig, InvalidDistance
from proxigraph.features import FeatureVector
from proxigraph.records import ProximityEvent, Ambience, Closeness
from proxigraph.sim import (
    Agent,
    ChannelParams,
    Scenario,
    ZonePlacement,
    calibrate_classifier,
    load_scenario,
    office_scenario,
    rssi_at_distance,
    run_scenario,
    score_detection,
    step_mobility,
)
from proxigraph.sim.calibrate import loss_and_grad
from proxigraph.sim.runner import GroundTruth
from proxigraph.zones import ZoneDef

from conftest import hash_of, make_event

H1, H2, H3 = hash_of("sim-1"), hash_of("sim-2"), hash_of("sim-3")


def still(h, x, y, duration_ms=60_000):
    return Agent(associate_hash=h, waypoints=((x, y, duration_ms + 60_000),))


def two_agent_scenario(d=1.0, sigma=0.0, duration_ms=60_000, zones=()):
    return Scenario(
        seed=7,
        duration_ms=duration_ms,
        width_m=30.0,
        height_m=20.0,
        agents=(still(H1, 5.0, 5.0, duration_ms), still(H2, 5.0 + d, 5.0, duration_ms)),
        channel=ChannelParams(shadow_sigma_db=sigma),
        zones=tuple(zones),
    )


class TestChannel:
    def test_reference_distance(self):
        assert rssi_at_distance(1.0, ChannelParams(shadow_sigma_db=0.0)) == pytest.approx(-40.0)

    def test_twenty_db_per_decade(self):
        p = ChannelParams(path_loss_exponent=2.0, shadow_sigma_db=0.0)
        assert rssi_at_distance(10.0, p) == pytest.approx(-60.0)

    def test_below_floor_is_none(self):
        p = ChannelParams(detection_floor_dbm=-60.0)
        assert rssi_at_distance(100.0, p) is None

    def test_nonpositive_distance(self):
        with pytest.raises(InvalidDistance):
            rssi_at_distance(0.0, ChannelParams())

    def test_monotone_decreasing_without_noise(self):
        p = ChannelParams(shadow_sigma_db=0.0, detection_floor_dbm=-300.0)
        values = [rssi_at_distance(d, p) for d in (0.5, 1, 2, 4, 8, 16, 32)]
        assert all(a > b for a, b in zip(values, values[1:]))

    def test_monte_carlo_mean(self, rng):
        p = ChannelParams(shadow_sigma_db=4.0, detection_floor_dbm=-1000.0)
        clean = rssi_at_distance(3.0, ChannelParams(shadow_sigma_db=0.0, detection_floor_dbm=-1000.0))
        draws = rng.normal(0.0, 4.0, size=100_000)
        mean = float(np.mean([rssi_at_distance(3.0, p, noise_db=n) for n in draws]))
        assert mean == pytest.approx(clean, abs=0.1)


class TestMobility:
    def test_single_waypoint_constant(self):
        sc = two_agent_scenario()
        for t in (0, 10_000, 59_000):
            assert step_mobility(sc, t)[H1] == (5.0, 5.0)

    def test_straight_leg_kinematics(self):
        agent = Agent(
            associate_hash=H1,
            waypoints=((0.0, 0.0, 0), (12.0, 0.0, 0)),
            speed_mps=1.2,
        )
        sc = Scenario(seed=1, duration_ms=20_000, width_m=20, height_m=10, agents=(agent,))
        x, y = step_mobility(sc, 5_000)[H1]
        assert (x, y) == pytest.approx((6.0, 0.0))

    def test_speed_bound_property(self, rng):
        for trial in range(10):
            sc = office_scenario(n_agents=4, duration_min=5, seed=int(rng.integers(0, 1000)))
            dt = 1000
            for t in range(0, sc.duration_ms - dt, 7_000):
                p0 = step_mobility(sc, t)
                p1 = step_mobility(sc, t + dt)
                for agent in sc.agents:
                    d = math.dist(p0[agent.associate_hash], p1[agent.associate_hash])
                    assert d <= agent.speed_mps * (dt / 1000.0) + 1e-9

    def test_start_outside_workspace_rejected(self):
        with pytest.raises(InvalidConfig):
            Scenario(
                seed=1, duration_ms=1000, width_m=10, height_m=10,
                agents=(still(H1, 50.0, 5.0),),
            )


class TestRunScenario:
    def test_stationary_pair_ground_truth(self):
        out = run_scenario(two_agent_scenario(d=1.0))
        gt = out.ground_truth
        assert len(gt.tick_ms) == 60
        assert np.allclose(gt.distance_series(H1, H2), 1.0)

    def test_streams_contain_both_directions(self):
        out = run_scenario(two_agent_scenario(d=1.0))
        assert set(out.streams) == {H1, H2}
        assert len(out.streams[H1]) == 60

    def test_same_seed_bit_identical(self):
        a = run_scenario(two_agent_scenario(d=2.0, sigma=4.0))
        b = run_scenario(two_agent_scenario(d=2.0, sigma=4.0))
        for h in (H1, H2):
            assert np.array_equal(a.streams[h].rssi_dbm, b.streams[h].rssi_dbm)
            assert np.array_equal(a.streams[h].timestamp_ms, b.streams[h].timestamp_ms)
        assert np.array_equal(a.ground_truth.positions, b.ground_truth.positions)
        assert a.token_schedule == b.token_schedule
        assert a.access_logs == b.access_logs

    def test_different_seed_differs(self):
        sc1 = two_agent_scenario(d=2.0, sigma=4.0)
        sc2 = Scenario(**{**sc1.__dict__, "seed": 8})
        a, b = run_scenario(sc1), run_scenario(sc2)
        assert not np.array_equal(a.streams[H1].rssi_dbm, b.streams[H1].rssi_dbm)

    def test_no_device_zone_gates_radio_and_logs_access(self):
        zone = ZonePlacement(
            zone=ZoneDef("cleanroom", personal_devices_allowed=False, capacity=4),
            x_m=0.0, y_m=0.0, w_m=30.0, h_m=20.0,
        )
        out = run_scenario(two_agent_scenario(d=1.0, zones=(zone,)))
        assert out.streams == {}
        by_agent = {e.associate_hash for e in out.access_logs}
        assert by_agent == {H1, H2}
        assert len(out.access_logs) == 2
        assert out.access_logs[0].entry_ms == 0
        assert out.access_logs[0].exit_ms == 60_000

    def test_policy_gate_partial_zone(self):
        # zone covers only agent 2's position: neither direction may see agent 2
        zone = ZonePlacement(
            zone=ZoneDef("cage", personal_devices_allowed=False, capacity=2),
            x_m=5.5, y_m=0.0, w_m=24.5, h_m=20.0,
        )
        out = run_scenario(two_agent_scenario(d=1.0, zones=(zone,)))
        assert H2 not in out.streams  # no scanning inside the zone
        assert H1 not in out.streams  # its only peer never transmits

    def test_tokens_rotate_in_stream(self):
        sc = Scenario(
            seed=3, duration_ms=2_000_000, width_m=30, height_m=20,
            agents=(still(H1, 5, 5, 2_000_000), still(H2, 6, 5, 2_000_000)),
            rotation_ms=900_000,
        )
        out = run_scenario(sc)
        tokens = {s.peer_token for s in out.streams[H1].samples()}
        assert len(tokens) == 3  # epochs 0, 1, 2
        resolver = out.resolver()
        for s in out.streams[H1].samples()[:50]:
            assert resolver.resolve(s.peer_token, s.timestamp_ms // 900_000) == H2


class TestCalibration:
    def test_separable_set_perfect_accuracy(self, rng):
        labeled = []
        for _ in range(200):
            near = rng.random() < 0.5
            mean = -45.0 + rng.normal(0, 1) if near else -75.0 + rng.normal(0, 1)
            labeled.append((FeatureVector(mean, 2.0, mean - 3, mean + 3, mean, 0.0, 10), near))
        model = calibrate_classifier(labeled)
        from proxigraph.classifier import ProximityClass, classify_proximity

        hits = sum(
            (classify_proximity(fv, model).proximity == ProximityClass.NEAR) == y
            for fv, y in labeled
        )
        assert hits == len(labeled)

    def test_single_class_rejected(self):
        fv = FeatureVector(-50, 1, -52, -48, -50, 0, 5)
        with pytest.raises(DegenerateTraining):
            calibrate_classifier([(fv, True), (fv, True)])

    def test_gradient_matches_finite_differences(self, rng):
        x = rng.normal(size=(40, 6))
        y = (rng.random(40) < 0.5).astype(float)
        w = rng.normal(size=6) * 0.5
        b = 0.3
        _, grad_w, grad_b = loss_and_grad(w, b, x, y)
        eps = 1e-6
        for k in range(6):
            bump = np.zeros(6)
            bump[k] = eps
            hi, _, _ = loss_and_grad(w + bump, b, x, y)
            lo, _, _ = loss_and_grad(w - bump, b, x, y)
            fd = (hi - lo) / (2 * eps)
            assert abs(grad_w[k] - fd) <= 1e-5 * max(1.0, abs(fd))
        hi, _, _ = loss_and_grad(w, b + eps, x, y)
        lo, _, _ = loss_and_grad(w, b - eps, x, y)
        assert abs(grad_b - (hi - lo) / (2 * eps)) <= 1e-5


def uniform_gt(pair_distances, ticks=120, period=1000):
    """Ground truth with constant pairwise distances (agents on a line)."""
    hashes = sorted(pair_distances)
    positions = np.zeros((ticks, len(hashes), 2))
    for i, h in enumerate(hashes):
        positions[:, i, 0] = pair_distances[h]
    return GroundTruth(
        tick_ms=np.arange(0, ticks * period, period, dtype=np.int64),
        agent_hashes=hashes,
        positions=positions,
        sample_period_ms=period,
    )


class TestScoreDetection:
    def test_perfect_detection(self):
        gt = uniform_gt({H1: 0.0, H2: 1.0})
        episodes = gt.episodes(2.0, 30_000)
        events = [make_event(a, b, s, t) for (a, b), spans in episodes.items() for s, t in spans]
        score = score_detection(events, gt, 2.0, 30_000)
        assert score.precision == 1.0 and score.recall == 1.0 and score.f1 == 1.0

    def test_zero_events_convention(self):
        gt = uniform_gt({H1: 0.0, H2: 1.0})
        score = score_detection([], gt, 2.0, 30_000)
        assert score.recall == 0.0
        assert score.precision == 1.0

    def test_matcher_against_quadratic_oracle(self, rng):
        gt = uniform_gt({H1: 0.0, H2: 1.0, H3: 10.0})
        episodes = gt.episodes(2.0, 30_000)
        for trial in range(30):
            events = []
            for (a, b), spans in episodes.items():
                for s, t in spans:
                    for _ in range(int(rng.integers(0, 3))):
                        shift = int(rng.integers(-200_000, 200_000))
                        dur = int(rng.integers(10_000, 120_000))
                        events.append(make_event(a, b, max(0, s + shift), max(0, s + shift) + dur))
            got = score_detection(events, gt, 2.0, 30_000)

            matched_ev = 0
            matched_ep = set()
            for i, e in enumerate(events):
                hit = False
                for pair, spans in episodes.items():
                    if pair != e.pair:
                        continue
                    for k, (s, t) in enumerate(spans):
                        if e.start_ms < t and s < e.end_ms:
                            matched_ep.add((pair, k))
                            hit = True
                matched_ev += hit
            total_ep = sum(len(s) for s in episodes.values())
            assert got.matched_events == matched_ev
            assert got.matched_episodes == len(matched_ep)
            exp_p = matched_ev / len(events) if events else 1.0
            exp_r = len(matched_ep) / total_ep if total_ep else 1.0
            assert got.precision == pytest.approx(exp_p)
            assert got.recall == pytest.approx(exp_r)


class TestScenarioFile:
    def test_yaml_round_trip(self):
        text = """
seed: 5
duration_ms: 120000
workspace: {width_m: 40, height_m: 25}
ambience: air_conditioned
channel: {path_loss_exponent: 2.7, shadow_sigma_db: 2.0}
zones:
  - {zone_id: cage, personal_devices_allowed: false, capacity: 4, rect: [10, 10, 8, 5]}
agents:
  - {enterprise_id: alice, waypoints: [[5, 5, 60000], [20, 12, 30000]]}
  - {enterprise_id: bob, speed_mps: 0.9, waypoints: [[6, 5, 120000]]}
"""
        sc = load_scenario(text)
        assert sc.seed == 5
        assert len(sc.agents) == 2
        assert sc.agents[0].waypoints[1] == (20.0, 12.0, 30_000)
        assert sc.channel.path_loss_exponent == 2.7
        assert sc.zones[0].zone.personal_devices_allowed is False
        assert sc.ambience == Ambience.AIR_CONDITIONED
        out = run_scenario(sc)
        assert len(out.ground_truth.tick_ms) == 120

    def test_seed_override(self):
        text = """
seed: 5
duration_ms: 1000
workspace: {width_m: 10, height_m: 10}
agents:
  - {enterprise_id: solo, waypoints: [[1, 1, 1000]]}
"""
        assert load_scenario(text, seed_override=99).seed == 99
