import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from proxigraph.errors import EmptyWindow, InvalidStream
from proxigraph.features import (
    FeatureVector,
    ObservationWindow,
    RssiSample,
    extract_features,
    make_windows,
)
from proxigraph.records import Ambience

TOKEN = b"\xaa" * 16
TOKEN2 = b"\xbb" * 16


def sample(t_ms, rssi=-60, tx=0, token=TOKEN):
    return RssiSample(peer_token=token, rssi_dbm=rssi, tx_power_dbm=tx, timestamp_ms=t_ms)


def brute_force_windows(stream, window_ms, slide_ms):
    """Independent enumeration: every aligned slide position, per peer."""
    out = {}
    if not stream:
        return out
    horizon = max(s.timestamp_ms for s in stream)
    peers = {s.peer_token for s in stream}
    for peer in peers:
        for start in range(0, horizon + 1, slide_ms):
            inside = [
                s for s in stream
                if s.peer_token == peer and start <= s.timestamp_ms < start + window_ms
            ]
            if inside:
                out[(peer, start)] = inside
    return out


class TestMakeWindows:
    def test_single_sample_origin(self):
        windows = make_windows([sample(0)], window_ms=10_000, slide_ms=5_000)
        assert len(windows) == 1
        assert windows[0].window_start_ms == 0
        assert len(windows[0].samples) == 1

    def test_empty_stream(self):
        assert make_windows([], 10_000, 5_000) == []

    def test_matches_bruteforce_enumeration(self):
        stream = [sample(t * 1000) for t in range(20)]
        windows = make_windows(stream, 10_000, 5_000)
        expected = brute_force_windows(stream, 10_000, 5_000)
        assert len(windows) == len(expected)
        for w in windows:
            assert [s.timestamp_ms for s in w.samples] == [
                s.timestamp_ms for s in expected[(w.peer_token, w.window_start_ms)]
            ]

    def test_unsorted_stream_rejected(self):
        with pytest.raises(InvalidStream):
            make_windows([sample(5000), sample(0)], 10_000, 5_000)

    def test_bad_geometry_rejected(self):
        with pytest.raises(InvalidStream):
            make_windows([sample(0)], 5_000, 10_000)

    def test_peers_windowed_separately(self):
        stream = sorted(
            [sample(t * 1000) for t in range(10)] + [sample(t * 1000, token=TOKEN2) for t in range(10)],
            key=lambda s: s.timestamp_ms,
        )
        windows = make_windows(stream, 10_000, 5_000)
        assert all(len({s.peer_token for s in w.samples}) == 1 for w in windows)

    @given(
        st.lists(st.integers(min_value=0, max_value=120_000), min_size=0, max_size=60),
        st.integers(min_value=1, max_value=6),
        st.integers(min_value=1, max_value=4),
    )
    @settings(max_examples=60, deadline=None)
    def test_partition_property(self, times, slide_units, window_factor):
        slide = slide_units * 1000
        window = slide * window_factor
        stream = [sample(t) for t in sorted(times)]
        windows = make_windows(stream, window, slide)
        cap = math.ceil(window / slide)
        counts = {}
        for w in windows:
            assert w.window_start_ms % slide == 0
            assert w.window_start_ms >= 0
            for s in w.samples:
                assert w.window_start_ms <= s.timestamp_ms < w.window_start_ms + window
                counts[id(s)] = counts.get(id(s), 0) + 1
        assert all(c <= cap for c in counts.values())
        expected = brute_force_windows(stream, window, slide)
        assert len(windows) == len(expected)


class TestExtractFeatures:
    def test_constant_window(self):
        w = ObservationWindow(TOKEN, tuple(sample(t * 1000) for t in range(5)), 0, 10_000)
        fv = extract_features(w, reference_tx_power=0)
        assert fv.mean_dbm == -60
        assert fv.std_dbm == 0
        assert fv.slope_dbm_per_s == 0
        assert fv.sample_count == 5

    def test_two_point_slope(self):
        w = ObservationWindow(
            TOKEN, (sample(0, rssi=-50), sample(10_000, rssi=-60)), 0, 20_000
        )
        fv = extract_features(w, 0)
        assert fv.slope_dbm_per_s == pytest.approx(-1.0)

    def test_single_sample_slope_zero(self):
        w = ObservationWindow(TOKEN, (sample(3000, rssi=-44),), 0, 10_000)
        fv = extract_features(w, 0)
        assert fv.slope_dbm_per_s == 0.0
        assert fv.min_dbm == fv.max_dbm == fv.median_dbm == -44

    def test_tx_power_correction(self):
        hot = ObservationWindow(TOKEN, (sample(0, rssi=-56, tx=4),), 0, 10_000)
        ref = ObservationWindow(TOKEN, (sample(0, rssi=-60, tx=0),), 0, 10_000)
        assert extract_features(hot, 0).mean_dbm == extract_features(ref, 0).mean_dbm

    def test_empty_window_rejected(self):
        with pytest.raises(EmptyWindow):
            extract_features(ObservationWindow(TOKEN, (), 0, 10_000), 0)

    def test_matches_naive_oracle(self, rng):
        """Independent recomputation with textbook two-pass formulas."""
        for _ in range(50):
            n = int(rng.integers(1, 31))
            times = np.sort(rng.choice(np.arange(0, 30_000, 250), size=n, replace=False))
            rssis = rng.integers(-100, -30, size=n)
            txs = rng.integers(-8, 5, size=n)
            samples = tuple(
                sample(int(t), rssi=int(r), tx=int(x)) for t, r, x in zip(times, rssis, txs)
            )
            fv = extract_features(ObservationWindow(TOKEN, samples, 0, 30_000), 0)

            vals = [r - x for r, x in zip(rssis, txs)]
            ts = [t / 1000.0 for t in times]
            mean = sum(vals) / n
            std = math.sqrt(sum((v - mean) ** 2 for v in vals) / n)
            med = float(np.median(vals))
            if n > 1 and len(set(ts)) > 1:
                tbar = sum(ts) / n
                slope = sum((t - tbar) * (v - mean) for t, v in zip(ts, vals)) / sum(
                    (t - tbar) ** 2 for t in ts
                )
            else:
                slope = 0.0
            assert fv.mean_dbm == pytest.approx(mean, abs=1e-9)
            assert fv.std_dbm == pytest.approx(std, abs=1e-9)
            assert fv.median_dbm == pytest.approx(med, abs=1e-9)
            assert fv.min_dbm == min(vals) and fv.max_dbm == max(vals)
            assert fv.slope_dbm_per_s == pytest.approx(slope, abs=1e-9)
            assert fv.min_dbm <= fv.median_dbm <= fv.max_dbm
            assert fv.std_dbm >= 0


class TestRssiSampleValidation:
    def test_rssi_range(self):
        with pytest.raises(InvalidStream):
            sample(0, rssi=-200)
        with pytest.raises(InvalidStream):
            sample(0, rssi=30)

    def test_negative_timestamp(self):
        with pytest.raises(InvalidStream):
            sample(-1)

    def test_ambience_default(self):
        assert sample(0).ambience == Ambience.UNKNOWN
