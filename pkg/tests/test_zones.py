import numpy as np
import pytest

from proxigraph.errors import InvalidEvent
from proxigraph.records import Ambience, Closeness
from proxigraph.zones import (
    AccessLogEntry,
    InfraSighting,
    ZoneDef,
    co_occupancy_events,
    read_access_log_csv,
    read_sightings_csv,
    sightings_to_intervals,
    write_access_log_csv,
    write_sightings_csv,
)

A, B, C = ("aa" * 32, "bb" * 32, "cc" * 32)
ENROLL = {"tag-a": A, "tag-b": B, "tag-c": C}
MIN = 60_000


def log(h, zone, entry_s, exit_s):
    return AccessLogEntry(h, zone, entry_s * 1000, exit_s * 1000)


def intervals_oracle(sightings, enrollment, gap_ms, min_dwell_ms):
    """Naive split-scan: sort each (owner, zone) series, cut at gaps."""
    series = {}
    skipped = 0
    for s in sightings:
        owner = enrollment.get(s.tag_id)
        if owner is None:
            skipped += 1
            continue
        series.setdefault((owner, s.zone_id), []).append(s.sighted_ms)
    out = []
    for (owner, zone), times in sorted(series.items()):
        times = sorted(times)
        segments = [[times[0]]]
        for t in times[1:]:
            if t - segments[-1][-1] <= gap_ms:
                segments[-1].append(t)
            else:
                segments.append([t])
        for seg in segments:
            lo, hi = seg[0], seg[-1]
            if hi == lo:
                hi = lo + min_dwell_ms
            out.append((owner, zone, lo, hi))
    return out, skipped


class TestSightingsToIntervals:
    def test_merge_within_gap(self):
        sightings = [InfraSighting("tag-a", "lab", t * 1000) for t in (0, 60, 120)]
        result = sightings_to_intervals(sightings, ENROLL, gap_ms=120_000)
        assert len(result.entries) == 1
        assert (result.entries[0].entry_ms, result.entries[0].exit_ms) == (0, 120_000)

    def test_split_beyond_gap(self):
        sightings = [InfraSighting("tag-a", "lab", 0), InfraSighting("tag-a", "lab", 300_000)]
        result = sightings_to_intervals(sightings, ENROLL, gap_ms=120_000)
        assert len(result.entries) == 2

    def test_singleton_gets_min_dwell(self):
        result = sightings_to_intervals([InfraSighting("tag-a", "lab", 5000)], ENROLL)
        assert (result.entries[0].entry_ms, result.entries[0].exit_ms) == (5000, 65_000)

    def test_unenrolled_skipped_and_counted(self):
        sightings = [InfraSighting("ghost", "lab", 0), InfraSighting("tag-a", "lab", 0)]
        result = sightings_to_intervals(sightings, ENROLL)
        assert result.skipped_unenrolled == 1
        assert len(result.entries) == 1

    def test_zones_kept_separate(self):
        sightings = [InfraSighting("tag-a", "lab", 0), InfraSighting("tag-a", "store", 30_000)]
        result = sightings_to_intervals(sightings, ENROLL)
        assert len(result.entries) == 2

    def test_random_streams_match_scan_oracle(self, rng):
        tags = list(ENROLL) + ["ghost"]
        zones = ["z1", "z2", "z3"]
        for trial in range(40):
            sightings = [
                InfraSighting(
                    tags[int(rng.integers(0, len(tags)))],
                    zones[int(rng.integers(0, len(zones)))],
                    int(rng.integers(0, 3_600_000)),
                )
                for _ in range(int(rng.integers(0, 60)))
            ]
            gap = int(rng.integers(30_000, 300_000))
            dwell = int(rng.integers(10_000, 120_000))
            result = sightings_to_intervals(sightings, ENROLL, gap_ms=gap, min_dwell_ms=dwell)
            expected, skipped = intervals_oracle(sightings, ENROLL, gap, dwell)
            got = [(e.associate_hash, e.zone_id, e.entry_ms, e.exit_ms) for e in result.entries]
            assert got == expected
            assert result.skipped_unenrolled == skipped


def quadratic_oracle(logs, min_overlap_ms):
    """All pairs, all zones, straight comparison."""
    out = set()
    logs = list(logs)
    for i in range(len(logs)):
        for j in range(i + 1, len(logs)):
            p, q = logs[i], logs[j]
            if p.zone_id != q.zone_id or p.associate_hash == q.associate_hash:
                continue
            start = max(p.entry_ms, q.entry_ms)
            end = min(p.exit_ms, q.exit_ms)
            if end - start >= min_overlap_ms:
                a, b = sorted((p.associate_hash, q.associate_hash))
                out.add((a, b, start, end))
    return out


class TestCoOccupancy:
    def test_overlap_arithmetic(self):
        events = co_occupancy_events([log(A, "lab", 0, 600), log(B, "lab", 300, 1200)],
                                     min_overlap_ms=300_000)
        assert len(events) == 1
        e = events[0]
        assert (e.start_ms, e.end_ms) == (300_000, 600_000)
        assert e.closeness == Closeness.CO_LOCATED
        assert e.ambience == Ambience.INDOOR

    def test_disjoint_no_event(self):
        events = co_occupancy_events([log(A, "lab", 0, 300), log(B, "lab", 400, 900)],
                                     min_overlap_ms=300_000)
        assert events == []

    def test_different_zones_no_event(self):
        events = co_occupancy_events([log(A, "lab", 0, 900), log(B, "store", 0, 900)],
                                     min_overlap_ms=300_000)
        assert events == []

    def test_short_overlap_filtered(self):
        events = co_occupancy_events([log(A, "lab", 0, 400), log(B, "lab", 200, 900)],
                                     min_overlap_ms=300_000)
        assert events == []

    def test_random_intervals_match_quadratic_oracle(self, rng):
        people = [f"{i:02d}" * 32 for i in range(12)]
        zones = [f"zone-{k}" for k in range(5)]
        for trial in range(20):
            logs = []
            for _ in range(200):
                entry = int(rng.integers(0, 7_200_000))
                logs.append(AccessLogEntry(
                    people[int(rng.integers(0, len(people)))],
                    zones[int(rng.integers(0, len(zones)))],
                    entry,
                    entry + int(rng.integers(1, 3_600_000)),
                ))
            min_overlap = int(rng.integers(60_000, 900_000))
            events = co_occupancy_events(logs, min_overlap_ms=min_overlap)
            got = {(e.peer_a_hash, e.peer_b_hash, e.start_ms, e.end_ms) for e in events}
            assert got == quadratic_oracle(logs, min_overlap)
            # overlap exactness: each event's span is the true intersection
            for e in events:
                assert e.end_ms - e.start_ms >= min_overlap

    def test_input_order_symmetry(self, rng):
        logs = [log(A, "lab", 0, 900), log(B, "lab", 100, 700), log(C, "lab", 200, 1000)]
        base = co_occupancy_events(logs, min_overlap_ms=60_000)
        for _ in range(5):
            perm = [logs[i] for i in rng.permutation(len(logs))]
            assert co_occupancy_events(perm, min_overlap_ms=60_000) == base


class TestValidationAndCsv:
    def test_bad_interval_rejected(self):
        with pytest.raises(InvalidEvent):
            AccessLogEntry(A, "lab", 100, 100)

    def test_zone_capacity_validated(self):
        with pytest.raises(InvalidEvent):
            ZoneDef("lab", False, 0)

    def test_access_log_round_trip(self):
        entries = [log(A, "lab", 0, 900), log(B, "store", 10, 20)]
        assert read_access_log_csv(write_access_log_csv(entries)) == entries

    def test_sightings_round_trip(self):
        sightings = [InfraSighting("tag-a", "lab", 0), InfraSighting("tag-b", "lab", 99)]
        assert read_sightings_csv(write_sightings_csv(sightings)) == sightings
