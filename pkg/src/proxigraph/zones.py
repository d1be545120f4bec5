"""Device-free mode: CoLocated proximity events derived from access-management
logs and BLE-infrastructure sightings in zones where personal devices are not
allowed.

Co-occupancy is coarser evidence than a device-measured Near contact; the
resulting events carry closeness CoLocated and inherit that class's lower
risk factor downstream.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Iterable, Mapping

from .errors import InvalidEvent
from .records import Ambience, Closeness, ProximityEvent

SIGHTING_GAP_MS_DEFAULT = 120_000
MIN_DWELL_MS_DEFAULT = 60_000
MIN_OVERLAP_MS_DEFAULT = 300_000


@dataclass(frozen=True)
class ZoneDef:
    zone_id: str
    personal_devices_allowed: bool
    capacity: int

    def __post_init__(self):
        if self.capacity < 1:
            raise InvalidEvent(f"zone {self.zone_id}: capacity must be >= 1")


@dataclass(frozen=True)
class AccessLogEntry:
    associate_hash: str
    zone_id: str
    entry_ms: int
    exit_ms: int

    def __post_init__(self):
        if self.exit_ms <= self.entry_ms:
            raise InvalidEvent(f"exit_ms {self.exit_ms} must be > entry_ms {self.entry_ms}")


@dataclass(frozen=True)
class InfraSighting:
    tag_id: str
    zone_id: str
    sighted_ms: int


@dataclass(frozen=True)
class IntervalResult:
    entries: tuple[AccessLogEntry, ...]
    skipped_unenrolled: int


def sightings_to_intervals(
    sightings: Iterable[InfraSighting],
    enrollment: Mapping[str, str],  # tag_id -> associate_hash
    gap_ms: int = SIGHTING_GAP_MS_DEFAULT,
    min_dwell_ms: int = MIN_DWELL_MS_DEFAULT,
) -> IntervalResult:
    """Merge per (tag, zone) sightings at most gap_ms apart into presence
    intervals. A lone sighting (or several at one instant) becomes an interval
    of min_dwell_ms. Sightings with an unenrolled tag are skipped and counted.
    """
    if gap_ms <= 0:
        raise InvalidEvent("gap_ms must be > 0")
    skipped = 0
    groups: dict[tuple[str, str], list[int]] = {}
    for s in sightings:
        owner = enrollment.get(s.tag_id)
        if owner is None:
            skipped += 1
            continue
        groups.setdefault((owner, s.zone_id), []).append(s.sighted_ms)

    entries: list[AccessLogEntry] = []
    for (owner, zone_id), times in sorted(groups.items()):
        times.sort()
        seg_start = times[0]
        prev = times[0]
        for t in times[1:] + [None]:
            if t is not None and t - prev <= gap_ms:
                prev = t
                continue
            exit_ms = prev if prev > seg_start else seg_start + min_dwell_ms
            entries.append(
                AccessLogEntry(associate_hash=owner, zone_id=zone_id, entry_ms=seg_start, exit_ms=exit_ms)
            )
            if t is not None:
                seg_start = prev = t
    return IntervalResult(entries=tuple(entries), skipped_unenrolled=skipped)


def co_occupancy_events(
    logs: Iterable[AccessLogEntry],
    min_overlap_ms: int = MIN_OVERLAP_MS_DEFAULT,
) -> list[ProximityEvent]:
    """CoLocated events for every unordered pair whose presence intervals in
    the same zone overlap by at least min_overlap_ms.

    Sweep per zone in entry order keeping an active set; an interval is
    evicted once it can no longer reach the overlap threshold with anything
    later, so the work is O(n log n + output).
    """
    if min_overlap_ms <= 0:
        raise InvalidEvent("min_overlap_ms must be > 0")
    by_zone: dict[str, list[AccessLogEntry]] = {}
    for entry in logs:
        by_zone.setdefault(entry.zone_id, []).append(entry)

    events: list[ProximityEvent] = []
    for zone_id in sorted(by_zone):
        intervals = sorted(by_zone[zone_id], key=lambda e: (e.entry_ms, e.exit_ms, e.associate_hash))
        active: list[AccessLogEntry] = []
        for cur in intervals:
            active = [a for a in active if a.exit_ms - cur.entry_ms >= min_overlap_ms]
            if cur.exit_ms - cur.entry_ms >= min_overlap_ms:
                for a in active:
                    if a.associate_hash == cur.associate_hash:
                        continue
                    start = cur.entry_ms  # sorted by entry, so cur enters last
                    end = min(a.exit_ms, cur.exit_ms)
                    events.append(
                        ProximityEvent(
                            peer_a_hash=a.associate_hash,
                            peer_b_hash=cur.associate_hash,
                            start_ms=start,
                            end_ms=end,
                            closeness=Closeness.CO_LOCATED,
                            peak_confidence=1.0,
                            ambience=Ambience.INDOOR,
                        )
                    )
            active.append(cur)
    events.sort(key=lambda e: (e.start_ms, e.end_ms, e.pair))
    return events


def read_access_log_csv(text: str) -> list[AccessLogEntry]:
    """Header-less CSV: associate_hash,zone_id,entry_ms,exit_ms."""
    out = []
    for row in csv.reader(io.StringIO(text)):
        if not row:
            continue
        out.append(AccessLogEntry(row[0], row[1], int(row[2]), int(row[3])))
    return out


def write_access_log_csv(entries: Iterable[AccessLogEntry]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    for e in entries:
        writer.writerow([e.associate_hash, e.zone_id, e.entry_ms, e.exit_ms])
    return buf.getvalue()


def read_sightings_csv(text: str) -> list[InfraSighting]:
    """Header-less CSV: tag_id,zone_id,sighted_ms."""
    out = []
    for row in csv.reader(io.StringIO(text)):
        if not row:
            continue
        out.append(InfraSighting(row[0], row[1], int(row[2])))
    return out


def write_sightings_csv(sightings: Iterable[InfraSighting]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    for s in sightings:
        writer.writerow([s.tag_id, s.zone_id, s.sighted_ms])
    return buf.getvalue()
