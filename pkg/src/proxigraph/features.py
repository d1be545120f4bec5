"""RSSI windowing and feature extraction for the proximity classifier.

Windows are aligned to the stream origin (starts at integer multiples of the
slide); partial windows that would begin before t=0 are omitted. All RSSI
statistics are computed on tx-power-corrected values so a hot or weak radio
yields the same features as the reference device.
"""
from __future__ import annotations

import bisect
import math
from dataclasses import dataclass

from .errors import EmptyWindow, InvalidStream
from .records import Ambience

WINDOW_MS_DEFAULT = 10_000
SLIDE_MS_DEFAULT = 5_000
REFERENCE_TX_POWER_DEFAULT = 0

FEATURE_NAMES = ("mean_dbm", "std_dbm", "min_dbm", "max_dbm", "median_dbm", "slope_dbm_per_s")


@dataclass(frozen=True)
class RssiSample:
    peer_token: bytes  # 16-byte ephemeral token of the transmitter
    rssi_dbm: int
    tx_power_dbm: int
    timestamp_ms: int
    ambience: Ambience = Ambience.UNKNOWN

    def __post_init__(self):
        if not -127 <= self.rssi_dbm <= 20:
            raise InvalidStream(f"rssi_dbm out of range: {self.rssi_dbm}")
        if not -40 <= self.tx_power_dbm <= 20:
            raise InvalidStream(f"tx_power_dbm out of range: {self.tx_power_dbm}")
        if self.timestamp_ms < 0:
            raise InvalidStream("timestamp_ms must be non-negative")


@dataclass(frozen=True)
class ObservationWindow:
    peer_token: bytes
    samples: tuple[RssiSample, ...]
    window_start_ms: int
    window_len_ms: int

    @property
    def window_end_ms(self) -> int:
        return self.window_start_ms + self.window_len_ms


@dataclass(frozen=True)
class FeatureVector:
    mean_dbm: float
    std_dbm: float
    min_dbm: float
    max_dbm: float
    median_dbm: float
    slope_dbm_per_s: float
    sample_count: int

    def as_tuple(self) -> tuple[float, ...]:
        """The six model inputs; sample_count rides along as metadata only."""
        return (
            self.mean_dbm,
            self.std_dbm,
            self.min_dbm,
            self.max_dbm,
            self.median_dbm,
            self.slope_dbm_per_s,
        )


def make_windows(
    stream: list[RssiSample],
    window_ms: int = WINDOW_MS_DEFAULT,
    slide_ms: int = SLIDE_MS_DEFAULT,
) -> list[ObservationWindow]:
    """Slice a time-sorted mixed-peer stream into per-peer sliding windows.

    Empty windows are omitted. Returned windows are sorted by
    (window_start_ms, peer_token).
    """
    if slide_ms <= 0 or window_ms < slide_ms:
        raise InvalidStream(f"need window_ms >= slide_ms > 0, got {window_ms}/{slide_ms}")
    last = -1
    for s in stream:
        if s.timestamp_ms < last:
            raise InvalidStream("stream not sorted by timestamp")
        last = s.timestamp_ms

    by_peer: dict[bytes, list[RssiSample]] = {}
    for s in stream:
        by_peer.setdefault(s.peer_token, []).append(s)

    windows: list[ObservationWindow] = []
    for token, samples in by_peer.items():
        ts = [s.timestamp_ms for s in samples]
        starts: set[int] = set()
        for t in ts:
            lo_start = max(0, -(-(t - window_ms + 1) // slide_ms) * slide_ms)
            hi_start = (t // slide_ms) * slide_ms
            starts.update(range(lo_start, hi_start + 1, slide_ms))
        for start in sorted(starts):
            lo = bisect.bisect_left(ts, start)
            hi = bisect.bisect_left(ts, start + window_ms)
            if hi > lo:
                windows.append(
                    ObservationWindow(
                        peer_token=token,
                        samples=tuple(samples[lo:hi]),
                        window_start_ms=start,
                        window_len_ms=window_ms,
                    )
                )
    windows.sort(key=lambda w: (w.window_start_ms, w.peer_token))
    return windows


def extract_features(
    window: ObservationWindow, reference_tx_power: int = REFERENCE_TX_POWER_DEFAULT
) -> FeatureVector:
    """Summary statistics of the corrected RSSI trace inside one window.

    corrected = rssi - (tx_power - reference): normalizes every transmitter
    to the reference tx power. Slope is the least-squares fit in dBm/s and
    zero for single-sample windows.
    """
    if not window.samples:
        raise EmptyWindow("cannot extract features from an empty window")
    values = [s.rssi_dbm - (s.tx_power_dbm - reference_tx_power) for s in window.samples]
    times_s = [s.timestamp_ms / 1000.0 for s in window.samples]
    n = len(values)

    mean = sum(values) / n
    var = sum((v - mean) ** 2 for v in values) / n
    std = math.sqrt(var)
    ordered = sorted(values)
    mid = n // 2
    median = float(ordered[mid]) if n % 2 == 1 else (ordered[mid - 1] + ordered[mid]) / 2.0

    slope = 0.0
    if n > 1:
        t_mean = sum(times_s) / n
        denom = sum((t - t_mean) ** 2 for t in times_s)
        if denom > 0:
            slope = sum((t - t_mean) * (v - mean) for t, v in zip(times_s, values)) / denom

    return FeatureVector(
        mean_dbm=mean,
        std_dbm=std,
        min_dbm=float(min(values)),
        max_dbm=float(max(values)),
        median_dbm=median,
        slope_dbm_per_s=slope,
        sample_count=n,
    )
