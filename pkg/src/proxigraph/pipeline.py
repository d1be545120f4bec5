"""Per-device pipeline: RSSI stream in, intervention notices and spooled
ProximityEvents out.

The pipeline needs no server connection: events are appended to a local spool
file (one trace-service envelope per line) and flushed FIFO when an uploader
becomes available. One pipeline instance per device; instances share nothing.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional

from .classifier import LogisticModel, ProximityVerdict, classify_proximity
from .encounters import (
    AggregationResult,
    EncounterParams,
    EncounterState,
    InterventionNotice,
    aggregate_events,
    update_encounter,
)
from .features import (
    REFERENCE_TX_POWER_DEFAULT,
    SLIDE_MS_DEFAULT,
    WINDOW_MS_DEFAULT,
    RssiSample,
    extract_features,
    make_windows,
)
from .geofence import Geofence, point_in_geofence
from .records import ProximityEvent
from .tokens import ROTATION_MS_DEFAULT, TokenResolver, epoch_of


@dataclass(frozen=True)
class PipelineConfig:
    window_ms: int = WINDOW_MS_DEFAULT
    slide_ms: int = SLIDE_MS_DEFAULT
    reference_tx_power: int = REFERENCE_TX_POWER_DEFAULT
    rotation_ms: int = ROTATION_MS_DEFAULT
    encounter: EncounterParams = field(default_factory=EncounterParams)
    # contact definition for upload: runs shorter than this stay on-device
    # (they still drive notices); matches the default true-dwell bar
    min_event_ms: int = 30_000


@dataclass
class PipelineResult:
    notices: list[InterventionNotice]
    events: list[ProximityEvent]
    unresolved_windows: int
    gated_samples: int  # dropped because the device was outside the geofence


class DevicePipeline:
    """Batch-mode pipeline for one device over a recorded stream.

    `resolver` maps token bytes and a timestamp to a peer hash (the enterprise
    roster lookup); without it, no events can be attributed and only notices
    (keyed by token hex) are produced.
    """

    def __init__(
        self,
        self_hash: str,
        model: LogisticModel,
        resolver: Optional[TokenResolver] = None,
        config: PipelineConfig = PipelineConfig(),
        geofence: Optional[Geofence] = None,
        spool_path: Optional[Path] = None,
    ):
        self.self_hash = self_hash
        self.model = model
        self.resolver = resolver
        self.config = config
        self.geofence = geofence
        self.spool_path = Path(spool_path) if spool_path is not None else None

    def _resolve(self, token: bytes, timestamp_ms: int) -> Optional[str]:
        if self.resolver is None:
            return None
        return self.resolver.resolve(token, epoch_of(timestamp_ms, self.config.rotation_ms))

    def process(
        self,
        stream: list[RssiSample],
        positions: Optional[Callable[[int], tuple[float, float]]] = None,
    ) -> PipelineResult:
        """Run the full chain over a recorded stream.

        `positions` (timestamp -> own position) enables the geofence gate:
        samples scanned while outside the fence are discarded before any
        further processing, mirroring a device that stops scanning outside.
        """
        gated = 0
        if self.geofence is not None and positions is not None:
            kept = []
            for s in stream:
                if point_in_geofence(positions(s.timestamp_ms), self.geofence):
                    kept.append(s)
                else:
                    gated += 1
            stream = kept

        windows = make_windows(stream, self.config.window_ms, self.config.slide_ms)
        verdicts: list[tuple] = [
            (w, classify_proximity(extract_features(w, self.config.reference_tx_power), self.model))
            for w in windows
        ]

        notices = self._run_state_machines(verdicts)
        aggregation = aggregate_events(
            verdicts,
            self._resolve,
            self_hash=self.self_hash,
            slide_ms=self.config.slide_ms,
        )
        events = [
            e for e in aggregation.events if e.end_ms - e.start_ms >= self.config.min_event_ms
        ]
        if self.spool_path is not None:
            spool_events(self.spool_path, events)
        return PipelineResult(
            notices=notices,
            events=events,
            unresolved_windows=aggregation.unresolved_windows,
            gated_samples=gated,
        )

    def _run_state_machines(
        self, verdicts: list[tuple]
    ) -> list[InterventionNotice]:
        """Per-peer encounter state machines over slide-ordered verdicts.

        Peers are keyed by resolved hash where possible so an encounter
        survives a token rotation; unknown devices are tracked by token hex
        (a visitor still deserves the alert)."""
        keyed: dict[str, list[tuple[int, ProximityVerdict]]] = {}
        for window, verdict in verdicts:
            peer = self._resolve(window.peer_token, window.samples[0].timestamp_ms)
            key = peer if peer is not None else window.peer_token.hex()
            keyed.setdefault(key, []).append((window.window_start_ms, verdict))

        notices: list[InterventionNotice] = []
        for key in sorted(keyed):
            state = EncounterState(peer=key)
            best: dict[int, ProximityVerdict] = {}
            for start, verdict in keyed[key]:
                held = best.get(start)
                if held is None or verdict.confidence > held.confidence:
                    best[start] = verdict
            for start in sorted(best):
                state, notice = update_encounter(state, best[start], start, self.config.encounter)
                if notice is not None:
                    notices.append(notice)
        notices.sort(key=lambda n: (n.emitted_ms, n.peer))
        return notices


def spool_events(path: Path, events: list[ProximityEvent]) -> None:
    """Append events to the local spool, one trace-service envelope per line."""
    from .service.envelopes import proximity_envelope

    with open(path, "a", encoding="utf-8") as f:
        for event in events:
            f.write(json.dumps(proximity_envelope(event)) + "\n")


def flush_spool(path: Path, uploader: Callable[[list[dict]], None], batch_size: int = 500) -> int:
    """Upload spooled envelopes FIFO, truncating the spool on success."""
    path = Path(path)
    if not path.exists():
        return 0
    envelopes = []
    with open(path, encoding="utf-8") as f:
        for line in f:
            line = line.strip()
            if line:
                envelopes.append(json.loads(line))
    sent = 0
    for i in range(0, len(envelopes), batch_size):
        uploader(envelopes[i : i + batch_size])
        sent += len(envelopes[i : i + batch_size])
    path.write_text("", encoding="utf-8")
    return sent
