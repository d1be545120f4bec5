"""The trace service core: durable event log, serialized ingestion, immutable
query snapshots.

One writer applies batches: envelopes are appended to the log and fsynced
before anything is acknowledged, then applied to the graph, then a new
immutable snapshot is published by swapping a single reference. Readers grab
the published snapshot once per query, so a query never observes a partially
applied batch. Restart replays the log and reproduces the exact graph.
"""
from __future__ import annotations

import json
import os
import threading
import time
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional

import yaml

from ..errors import InvalidParameter, ProxigraphError, UnknownAssociate
from ..graph import (
    ContactMultiGraph,
    GraphSnapshot,
    Infection,
    InfectionState,
    RiskAssessment,
    RiskParams,
    RiskTier,
    TierThresholds,
    at_risk_notifications,
    detect_clusters,
    propagate_risk,
    trace_contacts,
)
from ..records import Ambience, Closeness, ProximityEvent
from ..zones import (
    AccessLogEntry,
    InfraSighting,
    MIN_DWELL_MS_DEFAULT,
    MIN_OVERLAP_MS_DEFAULT,
    SIGHTING_GAP_MS_DEFAULT,
    ZoneDef,
    sightings_to_intervals,
)
from .envelopes import (
    EventEnvelope,
    EventKind,
    access_log_envelope,
    infection_envelope,
    validate_envelope,
)

EVENT_LOG = "events.log"
SNAPSHOT_LOG = "snapshots.log"
RISK_FILE = "risk.json"
NOTIFICATION_LOG = "notifications.log"


@dataclass(frozen=True)
class SnapshotManifest:
    snapshot_id: int
    event_count: int
    created_ms: int


@dataclass(frozen=True)
class ServiceConfig:
    risk: RiskParams = field(default_factory=RiskParams)
    thresholds: TierThresholds = field(default_factory=TierThresholds)
    notify_tier: RiskTier = RiskTier.MEDIUM
    rotation_ms: int = 900_000
    skew_epochs: int = 1
    zones: dict = field(default_factory=dict)  # zone_id -> ZoneDef
    tag_enrollment: dict = field(default_factory=dict)  # tag_id -> associate_hash
    associates: dict = field(default_factory=dict)  # associate_hash -> alias
    min_overlap_ms: int = MIN_OVERLAP_MS_DEFAULT
    sighting_gap_ms: int = SIGHTING_GAP_MS_DEFAULT
    min_dwell_ms: int = MIN_DWELL_MS_DEFAULT

    @classmethod
    def from_yaml(cls, text: str) -> "ServiceConfig":
        doc = yaml.safe_load(text) or {}
        risk_doc = doc.get("risk", {})
        risk = RiskParams(
            beta_hop=float(risk_doc.get("beta_hop", 0.5)),
            d_sat_min=float(risk_doc.get("d_sat_min", 15.0)),
            class_factor={
                Closeness(k): float(v)
                for k, v in risk_doc.get(
                    "class_factor", {"near": 1.0, "co_located": 0.4}
                ).items()
            },
            ambience_factor={
                Ambience(k): float(v)
                for k, v in risk_doc.get(
                    "ambience_factor",
                    {"outdoor": 0.5, "indoor": 0.8, "air_conditioned": 1.0, "crowded": 1.0, "unknown": 0.8},
                ).items()
            },
            window_days=int(risk_doc.get("window_days", 14)),
            max_levels=int(risk_doc.get("max_levels", 3)),
        )
        thr_doc = doc.get("tier_thresholds", {})
        thresholds = TierThresholds(
            high=float(thr_doc.get("high", 0.5)), medium=float(thr_doc.get("medium", 0.2))
        )
        zones = {}
        for z in doc.get("zones", []):
            zones[z["zone_id"]] = ZoneDef(
                zone_id=z["zone_id"],
                personal_devices_allowed=bool(z.get("personal_devices_allowed", True)),
                capacity=int(z.get("capacity", 1)),
            )
        co_doc = doc.get("co_occupancy", {})
        return cls(
            risk=risk,
            thresholds=thresholds,
            notify_tier=RiskTier.from_wire(doc.get("notify_tier", "medium")),
            rotation_ms=int(doc.get("rotation_ms", 900_000)),
            skew_epochs=int(doc.get("skew_epochs", 1)),
            zones=zones,
            tag_enrollment=dict(doc.get("tag_enrollment", {})),
            associates={a["hash"]: a.get("alias", a["hash"][:8]) for a in doc.get("associates", [])},
            min_overlap_ms=int(co_doc.get("min_overlap_ms", MIN_OVERLAP_MS_DEFAULT)),
            sighting_gap_ms=int(co_doc.get("gap_ms", SIGHTING_GAP_MS_DEFAULT)),
            min_dwell_ms=int(co_doc.get("min_dwell_ms", MIN_DWELL_MS_DEFAULT)),
        )


@dataclass(frozen=True)
class _Published:
    """Everything a query may touch, swapped in atomically as one reference."""

    snapshot_id: int
    event_count: int
    graph: GraphSnapshot
    risk: dict
    risk_computed_ms: int


class TraceService:
    def __init__(
        self,
        data_dir: Path | str,
        config: ServiceConfig = ServiceConfig(),
        replay_events: Optional[int] = None,
    ):
        """Open (or create) a service over a data directory, replaying the
        event log. `replay_events` truncates the replay after that many log
        lines: the state any snapshot manifest points at can be rebuilt."""
        self.data_dir = Path(data_dir)
        self.data_dir.mkdir(parents=True, exist_ok=True)
        self.config = config
        self._write_lock = threading.Lock()
        self._replaying = False

        self._graph = ContactMultiGraph(params=config.risk)
        for h, alias in config.associates.items():
            self._graph.ensure_node(h, attributes={"alias": alias})
        self._zone_logs: dict[str, list[AccessLogEntry]] = {}
        self._risk: dict[str, RiskAssessment] = {}
        self._risk_computed_ms = 0
        self._event_count = 0
        self._snapshot_id = 0
        self._last_report_summary: dict = {}

        self._replay(up_to_events=replay_events)
        self._log_handle = open(self.data_dir / EVENT_LOG, "a", encoding="utf-8")
        self._publish()

    # ------------------------------------------------------------------ write

    def ingest_batch(self, docs: list[dict], received_ms: Optional[int] = None) -> dict:
        """Validate, append durably, apply, publish. Partial acceptance:
        bad envelopes are reported per index and never abort the batch.

        Sightings are converted to presence intervals batch-locally and the
        derived access-log envelopes are what reaches the durable log, so a
        replay never depends on the original batch boundaries."""
        stamp = received_ms if received_ms is not None else _now_ms()
        accepted: list[EventEnvelope] = []
        rejected: list[tuple[int, str]] = []
        for i, doc in enumerate(docs):
            try:
                env = validate_envelope(doc, received_ms=stamp)
                self._validate_against_state(env)
                accepted.append(env)
            except ProxigraphError as exc:
                rejected.append((i, str(exc) or exc.code))

        to_log: list[EventEnvelope] = []
        sightings: list[InfraSighting] = []
        for env in accepted:
            if env.kind == EventKind.INFRA_SIGHTING:
                sightings.append(InfraSighting(
                    tag_id=env.payload["tag_id"],
                    zone_id=env.payload["zone_id"],
                    sighted_ms=env.payload["sighted_ms"],
                ))
            else:
                to_log.append(env)
        if sightings:
            intervals = sightings_to_intervals(
                sightings,
                self.config.tag_enrollment,
                gap_ms=self.config.sighting_gap_ms,
                min_dwell_ms=self.config.min_dwell_ms,
            )
            for entry in intervals.entries:
                to_log.append(validate_envelope(access_log_envelope(entry, stamp), stamp))

        with self._write_lock:
            snapshot_id = self._commit_locked(to_log)

        return {
            "accepted": len(accepted),
            "rejected": [{"index": i, "reason": r} for i, r in rejected],
            "snapshot_id": snapshot_id,
        }

    def report_infection(self, associate_hash: str, report_ms: int, state: str = "reported") -> dict:
        """Mark an associate, recompute risk, and diff tiers against the
        previous assessment. The report itself goes through the event log, so
        a replayed instance reaches the identical risk state."""
        if associate_hash not in self._graph.nodes:
            raise UnknownAssociate(associate_hash)
        env = validate_envelope(infection_envelope(associate_hash, report_ms, state), _now_ms())
        with self._write_lock:
            snapshot_id = self._commit_locked([env])
            summary = dict(self._last_report_summary)
        summary["snapshot_id"] = snapshot_id
        return summary

    def _commit_locked(self, envelopes: list[EventEnvelope]) -> int:
        """Durable append (fsync before anything is acknowledged), apply,
        publish. Caller holds the write lock."""
        if envelopes:
            for env in envelopes:
                self._log_handle.write(json.dumps(env.to_wire(), separators=(",", ":")) + "\n")
            self._log_handle.flush()
            os.fsync(self._log_handle.fileno())
            for env in envelopes:
                self._apply_one(env)
            self._event_count += len(envelopes)
            self._snapshot_id += 1
            self._write_manifest()
        self._publish()
        return self._snapshot_id

    def _validate_against_state(self, env: EventEnvelope) -> None:
        if env.kind in (EventKind.ACCESS_LOG, EventKind.INFRA_SIGHTING):
            zone_id = env.payload["zone_id"]
            if zone_id not in self.config.zones:
                raise InvalidParameter(f"unknown_zone:{zone_id}")
        if env.kind == EventKind.INFRA_SIGHTING:
            if env.payload["tag_id"] not in self.config.tag_enrollment:
                raise InvalidParameter(f"unenrolled_tag:{env.payload['tag_id']}")

    def _apply_one(self, env: EventEnvelope) -> None:
        if env.kind == EventKind.PROXIMITY:
            self._graph.add_contact_event(ProximityEvent.from_wire(env.payload))
        elif env.kind == EventKind.ACCESS_LOG:
            self._apply_access_log(AccessLogEntry(
                associate_hash=env.payload["associate_hash"],
                zone_id=env.payload["zone_id"],
                entry_ms=env.payload["entry_ms"],
                exit_ms=env.payload["exit_ms"],
            ))
        elif env.kind == EventKind.INFECTION_REPORT:
            self._apply_infection(env)
        else:  # raw sightings never reach the log; tolerate old files
            pass

    def _apply_access_log(self, entry: AccessLogEntry) -> None:
        """Store the presence interval and pair it against every interval
        already known for the zone (incremental co-occupancy)."""
        known = self._zone_logs.setdefault(entry.zone_id, [])
        if entry in known:
            return
        self._graph.ensure_node(entry.associate_hash)
        for other in known:
            if other.associate_hash == entry.associate_hash:
                continue
            start = max(entry.entry_ms, other.entry_ms)
            end = min(entry.exit_ms, other.exit_ms)
            if end - start >= self.config.min_overlap_ms:
                self._graph.add_contact_event(ProximityEvent(
                    peer_a_hash=entry.associate_hash,
                    peer_b_hash=other.associate_hash,
                    start_ms=start,
                    end_ms=end,
                    closeness=Closeness.CO_LOCATED,
                    peak_confidence=1.0,
                    ambience=Ambience.INDOOR,
                ))
        known.append(entry)

    def _apply_infection(self, env: EventEnvelope) -> None:
        payload = env.payload
        h = payload["associate_hash"]
        state = payload.get("state", "reported")
        at_ms = payload["report_ms"]
        self._graph.ensure_node(h)
        infection = Infection(
            state=InfectionState.REPORTED if state == "reported" else InfectionState.RECOVERED,
            at_ms=at_ms,
        )
        self._graph.set_infection(h, infection)

        previous = self._risk
        self._risk = propagate_risk(self._graph, self.config.risk, at_ms, self.config.thresholds)
        self._risk_computed_ms = at_ms
        self._graph.set_risk(self._risk)
        newly = [
            n
            for n in at_risk_notifications(self._risk, previous, self.config.notify_tier)
            if self._graph.nodes[n].infection.state != InfectionState.REPORTED
        ]  # index cases are not "at risk" contacts
        self._last_report_summary = {
            "associate_hash": h,
            "state": state,
            "assessed_count": len(self._risk),
            "newly_at_risk": newly,
        }
        if not self._replaying:
            self._persist_risk(newly, at_ms)

    def _persist_risk(self, newly: list[str], at_ms: int) -> None:
        risk_doc = {
            "computed_at_ms": self._risk_computed_ms,
            "risk": {h: a.to_wire() for h, a in sorted(self._risk.items())},
        }
        (self.data_dir / RISK_FILE).write_text(json.dumps(risk_doc, indent=1), encoding="utf-8")
        with open(self.data_dir / NOTIFICATION_LOG, "a", encoding="utf-8") as f:
            f.write(json.dumps({"at_ms": at_ms, "newly_at_risk": newly}) + "\n")

    def _write_manifest(self) -> None:
        manifest = SnapshotManifest(
            snapshot_id=self._snapshot_id, event_count=self._event_count, created_ms=_now_ms()
        )
        with open(self.data_dir / SNAPSHOT_LOG, "a", encoding="utf-8") as f:
            f.write(json.dumps(manifest.__dict__) + "\n")

    def _replay(self, up_to_events: Optional[int] = None) -> None:
        self._replaying = True
        try:
            log_path = self.data_dir / EVENT_LOG
            if not log_path.exists():
                return
            with open(log_path, encoding="utf-8") as f:
                for line in f:
                    if up_to_events is not None and self._event_count >= up_to_events:
                        break
                    line = line.strip()
                    if not line:
                        continue
                    env = validate_envelope(json.loads(line))
                    self._apply_one(env)
                    self._event_count += 1
            snap_path = self.data_dir / SNAPSHOT_LOG
            if up_to_events is None and snap_path.exists():
                last = None
                with open(snap_path, encoding="utf-8") as f:
                    for line in f:
                        if line.strip():
                            last = json.loads(line)
                if last is not None:
                    self._snapshot_id = last["snapshot_id"]
        finally:
            self._replaying = False

    def _publish(self) -> None:
        self._published = _Published(
            snapshot_id=self._snapshot_id,
            event_count=self._event_count,
            graph=self._graph.freeze(),
            risk=dict(self._risk),
            risk_computed_ms=self._risk_computed_ms,
        )

    def close(self) -> None:
        self._log_handle.close()

    # ------------------------------------------------------------------- read

    def get_trace(self, source: str, levels: int, window: tuple[int, int]) -> dict:
        pub = self._published
        result = trace_contacts(pub.graph, source, levels, window)
        return {
            "snapshot_id": pub.snapshot_id,
            "source": result.source,
            "levels": [
                [{"hash": e.associate_hash, "via_edge_ids": list(e.via_edge_ids)} for e in level]
                for level in result.levels
            ],
        }

    def get_risk(self) -> dict:
        pub = self._published
        return {
            "snapshot_id": pub.snapshot_id,
            "computed_at_ms": pub.risk_computed_ms,
            "risk": {h: a.to_wire() for h, a in sorted(pub.risk.items())},
        }

    def get_clusters(self, min_weight: float, min_size: int, now_ms: Optional[int] = None) -> dict:
        pub = self._published
        clusters = detect_clusters(
            pub.graph,
            pub.risk,
            self.config.risk,
            min_weight,
            min_size,
            now_ms if now_ms is not None else pub.risk_computed_ms,
        )
        return {
            "snapshot_id": pub.snapshot_id,
            "clusters": [
                {
                    "members": list(c.members),
                    "cluster_risk": c.cluster_risk,
                    "span": [c.span[0], c.span[1]],
                }
                for c in clusters
            ],
        }

    def get_graph_snapshot(self, window: tuple[int, int]) -> dict:
        t0, t1 = window
        if t1 < t0:
            raise InvalidParameter(f"window end {t1} < start {t0}")
        pub = self._published
        nodes = []
        for h, node in sorted(pub.graph.nodes.items()):
            nodes.append({
                "hash": h,
                "alias": node.attributes.get("alias", h[:8]),
                "tier": node.risk.tier.wire if node.risk is not None else RiskTier.NONE.wire,
                "infection": node.infection.to_wire(),
            })
        edges = []
        for e in pub.graph.edges:
            if t0 <= e.start_ms <= t1:
                edges.append({
                    "edge_id": e.edge_id,
                    "peer_a_hash": e.peer_a_hash,
                    "peer_b_hash": e.peer_b_hash,
                    "start_ms": e.start_ms,
                    "end_ms": e.end_ms,
                    "weight": e.weight,
                    "closeness": e.closeness.value,
                })
        return {"snapshot_id": pub.snapshot_id, "nodes": nodes, "edges": edges}

    @property
    def snapshot_id(self) -> int:
        return self._published.snapshot_id

    def graph_view(self) -> GraphSnapshot:
        return self._published.graph


def _now_ms() -> int:
    return int(time.time() * 1000)
