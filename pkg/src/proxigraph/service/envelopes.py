"""Event envelopes: the one wire format every ingestion path shares.

One JSON document per envelope; the event log is these documents, one per
line. Unknown schema versions and malformed payloads are rejected per
envelope, never aborting a batch.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from ..errors import InvalidEnvelope
from ..records import Ambience, Closeness, ProximityEvent, is_hex_hash
from ..zones import AccessLogEntry, InfraSighting

SCHEMA_VERSION = 1


class EventKind(str, Enum):
    PROXIMITY = "proximity"
    ACCESS_LOG = "access_log"
    INFECTION_REPORT = "infection_report"
    INFRA_SIGHTING = "infra_sighting"


@dataclass(frozen=True)
class EventEnvelope:
    kind: EventKind
    payload: dict
    received_ms: int
    schema_version: int = SCHEMA_VERSION

    def to_wire(self) -> dict:
        return {
            "schema_version": self.schema_version,
            "kind": self.kind.value,
            "payload": self.payload,
            "received_ms": self.received_ms,
        }


def _require(condition: bool, reason: str) -> None:
    if not condition:
        raise InvalidEnvelope(reason)


def validate_envelope(doc: dict, received_ms: int = 0) -> EventEnvelope:
    """Check one wire document; raises InvalidEnvelope with a stable reason."""
    _require(isinstance(doc, dict), "envelope_not_object")
    version = doc.get("schema_version")
    _require(version == SCHEMA_VERSION, f"unknown_schema_version:{version}")
    try:
        kind = EventKind(doc.get("kind"))
    except ValueError:
        raise InvalidEnvelope(f"unknown_kind:{doc.get('kind')}") from None
    payload = doc.get("payload")
    _require(isinstance(payload, dict), "payload_not_object")

    if kind == EventKind.PROXIMITY:
        _validate_proximity(payload)
    elif kind == EventKind.ACCESS_LOG:
        _validate_access_log(payload)
    elif kind == EventKind.INFECTION_REPORT:
        _validate_infection(payload)
    else:
        _validate_sighting(payload)

    stamp = doc.get("received_ms") or received_ms
    return EventEnvelope(kind=kind, payload=payload, received_ms=int(stamp))


def _validate_proximity(p: dict) -> None:
    _require(is_hex_hash(p.get("peer_a_hash", "")), "bad_peer_a_hash")
    _require(is_hex_hash(p.get("peer_b_hash", "")), "bad_peer_b_hash")
    _require(p.get("peer_a_hash") != p.get("peer_b_hash"), "self_pair")
    _require(isinstance(p.get("start_ms"), int) and p["start_ms"] >= 0, "bad_start_ms")
    _require(isinstance(p.get("end_ms"), int), "bad_end_ms")
    _require(p["end_ms"] >= p["start_ms"], "invalid_event")
    try:
        Closeness(p.get("closeness"))
        Ambience(p.get("ambience"))
    except ValueError:
        raise InvalidEnvelope("bad_enum") from None
    conf = p.get("peak_confidence")
    _require(isinstance(conf, (int, float)) and 0.0 <= conf <= 1.0, "bad_confidence")


def _validate_access_log(p: dict) -> None:
    _require(is_hex_hash(p.get("associate_hash", "")), "bad_associate_hash")
    _require(bool(p.get("zone_id")) and isinstance(p["zone_id"], str), "bad_zone_id")
    _require(isinstance(p.get("entry_ms"), int) and p["entry_ms"] >= 0, "bad_entry_ms")
    _require(isinstance(p.get("exit_ms"), int) and p["exit_ms"] > p["entry_ms"], "bad_exit_ms")


def _validate_infection(p: dict) -> None:
    _require(is_hex_hash(p.get("associate_hash", "")), "bad_associate_hash")
    _require(isinstance(p.get("report_ms"), int) and p["report_ms"] >= 0, "bad_report_ms")
    state = p.get("state", "reported")
    _require(state in ("reported", "recovered"), "bad_state")


def _validate_sighting(p: dict) -> None:
    _require(bool(p.get("tag_id")) and isinstance(p["tag_id"], str), "bad_tag_id")
    _require(bool(p.get("zone_id")) and isinstance(p["zone_id"], str), "bad_zone_id")
    _require(isinstance(p.get("sighted_ms"), int) and p["sighted_ms"] >= 0, "bad_sighted_ms")


def proximity_envelope(event: ProximityEvent, received_ms: int = 0) -> dict:
    return EventEnvelope(EventKind.PROXIMITY, event.to_wire(), received_ms).to_wire()


def access_log_envelope(entry: AccessLogEntry, received_ms: int = 0) -> dict:
    payload = {
        "associate_hash": entry.associate_hash,
        "zone_id": entry.zone_id,
        "entry_ms": entry.entry_ms,
        "exit_ms": entry.exit_ms,
    }
    return EventEnvelope(EventKind.ACCESS_LOG, payload, received_ms).to_wire()


def infection_envelope(
    associate_hash: str, report_ms: int, state: str = "reported", received_ms: int = 0
) -> dict:
    payload = {"associate_hash": associate_hash, "report_ms": report_ms, "state": state}
    return EventEnvelope(EventKind.INFECTION_REPORT, payload, received_ms).to_wire()


def sighting_envelope(s: InfraSighting, received_ms: int = 0) -> dict:
    payload = {"tag_id": s.tag_id, "zone_id": s.zone_id, "sighted_ms": s.sighted_ms}
    return EventEnvelope(EventKind.INFRA_SIGHTING, payload, received_ms).to_wire()
