from .envelopes import (
    EventEnvelope,
    EventKind,
    access_log_envelope,
    infection_envelope,
    proximity_envelope,
    sighting_envelope,
    validate_envelope,
)
from .store import ServiceConfig, SnapshotManifest, TraceService

__all__ = [
    "EventEnvelope",
    "EventKind",
    "ServiceConfig",
    "SnapshotManifest",
    "TraceService",
    "access_log_envelope",
    "infection_envelope",
    "proximity_envelope",
    "sighting_envelope",
    "validate_envelope",
]
