"""Shared event records and their wire encoding.

Timestamps are epoch-ms UTC integers everywhere. Hashes are 64 lowercase hex
chars, tokens 32, in every wire and file format.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .errors import InvalidEvent


class Ambience(str, Enum):
    INDOOR = "indoor"
    OUTDOOR = "outdoor"
    AIR_CONDITIONED = "air_conditioned"
    CROWDED = "crowded"
    UNKNOWN = "unknown"


class Closeness(str, Enum):
    NEAR = "near"
    CO_LOCATED = "co_located"


@dataclass(frozen=True)
class ProximityEvent:
    """A resolved pairwise encounter. Endpoints are stored canonically sorted."""

    peer_a_hash: str
    peer_b_hash: str
    start_ms: int
    end_ms: int
    closeness: Closeness
    peak_confidence: float
    ambience: Ambience

    def __post_init__(self):
        if self.end_ms < self.start_ms:
            raise InvalidEvent(f"end_ms {self.end_ms} < start_ms {self.start_ms}")
        if self.peer_a_hash > self.peer_b_hash:
            a, b = self.peer_b_hash, self.peer_a_hash
            object.__setattr__(self, "peer_a_hash", a)
            object.__setattr__(self, "peer_b_hash", b)

    @property
    def pair(self) -> tuple[str, str]:
        return (self.peer_a_hash, self.peer_b_hash)

    def to_wire(self) -> dict:
        return {
            "peer_a_hash": self.peer_a_hash,
            "peer_b_hash": self.peer_b_hash,
            "start_ms": self.start_ms,
            "end_ms": self.end_ms,
            "closeness": self.closeness.value,
            "peak_confidence": self.peak_confidence,
            "ambience": self.ambience.value,
        }

    @classmethod
    def from_wire(cls, doc: dict) -> "ProximityEvent":
        return cls(
            peer_a_hash=doc["peer_a_hash"],
            peer_b_hash=doc["peer_b_hash"],
            start_ms=int(doc["start_ms"]),
            end_ms=int(doc["end_ms"]),
            closeness=Closeness(doc["closeness"]),
            peak_confidence=float(doc["peak_confidence"]),
            ambience=Ambience(doc["ambience"]),
        )


def is_hex_hash(s: str) -> bool:
    return isinstance(s, str) and len(s) == 64 and all(c in "0123456789abcdef" for c in s)


def is_hex_token(s: str) -> bool:
    return isinstance(s, str) and len(s) == 32 and all(c in "0123456789abcdef" for c in s)
