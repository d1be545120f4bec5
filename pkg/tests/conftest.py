import numpy as np
import pytest

from proxigraph.classifier import LogisticModel
from proxigraph.records import Ambience, Closeness, ProximityEvent
from proxigraph.tokens import hash_identity

SALT = bytes(range(16))


def hash_of(name: str) -> str:
    return hash_identity(name, SALT).associate_hash


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20260809)


@pytest.fixture(scope="session")
def default_model() -> LogisticModel:
    from proxigraph.classifier import load_default_model

    return load_default_model()


def make_event(
    a: str,
    b: str,
    start_ms: int,
    end_ms: int,
    closeness: Closeness = Closeness.NEAR,
    ambience: Ambience = Ambience.UNKNOWN,
    confidence: float = 1.0,
) -> ProximityEvent:
    return ProximityEvent(
        peer_a_hash=a,
        peer_b_hash=b,
        start_ms=start_ms,
        end_ms=end_ms,
        closeness=closeness,
        peak_confidence=confidence,
        ambience=ambience,
    )
