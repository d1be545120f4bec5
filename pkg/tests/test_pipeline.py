import json

import numpy as np
import pytest

from proxigraph.classifier import LogisticModel
from proxigraph.features import RssiSample
from proxigraph.geofence import Geofence
from proxigraph.pipeline import DevicePipeline, PipelineConfig, flush_spool
from proxigraph.records import Closeness
from proxigraph.sim import Agent, ChannelParams, Scenario, run_scenario
from proxigraph.service.envelopes import validate_envelope

from conftest import hash_of

H1, H2 = hash_of("pipe-1"), hash_of("pipe-2")

# signal-only model: near iff corrected mean above about -52 dBm
STEP_MODEL = LogisticModel(
    coefficients=(8.0, 0, 0, 0, 0, 0),
    intercept=0.0,
    feature_means=(-52.0, 0, 0, 0, 0, 0),
    feature_stds=(4.0, 1, 1, 1, 1, 1),
)


def close_pair_scenario(duration_ms=300_000, d=1.0):
    agents = (
        Agent(associate_hash=H1, waypoints=((5.0, 5.0, duration_ms),)),
        Agent(associate_hash=H2, waypoints=((5.0 + d, 5.0, duration_ms),)),
    )
    return Scenario(
        seed=21, duration_ms=duration_ms, width_m=30, height_m=20,
        agents=agents, channel=ChannelParams(shadow_sigma_db=2.0, path_loss_exponent=2.7),
    )


@pytest.fixture(scope="module")
def close_pair_output():
    return run_scenario(close_pair_scenario())


def test_offline_equals_online(close_pair_output, tmp_path):
    """The uploader's availability cannot change what the device decides."""
    out = close_pair_output
    stream = out.streams[H1].samples()

    offline = DevicePipeline(H1, STEP_MODEL, resolver=out.resolver(),
                             spool_path=tmp_path / "spool.jsonl")
    online_sink = []
    online = DevicePipeline(H1, STEP_MODEL, resolver=out.resolver())

    r_offline = offline.process(stream)
    r_online = online.process(stream)
    assert r_offline.notices == r_online.notices
    assert r_offline.events == r_online.events
    assert len(r_offline.events) >= 1

    sent: list[dict] = []
    flushed = flush_spool(tmp_path / "spool.jsonl", lambda batch: sent.extend(batch))
    assert flushed == len(r_offline.events)
    assert (tmp_path / "spool.jsonl").read_text() == ""


def test_spool_is_valid_wire_format(close_pair_output, tmp_path):
    out = close_pair_output
    spool = tmp_path / "spool.jsonl"
    pipe = DevicePipeline(H1, STEP_MODEL, resolver=out.resolver(), spool_path=spool)
    result = pipe.process(out.streams[H1].samples())
    lines = [l for l in spool.read_text().splitlines() if l]
    assert len(lines) == len(result.events)
    for line in lines:
        env = validate_envelope(json.loads(line))
        assert env.kind.value == "proximity"
        assert env.payload["closeness"] == Closeness.NEAR.value


def test_spool_flush_fifo(tmp_path):
    spool = tmp_path / "spool.jsonl"
    docs = [{"schema_version": 1, "kind": "proximity", "payload": {"i": i}, "received_ms": 0}
            for i in range(7)]
    with open(spool, "w") as f:
        for d in docs:
            f.write(json.dumps(d) + "\n")
    batches = []
    flush_spool(spool, batches.append, batch_size=3)
    flat = [d["payload"]["i"] for batch in batches for d in batch]
    assert flat == list(range(7))
    assert [len(b) for b in batches] == [3, 3, 1]


def test_notices_emitted_for_sustained_near(close_pair_output):
    out = close_pair_output
    pipe = DevicePipeline(H1, STEP_MODEL, resolver=out.resolver())
    result = pipe.process(out.streams[H1].samples())
    assert len(result.notices) >= 1
    assert result.notices[0].peer == H2


def test_unresolved_peer_notice_keyed_by_token(close_pair_output):
    out = close_pair_output
    pipe = DevicePipeline(H1, STEP_MODEL, resolver=None)
    result = pipe.process(out.streams[H1].samples())
    assert result.events == []  # nothing attributable
    assert result.unresolved_windows > 0
    assert len(result.notices) >= 1
    assert len(result.notices[0].peer) == 32  # token hex


def test_geofence_gate_drops_outside_samples():
    fence = Geofence(((0, 0), (10, 0), (10, 10), (0, 10)))
    token = b"\x07" * 16
    stream = [
        RssiSample(peer_token=token, rssi_dbm=-45, tx_power_dbm=0, timestamp_ms=t * 1000)
        for t in range(30)
    ]
    # inside the fence for the first 10 s only
    positions = lambda ts: (5.0, 5.0) if ts < 10_000 else (50.0, 50.0)
    pipe = DevicePipeline(H1, STEP_MODEL, resolver=None, geofence=fence)
    result = pipe.process(stream, positions=positions)
    assert result.gated_samples == 20

    no_fence = DevicePipeline(H1, STEP_MODEL, resolver=None)
    assert no_fence.process(stream, positions=positions).gated_samples == 0


def test_event_symmetry_between_devices(close_pair_output):
    """A's view of the encounter and B's overlap in time."""
    out = close_pair_output
    resolver = out.resolver()
    ev_a = DevicePipeline(H1, STEP_MODEL, resolver=resolver).process(out.streams[H1].samples()).events
    ev_b = DevicePipeline(H2, STEP_MODEL, resolver=resolver).process(out.streams[H2].samples()).events
    assert ev_a and ev_b
    assert ev_a[0].pair == ev_b[0].pair
    overlap = min(ev_a[0].end_ms, ev_b[0].end_ms) - max(ev_a[0].start_ms, ev_b[0].start_ms)
    assert overlap > 0


def test_min_event_duration_policy(close_pair_output):
    out = close_pair_output
    config = PipelineConfig(min_event_ms=10**9)
    pipe = DevicePipeline(H1, STEP_MODEL, resolver=out.resolver(), config=config)
    assert pipe.process(out.streams[H1].samples()).events == []
