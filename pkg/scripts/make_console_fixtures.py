"""Generate console test fixtures from a live in-process service.

The frontend tests mock fetch with these documents, so the console is tested
against the service's actual wire format, not a hand-written imitation.
"""
import json
import tempfile
from pathlib import Path

import numpy as np

from proxigraph.records import Ambience, Closeness, ProximityEvent
from proxigraph.service.envelopes import proximity_envelope
from proxigraph.service.store import ServiceConfig, TraceService
from proxigraph.tokens import hash_identity

OUT = Path(__file__).resolve().parents[1] / "frontend" / "test" / "fixtures"
DAY = 86_400_000
SALT = b"\x11" * 16


def hash_of(name: str) -> str:
    return hash_identity(name, SALT).associate_hash


def saturated_event(a, b, at_ms):
    return proximity_envelope(
        ProximityEvent(
            peer_a_hash=a, peer_b_hash=b, start_ms=at_ms, end_ms=at_ms + 15 * 60_000,
            closeness=Closeness.NEAR, peak_confidence=0.97, ambience=Ambience.CROWDED,
        )
    )


def config_for(names):
    aliases = [{"hash": h, "alias": alias} for alias, h in names.items()]
    return ServiceConfig.from_yaml(json.dumps({"associates": aliases}))


def star_fixture():
    names = {f"star-{k}": hash_of(f"star-{k}") for k in ["hub", "l1", "l2", "l3", "l4"]}
    hub = names["star-hub"]
    leaves = [names[f"star-l{i}"] for i in range(1, 5)]
    with tempfile.TemporaryDirectory() as d:
        svc = TraceService(d, config_for(names))
        svc.ingest_batch([saturated_event(hub, leaf, 13 * DAY) for leaf in leaves])
        window = (0, 14 * DAY)
        initial = {"graph": svc.get_graph_snapshot(window), "risk": svc.get_risk()}
        infection = svc.report_infection(hub, report_ms=13 * DAY)
        after = {"graph": svc.get_graph_snapshot(window), "risk": svc.get_risk()}
        svc.report_infection(hub, report_ms=13 * DAY, state="recovered")
        recovered = {"graph": svc.get_graph_snapshot(window), "risk": svc.get_risk()}
        svc.close()
    (OUT / "star_initial.json").write_text(json.dumps(initial, indent=1))
    (OUT / "star_infection.json").write_text(json.dumps(infection, indent=1))
    (OUT / "star_after.json").write_text(json.dumps(after, indent=1))
    (OUT / "star_recovered.json").write_text(json.dumps(recovered, indent=1))
    (OUT / "star_meta.json").write_text(json.dumps({"hub": hub, "leaves": leaves}, indent=1))


def trace_fixture():
    """Chain with branches: the level sets genuinely change from 1 to 3."""
    names = {f"tr-{k}": hash_of(f"tr-{k}") for k in "abcdefg"}
    h = {k.split("-")[1]: v for k, v in names.items()}
    edges = [
        (h["a"], h["b"], 1),
        (h["a"], h["c"], 2),
        (h["b"], h["d"], 3),
        (h["c"], h["e"], 4),
        (h["d"], h["f"], 5),
        (h["e"], h["g"], 6),
    ]
    with tempfile.TemporaryDirectory() as d:
        svc = TraceService(d, config_for(names))
        svc.ingest_batch(
            [saturated_event(a, b, DAY + hour * 3_600_000) for a, b, hour in edges]
        )
        window = (0, 14 * DAY)
        doc = {
            "graph": svc.get_graph_snapshot(window),
            "source": h["a"],
            "traces": {
                str(levels): svc.get_trace(h["a"], levels, window) for levels in (1, 2, 3)
            },
        }
        svc.close()
    (OUT / "trace_chain.json").write_text(json.dumps(doc, indent=1))


def big_snapshot_fixture():
    rng = np.random.default_rng(2024)
    names = {f"agent-{i:03d}": hash_of(f"big-{i}") for i in range(200)}
    hashes = list(names.values())
    with tempfile.TemporaryDirectory() as d:
        svc = TraceService(d, config_for(names))
        docs = []
        for _ in range(380):
            i, j = rng.integers(0, len(hashes), size=2)
            if i == j:
                continue
            start = int(rng.integers(0, 13 * DAY))
            docs.append(
                proximity_envelope(
                    ProximityEvent(
                        *sorted((hashes[int(i)], hashes[int(j)])),
                        start_ms=start,
                        end_ms=start + int(rng.integers(120_000, 1_800_000)),
                        closeness=Closeness.NEAR,
                        peak_confidence=0.9,
                        ambience=Ambience.INDOOR,
                    )
                )
            )
        svc.ingest_batch(docs)
        svc.report_infection(hashes[0], report_ms=13 * DAY)
        doc = {"graph": svc.get_graph_snapshot((0, 14 * DAY)), "risk": svc.get_risk()}
        svc.close()
    (OUT / "snapshot_200.json").write_text(json.dumps(doc, indent=1))


def error_fixture():
    from fastapi.testclient import TestClient

    from proxigraph.service.app import create_app

    with tempfile.TemporaryDirectory() as d:
        svc = TraceService(d)
        client = TestClient(create_app(svc))
        response = client.get(
            "/v1/trace", params={"source": "0" * 64, "levels": 2, "from": 0, "to": DAY}
        )
        (OUT / "error_unknown_source.json").write_text(
            json.dumps({"status": response.status_code, "body": response.json()}, indent=1)
        )
        svc.close()


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    star_fixture()
    trace_fixture()
    big_snapshot_fixture()
    error_fixture()
    print(f"fixtures written to {OUT}")


if __name__ == "__main__":
    main()
