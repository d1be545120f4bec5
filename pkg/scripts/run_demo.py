"""End-to-end desk demo: simulate a workspace, run every device pipeline,
ingest into a service data dir, report an infection and print the analytics.

The resulting data dir is directly servable:

    python scripts/run_demo.py --out /tmp/demo
    proxigraph serve --port 8470 --data-dir /tmp/demo/data --config /tmp/demo/config.yaml --with-console
"""
import argparse
import json
import tempfile
from pathlib import Path

from proxigraph.classifier import load_default_model
from proxigraph.pipeline import DevicePipeline, flush_spool
from proxigraph.service.envelopes import access_log_envelope
from proxigraph.service.store import ServiceConfig, TraceService
from proxigraph.sim import office_scenario, run_scenario
from proxigraph.sim.scenario import ZonePlacement
from proxigraph.zones import ZoneDef


def main() -> None:
    parser = argparse.ArgumentParser()
    parser.add_argument("--out", default=None, help="output directory (default: temp dir)")
    parser.add_argument("--agents", type=int, default=24)
    parser.add_argument("--minutes", type=int, default=40)
    parser.add_argument("--seed", type=int, default=5)
    args = parser.parse_args()

    out = Path(args.out) if args.out else Path(tempfile.mkdtemp(prefix="proxigraph-demo-"))
    out.mkdir(parents=True, exist_ok=True)

    base = office_scenario(n_agents=args.agents, duration_min=args.minutes, seed=args.seed)
    # fence off the busiest station: dwells there become access-log intervals
    # instead of radio samples
    from collections import Counter

    visits = Counter(
        (round((x - 4.0) / 6.0), round((y - 4.0) / 6.0))
        for agent in base.agents
        for x, y, _ in agent.waypoints
    )
    (gx, gy), _ = visits.most_common(1)[0]
    sx, sy = 4.0 + 6.0 * gx, 4.0 + 6.0 * gy
    cage = ZonePlacement(
        zone=ZoneDef("assembly-cage", personal_devices_allowed=False, capacity=8),
        x_m=sx - 2.0, y_m=sy - 2.0, w_m=4.0, h_m=4.0,
    )
    scenario = type(base)(**{**base.__dict__, "zones": (cage,)})
    print(f"simulating {args.agents} agents for {args.minutes} min (seed {args.seed})...")
    output = run_scenario(scenario)

    model = load_default_model()
    resolver = output.resolver()
    spool = out / "spool.jsonl"
    notices = 0
    for rx, stream in output.streams.items():
        result = DevicePipeline(rx, model, resolver=resolver, spool_path=spool).process(stream.samples())
        notices += len(result.notices)
    print(f"pipelines done: {notices} intervention notices, spool at {spool}")

    aliases = [{"hash": h, "alias": f"agent-{i:02d}"} for i, h in enumerate(output.agent_hashes)]
    config_yaml = json.dumps({  # YAML is a JSON superset; keep it simple
        "zones": [{"zone_id": "assembly-cage", "personal_devices_allowed": False, "capacity": 8}],
        "associates": aliases,
        "notify_tier": "low",
    })
    (out / "config.yaml").write_text(config_yaml, encoding="utf-8")
    service = TraceService(out / "data", ServiceConfig.from_yaml(config_yaml))

    sent = flush_spool(spool, lambda batch: service.ingest_batch(batch))
    log_docs = [access_log_envelope(entry) for entry in output.access_logs]
    if log_docs:
        service.ingest_batch(log_docs)
    print(f"ingested {sent} proximity events + {len(log_docs)} access-log intervals")

    index_case = output.agent_hashes[0]
    summary = service.report_infection(index_case, report_ms=scenario.duration_ms)
    print(f"reported infection for agent-00: {len(summary['newly_at_risk'])} newly at risk")

    risk = service.get_risk()["risk"]
    tiers = {}
    for doc in risk.values():
        tiers[doc["tier"]] = tiers.get(doc["tier"], 0) + 1
    print(f"risk tiers: {tiers}")
    clusters = service.get_clusters(min_weight=0.2, min_size=2)["clusters"]
    print(f"clusters (weight >= 0.2, size >= 2): {len(clusters)}")
    for c in clusters[:5]:
        print(f"  members={len(c['members'])} risk={c['cluster_risk']:.2f}")
    trace = service.get_trace(index_case, 3, (0, scenario.duration_ms))
    print(f"trace from agent-00: levels={[len(l) for l in trace['levels']]}")
    service.close()
    print(f"data dir ready: {out / 'data'}")


if __name__ == "__main__":
    main()
