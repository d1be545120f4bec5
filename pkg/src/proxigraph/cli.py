"""Command-line entry points.

proxigraph simulate --scenario <file> --seed <n> --out <dir>
    Run a scenario and write its outputs (streams, ground truth, access logs,
    token schedule) as CSV/line records under <dir>.

proxigraph serve --port <p> --data-dir <d> [--config <file>] [--with-console]
    Start the trace service. PROXIGRAPH_DATA_DIR is the data-dir fallback.
"""
from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from pathlib import Path

from .zones import write_access_log_csv


def _cmd_simulate(args: argparse.Namespace) -> int:
    from .sim import load_scenario, run_scenario

    scenario = load_scenario(Path(args.scenario).read_text(), seed_override=args.seed)
    output = run_scenario(scenario)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    with open(out / "rssi_streams.csv", "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(["receiver_hash", "timestamp_ms", "peer_token", "rssi_dbm", "tx_power_dbm", "ambience"])
        for rx_hash, stream in sorted(output.streams.items()):
            for s in stream.samples():
                writer.writerow([rx_hash, s.timestamp_ms, s.peer_token.hex(), s.rssi_dbm, s.tx_power_dbm, s.ambience.value])

    with open(out / "ground_truth.csv", "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(["timestamp_ms", "associate_hash", "x_m", "y_m"])
        gt = output.ground_truth
        for k, t in enumerate(gt.tick_ms):
            for i, h in enumerate(gt.agent_hashes):
                writer.writerow([int(t), h, f"{gt.positions[k, i, 0]:.6f}", f"{gt.positions[k, i, 1]:.6f}"])

    (out / "access_logs.csv").write_text(write_access_log_csv(output.access_logs), encoding="utf-8")

    schedule = {h: {str(e): tok.hex() for e, tok in sched.items()} for h, sched in output.token_schedule.items()}
    (out / "token_schedule.json").write_text(json.dumps(schedule, indent=1), encoding="utf-8")

    print(f"simulated {len(output.agent_hashes)} agents for {scenario.duration_ms} ms -> {out}")
    return 0


def _cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service.app import create_app
    from .service.store import ServiceConfig, TraceService

    data_dir = args.data_dir or os.environ.get("PROXIGRAPH_DATA_DIR")
    if not data_dir:
        print("error: --data-dir or PROXIGRAPH_DATA_DIR required", file=sys.stderr)
        return 2
    config = ServiceConfig()
    if args.config:
        config = ServiceConfig.from_yaml(Path(args.config).read_text())
    service = TraceService(data_dir, config)

    console_dir = None
    if args.with_console:
        candidate = Path(args.console_dir) if args.console_dir else Path(__file__).resolve().parents[2] / "frontend" / "dist"
        if candidate.exists():
            console_dir = candidate
        else:
            print(f"warning: console assets not found at {candidate}; serving API only", file=sys.stderr)

    app = create_app(service, console_dir=console_dir)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="proxigraph")
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run a workspace scenario")
    sim.add_argument("--scenario", required=True, help="scenario YAML file")
    sim.add_argument("--seed", type=int, default=None, help="override the scenario seed")
    sim.add_argument("--out", required=True, help="output directory")
    sim.set_defaults(func=_cmd_simulate)

    srv = sub.add_parser("serve", help="start the trace service")
    srv.add_argument("--port", type=int, default=8470)
    srv.add_argument("--host", default="127.0.0.1")
    srv.add_argument("--data-dir", default=None)
    srv.add_argument("--config", default=None, help="service config YAML")
    srv.add_argument("--with-console", action="store_true", help="also serve the operator console")
    srv.add_argument("--console-dir", default=None, help="console asset directory override")
    srv.set_defaults(func=_cmd_serve)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
