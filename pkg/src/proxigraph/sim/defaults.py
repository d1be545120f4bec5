"""Default scenario family: a station-based office/factory floor.

Agents walk between work stations and dwell there; two agents visiting the
same station stand within arm's reach of each other (a Near encounter), while
distinct stations are far enough apart that dwelling agents are always beyond
the social-distance threshold. The scan cutoff is raised above the radio
floor because peers beyond ~10 m carry no information for 2 m detection.
"""
from __future__ import annotations

import hashlib

import numpy as np

from ..tokens import hash_identity
from .scenario import (
    Agent,
    ChannelParams,
    PATH_LOSS_EXPONENT_INDOOR,
    Scenario,
)

STATION_SPACING_M = 6.0
STATION_MARGIN_M = 4.0
SCAN_CUTOFF_DBM = -72.0  # ~10-15 m at the indoor exponent


def org_salt_for(seed: int) -> bytes:
    return hashlib.sha256(f"sim-org-{seed}".encode()).digest()[:16]


def agent_hash(seed: int, index: int) -> str:
    return hash_identity(f"sim-agent-{index:03d}", org_salt_for(seed)).associate_hash


def office_scenario(
    n_agents: int = 20,
    duration_min: int = 30,
    seed: int = 1,
    width_m: float = 60.0,
    height_m: float = 40.0,
    n_stations: int | None = None,
    shadow_sigma_db: float = 4.0,
    detection_floor_dbm: float = SCAN_CUTOFF_DBM,
) -> Scenario:
    rng = np.random.default_rng([seed, 0xD0])
    if n_stations is None:
        n_stations = max(6, n_agents // 2 + 2)

    xs = np.arange(STATION_MARGIN_M, width_m - STATION_MARGIN_M + 1e-9, STATION_SPACING_M)
    ys = np.arange(STATION_MARGIN_M, height_m - STATION_MARGIN_M + 1e-9, STATION_SPACING_M)
    grid = [(float(x), float(y)) for x in xs for y in ys]
    if n_stations > len(grid):
        n_stations = len(grid)
    picks = rng.choice(len(grid), size=n_stations, replace=False)
    stations = [grid[i] for i in picks]

    duration_ms = duration_min * 60_000
    agents = []
    for i in range(n_agents):
        speed = float(rng.uniform(1.0, 1.4))
        waypoints = []
        t_budget = 0.0
        prev = None
        while t_budget < duration_ms * 1.2:
            sx, sy = stations[int(rng.integers(n_stations))]
            r = float(rng.uniform(0.35, 0.75))
            theta = float(rng.uniform(0, 2 * np.pi))
            x = min(max(sx + r * np.cos(theta), 0.0), width_m)
            y = min(max(sy + r * np.sin(theta), 0.0), height_m)
            dwell_ms = int(rng.uniform(60_000, 240_000))
            waypoints.append((x, y, dwell_ms))
            if prev is not None:
                t_budget += float(np.hypot(x - prev[0], y - prev[1])) / speed * 1000.0
            t_budget += dwell_ms
            prev = (x, y)
        agents.append(
            Agent(
                associate_hash=agent_hash(seed, i),
                waypoints=tuple(waypoints),
                device_present=True,
                speed_mps=speed,
            )
        )

    channel = ChannelParams(
        tx_power_dbm=0,
        pl0_db=40.0,
        path_loss_exponent=PATH_LOSS_EXPONENT_INDOOR,
        shadow_sigma_db=shadow_sigma_db,
        detection_floor_dbm=detection_floor_dbm,
    )
    return Scenario(
        seed=seed,
        duration_ms=duration_ms,
        width_m=width_m,
        height_m=height_m,
        agents=tuple(agents),
        channel=channel,
    )
