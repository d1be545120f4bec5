"""Deterministic workspace scenarios: agents, zones, radio channel.

A scenario file is YAML with top-level key/values plus agent and zone lists;
see README for the schema. Identical (scenario, seed) always reproduces
bit-identical simulator output.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import yaml

from ..errors import InvalidConfig
from ..geofence import Geofence
from ..records import Ambience
from ..tokens import ROTATION_MS_DEFAULT, hash_identity
from ..zones import ZoneDef

SPEED_MPS_DEFAULT = 1.2
SAMPLE_PERIOD_MS_DEFAULT = 1000

PATH_LOSS_EXPONENT_OUTDOOR = 2.0
PATH_LOSS_EXPONENT_INDOOR = 2.7


@dataclass(frozen=True)
class ChannelParams:
    tx_power_dbm: int = 0
    pl0_db: float = 40.0  # path loss at d0 = 1 m
    path_loss_exponent: float = PATH_LOSS_EXPONENT_OUTDOOR
    shadow_sigma_db: float = 4.0
    detection_floor_dbm: float = -95.0

    def __post_init__(self):
        if self.path_loss_exponent <= 0:
            raise InvalidConfig("path_loss_exponent must be > 0")
        if self.shadow_sigma_db < 0:
            raise InvalidConfig("shadow_sigma_db must be >= 0")


@dataclass(frozen=True)
class Agent:
    associate_hash: str
    waypoints: tuple[tuple[float, float, int], ...]  # (x_m, y_m, dwell_ms)
    device_present: bool = True
    speed_mps: float = SPEED_MPS_DEFAULT

    def __post_init__(self):
        if self.speed_mps <= 0:
            raise InvalidConfig("speed_mps must be > 0")
        if not self.waypoints:
            raise InvalidConfig("agent needs at least one waypoint")

    def path_breakpoints(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Times/x/y of the piecewise-linear schedule: dwell at each waypoint,
        then travel to the next at constant speed; parked after the last."""
        times, xs, ys = [0.0], [self.waypoints[0][0]], [self.waypoints[0][1]]
        t = 0.0
        for i, (x, y, dwell_ms) in enumerate(self.waypoints):
            t += dwell_ms
            times.append(t)
            xs.append(x)
            ys.append(y)
            if i + 1 < len(self.waypoints):
                nx, ny, _ = self.waypoints[i + 1]
                dist = float(np.hypot(nx - x, ny - y))
                t += dist / self.speed_mps * 1000.0
                times.append(t)
                xs.append(nx)
                ys.append(ny)
        return np.asarray(times), np.asarray(xs), np.asarray(ys)


@dataclass(frozen=True)
class ZonePlacement:
    zone: ZoneDef
    x_m: float
    y_m: float
    w_m: float
    h_m: float

    def contains(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        return (x >= self.x_m) & (x <= self.x_m + self.w_m) & (y >= self.y_m) & (y <= self.y_m + self.h_m)


@dataclass(frozen=True)
class Scenario:
    seed: int
    duration_ms: int
    width_m: float
    height_m: float
    agents: tuple[Agent, ...]
    channel: ChannelParams = ChannelParams()
    zones: tuple[ZonePlacement, ...] = ()
    geofence: Geofence | None = None  # None: the workspace rectangle
    sample_period_ms: int = SAMPLE_PERIOD_MS_DEFAULT
    rotation_ms: int = ROTATION_MS_DEFAULT
    ambience: Ambience = Ambience.INDOOR

    def __post_init__(self):
        if self.duration_ms <= 0 or self.sample_period_ms <= 0:
            raise InvalidConfig("duration_ms and sample_period_ms must be > 0")
        seen = set()
        for agent in self.agents:
            if agent.associate_hash in seen:
                raise InvalidConfig(f"duplicate agent {agent.associate_hash[:8]}")
            seen.add(agent.associate_hash)
            x, y, _ = agent.waypoints[0]
            if not (0 <= x <= self.width_m and 0 <= y <= self.height_m):
                raise InvalidConfig(f"agent {agent.associate_hash[:8]} starts outside the workspace")

    def fence(self) -> Geofence:
        if self.geofence is not None:
            return self.geofence
        return Geofence(
            ((0.0, 0.0), (self.width_m, 0.0), (self.width_m, self.height_m), (0.0, self.height_m))
        )

    def tick_times(self) -> np.ndarray:
        return np.arange(0, self.duration_ms, self.sample_period_ms, dtype=np.int64)


def agent_positions(agent: Agent, t_ms: np.ndarray) -> np.ndarray:
    """Positions (len(t), 2) of one agent at the given times."""
    times, xs, ys = agent.path_breakpoints()
    t = np.asarray(t_ms, dtype=np.float64)
    return np.stack([np.interp(t, times, xs), np.interp(t, times, ys)], axis=-1)


def step_mobility(scenario: Scenario, t_ms: int) -> dict[str, tuple[float, float]]:
    """Agent positions at a single instant (deterministic waypoint following)."""
    if t_ms > scenario.duration_ms:
        raise InvalidConfig(f"t_ms {t_ms} beyond scenario duration {scenario.duration_ms}")
    out = {}
    for agent in scenario.agents:
        pos = agent_positions(agent, np.asarray([t_ms]))[0]
        out[agent.associate_hash] = (float(pos[0]), float(pos[1]))
    return out


def load_scenario(text: str, seed_override: int | None = None) -> Scenario:
    """Parse a YAML scenario document. Agents may give a 64-hex `hash` or a
    human-readable `enterprise_id` hashed with the file's org_salt_hex."""
    doc = yaml.safe_load(text)
    salt = bytes.fromhex(doc.get("org_salt_hex", "00" * 16))

    agents = []
    for a in doc.get("agents", []):
        if "hash" in a:
            h = a["hash"]
        elif "enterprise_id" in a:
            h = hash_identity(a["enterprise_id"], salt).associate_hash
        else:
            raise InvalidConfig("agent needs `hash` or `enterprise_id`")
        agents.append(
            Agent(
                associate_hash=h,
                waypoints=tuple((float(x), float(y), int(d)) for x, y, d in a["waypoints"]),
                device_present=bool(a.get("device", True)),
                speed_mps=float(a.get("speed_mps", SPEED_MPS_DEFAULT)),
            )
        )

    zones = []
    for z in doc.get("zones", []):
        x, y, w, h = z["rect"]
        zones.append(
            ZonePlacement(
                zone=ZoneDef(
                    zone_id=z["zone_id"],
                    personal_devices_allowed=bool(z.get("personal_devices_allowed", True)),
                    capacity=int(z.get("capacity", 1)),
                ),
                x_m=float(x), y_m=float(y), w_m=float(w), h_m=float(h),
            )
        )

    channel_doc = doc.get("channel", {})
    channel = ChannelParams(
        tx_power_dbm=int(channel_doc.get("tx_power_dbm", 0)),
        pl0_db=float(channel_doc.get("pl0_db", 40.0)),
        path_loss_exponent=float(channel_doc.get("path_loss_exponent", PATH_LOSS_EXPONENT_OUTDOOR)),
        shadow_sigma_db=float(channel_doc.get("shadow_sigma_db", 4.0)),
        detection_floor_dbm=float(channel_doc.get("detection_floor_dbm", -95.0)),
    )

    fence = None
    if "geofence" in doc:
        fence = Geofence(tuple((float(x), float(y)) for x, y in doc["geofence"]))

    workspace = doc["workspace"]
    return Scenario(
        seed=int(seed_override if seed_override is not None else doc.get("seed", 0)),
        duration_ms=int(doc["duration_ms"]),
        width_m=float(workspace["width_m"]),
        height_m=float(workspace["height_m"]),
        agents=tuple(agents),
        channel=channel,
        zones=tuple(zones),
        geofence=fence,
        sample_period_ms=int(doc.get("sample_period_ms", SAMPLE_PERIOD_MS_DEFAULT)),
        rotation_ms=int(doc.get("rotation_ms", ROTATION_MS_DEFAULT)),
        ambience=Ambience(doc.get("ambience", "indoor")),
    )
