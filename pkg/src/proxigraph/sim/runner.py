"""Scenario execution: radio sampling, ground-truth distances, access logs
and token schedules, all pure functions of (scenario, seed).

Random draws happen in a fixed order (device tx offsets first, then one noise
matrix per tick) so reruns are bit-identical. Sample values are integer dBm,
like a real radio reports them.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np

from ..features import RssiSample
from ..geofence import point_in_geofence
from ..records import Ambience
from ..tokens import DeviceSecret, TokenResolver, derive_token
from ..zones import AccessLogEntry
from .scenario import Scenario, agent_positions

TX_OFFSET_LOW_DB = -8
TX_OFFSET_HIGH_DB = 4
MIN_RADIO_DISTANCE_M = 0.1  # two bodies are never closer than this


def device_secret_for(scenario_seed: int, associate_hash: str) -> DeviceSecret:
    """Per-agent secret, reproducible from the scenario seed."""
    material = hashlib.sha256(
        scenario_seed.to_bytes(8, "big", signed=True) + bytes.fromhex(associate_hash)
    ).digest()
    return DeviceSecret(secret=material, owner=associate_hash, issued_epoch_day=0)


@dataclass
class GroundTruth:
    tick_ms: np.ndarray  # (T,)
    agent_hashes: list[str]
    positions: np.ndarray  # (T, N, 2)
    sample_period_ms: int

    def index_of(self, associate_hash: str) -> int:
        return self.agent_hashes.index(associate_hash)

    def distance_series(self, a: str, b: str) -> np.ndarray:
        i, j = self.index_of(a), self.index_of(b)
        delta = self.positions[:, i, :] - self.positions[:, j, :]
        return np.hypot(delta[:, 0], delta[:, 1])

    def episodes(self, threshold_m: float, min_dwell_ms: int) -> dict[tuple[str, str], list[tuple[int, int]]]:
        """Per sorted pair: maximal sub-threshold runs lasting >= min_dwell,
        as half-open [start, end) intervals."""
        out: dict[tuple[str, str], list[tuple[int, int]]] = {}
        n = len(self.agent_hashes)
        for i in range(n):
            for j in range(i + 1, n):
                a, b = sorted((self.agent_hashes[i], self.agent_hashes[j]))
                runs = self._runs(self.distance_series(a, b) < threshold_m)
                spans = []
                for lo, hi in runs:
                    start = int(self.tick_ms[lo])
                    end = int(self.tick_ms[hi]) + self.sample_period_ms
                    if end - start >= min_dwell_ms:
                        spans.append((start, end))
                if spans:
                    out[(a, b)] = spans
        return out

    def _runs(self, mask: np.ndarray) -> list[tuple[int, int]]:
        runs = []
        start = None
        for k, flag in enumerate(mask):
            if flag and start is None:
                start = k
            elif not flag and start is not None:
                runs.append((start, k - 1))
                start = None
        if start is not None:
            runs.append((start, len(mask) - 1))
        return runs


@dataclass
class RxStream:
    """One receiver's samples as parallel columns; `samples()` materializes
    RssiSample objects on demand to keep big scenarios cheap."""

    receiver_hash: str
    timestamp_ms: np.ndarray
    rssi_dbm: np.ndarray
    tx_power_dbm: np.ndarray
    tx_index: np.ndarray  # ground-truth transmitter (never shown to the pipeline)
    epoch_index: np.ndarray
    token_table: dict[tuple[int, int], bytes]  # (tx_index, epoch) -> token
    ambience: Ambience

    def __len__(self) -> int:
        return len(self.timestamp_ms)

    def samples(self) -> list[RssiSample]:
        return [
            RssiSample(
                peer_token=self.token_table[(int(tx), int(ep))],
                rssi_dbm=int(rssi),
                tx_power_dbm=int(txp),
                timestamp_ms=int(ts),
                ambience=self.ambience,
            )
            for ts, rssi, txp, tx, ep in zip(
                self.timestamp_ms, self.rssi_dbm, self.tx_power_dbm, self.tx_index, self.epoch_index
            )
        ]


@dataclass
class ScenarioOutput:
    scenario: Scenario
    agent_hashes: list[str]
    ground_truth: GroundTruth
    streams: dict[str, RxStream]
    access_logs: tuple[AccessLogEntry, ...]
    token_schedule: dict[str, dict[int, bytes]]  # hash -> epoch -> token
    secrets: dict[str, DeviceSecret]
    tx_offsets: dict[str, int]

    def resolver(self, skew_epochs: int = 1) -> TokenResolver:
        return TokenResolver(list(self.secrets.values()), skew_epochs=skew_epochs)

    def transmitter_of(self, token: bytes) -> str | None:
        for h, sched in self.token_schedule.items():
            if token in sched.values():
                return h
        return None


def run_scenario(scenario: Scenario) -> ScenarioOutput:
    rng = np.random.default_rng(scenario.seed)
    agents = scenario.agents
    hashes = [a.associate_hash for a in agents]
    n = len(agents)
    ticks = scenario.tick_times()
    t_count = len(ticks)

    tx_offsets = rng.integers(TX_OFFSET_LOW_DB, TX_OFFSET_HIGH_DB + 1, size=n)

    positions = np.stack([agent_positions(a, ticks) for a in agents], axis=1)  # (T, N, 2)
    ground_truth = GroundTruth(
        tick_ms=ticks, agent_hashes=hashes, positions=positions,
        sample_period_ms=scenario.sample_period_ms,
    )

    secrets = {h: device_secret_for(scenario.seed, h) for h in hashes}
    epochs = range(int(ticks[-1]) // scenario.rotation_ms + 1) if t_count else range(0)
    token_schedule = {
        h: {e: derive_token(secrets[h], e).token for e in epochs} for h in hashes
    }

    device = np.asarray([a.device_present for a in agents], dtype=bool)
    no_device_zones = [z for z in scenario.zones if not z.zone.personal_devices_allowed]
    fence = scenario.fence()

    # radio-active mask per tick: has a device, outside no-device zones, inside the fence
    in_nodev = np.zeros((t_count, n), dtype=bool)
    for z in no_device_zones:
        in_nodev |= z.contains(positions[:, :, 0], positions[:, :, 1])
    in_fence = np.ones((t_count, n), dtype=bool)
    if not _fence_is_workspace_rect(scenario):
        for i in range(n):
            in_fence[:, i] = [
                point_in_geofence((float(x), float(y)), fence) for x, y in positions[:, i, :]
            ]
    else:
        in_fence = (
            (positions[:, :, 0] >= 0) & (positions[:, :, 0] <= scenario.width_m)
            & (positions[:, :, 1] >= 0) & (positions[:, :, 1] <= scenario.height_m)
        )
    radio_ok = device[None, :] & ~in_nodev & in_fence

    ch = scenario.channel
    tx_eff = ch.tx_power_dbm + tx_offsets  # advertised tx-power byte per device

    rows_t, rows_rx, rows_tx, rows_rssi = [], [], [], []
    for k in range(t_count):
        pos = positions[k]
        delta = pos[:, None, :] - pos[None, :, :]
        d = np.hypot(delta[:, :, 0], delta[:, :, 1])
        np.maximum(d, MIN_RADIO_DISTANCE_M, out=d)
        noise = rng.normal(0.0, ch.shadow_sigma_db, size=(n, n)) if ch.shadow_sigma_db > 0 else np.zeros((n, n))
        rssi = tx_eff[None, :] - ch.pl0_db - 10.0 * ch.path_loss_exponent * np.log10(d) + noise
        rssi = np.clip(np.rint(rssi), -127, 20)
        ok = radio_ok[k][:, None] & radio_ok[k][None, :] & (rssi >= ch.detection_floor_dbm)
        np.fill_diagonal(ok, False)
        rx_idx, tx_idx = np.nonzero(ok)
        if len(rx_idx):
            rows_t.append(np.full(len(rx_idx), ticks[k], dtype=np.int64))
            rows_rx.append(rx_idx.astype(np.int64))
            rows_tx.append(tx_idx.astype(np.int64))
            rows_rssi.append(rssi[rx_idx, tx_idx].astype(np.int64))

    if rows_t:
        all_t = np.concatenate(rows_t)
        all_rx = np.concatenate(rows_rx)
        all_tx = np.concatenate(rows_tx)
        all_rssi = np.concatenate(rows_rssi)
    else:
        all_t = all_rx = all_tx = all_rssi = np.zeros(0, dtype=np.int64)

    order = np.lexsort((all_tx, all_t, all_rx))
    all_t, all_rx, all_tx, all_rssi = all_t[order], all_rx[order], all_tx[order], all_rssi[order]
    all_epoch = all_t // scenario.rotation_ms

    token_by_index = {
        (i, e): token_schedule[hashes[i]][e] for i in range(n) for e in epochs
    }
    streams: dict[str, RxStream] = {}
    bounds = np.searchsorted(all_rx, np.arange(n + 1))
    for i in range(n):
        lo, hi = bounds[i], bounds[i + 1]
        if lo == hi:
            continue
        streams[hashes[i]] = RxStream(
            receiver_hash=hashes[i],
            timestamp_ms=all_t[lo:hi],
            rssi_dbm=all_rssi[lo:hi],
            tx_power_dbm=tx_eff[all_tx[lo:hi]],
            tx_index=all_tx[lo:hi],
            epoch_index=all_epoch[lo:hi],
            token_table=token_by_index,
            ambience=scenario.ambience,
        )

    access_logs = _access_logs(scenario, positions, ticks, hashes, no_device_zones)

    return ScenarioOutput(
        scenario=scenario,
        agent_hashes=hashes,
        ground_truth=ground_truth,
        streams=streams,
        access_logs=access_logs,
        token_schedule=token_schedule,
        secrets=secrets,
        tx_offsets={h: int(o) for h, o in zip(hashes, tx_offsets)},
    )


def _fence_is_workspace_rect(scenario: Scenario) -> bool:
    return scenario.geofence is None


def _access_logs(scenario, positions, ticks, hashes, no_device_zones) -> tuple[AccessLogEntry, ...]:
    logs: list[AccessLogEntry] = []
    period = scenario.sample_period_ms
    for z in no_device_zones:
        inside = z.contains(positions[:, :, 0], positions[:, :, 1])  # (T, N)
        for i, h in enumerate(hashes):
            col = inside[:, i]
            start = None
            for k, flag in enumerate(col):
                if flag and start is None:
                    start = int(ticks[k])
                elif not flag and start is not None:
                    logs.append(AccessLogEntry(h, z.zone.zone_id, start, int(ticks[k - 1]) + period))
                    start = None
            if start is not None:
                logs.append(AccessLogEntry(h, z.zone.zone_id, start, int(ticks[-1]) + period))
    logs.sort(key=lambda e: (e.entry_ms, e.zone_id, e.associate_hash))
    return tuple(logs)
