"""Encounter tracking: the intervention state machine and the aggregation of
window verdicts into ProximityEvents.

The state machine debounces single noisy Near windows (k consecutive Nears
before alerting) and rate-limits alerts with a cooldown. Aggregation merges
maximal runs of Near windows, tolerating one missing slide inside a run.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, replace
from enum import Enum
from typing import Callable, Optional

from .classifier import ProximityClass, ProximityVerdict
from .features import ObservationWindow, SLIDE_MS_DEFAULT
from .records import Ambience, Closeness, ProximityEvent

K_CONSECUTIVE_NEAR_DEFAULT = 2
COOLDOWN_MS_DEFAULT = 300_000


class Phase(str, Enum):
    IDLE = "idle"
    CANDIDATE = "candidate"
    ALERTING = "alerting"
    COOLDOWN = "cooldown"


@dataclass(frozen=True)
class EncounterParams:
    k_consecutive_near: int = K_CONSECUTIVE_NEAR_DEFAULT
    cooldown_ms: int = COOLDOWN_MS_DEFAULT


@dataclass(frozen=True)
class EncounterState:
    peer: str  # resolved hash, or token hex for unresolvable peers
    phase: Phase = Phase.IDLE
    consecutive_near: int = 0
    phase_entered_ms: int = 0


@dataclass(frozen=True)
class InterventionNotice:
    """The audio-visual-tactile alert, as a data record."""

    peer: str
    emitted_ms: int
    confidence: float


def update_encounter(
    state: EncounterState,
    verdict: ProximityVerdict,
    now_ms: int,
    params: EncounterParams = EncounterParams(),
) -> tuple[EncounterState, Optional[InterventionNotice]]:
    """One transition of the per-peer state machine.

    Idle -(Near)-> Candidate; Candidate -(k-th consecutive Near)-> Alerting,
    emitting the one notice for this Alerting entry; Candidate -(Far)-> Idle;
    Alerting -(Far)-> Cooldown; Cooldown -(cooldown elapsed)-> Idle. A pending
    cooldown expiry is applied before the verdict is examined.
    """
    near = verdict.proximity == ProximityClass.NEAR

    if state.phase == Phase.COOLDOWN and now_ms - state.phase_entered_ms >= params.cooldown_ms:
        state = replace(state, phase=Phase.IDLE, consecutive_near=0, phase_entered_ms=now_ms)

    if state.phase == Phase.IDLE:
        if near:
            return replace(state, phase=Phase.CANDIDATE, consecutive_near=1, phase_entered_ms=now_ms), None
        return state, None

    if state.phase == Phase.CANDIDATE:
        if not near:
            return replace(state, phase=Phase.IDLE, consecutive_near=0, phase_entered_ms=now_ms), None
        count = state.consecutive_near + 1
        if count >= params.k_consecutive_near:
            notice = InterventionNotice(peer=state.peer, emitted_ms=now_ms, confidence=verdict.confidence)
            return replace(state, phase=Phase.ALERTING, consecutive_near=count, phase_entered_ms=now_ms), notice
        return replace(state, consecutive_near=count), None

    if state.phase == Phase.ALERTING:
        if near:
            return state, None
        return replace(state, phase=Phase.COOLDOWN, consecutive_near=0, phase_entered_ms=now_ms), None

    return state, None  # Cooldown, not yet elapsed: verdicts are ignored


@dataclass(frozen=True)
class AggregationResult:
    events: tuple[ProximityEvent, ...]
    unresolved_windows: int


def aggregate_events(
    windows_verdicts: list[tuple[ObservationWindow, ProximityVerdict]],
    resolver: Callable[[bytes, int], Optional[str]],
    self_hash: str,
    slide_ms: int = SLIDE_MS_DEFAULT,
) -> AggregationResult:
    """Merge maximal runs of Near windows into ProximityEvents.

    `resolver` maps (token bytes, timestamp_ms) to an associate hash; windows
    whose token does not resolve (visitor/foreign devices) yield no event but
    are counted. Runs survive a gap of at most one missing slide; an explicit
    Far window always ends the run. A token rotation inside an encounter
    produces windows under two tokens that resolve to the same peer, so runs
    are built per resolved peer, not per token.
    """
    unresolved = 0
    per_peer: dict[str, dict[int, tuple[ObservationWindow, ProximityVerdict]]] = {}
    for window, verdict in windows_verdicts:
        peer = resolver(window.peer_token, window.samples[0].timestamp_ms)
        if peer is None:
            unresolved += 1
            continue
        slot = per_peer.setdefault(peer, {})
        held = slot.get(window.window_start_ms)
        # rotation can split one slide into two windows; keep the stronger verdict
        if held is None or verdict.confidence > held[1].confidence:
            slot[window.window_start_ms] = (window, verdict)

    events: list[ProximityEvent] = []
    for peer in sorted(per_peer):
        run: list[tuple[ObservationWindow, ProximityVerdict]] = []
        for start in sorted(per_peer[peer]):
            window, verdict = per_peer[peer][start]
            if verdict.proximity != ProximityClass.NEAR:
                if run:
                    events.append(_close_run(run, self_hash, peer))
                    run = []
                continue
            if run and start - run[-1][0].window_start_ms > 2 * slide_ms:
                events.append(_close_run(run, self_hash, peer))
                run = []
            run.append((window, verdict))
        if run:
            events.append(_close_run(run, self_hash, peer))

    events.sort(key=lambda e: (e.start_ms, e.pair))
    return AggregationResult(events=tuple(events), unresolved_windows=unresolved)


def _close_run(
    run: list[tuple[ObservationWindow, ProximityVerdict]], self_hash: str, peer_hash: str
) -> ProximityEvent:
    ambience_counts = Counter(s.ambience for w, _ in run for s in w.samples)
    top = max(ambience_counts.values())
    ambience = next(a for a in Ambience if ambience_counts.get(a) == top)
    return ProximityEvent(
        peer_a_hash=self_hash,
        peer_b_hash=peer_hash,
        start_ms=run[0][0].window_start_ms,
        end_ms=run[-1][0].window_end_ms,
        closeness=Closeness.NEAR,
        peak_confidence=max(v.confidence for _, v in run),
        ambience=ambience,
    )
