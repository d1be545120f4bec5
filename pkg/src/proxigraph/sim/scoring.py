"""End-to-end detection scoring: emitted ProximityEvents vs ground-truth
sub-threshold episodes."""
from __future__ import annotations

import bisect
from dataclasses import dataclass
from typing import Iterable

from ..records import ProximityEvent
from .runner import GroundTruth

MIN_TRUE_DWELL_MS_DEFAULT = 30_000


@dataclass(frozen=True)
class DetectionScore:
    precision: float
    recall: float
    f1: float
    matched_events: int
    total_events: int
    matched_episodes: int
    total_episodes: int


def score_detection(
    events: Iterable[ProximityEvent],
    ground_truth: GroundTruth,
    near_threshold_m: float,
    min_true_dwell_ms: int = MIN_TRUE_DWELL_MS_DEFAULT,
) -> DetectionScore:
    """Precision/recall of events against ground-truth episodes.

    An event matches an episode of the same pair when their intervals
    overlap. Precision over an empty event set is 1.0, recall over an empty
    episode set likewise.
    """
    episodes = ground_truth.episodes(near_threshold_m, min_true_dwell_ms)
    starts = {pair: [s for s, _ in spans] for pair, spans in episodes.items()}

    events = list(events)
    matched_events = 0
    matched: dict[tuple[str, str], set[int]] = {pair: set() for pair in episodes}
    for e in events:
        spans = episodes.get(e.pair)
        if not spans:
            continue
        # candidate episodes: those starting before the event ends
        hi = bisect.bisect_left(starts[e.pair], e.end_ms)
        hit = False
        for k in range(hi - 1, -1, -1):
            s, t = spans[k]
            if t <= e.start_ms:
                break
            if e.start_ms < t and s < e.end_ms:
                matched[e.pair].add(k)
                hit = True
        if hit:
            matched_events += 1

    total_events = len(events)
    total_episodes = sum(len(s) for s in episodes.values())
    matched_episodes = sum(len(s) for s in matched.values())
    precision = matched_events / total_events if total_events else 1.0
    recall = matched_episodes / total_episodes if total_episodes else 1.0
    f1 = 0.0 if precision + recall == 0 else 2 * precision * recall / (precision + recall)
    return DetectionScore(
        precision=precision,
        recall=recall,
        f1=f1,
        matched_events=matched_events,
        total_events=total_events,
        matched_episodes=matched_episodes,
        total_episodes=total_episodes,
    )
