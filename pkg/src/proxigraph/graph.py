"""Temporal contact multi-graph and its analytics: multi-level time-respecting
contact tracing, contagion risk propagation, risk tiering, and contagion
cluster detection.

Parallel edges between the same pair are kept verbatim (one edge per
encounter); only an exact duplicate (same pair, start, end, closeness) is
absorbed. Contagion follows time-respecting paths only: successive edge start
times along a path are non-decreasing.
"""
from __future__ import annotations

import bisect
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Iterable, Mapping, Optional

import numpy as np

from .errors import InvalidConfig, InvalidParameter, UnknownAssociate
from .records import Ambience, Closeness, ProximityEvent

MS_PER_DAY = 86_400_000
MS_PER_MIN = 60_000


class InfectionState(str, Enum):
    HEALTHY = "healthy"
    REPORTED = "reported"
    RECOVERED = "recovered"


@dataclass(frozen=True)
class Infection:
    state: InfectionState = InfectionState.HEALTHY
    at_ms: Optional[int] = None  # report_ms or cleared_ms

    def to_wire(self) -> dict:
        return {"state": self.state.value, "at_ms": self.at_ms}


class RiskTier(Enum):
    NONE = 0
    LOW = 1
    MEDIUM = 2
    HIGH = 3

    @property
    def wire(self) -> str:
        return self.name.lower()

    @classmethod
    def from_wire(cls, name: str) -> "RiskTier":
        return cls[name.upper()]


@dataclass(frozen=True)
class TierThresholds:
    high: float = 0.5
    medium: float = 0.2


def tier_for(score: float, thresholds: TierThresholds = TierThresholds()) -> RiskTier:
    if score >= thresholds.high:
        return RiskTier.HIGH
    if score >= thresholds.medium:
        return RiskTier.MEDIUM
    if score > 0:
        return RiskTier.LOW
    return RiskTier.NONE


@dataclass(frozen=True)
class RiskAssessment:
    score: float
    tier: RiskTier
    computed_at_ms: int

    def to_wire(self) -> dict:
        return {"score": self.score, "tier": self.tier.wire, "computed_at_ms": self.computed_at_ms}


@dataclass(frozen=True)
class RiskParams:
    beta_hop: float = 0.5
    d_sat_min: float = 15.0
    class_factor: Mapping[Closeness, float] = field(
        default_factory=lambda: {Closeness.NEAR: 1.0, Closeness.CO_LOCATED: 0.4}
    )
    ambience_factor: Mapping[Ambience, float] = field(
        default_factory=lambda: {
            Ambience.OUTDOOR: 0.5,
            Ambience.INDOOR: 0.8,
            Ambience.AIR_CONDITIONED: 1.0,
            Ambience.CROWDED: 1.0,
            Ambience.UNKNOWN: 0.8,
        }
    )
    window_days: int = 14
    max_levels: int = 3

    def __post_init__(self):
        if not 0 < self.beta_hop <= 1:
            raise InvalidConfig(f"beta_hop must be in (0, 1], got {self.beta_hop}")
        if self.d_sat_min <= 0:
            raise InvalidConfig("d_sat_min must be > 0")
        if self.max_levels < 1:
            raise InvalidConfig("max_levels must be >= 1")
        for factor_map in (self.class_factor, self.ambience_factor):
            for key, value in factor_map.items():
                if not 0 < value <= 1:
                    raise InvalidConfig(f"factor {key} must be in (0, 1], got {value}")


@dataclass(frozen=True)
class ContactNode:
    associate_hash: str
    attributes: Mapping[str, str] = field(default_factory=dict)
    infection: Infection = Infection()
    risk: Optional[RiskAssessment] = None


@dataclass(frozen=True)
class ContactEdge:
    edge_id: int
    peer_a_hash: str  # canonically sorted pair
    peer_b_hash: str
    start_ms: int
    end_ms: int
    closeness: Closeness
    ambience: Ambience
    weight: float

    @property
    def duration_min(self) -> float:
        return (self.end_ms - self.start_ms) / MS_PER_MIN

    def other(self, h: str) -> str:
        return self.peer_b_hash if h == self.peer_a_hash else self.peer_a_hash


def edge_weight(edge, params: RiskParams) -> float:
    """Contact weight in [0, 1]: duration saturating at d_sat_min, scaled by
    contact class and ambience factors."""
    duration_min = (edge.end_ms - edge.start_ms) / MS_PER_MIN
    saturation = min(1.0, duration_min / params.d_sat_min)
    return (
        saturation
        * params.class_factor[edge.closeness]
        * params.ambience_factor[edge.ambience]
    )


@dataclass(frozen=True)
class TraceEntry:
    associate_hash: str
    via_edge_ids: tuple[int, ...]


@dataclass(frozen=True)
class TraceResult:
    source: str
    levels: tuple[tuple[TraceEntry, ...], ...]  # level 0 holds only the source

    def level_hashes(self, k: int) -> tuple[str, ...]:
        return tuple(e.associate_hash for e in self.levels[k]) if k < len(self.levels) else ()


@dataclass(frozen=True)
class Cluster:
    members: tuple[str, ...]  # hash ascending
    cluster_risk: float
    span: tuple[int, int]  # [min edge start, max edge end]


class _GraphView:
    """Read interface shared by the mutable graph and its frozen snapshots."""

    nodes: Mapping[str, ContactNode]
    edges: tuple
    adjacency: Mapping[str, tuple]

    def edge(self, edge_id: int) -> ContactEdge:
        return self.edges[edge_id]

    def incident(self, associate_hash: str) -> Iterable[ContactEdge]:
        for eid in self.adjacency.get(associate_hash, ()):
            yield self.edges[eid]

    def edge_columns(self):
        """Lazy numpy columns (node index map, u, v, start_ms, weight) used by
        the vectorized analytics. Cached until the next mutation."""
        cols = getattr(self, "_columns", None)
        if cols is None:
            cols = _build_columns(self.nodes, self.edges)
            self._columns = cols
        return cols

    def canonical_state(self):
        """Order-independent content fingerprint (edge ids excluded): used to
        compare graphs built from different arrival orders or via replay."""
        edge_set = sorted(
            (e.peer_a_hash, e.peer_b_hash, e.start_ms, e.end_ms, e.closeness.value,
             e.ambience.value, round(e.weight, 12))
            for e in self.edges
        )
        node_set = sorted(
            (h, n.infection.state.value, n.infection.at_ms, tuple(sorted(n.attributes.items())))
            for h, n in self.nodes.items()
        )
        return (tuple(node_set), tuple(edge_set))


def _build_columns(nodes, edges):
    index = {h: i for i, h in enumerate(nodes)}
    m = len(edges)
    u = np.fromiter((index[e.peer_a_hash] for e in edges), dtype=np.int64, count=m)
    v = np.fromiter((index[e.peer_b_hash] for e in edges), dtype=np.int64, count=m)
    start = np.fromiter((e.start_ms for e in edges), dtype=np.int64, count=m)
    weight = np.fromiter((e.weight for e in edges), dtype=np.float64, count=m)
    return (index, u, v, start, weight)


class GraphSnapshot(_GraphView):
    def __init__(self, nodes, edges, adjacency):
        self.nodes = nodes
        self.edges = edges
        self.adjacency = adjacency


class ContactMultiGraph(_GraphView):
    def __init__(self, params: RiskParams = RiskParams()):
        self.params = params
        self.nodes: dict[str, ContactNode] = {}
        self._edges: list[ContactEdge] = []
        self._adjacency: dict[str, list[int]] = {}
        self._dedup: dict[tuple, int] = {}
        self._columns = None

    @property
    def edges(self) -> tuple:
        return tuple(self._edges)

    @property
    def adjacency(self) -> Mapping[str, tuple]:
        return {h: tuple(ids) for h, ids in self._adjacency.items()}

    def edge(self, edge_id: int) -> ContactEdge:
        return self._edges[edge_id]

    def incident(self, associate_hash: str) -> Iterable[ContactEdge]:
        for eid in self._adjacency.get(associate_hash, ()):
            yield self._edges[eid]

    def edge_columns(self):
        if self._columns is None:
            self._columns = _build_columns(self.nodes, self._edges)
        return self._columns

    def ensure_node(self, associate_hash: str, attributes: Mapping[str, str] | None = None) -> ContactNode:
        node = self.nodes.get(associate_hash)
        if node is None:
            node = ContactNode(associate_hash=associate_hash, attributes=dict(attributes or {}))
            self.nodes[associate_hash] = node
            self._adjacency[associate_hash] = []
            self._columns = None
        elif attributes:
            merged = dict(node.attributes)
            merged.update(attributes)
            self.nodes[associate_hash] = replace(node, attributes=merged)
        return self.nodes[associate_hash]

    def set_infection(self, associate_hash: str, infection: Infection) -> None:
        node = self.nodes.get(associate_hash)
        if node is None:
            raise UnknownAssociate(associate_hash)
        self.nodes[associate_hash] = replace(node, infection=infection)

    def set_risk(self, risk: Mapping[str, RiskAssessment]) -> None:
        for h, assessment in risk.items():
            node = self.nodes.get(h)
            if node is not None:
                self.nodes[h] = replace(node, risk=assessment)

    def add_contact_event(self, event: ProximityEvent) -> int:
        """Append one encounter as a new parallel edge; exact duplicates
        return the already-stored edge id."""
        key = (event.peer_a_hash, event.peer_b_hash, event.start_ms, event.end_ms, event.closeness)
        existing = self._dedup.get(key)
        if existing is not None:
            return existing
        self.ensure_node(event.peer_a_hash)
        self.ensure_node(event.peer_b_hash)
        edge_id = len(self._edges)
        edge = ContactEdge(
            edge_id=edge_id,
            peer_a_hash=event.peer_a_hash,
            peer_b_hash=event.peer_b_hash,
            start_ms=event.start_ms,
            end_ms=event.end_ms,
            closeness=event.closeness,
            ambience=event.ambience,
            weight=edge_weight(event, self.params),
        )
        self._edges.append(edge)
        self._adjacency[event.peer_a_hash].append(edge_id)
        if event.peer_b_hash != event.peer_a_hash:
            self._adjacency[event.peer_b_hash].append(edge_id)
        self._dedup[key] = edge_id
        self._columns = None
        return edge_id

    def freeze(self) -> GraphSnapshot:
        """Immutable read view sharing the (immutable) node and edge records."""
        return GraphSnapshot(
            nodes=dict(self.nodes),
            edges=tuple(self._edges),
            adjacency={h: tuple(ids) for h, ids in self._adjacency.items()},
        )


def trace_contacts(
    graph: _GraphView,
    source: str,
    max_levels: int,
    window: tuple[int, int],
) -> TraceResult:
    """Multi-level time-respecting contact trace.

    Level k holds the associates reachable from the source by a path of
    exactly k edges whose start times are non-decreasing and inside the
    closed window, each associate reported at its minimum level only.
    via_edge_ids are the final edges of minimum-level paths. Trailing empty
    levels are trimmed; entries are sorted hash ascending.
    """
    if source not in graph.nodes:
        raise UnknownAssociate(source)
    t0, t1 = window
    if t1 < t0:
        raise InvalidParameter(f"window end {t1} < start {t0}")
    if max_levels < 0:
        raise InvalidParameter("max_levels must be >= 0")

    index, u, v, start, _ = graph.edge_columns()
    hashes = list(graph.nodes)
    n = len(hashes)
    src = index[source]

    in_window = (start >= t0) & (start <= t1)
    u, v, start = u[in_window], v[in_window], start[in_window]
    eids = np.nonzero(in_window)[0]
    s = start.astype(np.float64)

    INF = np.inf
    t_prev = np.full(n, INF)
    t_prev[src] = -INF
    seen = {src}
    levels: list[tuple[TraceEntry, ...]] = [(TraceEntry(source, ()),)]

    for _level in range(max_levels):
        go_uv = t_prev[u] <= s  # extend a walk sitting at u across this edge to v
        go_vu = t_prev[v] <= s
        if not (go_uv.any() or go_vu.any()):
            break
        t_next = np.full(n, INF)
        np.minimum.at(t_next, v[go_uv], s[go_uv])
        np.minimum.at(t_next, u[go_vu], s[go_vu])

        reached = np.nonzero(t_next < INF)[0]
        fresh = [i for i in reached if i not in seen]
        seen.update(fresh)

        entries = []
        if fresh:
            fresh_mask = np.zeros(n, dtype=bool)
            fresh_mask[fresh] = True
            via_to_v = go_uv & fresh_mask[v]
            via_to_u = go_vu & fresh_mask[u]
            via: dict[int, list[int]] = {i: [] for i in fresh}
            for tgt, eid in zip(v[via_to_v], eids[via_to_v]):
                via[int(tgt)].append(int(eid))
            for tgt, eid in zip(u[via_to_u], eids[via_to_u]):
                via[int(tgt)].append(int(eid))
            entries = sorted(
                (TraceEntry(hashes[i], tuple(sorted(set(via[i])))) for i in fresh),
                key=lambda e: e.associate_hash,
            )
        levels.append(tuple(entries))
        t_prev = t_next

    while len(levels) > 1 and not levels[-1]:
        levels.pop()
    return TraceResult(source=source, levels=tuple(levels))


def active_sources(graph: _GraphView, params: RiskParams, now_ms: int) -> list[str]:
    out = []
    for h, node in graph.nodes.items():
        inf = node.infection
        if inf.state == InfectionState.REPORTED and inf.at_ms is not None:
            if now_ms - inf.at_ms <= params.window_days * MS_PER_DAY:
                out.append(h)
    return sorted(out)


def risk_window(graph: _GraphView, params: RiskParams, now_ms: int) -> Optional[tuple[int, int]]:
    """Edge-eligibility window shared by risk propagation and cluster
    detection: anchored at the earliest active report."""
    sources = active_sources(graph, params, now_ms)
    if not sources:
        return None
    earliest = min(graph.nodes[s].infection.at_ms for s in sources)
    return (earliest - params.window_days * MS_PER_DAY, now_ms)


def propagate_risk(
    graph: _GraphView,
    params: RiskParams,
    now_ms: int,
    thresholds: TierThresholds = TierThresholds(),
) -> dict[str, RiskAssessment]:
    """Max-path contagion score for every node.

    score(v) = max over time-respecting paths (<= max_levels edges, edge
    starts non-decreasing and inside the risk window) from any active source
    of the product of (beta_hop * edge weight) per hop. Sources score 1.0;
    Recovered nodes score 0 but still conduct risk as intermediate hops.
    """
    sources = set(active_sources(graph, params, now_ms))
    window = risk_window(graph, params, now_ms)
    best: dict[str, float] = {}

    if window is not None:
        w0, w1 = window
        # Pareto frontier per node and hop count: (last edge start, product);
        # kept minimal: along the frontier product strictly increases with start.
        frontier: dict[str, list[tuple[float, float]]] = {s: [(-np.inf, 1.0)] for s in sources}
        for _hop in range(params.max_levels):
            gathered: dict[str, list[tuple[float, float]]] = {}
            for node, pareto in frontier.items():
                starts = [t for t, _ in pareto]
                for e in graph.incident(node):
                    if not w0 <= e.start_ms <= w1:
                        continue
                    pos = bisect.bisect_right(starts, e.start_ms)
                    if pos == 0:
                        continue
                    prod = pareto[pos - 1][1] * params.beta_hop * e.weight
                    if prod <= 0:
                        continue
                    gathered.setdefault(e.other(node), []).append((float(e.start_ms), prod))
            frontier = {}
            for node, cands in gathered.items():
                cands.sort(key=lambda tp: (tp[0], -tp[1]))
                pareto = []
                top = 0.0
                for t, p in cands:
                    if p > top:
                        pareto.append((t, p))
                        top = p
                frontier[node] = pareto
                if node not in sources:
                    best[node] = max(best.get(node, 0.0), max(p for _, p in pareto))
            if not frontier:
                break

    out: dict[str, RiskAssessment] = {}
    for h, node in graph.nodes.items():
        if node.infection.state == InfectionState.RECOVERED:
            score = 0.0
        elif h in sources:
            score = 1.0
        else:
            score = best.get(h, 0.0)
        out[h] = RiskAssessment(score=score, tier=tier_for(score, thresholds), computed_at_ms=now_ms)
    return out


def detect_clusters(
    graph: _GraphView,
    risk: Mapping[str, RiskAssessment],
    params: RiskParams,
    min_weight: float,
    min_size: int,
    now_ms: int,
) -> list[Cluster]:
    """Connected components of the weight- and window-filtered contact graph,
    keeping components of >= min_size with at least one at-risk member.
    Ordered by cluster risk descending, ties by smallest member hash."""
    window = risk_window(graph, params, now_ms)
    if window is None:
        return []
    w0, w1 = window

    adj: dict[str, list[ContactEdge]] = {}
    for e in graph.edges:
        if e.weight >= min_weight and w0 <= e.start_ms <= w1:
            adj.setdefault(e.peer_a_hash, []).append(e)
            adj.setdefault(e.peer_b_hash, []).append(e)

    clusters: list[Cluster] = []
    visited: set[str] = set()
    for root in adj:
        if root in visited:
            continue
        members: list[str] = []
        span_edges: dict[int, ContactEdge] = {}
        stack = [root]
        visited.add(root)
        while stack:
            h = stack.pop()
            members.append(h)
            for e in adj[h]:
                span_edges[e.edge_id] = e
                other = e.other(h)
                if other not in visited:
                    visited.add(other)
                    stack.append(other)
        if len(members) < min_size:
            continue
        scores = [risk[m].score for m in members if m in risk]
        if not scores or max(scores) <= 0:
            continue
        clusters.append(
            Cluster(
                members=tuple(sorted(members)),
                cluster_risk=max(scores),
                span=(
                    min(e.start_ms for e in span_edges.values()),
                    max(e.end_ms for e in span_edges.values()),
                ),
            )
        )
    clusters.sort(key=lambda c: (-c.cluster_risk, c.members[0]))
    return clusters


def at_risk_notifications(
    risk: Mapping[str, RiskAssessment],
    previous_risk: Mapping[str, RiskAssessment],
    tier_threshold: RiskTier,
) -> list[str]:
    """Associates whose tier crossed up to >= threshold since the previous
    risk computation, hash ascending."""
    out = []
    for h, assessment in risk.items():
        prev = previous_risk.get(h)
        prev_tier = prev.tier if prev is not None else RiskTier.NONE
        if assessment.tier.value >= tier_threshold.value > prev_tier.value:
            out.append(h)
    return sorted(out)
