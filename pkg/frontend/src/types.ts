/**
 * Wire documents of the trace service. Field names and encodings mirror the
 * HTTP API exactly: epoch-ms integers, lowercase-hex hashes.
 */

export type Tier = "none" | "low" | "medium" | "high";

export interface InfectionDoc {
  state: "healthy" | "reported" | "recovered";
  at_ms: number | null;
}

export interface GraphNodeDoc {
  hash: string;
  alias: string;
  tier: Tier;
  infection: InfectionDoc;
}

export interface GraphEdgeDoc {
  edge_id: number;
  peer_a_hash: string;
  peer_b_hash: string;
  start_ms: number;
  end_ms: number;
  weight: number;
  closeness: "near" | "co_located";
}

export interface GraphSnapshotDoc {
  snapshot_id: number;
  nodes: GraphNodeDoc[];
  edges: GraphEdgeDoc[];
}

export interface RiskEntryDoc {
  score: number;
  tier: Tier;
  computed_at_ms: number;
}

export interface RiskDoc {
  snapshot_id: number;
  computed_at_ms: number;
  risk: Record<string, RiskEntryDoc>;
}

export interface TraceLevelEntryDoc {
  hash: string;
  via_edge_ids: number[];
}

export interface TraceDoc {
  snapshot_id: number;
  source: string;
  levels: TraceLevelEntryDoc[][];
}

export interface ClusterDoc {
  members: string[];
  cluster_risk: number;
  span: [number, number];
}

export interface ClustersDoc {
  snapshot_id: number;
  clusters: ClusterDoc[];
}

export interface InfectionReportResult {
  associate_hash: string;
  state: string;
  assessed_count: number;
  newly_at_risk: string[];
  snapshot_id: number;
}

export interface ErrorDoc {
  error: { code: string; message: string };
}
