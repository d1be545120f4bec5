/**
 * Trace panel logic: level sets for highlighting and the CSV export.
 *
 * Pure functions over the /v1/trace and /v1/graph documents; the DOM wiring
 * lives in main.ts. Export rows carry hash, alias, level, tier; one row per
 * traced associate, so the row count equals the sum of the level-set sizes.
 */
import type { GraphSnapshotDoc, TraceDoc } from "./types.js";

export function levelSets(trace: TraceDoc): string[][] {
  return trace.levels.map((level) => level.map((entry) => entry.hash));
}

export function tracedTotal(trace: TraceDoc): number {
  return trace.levels.reduce((sum, level) => sum + level.length, 0);
}

export interface ExportRow {
  hash: string;
  alias: string;
  level: number;
  tier: string;
}

export function exportRows(trace: TraceDoc, snapshot: GraphSnapshotDoc): ExportRow[] {
  const byHash = new Map(snapshot.nodes.map((n) => [n.hash, n]));
  const rows: ExportRow[] = [];
  trace.levels.forEach((level, k) => {
    for (const entry of level) {
      const node = byHash.get(entry.hash);
      rows.push({
        hash: entry.hash,
        alias: node?.alias ?? entry.hash.slice(0, 8),
        level: k,
        tier: node?.tier ?? "none",
      });
    }
  });
  return rows;
}

function csvEscape(value: string): string {
  return /[",\n]/.test(value) ? `"${value.replace(/"/g, '""')}"` : value;
}

export function exportCsv(trace: TraceDoc, snapshot: GraphSnapshotDoc): string {
  const lines = ["hash,alias,level,tier"];
  for (const row of exportRows(trace, snapshot)) {
    lines.push([row.hash, csvEscape(row.alias), String(row.level), row.tier].join(","));
  }
  return lines.join("\n") + "\n";
}
