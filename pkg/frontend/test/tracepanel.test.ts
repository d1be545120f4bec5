import { describe, expect, it } from "vitest";

import { exportCsv, exportRows, levelSets, tracedTotal } from "../src/tracepanel.js";
import { fixture } from "./helpers.js";

const chain = fixture("trace_chain");

describe("trace panel", () => {
  it("level sets mirror the API response", () => {
    const doc = chain.traces["2"];
    const sets = levelSets(doc);
    expect(sets.length).toBe(doc.levels.length);
    doc.levels.forEach((level: any[], k: number) => {
      expect(sets[k]).toEqual(level.map((e) => e.hash));
    });
  });

  it("export row count equals the sum of the level-set sizes", () => {
    for (const key of ["1", "2", "3"] as const) {
      const doc = chain.traces[key];
      const rows = exportRows(doc, chain.graph);
      expect(rows.length).toBe(tracedTotal(doc));
      expect(rows.length).toBe(doc.levels.reduce((s: number, l: any[]) => s + l.length, 0));
    }
  });

  it("export carries hash, alias, level and tier from the snapshot", () => {
    const rows = exportRows(chain.traces["3"], chain.graph);
    const aliasByHash = new Map(chain.graph.nodes.map((n: any) => [n.hash, n.alias]));
    for (const row of rows) {
      expect(row.alias).toBe(aliasByHash.get(row.hash));
      expect(["none", "low", "medium", "high"]).toContain(row.tier);
    }
    expect(rows[0].level).toBe(0); // the source itself
  });

  it("builds well-formed CSV", () => {
    const csv = exportCsv(chain.traces["2"], chain.graph);
    const lines = csv.trim().split("\n");
    expect(lines[0]).toBe("hash,alias,level,tier");
    expect(lines.length).toBe(1 + tracedTotal(chain.traces["2"]));
    for (const line of lines.slice(1)) {
      expect(line.split(",").length).toBe(4);
    }
  });

  it("escapes aliases containing commas or quotes", () => {
    const doc = { snapshot_id: 1, source: "x", levels: [[{ hash: "h1", via_edge_ids: [] }]] };
    const graph = {
      snapshot_id: 1,
      nodes: [{ hash: "h1", alias: 'team "a", floor 2', tier: "low", infection: { state: "healthy", at_ms: null } }],
      edges: [],
    };
    const csv = exportCsv(doc as any, graph as any);
    expect(csv).toContain('"team ""a"", floor 2"');
  });
});
