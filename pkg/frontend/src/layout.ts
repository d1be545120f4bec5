/**
 * Seeded force-directed layout.
 *
 * Deterministic by construction: node order is canonical (hash ascending),
 * initial positions come from a seeded PRNG, and the solver is a fixed
 * number of synchronous iterations. Unchanged data + seed reproduces the
 * exact same coordinates, so screenshots and tests are stable.
 */
import type { GraphEdgeDoc, GraphNodeDoc } from "./types.js";

export interface Point {
  x: number;
  y: number;
}

/** mulberry32: small fast seeded PRNG, plenty for layout jitter. */
export function mulberry32(seed: number): () => number {
  let a = seed >>> 0;
  return () => {
    a |= 0;
    a = (a + 0x6d2b79f5) | 0;
    let t = Math.imul(a ^ (a >>> 15), 1 | a);
    t = (t + Math.imul(t ^ (t >>> 7), 61 | t)) ^ t;
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

export interface LayoutConfig {
  width: number;
  height: number;
  iterations: number;
  repulsion: number;
  springLength: number;
  springStrength: number;
  gravity: number;
  damping: number;
}

export const LAYOUT_DEFAULTS: LayoutConfig = {
  width: 900,
  height: 620,
  iterations: 120,
  repulsion: 6000,
  springLength: 70,
  springStrength: 0.02,
  gravity: 0.03,
  damping: 0.85,
};

export function computeLayout(
  nodes: GraphNodeDoc[],
  edges: GraphEdgeDoc[],
  seed: number,
  config: LayoutConfig = LAYOUT_DEFAULTS,
): Map<string, Point> {
  const ordered = [...nodes].sort((a, b) => (a.hash < b.hash ? -1 : a.hash > b.hash ? 1 : 0));
  const n = ordered.length;
  const positions = new Map<string, Point>();
  if (n === 0) return positions;

  const rand = mulberry32(seed);
  const cx = config.width / 2;
  const cy = config.height / 2;
  const radius = Math.min(config.width, config.height) * 0.38;

  const xs = new Float64Array(n);
  const ys = new Float64Array(n);
  const vxs = new Float64Array(n);
  const vys = new Float64Array(n);
  const index = new Map<string, number>();
  ordered.forEach((node, i) => {
    const angle = (2 * Math.PI * i) / n + rand() * 0.4;
    const r = radius * (0.55 + 0.45 * rand());
    xs[i] = cx + r * Math.cos(angle);
    ys[i] = cy + r * Math.sin(angle);
    index.set(node.hash, i);
  });

  const springs: Array<[number, number]> = [];
  for (const e of edges) {
    const a = index.get(e.peer_a_hash);
    const b = index.get(e.peer_b_hash);
    if (a !== undefined && b !== undefined && a !== b) springs.push([a, b]);
  }

  for (let iter = 0; iter < config.iterations; iter++) {
    for (let i = 0; i < n; i++) {
      let fx = (cx - xs[i]) * config.gravity;
      let fy = (cy - ys[i]) * config.gravity;
      for (let j = 0; j < n; j++) {
        if (i === j) continue;
        const dx = xs[i] - xs[j];
        const dy = ys[i] - ys[j];
        const d2 = dx * dx + dy * dy + 0.01;
        const f = config.repulsion / d2;
        const d = Math.sqrt(d2);
        fx += (dx / d) * f;
        fy += (dy / d) * f;
      }
      vxs[i] = (vxs[i] + fx * 0.01) * config.damping;
      vys[i] = (vys[i] + fy * 0.01) * config.damping;
    }
    for (const [a, b] of springs) {
      const dx = xs[b] - xs[a];
      const dy = ys[b] - ys[a];
      const d = Math.sqrt(dx * dx + dy * dy) + 0.01;
      const f = config.springStrength * (d - config.springLength);
      const ux = dx / d;
      const uy = dy / d;
      vxs[a] += ux * f;
      vys[a] += uy * f;
      vxs[b] -= ux * f;
      vys[b] -= uy * f;
    }
    for (let i = 0; i < n; i++) {
      xs[i] += vxs[i];
      ys[i] += vys[i];
      xs[i] = Math.max(12, Math.min(config.width - 12, xs[i]));
      ys[i] = Math.max(12, Math.min(config.height - 12, ys[i]));
    }
  }

  ordered.forEach((node, i) => {
    positions.set(node.hash, { x: xs[i], y: ys[i] });
  });
  return positions;
}
