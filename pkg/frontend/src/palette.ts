/**
 * Node and edge visual encoding.
 *
 * Tier palette (documented contract):
 *   high   -> #e5484d (red)
 *   medium -> #f5a524 (amber)
 *   low    -> #f7ce46 (yellow)
 *   none   -> #46a5e5 (blue)
 * Infection state overrides tier: a reported associate renders dark violet,
 * a recovered one grey, whatever their tier.
 */
import type { GraphNodeDoc, Tier } from "./types.js";

export const TIER_COLORS: Record<Tier, string> = {
  high: "#e5484d",
  medium: "#f5a524",
  low: "#f7ce46",
  none: "#46a5e5",
};

export const REPORTED_COLOR = "#7c3aed";
export const RECOVERED_COLOR = "#8b949e";

export function nodeColor(node: GraphNodeDoc): string {
  if (node.infection.state === "reported") return REPORTED_COLOR;
  if (node.infection.state === "recovered") return RECOVERED_COLOR;
  return TIER_COLORS[node.tier];
}

/** Edge stroke width grows linearly with contact weight. */
export function edgeWidth(weight: number): number {
  return 0.5 + 3.5 * Math.max(0, Math.min(1, weight));
}
