/**
 * Interactive SVG graph view.
 *
 * Renders a /v1/graph snapshot: nodes colored by risk tier (infection state
 * overrides), edge stroke proportional to contact weight, concentric
 * highlight rings for trace level sets. Above LIST_VIEW_NODE_LIMIT nodes the
 * view degrades to an alias list instead of a layout.
 */
import { computeLayout, LAYOUT_DEFAULTS, type Point } from "./layout.js";
import { edgeWidth, nodeColor } from "./palette.js";
import { LIST_VIEW_NODE_LIMIT } from "./state.js";
import type { GraphSnapshotDoc } from "./types.js";

const SVG_NS = "http://www.w3.org/2000/svg";

/** Ring colors by trace level (level 1 innermost concern). */
export const LEVEL_RING_COLORS = ["#ffffff", "#ff5d8f", "#ffb35d", "#7ee081", "#5dc8ff", "#c79bff"];

export interface GraphViewCallbacks {
  onSelectNode?: (hash: string) => void;
}

export class GraphView {
  private snapshot: GraphSnapshotDoc | null = null;
  private positions = new Map<string, Point>();
  private highlights = new Map<string, number>(); // hash -> trace level
  private selected: string | null = null;
  private lastLayoutKey = "";

  constructor(
    private readonly container: HTMLElement,
    private readonly callbacks: GraphViewCallbacks = {},
  ) {}

  render(snapshot: GraphSnapshotDoc, seed: number, showHashes = false): void {
    this.snapshot = snapshot;
    if (snapshot.nodes.length === 0) {
      this.container.innerHTML = '<div class="empty-state">No contacts in this window.</div>';
      return;
    }
    if (snapshot.nodes.length > LIST_VIEW_NODE_LIMIT) {
      this.renderList(snapshot, showHashes);
      return;
    }
    // reuse the previous layout when data and seed are unchanged
    const layoutKey =
      `${seed}:${snapshot.nodes.map((n) => n.hash).join(",")}:` +
      snapshot.edges.map((e) => e.edge_id).join(",");
    if (layoutKey !== this.lastLayoutKey) {
      this.positions = computeLayout(snapshot.nodes, snapshot.edges, seed);
      this.lastLayoutKey = layoutKey;
    }
    this.container.innerHTML = "";
    this.container.appendChild(this.buildSvg(snapshot, showHashes));
  }

  setHighlights(levelSets: string[][]): void {
    this.highlights.clear();
    levelSets.forEach((hashes, level) => {
      for (const h of hashes) this.highlights.set(h, level);
    });
    if (this.snapshot) this.refreshDecorations();
  }

  clearHighlights(): void {
    this.highlights.clear();
    if (this.snapshot) this.refreshDecorations();
  }

  select(hash: string | null): void {
    this.selected = hash;
    if (this.snapshot) this.refreshDecorations();
  }

  nodePosition(hash: string): Point | undefined {
    return this.positions.get(hash);
  }

  get nodeCount(): number {
    return this.container.querySelectorAll("circle.node").length;
  }

  get edgeCount(): number {
    return this.container.querySelectorAll("line.edge").length;
  }

  nodeFill(hash: string): string | null {
    const el = this.container.querySelector(`circle.node[data-hash="${hash}"]`);
    return el ? el.getAttribute("fill") : null;
  }

  highlightedHashes(): Set<string> {
    const out = new Set<string>();
    this.container.querySelectorAll("circle.ring").forEach((el) => {
      const hash = el.getAttribute("data-hash");
      if (hash) out.add(hash);
    });
    return out;
  }

  private renderList(snapshot: GraphSnapshotDoc, showHashes: boolean): void {
    const list = document.createElement("ol");
    list.className = "node-list";
    for (const node of snapshot.nodes) {
      const item = document.createElement("li");
      item.textContent = showHashes ? node.hash : node.alias;
      item.style.color = nodeColor(node);
      item.dataset.hash = node.hash;
      list.appendChild(item);
    }
    this.container.innerHTML = "";
    this.container.appendChild(list);
  }

  private buildSvg(snapshot: GraphSnapshotDoc, showHashes: boolean): SVGSVGElement {
    const svg = document.createElementNS(SVG_NS, "svg");
    svg.setAttribute("viewBox", `0 0 ${LAYOUT_DEFAULTS.width} ${LAYOUT_DEFAULTS.height}`);
    svg.setAttribute("class", "graph-svg");

    const edgeGroup = document.createElementNS(SVG_NS, "g");
    for (const edge of snapshot.edges) {
      const a = this.positions.get(edge.peer_a_hash);
      const b = this.positions.get(edge.peer_b_hash);
      if (!a || !b) continue;
      const line = document.createElementNS(SVG_NS, "line");
      line.setAttribute("class", "edge");
      line.setAttribute("x1", a.x.toFixed(1));
      line.setAttribute("y1", a.y.toFixed(1));
      line.setAttribute("x2", b.x.toFixed(1));
      line.setAttribute("y2", b.y.toFixed(1));
      line.setAttribute("stroke", edge.closeness === "near" ? "#4d5866" : "#3a4a5a");
      line.setAttribute("stroke-width", edgeWidth(edge.weight).toFixed(2));
      edgeGroup.appendChild(line);
    }
    svg.appendChild(edgeGroup);

    const decorationGroup = document.createElementNS(SVG_NS, "g");
    decorationGroup.setAttribute("class", "decorations");
    svg.appendChild(decorationGroup);

    const nodeGroup = document.createElementNS(SVG_NS, "g");
    for (const node of snapshot.nodes) {
      const p = this.positions.get(node.hash);
      if (!p) continue;
      const circle = document.createElementNS(SVG_NS, "circle");
      circle.setAttribute("class", "node");
      circle.setAttribute("data-hash", node.hash);
      circle.setAttribute("cx", p.x.toFixed(1));
      circle.setAttribute("cy", p.y.toFixed(1));
      circle.setAttribute("r", "7");
      circle.setAttribute("fill", nodeColor(node));
      circle.addEventListener("click", () => this.callbacks.onSelectNode?.(node.hash));
      const title = document.createElementNS(SVG_NS, "title");
      title.textContent = `${node.alias} [${node.tier}]`;
      circle.appendChild(title);
      nodeGroup.appendChild(circle);

      const label = document.createElementNS(SVG_NS, "text");
      label.setAttribute("class", "node-label");
      label.setAttribute("x", (p.x + 9).toFixed(1));
      label.setAttribute("y", (p.y + 3).toFixed(1));
      label.textContent = showHashes ? node.hash.slice(0, 10) : node.alias;
      nodeGroup.appendChild(label);
    }
    svg.appendChild(nodeGroup);
    this.decorate(decorationGroup);
    return svg;
  }

  private refreshDecorations(): void {
    const group = this.container.querySelector("g.decorations");
    if (!group) return;
    group.innerHTML = "";
    this.decorate(group as SVGGElement);
  }

  private decorate(group: Element): void {
    for (const [hash, level] of this.highlights) {
      const p = this.positions.get(hash);
      if (!p) continue;
      const ring = document.createElementNS(SVG_NS, "circle");
      ring.setAttribute("class", "ring");
      ring.setAttribute("data-hash", hash);
      ring.setAttribute("data-level", String(level));
      ring.setAttribute("cx", p.x.toFixed(1));
      ring.setAttribute("cy", p.y.toFixed(1));
      ring.setAttribute("r", String(10 + 4 * level));
      ring.setAttribute("fill", "none");
      ring.setAttribute("stroke", LEVEL_RING_COLORS[level % LEVEL_RING_COLORS.length]);
      ring.setAttribute("stroke-width", "2");
      group.appendChild(ring);
    }
    if (this.selected) {
      const p = this.positions.get(this.selected);
      if (p) {
        const marker = document.createElementNS(SVG_NS, "circle");
        marker.setAttribute("class", "selection");
        marker.setAttribute("cx", p.x.toFixed(1));
        marker.setAttribute("cy", p.y.toFixed(1));
        marker.setAttribute("r", "11");
        marker.setAttribute("fill", "none");
        marker.setAttribute("stroke", "#ffffff");
        marker.setAttribute("stroke-dasharray", "3 2");
        group.appendChild(marker);
      }
    }
  }
}
