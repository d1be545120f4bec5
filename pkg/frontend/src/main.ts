/**
 * Console bootstrap: panel wiring over the six service endpoints.
 *
 * Every mutation goes through the service and every displayed fact comes
 * from a fresh response; panel refreshes are guarded by a RequestGate so a
 * stale response can never overwrite a newer one.
 */
import { ApiClient, ApiError } from "./api.js";
import { GraphView } from "./graphview.js";
import { clampTraceLevels, initialViewState, RequestGate, type ViewState } from "./state.js";
import { exportCsv, levelSets, tracedTotal } from "./tracepanel.js";
import { TIER_COLORS } from "./palette.js";
import type { ClustersDoc, GraphSnapshotDoc, RiskDoc, TraceDoc } from "./types.js";

const api = new ApiClient("");
const gate = new RequestGate();

let view: ViewState;
let graphView: GraphView;
let lastSnapshot: GraphSnapshotDoc | null = null;
let lastTrace: TraceDoc | null = null;

function el<T extends HTMLElement>(id: string): T {
  const found = document.getElementById(id);
  if (!found) throw new Error(`missing element #${id}`);
  return found as T;
}

function setStatus(text: string, isError = false): void {
  const bar = el<HTMLElement>("status");
  bar.textContent = text;
  bar.className = isError ? "status error" : "status";
}

async function refreshGraph(): Promise<void> {
  const result = await gate.run("graph", async () => {
    const [snapshot, risk] = await Promise.all([
      api.getGraph(view.windowFromMs, view.windowToMs),
      api.getRisk(),
    ]);
    return { snapshot, risk };
  });
  if (!result) return;
  lastSnapshot = result.snapshot;
  graphView.render(result.snapshot, view.layoutSeed, view.showHashes);
  if (lastTrace) graphView.setHighlights(levelSets(lastTrace));
  if (view.traceSource) graphView.select(view.traceSource);
  renderRiskSummary(result.risk);
  setStatus(
    `snapshot ${result.snapshot.snapshot_id}: ${result.snapshot.nodes.length} associates, ` +
      `${result.snapshot.edges.length} contacts in window`,
  );
}

function renderRiskSummary(risk: RiskDoc): void {
  const counts: Record<string, number> = { high: 0, medium: 0, low: 0, none: 0 };
  for (const entry of Object.values(risk.risk)) counts[entry.tier] += 1;
  el<HTMLElement>("risk-summary").innerHTML = (["high", "medium", "low", "none"] as const)
    .map(
      (tier) =>
        `<span class="chip" style="border-color:${TIER_COLORS[tier]}">` +
        `${tier}: ${counts[tier]}</span>`,
    )
    .join(" ");
}

async function refreshTrace(): Promise<void> {
  if (!view.traceSource) return;
  const source = view.traceSource;
  try {
    const trace = await gate.run("trace", () =>
      api.getTrace(source, view.traceLevels, view.windowFromMs, view.windowToMs),
    );
    if (!trace) return;
    lastTrace = trace;
    graphView.setHighlights(levelSets(trace));
    el<HTMLElement>("trace-info").textContent =
      `${tracedTotal(trace)} associates across ${trace.levels.length} levels`;
    el<HTMLButtonElement>("export-csv").disabled = false;
  } catch (err) {
    showInlineError("trace-info", err);
  }
}

async function refreshClusters(): Promise<void> {
  const clusters = await gate.run("clusters", () => api.getClusters(view.minWeight, 2));
  if (!clusters) return;
  renderClusters(clusters);
}

function renderClusters(doc: ClustersDoc): void {
  const list = el<HTMLElement>("cluster-list");
  list.innerHTML = "";
  doc.clusters.forEach((cluster, i) => {
    const item = document.createElement("li");
    item.textContent =
      `#${i + 1}: ${cluster.members.length} members, risk ${cluster.cluster_risk.toFixed(2)}`;
    item.addEventListener("click", () => {
      view.selectedCluster = i;
      graphView.setHighlights([cluster.members]);
    });
    list.appendChild(item);
  });
  if (doc.clusters.length === 0) {
    list.innerHTML = '<li class="muted">no clusters at this weight</li>';
  }
}

async function markInfection(state: "reported" | "recovered"): Promise<void> {
  if (!view.traceSource) {
    setStatus("select an associate first", true);
    return;
  }
  try {
    const result = await api.postInfection(view.traceSource, view.windowToMs, state);
    const names = result.newly_at_risk.length
      ? ` newly at risk: ${result.newly_at_risk.map((h) => aliasOf(h)).join(", ")}`
      : " no new at-risk contacts";
    await refreshGraph();
    await refreshClusters();
    setStatus(`${state}: ${aliasOf(view.traceSource)};${names}`);
  } catch (err) {
    // view stays unchanged on service errors
    setStatus(err instanceof ApiError ? `${err.code}: ${err.message}` : String(err), true);
  }
}

function aliasOf(hash: string): string {
  const node = lastSnapshot?.nodes.find((n) => n.hash === hash);
  return node ? node.alias : hash.slice(0, 8);
}

function showInlineError(target: string, err: unknown): void {
  el<HTMLElement>(target).textContent =
    err instanceof ApiError ? `${err.code}: ${err.message}` : String(err);
}

function downloadCsv(): void {
  if (!lastTrace || !lastSnapshot) return;
  const blob = new Blob([exportCsv(lastTrace, lastSnapshot)], { type: "text/csv" });
  const link = document.createElement("a");
  link.href = URL.createObjectURL(blob);
  link.download = `trace-${lastTrace.source.slice(0, 8)}.csv`;
  link.click();
  URL.revokeObjectURL(link.href);
}

function onSelectNode(hash: string): void {
  view.traceSource = hash;
  graphView.select(hash);
  el<HTMLElement>("trace-source").textContent = view.showHashes ? hash : aliasOf(hash);
  void refreshTrace();
}

export function boot(): void {
  view = initialViewState(Date.now());
  graphView = new GraphView(el("graph"), { onSelectNode });

  el<HTMLInputElement>("levels-slider").addEventListener("input", (event) => {
    view.traceLevels = clampTraceLevels(Number((event.target as HTMLInputElement).value));
    el<HTMLElement>("levels-value").textContent = String(view.traceLevels);
    void refreshTrace();
  });
  el<HTMLInputElement>("window-from").addEventListener("change", (event) => {
    view.windowFromMs = Number((event.target as HTMLInputElement).value) || 0;
    void refreshGraph();
    void refreshTrace();
  });
  el<HTMLInputElement>("window-to").addEventListener("change", (event) => {
    view.windowToMs = Number((event.target as HTMLInputElement).value) || Date.now();
    void refreshGraph();
    void refreshTrace();
  });
  el<HTMLInputElement>("min-weight").addEventListener("change", (event) => {
    view.minWeight = Number((event.target as HTMLInputElement).value) || 0;
    void refreshClusters();
  });
  el<HTMLInputElement>("show-hashes").addEventListener("change", (event) => {
    view.showHashes = (event.target as HTMLInputElement).checked;
    if (lastSnapshot) graphView.render(lastSnapshot, view.layoutSeed, view.showHashes);
  });
  el<HTMLButtonElement>("mark-infected").addEventListener("click", () => void markInfection("reported"));
  el<HTMLButtonElement>("mark-recovered").addEventListener("click", () => void markInfection("recovered"));
  el<HTMLButtonElement>("export-csv").addEventListener("click", downloadCsv);
  el<HTMLButtonElement>("refresh").addEventListener("click", () => {
    void refreshGraph();
    void refreshClusters();
  });

  void refreshGraph();
  void refreshClusters();
}

if (typeof document !== "undefined" && document.getElementById("graph")) {
  boot();
}
