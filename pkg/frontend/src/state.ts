/**
 * Client view state and request sequencing.
 *
 * The console is stateless with respect to truth: ViewState carries only
 * query parameters and presentation choices, never derived risk numbers.
 * RequestGate enforces the one-in-flight-per-panel rule; a response whose
 * sequence number has been superseded is discarded.
 */

export interface ViewState {
  windowFromMs: number;
  windowToMs: number;
  traceSource: string | null;
  traceLevels: number; // slider, 1..5
  minWeight: number;
  selectedCluster: number | null;
  layoutSeed: number;
  showHashes: boolean; // aliases by default; hashes behind a reveal toggle
}

export const TRACE_LEVELS_MIN = 1;
export const TRACE_LEVELS_MAX = 5;
export const LIST_VIEW_NODE_LIMIT = 2000;

export function initialViewState(nowMs: number): ViewState {
  return {
    windowFromMs: 0,
    windowToMs: nowMs,
    traceSource: null,
    traceLevels: 2,
    minWeight: 0.2,
    selectedCluster: null,
    layoutSeed: 1,
    showHashes: false,
  };
}

export function clampTraceLevels(value: number): number {
  return Math.max(TRACE_LEVELS_MIN, Math.min(TRACE_LEVELS_MAX, Math.round(value)));
}

export class RequestGate {
  private readonly sequences = new Map<string, number>();

  /**
   * Run one async request on behalf of a panel. Resolves with the result if
   * this request is still the panel's latest, otherwise with null.
   */
  async run<T>(panel: string, request: () => Promise<T>): Promise<T | null> {
    const seq = (this.sequences.get(panel) ?? 0) + 1;
    this.sequences.set(panel, seq);
    const result = await request();
    return this.sequences.get(panel) === seq ? result : null;
  }

  current(panel: string): number {
    return this.sequences.get(panel) ?? 0;
  }
}
