/**
 * Typed client for the trace-service HTTP API.
 *
 * The console talks to exactly these six endpoints and holds no truth of its
 * own: every displayed fact is reconstructible from these responses.
 */
import type {
  ClustersDoc,
  ErrorDoc,
  GraphSnapshotDoc,
  InfectionReportResult,
  RiskDoc,
  TraceDoc,
} from "./types.js";

export class ApiError extends Error {
  readonly code: string;
  readonly status: number;

  constructor(code: string, message: string, status: number) {
    super(message);
    this.code = code;
    this.status = status;
  }
}

async function parseOrThrow<T>(response: Response): Promise<T> {
  if (response.ok) {
    return (await response.json()) as T;
  }
  let code = "http_error";
  let message = `HTTP ${response.status}`;
  try {
    const doc = (await response.json()) as ErrorDoc;
    code = doc.error.code;
    message = doc.error.message;
  } catch {
    // non-JSON error body: keep the generic code
  }
  throw new ApiError(code, message, response.status);
}

export class ApiClient {
  constructor(private readonly baseUrl: string = "") {}

  private url(path: string, params?: Record<string, string | number>): string {
    const query = params
      ? "?" +
        Object.entries(params)
          .map(([k, v]) => `${encodeURIComponent(k)}=${encodeURIComponent(String(v))}`)
          .join("&")
      : "";
    return `${this.baseUrl}${path}${query}`;
  }

  async getGraph(fromMs: number, toMs: number): Promise<GraphSnapshotDoc> {
    return parseOrThrow(await fetch(this.url("/v1/graph", { from: fromMs, to: toMs })));
  }

  async getRisk(): Promise<RiskDoc> {
    return parseOrThrow(await fetch(this.url("/v1/risk")));
  }

  async getTrace(source: string, levels: number, fromMs: number, toMs: number): Promise<TraceDoc> {
    return parseOrThrow(
      await fetch(this.url("/v1/trace", { source, levels, from: fromMs, to: toMs })),
    );
  }

  async getClusters(minWeight: number, minSize: number): Promise<ClustersDoc> {
    return parseOrThrow(
      await fetch(this.url("/v1/clusters", { min_weight: minWeight, min_size: minSize })),
    );
  }

  async postInfection(
    associateHash: string,
    reportMs: number,
    state: "reported" | "recovered" = "reported",
  ): Promise<InfectionReportResult> {
    const response = await fetch(this.url("/v1/infections"), {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ associate_hash: associateHash, report_ms: reportMs, state }),
    });
    return parseOrThrow(response);
  }

  async postEvents(envelopes: unknown[]): Promise<{ accepted: number }> {
    const response = await fetch(this.url("/v1/events"), {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(envelopes),
    });
    return parseOrThrow(response);
  }
}
