import { afterEach, describe, expect, it, vi } from "vitest";

import { ApiClient, ApiError } from "../src/api.js";
import { fixture, mockFetch } from "./helpers.js";

afterEach(() => vi.unstubAllGlobals());

describe("ApiClient", () => {
  it("builds trace query parameters exactly as the service expects", async () => {
    const chain = fixture("trace_chain");
    const calls = mockFetch([
      (url) => (url.pathname === "/v1/trace" ? { body: chain.traces["2"] } : null),
    ]);
    const api = new ApiClient("");
    const doc = await api.getTrace(chain.source, 2, 0, 123456);
    expect(doc.source).toBe(chain.source);
    expect(calls()[0]).toBe(`/v1/trace?source=${chain.source}&levels=2&from=0&to=123456`);
  });

  it("maps error documents to ApiError with the machine-readable code", async () => {
    const err = fixture("error_unknown_source");
    mockFetch([(url) => (url.pathname === "/v1/trace" ? { status: err.status, body: err.body } : null)]);
    const api = new ApiClient("");
    await expect(api.getTrace("0".repeat(64), 2, 0, 1)).rejects.toMatchObject({
      code: "unknown_associate",
      status: 404,
    });
  });

  it("posts infection reports with state", async () => {
    let posted: any = null;
    mockFetch([
      (url, init) => {
        if (url.pathname !== "/v1/infections") return null;
        posted = JSON.parse(String(init?.body));
        return { body: fixture("star_infection") };
      },
    ]);
    const api = new ApiClient("");
    const result = await api.postInfection("a".repeat(64), 999, "recovered");
    expect(posted).toEqual({ associate_hash: "a".repeat(64), report_ms: 999, state: "recovered" });
    expect(result.newly_at_risk.length).toBe(4);
  });

  it("surfaces non-JSON failures as generic http errors", async () => {
    vi.stubGlobal("fetch", vi.fn(async () => new Response("boom", { status: 500 })));
    const api = new ApiClient("");
    await expect(api.getRisk()).rejects.toBeInstanceOf(ApiError);
  });
});
