import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";
import { vi } from "vitest";

const here = dirname(fileURLToPath(import.meta.url));

export function fixture<T = any>(name: string): T {
  return JSON.parse(readFileSync(join(here, "fixtures", `${name}.json`), "utf-8")) as T;
}

export type Route = (url: URL, init?: RequestInit) => { status?: number; body: unknown } | null;

/** Install a fetch mock; routes are tried in order, first non-null wins. */
export function mockFetch(routes: Route[]): () => string[] {
  const calls: string[] = [];
  vi.stubGlobal(
    "fetch",
    vi.fn(async (input: string | URL, init?: RequestInit) => {
      const url = new URL(String(input), "http://console.test");
      calls.push(url.pathname + url.search);
      for (const route of routes) {
        const hit = route(url, init);
        if (hit) {
          return new Response(JSON.stringify(hit.body), {
            status: hit.status ?? 200,
            headers: { "content-type": "application/json" },
          });
        }
      }
      return new Response(JSON.stringify({ error: { code: "not_found", message: url.pathname } }), {
        status: 404,
        headers: { "content-type": "application/json" },
      });
    }),
  );
  return () => calls;
}

export async function flush(times = 6): Promise<void> {
  for (let i = 0; i < times; i++) {
    await new Promise((resolve) => setTimeout(resolve, 0));
  }
}

export function loadConsoleDom(): void {
  const html = readFileSync(join(here, "..", "index.html"), "utf-8");
  const body = html.match(/<body>([\s\S]*)<\/body>/)![1].replace(/<script[\s\S]*?<\/script>/g, "");
  document.body.innerHTML = body;
}
