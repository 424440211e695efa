/** Test support: fixture loading and a fetch stub that replays recorded
 * API responses (the UI only ever sees data shaped like the real wire). */

import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

import type { FetchLike } from "../src/api.js";

const HERE = dirname(fileURLToPath(import.meta.url));

export function fixture<T>(name: string): T {
  return JSON.parse(readFileSync(join(HERE, "fixtures", name), "utf-8")) as T;
}

export interface RouteRule {
  method: string;
  path: string | RegExp;
  /** Optionally require the request body to contain this JSON fragment. */
  bodyIncludes?: string;
  response: unknown;
  status?: number;
}

/** Fetch replacement that matches recorded routes in order. */
export function replayFetch(rules: RouteRule[], log?: string[]): FetchLike {
  return async (url: string, init?: RequestInit) => {
    const method = init?.method ?? "GET";
    const body = typeof init?.body === "string" ? init.body : "";
    log?.push(`${method} ${url}`);
    for (const rule of rules) {
      const pathHit =
        typeof rule.path === "string" ? url.endsWith(rule.path) : rule.path.test(url);
      if (rule.method !== method || !pathHit) continue;
      if (rule.bodyIncludes && !body.includes(rule.bodyIncludes)) continue;
      return jsonResponse(rule.response, rule.status ?? (method === "POST" ? 201 : 200));
    }
    throw new Error(`no recorded response for ${method} ${url} body=${body}`);
  };
}

export function jsonResponse(doc: unknown, status = 200): Response {
  return new Response(JSON.stringify(doc), {
    status,
    headers: { "Content-Type": "application/json" },
  });
}

export function failingFetch(): FetchLike {
  return async () => {
    throw new TypeError("network down");
  };
}
