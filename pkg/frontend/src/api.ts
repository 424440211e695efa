/** Thin typed client for /api/v1; the only place the UI touches the network. */

import type {
  ApiErrorBody,
  FacetsResponse,
  FilterBody,
  HealthResponse,
  NetworkDoc,
  RecordResponse,
  SelectionBody,
  SessionDoc,
  TopologyBody,
  ValuesResponse,
  ViewDoc,
  ViewKind,
} from "./types.js";

export class ApiRequestError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
    readonly details: string[] = [],
  ) {
    super(message);
    this.name = "ApiRequestError";
  }
}

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  constructor(
    readonly baseUrl: string,
    private readonly fetchFn: FetchLike = (url, init) => fetch(url, init),
  ) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const init: RequestInit = { method, headers: { "Content-Type": "application/json" } };
    if (body !== undefined) {
      init.body = JSON.stringify(body);
    }
    const response = await this.fetchFn(`${this.baseUrl}/api/v1${path}`, init);
    if (!response.ok) {
      let parsed: ApiErrorBody | null = null;
      try {
        parsed = (await response.json()) as ApiErrorBody;
      } catch {
        parsed = null;
      }
      const error = parsed?.error;
      throw new ApiRequestError(
        response.status,
        error?.code ?? "http_error",
        error?.message ?? `HTTP ${response.status}`,
        error?.details ?? [],
      );
    }
    return (await response.json()) as T;
  }

  health(): Promise<HealthResponse> {
    return this.request("GET", "/health");
  }

  facets(): Promise<FacetsResponse> {
    return this.request("GET", "/facets");
  }

  facetValues(facet: string, filter: FilterBody): Promise<ValuesResponse> {
    return this.request("POST", `/facets/${encodeURIComponent(facet)}/values`, { filter });
  }

  network(filter: FilterBody, topology: TopologyBody): Promise<NetworkDoc> {
    return this.request("POST", "/network", { filter, topology });
  }

  createSession(filter: FilterBody, topology: TopologyBody): Promise<SessionDoc> {
    return this.request("POST", "/sessions", { filter, topology });
  }

  spawnView(
    sessionId: string,
    parent: string,
    kind: ViewKind,
    selection: SelectionBody,
  ): Promise<ViewDoc> {
    return this.request("POST", `/sessions/${sessionId}/views`, { parent, kind, selection });
  }

  closeView(sessionId: string, viewId: string): Promise<{ removed: number }> {
    return this.request("DELETE", `/sessions/${sessionId}/views/${viewId}`);
  }

  record(id: string): Promise<RecordResponse> {
    return this.request("GET", `/records/${id}`);
  }
}
