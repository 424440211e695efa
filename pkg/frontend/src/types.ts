/** Wire types for the /api/v1 endpoints (snake_case mirrors the JSON). */

export interface FacetInfo {
  name: string;
  values: number;
  records: number;
}

export interface FacetsResponse {
  facets: FacetInfo[];
}

export interface ValueCount {
  value: string;
  count: number;
}

export interface ValuesResponse {
  facet: string;
  values: ValueCount[];
  matched_records: number;
}

export type WithinFacetMode = "or" | "and";

export interface FilterBody {
  clauses: Record<string, string[]>;
  within_facet_mode?: WithinFacetMode;
}

export interface TopologyBody {
  source: string;
  target: string;
  link: string;
  thematic: string | null;
}

export interface NetworkNode {
  id: string;
  side: "source" | "target" | "both";
  size: number;
}

export interface NetworkEdgeItem {
  link_value: string;
  records: string[];
  themes: Record<string, number>;
}

export interface NetworkEdge {
  source: string;
  target: string;
  items: NetworkEdgeItem[];
}

export interface NetworkDoc {
  format: string;
  format_version: number;
  kind: "bipartite" | "unipartite";
  nodes: NetworkNode[];
  edges: NetworkEdge[];
  provenance: {
    filter: { clauses: Record<string, string[]>; within_facet_mode: WithinFacetMode };
    topology: TopologyBody;
  };
  truncation: { nodes_dropped: number; edges_dropped: number } | null;
}

export interface Segment {
  value: string;
  count: number;
}

export interface EgocentricBar {
  neighbor: string;
  total: number;
  segments: Segment[];
}

export interface ListingRow {
  value: string;
  themes: Segment[];
  url: string | null;
}

export interface TemporalBucket {
  month: string;
  count: number;
}

export interface ViewPayload {
  network?: NetworkDoc;
  center?: string;
  bars?: EgocentricBar[];
  rows?: ListingRow[];
  buckets?: TemporalBucket[];
}

export type ViewKind = "graph" | "egocentric" | "listing" | "temporal";

export type SelectionBody =
  | { node: string }
  | { edge: [string, string] }
  | { pair: [string, string] };

export interface ViewDoc {
  view_id: string;
  kind: ViewKind;
  parent: string | null;
  selection: SelectionBody | null;
  payload: ViewPayload;
  subset_size: number;
}

export interface SessionDoc {
  session_id: string;
  created_at: string;
  root_view_id: string;
  root: ViewDoc;
}

export interface HealthResponse {
  status: string;
  records: number;
  source_label: string;
}

export interface RecordResponse {
  id: string;
  scalars: Record<string, unknown>;
  facets: Record<string, string[]>;
  description: string;
  url: string;
}

export interface ApiErrorBody {
  error: { code: string; message: string; details?: string[] };
}
