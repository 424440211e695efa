/** Headless application controller: everything the DOM layer does goes
 * through here, so the whole exploration flow is testable without a
 * browser. The controller never derives data itself; each window shows
 * exactly one API payload. */

import { ApiClient, ApiRequestError } from "./api.js";
import { EditorState } from "./editor.js";
import { FacetPanel } from "./facets.js";
import { forceLayout, radiusScale, type Point } from "./layout.js";
import { WindowManager } from "./windows.js";
import type {
  EgocentricBar,
  ListingRow,
  NetworkDoc,
  SelectionBody,
  ViewDoc,
  ViewKind,
} from "./types.js";

export type GraphElement =
  | { kind: "node"; id: string }
  | { kind: "edge"; source: string; target: string }
  | { kind: "bar"; center: string; neighbor: string };

export type SpawnKind = Exclude<ViewKind, "graph">;

export class App {
  readonly editor = new EditorState();
  readonly panel: FacetPanel;
  readonly windows = new WindowManager();
  sessionId: string | null = null;
  rootViewId: string | null = null;
  readonly views = new Map<string, ViewDoc>();

  constructor(private readonly api: ApiClient) {
    this.panel = new FacetPanel(api);
  }

  async init(): Promise<void> {
    const { facets } = await this.api.facets();
    this.editor.setFacets(facets);
    this.panel.init(facets.map((f) => f.name));
    await this.panel.refresh(this.editor.filterBody());
  }

  /** Filter selection change: counts refresh immediately. */
  async toggleFilter(facet: string, value: string): Promise<void> {
    this.editor.toggleFilterValue(facet, value);
    await this.panel.refresh(this.editor.filterBody());
  }

  async clearFilters(): Promise<void> {
    this.editor.clearFilters();
    await this.panel.refresh(this.editor.filterBody());
  }

  /** The play button: opens a session and its root graph window.
   * Returns the root view, or null when validation failed (errors are
   * then attached to the editor's selectors). */
  async play(): Promise<ViewDoc | null> {
    if (!this.editor.playEnabled) {
      return null;
    }
    try {
      const session = await this.api.createSession(
        this.editor.filterBody(),
        this.editor.topologyBody(),
      );
      this.sessionId = session.session_id;
      this.rootViewId = session.root_view_id;
      this.views.clear();
      this.views.set(session.root.view_id, session.root);
      this.windows.open(session.root.view_id, null, "graph", this.graphTitle());
      return session.root;
    } catch (error) {
      if (error instanceof ApiRequestError && error.code === "invalid_topology") {
        this.editor.applyApiErrors(error.details.length ? error.details : [error.message]);
        return null;
      }
      throw error;
    }
  }

  private graphTitle(): string {
    const { source, target, link } = this.editor.selection;
    return `${source} – ${target} by ${link}`;
  }

  view(viewId: string): ViewDoc {
    const view = this.views.get(viewId);
    if (!view) throw new Error(`no open view ${viewId}`);
    return view;
  }

  network(viewId: string): NetworkDoc {
    const doc = this.view(viewId).payload.network;
    if (!doc) throw new Error(`view ${viewId} is not a graph view`);
    return doc;
  }

  /** Geometry for a graph window: positions plus size-monotone radii. */
  graphGeometry(viewId: string): { positions: Map<string, Point>; radius: (size: number) => number } {
    const doc = this.network(viewId);
    const positions = forceLayout(
      doc.nodes.map((n) => n.id),
      doc.edges.map((e) => [e.source, e.target]),
    );
    return { positions, radius: radiusScale(doc.nodes.map((n) => n.size)) };
  }

  private selectionFor(element: GraphElement, action: SpawnKind): SelectionBody {
    if (element.kind === "node") {
      return { node: element.id };
    }
    if (element.kind === "edge") {
      return { edge: [element.source, element.target] };
    }
    if (action === "egocentric") {
      throw new Error("egocentric views spawn from nodes");
    }
    return { pair: [element.center, element.neighbor] };
  }

  /** A context-menu choice: spawns the view and opens its window linked
   * to the parent window. */
  async openView(parentViewId: string, action: SpawnKind, element: GraphElement): Promise<ViewDoc> {
    if (this.sessionId === null) {
      throw new Error("no active session; press play first");
    }
    if (action === "egocentric" && element.kind !== "node") {
      throw new Error("egocentric views spawn from nodes");
    }
    const view = await this.api.spawnView(
      this.sessionId,
      parentViewId,
      action,
      this.selectionFor(element, action),
    );
    this.views.set(view.view_id, view);
    this.windows.open(view.view_id, parentViewId, view.kind, this.titleFor(view, element));
    return view;
  }

  private titleFor(view: ViewDoc, element: GraphElement): string {
    if (element.kind === "node") return `${view.kind}: ${element.id}`;
    if (element.kind === "edge") return `${view.kind}: ${element.source} – ${element.target}`;
    return `${view.kind}: ${element.center} – ${element.neighbor}`;
  }

  async closeWindow(viewId: string): Promise<string[]> {
    if (this.sessionId === null) {
      throw new Error("no active session");
    }
    await this.api.closeView(this.sessionId, viewId);
    const removed = this.windows.closeSubtree(viewId);
    for (const id of removed) {
      this.views.delete(id);
    }
    return removed;
  }

  bars(viewId: string): EgocentricBar[] {
    return this.view(viewId).payload.bars ?? [];
  }

  rows(viewId: string): ListingRow[] {
    return this.view(viewId).payload.rows ?? [];
  }

  /** The external-link affordance on a listing row. */
  externalLink(viewId: string, rowValue: string): string | null {
    const row = this.rows(viewId).find((r) => r.value === rowValue);
    return row?.url ?? null;
  }
}
