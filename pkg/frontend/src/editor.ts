/** Topology editor + filter state. Play stays disabled while the recipe
 * is invalid; API-side validation errors attach to the selector that
 * caused them. Selectors only ever offer facets the server reported. */

import type { FacetInfo, FilterBody, TopologyBody, WithinFacetMode } from "./types.js";

export type SelectorRole = "source" | "target" | "link" | "thematic";

const ROLES: SelectorRole[] = ["source", "target", "link", "thematic"];

export class EditorState {
  facets: FacetInfo[] = [];
  selection: Record<SelectorRole, string | null> = {
    source: null,
    target: null,
    link: null,
    thematic: null,
  };
  clauses = new Map<string, Set<string>>();
  mode: WithinFacetMode = "or";
  inlineErrors: Partial<Record<SelectorRole, string>> = {};

  setFacets(facets: FacetInfo[]): void {
    this.facets = [...facets].sort((a, b) => a.name.localeCompare(b.name));
    for (const role of ROLES) {
      const chosen = this.selection[role];
      if (chosen !== null && !this.knowsFacet(chosen)) {
        this.selection[role] = null;
      }
    }
  }

  facetNames(): string[] {
    return this.facets.map((f) => f.name);
  }

  knowsFacet(name: string): boolean {
    return this.facets.some((f) => f.name === name);
  }

  setSelector(role: SelectorRole, value: string | null): void {
    if (value !== null && !this.knowsFacet(value)) {
      throw new Error(`selector ${role} only offers facets reported by the API, not ${value}`);
    }
    this.selection[role] = value;
    delete this.inlineErrors[role];
  }

  /** Local validation mirroring the server's rules. */
  problems(): Partial<Record<SelectorRole, string>> {
    const out: Partial<Record<SelectorRole, string>> = {};
    const { source, target, link } = this.selection;
    if (source === null) out.source = "pick a source variable";
    if (target === null) out.target = "pick a target variable";
    if (link === null) out.link = "pick a link variable";
    if (link !== null && link === source) out.link = "link must differ from the source variable";
    if (link !== null && link === target && target !== source) {
      out.link = "link must differ from the target variable";
    }
    return out;
  }

  get playEnabled(): boolean {
    return Object.keys(this.problems()).length === 0;
  }

  topologyBody(): TopologyBody {
    const { source, target, link, thematic } = this.selection;
    if (source === null || target === null || link === null) {
      throw new Error("topology is incomplete");
    }
    return { source, target, link, thematic };
  }

  /** Attach server-side validation messages to the selector they blame. */
  applyApiErrors(details: string[]): void {
    for (const detail of details) {
      const text = detail.toLowerCase();
      let role: SelectorRole = "source";
      if (text.includes("thematic")) role = "thematic";
      else if (text.includes("link")) role = "link";
      else if (text.includes("target")) role = "target";
      this.inlineErrors[role] = detail;
    }
  }

  toggleFilterValue(facet: string, value: string): void {
    const values = this.clauses.get(facet) ?? new Set<string>();
    if (values.has(value)) {
      values.delete(value);
    } else {
      values.add(value);
    }
    if (values.size === 0) {
      this.clauses.delete(facet);
    } else {
      this.clauses.set(facet, values);
    }
  }

  clearFilters(): void {
    this.clauses.clear();
  }

  filterBody(): FilterBody {
    const clauses: Record<string, string[]> = {};
    for (const [facet, values] of this.clauses) {
      clauses[facet] = [...values].sort();
    }
    return { clauses, within_facet_mode: this.mode };
  }
}
