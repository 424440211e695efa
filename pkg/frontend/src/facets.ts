/** Filtering panel: one combobox per facet, values alongside the count
 * of matching datasets, refreshed after every selection change. A failed
 * refresh keeps the previous values and flags the box stale instead of
 * blanking it. Out-of-order responses are dropped so each box always
 * shows the latest request's data. */

import type { ApiClient } from "./api.js";
import type { FilterBody, ValueCount } from "./types.js";

export const MISSING_VALUE = "(missing)";

export interface FacetBox {
  facet: string;
  values: ValueCount[];
  stale: boolean;
}

export class FacetPanel {
  readonly boxes = new Map<string, FacetBox>();
  private issued = new Map<string, number>();
  private applied = new Map<string, number>();

  constructor(private readonly api: ApiClient) {}

  init(facets: string[]): void {
    this.boxes.clear();
    for (const facet of facets) {
      this.boxes.set(facet, { facet, values: [], stale: false });
      this.issued.set(facet, 0);
      this.applied.set(facet, 0);
    }
  }

  box(facet: string): FacetBox {
    const found = this.boxes.get(facet);
    if (!found) throw new Error(`no facet box ${facet}`);
    return found;
  }

  async refreshBox(facet: string, filter: FilterBody): Promise<void> {
    const box = this.box(facet);
    const requestId = (this.issued.get(facet) ?? 0) + 1;
    this.issued.set(facet, requestId);
    try {
      const response = await this.api.facetValues(facet, filter);
      if (requestId <= (this.applied.get(facet) ?? 0)) {
        return; // a newer response already landed
      }
      this.applied.set(facet, requestId);
      box.values = response.values;
      box.stale = false;
    } catch {
      box.stale = true; // keep old values, show the stale-data badge
    }
  }

  async refresh(filter: FilterBody): Promise<void> {
    await Promise.all([...this.boxes.keys()].map((facet) => this.refreshBox(facet, filter)));
  }

  /** Rows for rendering; the missing pseudo-value is marked muted. */
  rows(facet: string): { value: string; count: number; muted: boolean }[] {
    return this.box(facet).values.map(({ value, count }) => ({
      value,
      count,
      muted: value === MISSING_VALUE,
    }));
  }
}
