/** Read-only helpers over one network payload: hover tooltips, hit
 * lists for the text search box. Every number comes straight from the
 * API document (size) or its edge list (degree); nothing is recomputed
 * from records. */

import type { NetworkDoc } from "./types.js";

export function degreeOf(network: NetworkDoc, nodeId: string): number {
  const neighbors = new Set<string>();
  for (const edge of network.edges) {
    if (edge.source === nodeId) neighbors.add(edge.target);
    if (edge.target === nodeId) neighbors.add(edge.source);
  }
  return neighbors.size;
}

/** Hover text, e.g. "2 connected · 5 unique items". */
export function nodeTooltip(network: NetworkDoc, nodeId: string): string {
  const node = network.nodes.find((n) => n.id === nodeId);
  if (!node) throw new Error(`no node ${nodeId} in this network`);
  return `${degreeOf(network, nodeId)} connected · ${node.size} unique items`;
}

/** Case-insensitive substring search over node labels. */
export function searchNodes(network: NetworkDoc, query: string): string[] {
  const needle = query.trim().toLowerCase();
  if (!needle) return [];
  return network.nodes
    .map((n) => n.id)
    .filter((id) => id.toLowerCase().includes(needle))
    .sort();
}

export function isolatedNodes(network: NetworkDoc): string[] {
  const connected = new Set<string>();
  for (const edge of network.edges) {
    connected.add(edge.source);
    connected.add(edge.target);
  }
  return network.nodes.map((n) => n.id).filter((id) => !connected.has(id));
}
