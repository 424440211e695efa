"""Co-occurrence network construction from a filtered record set.

A four-variable recipe picks the graph: source and target facets become
nodes, the link facet's values establish edges, and an optional thematic
facet annotates each edge item for color segmentation downstream.

Two construction rules are dispatched on the recipe:

* source != target (bipartite): each record pairs its own source values
  with its own target values, provided it carries at least one link value;
  every link value becomes or extends an edge item.
* source == target (unipartite): a link value "possessed" by two distinct
  node values connects them; an edge item records exactly the records that
  establish possession for either endpoint.

A node's size is its own count of distinct link values over the filtered
records that mention it, which is also what the hover summary reports, so
nodes with many unshared links (isolated or not) keep their weight.
"""

from __future__ import annotations

import json
import xml.etree.ElementTree as ET
from collections import Counter
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable

from .catalog import MISSING_VALUE, FacetIndex, FilterSpec
from .errors import (
    NoThematicVariableError,
    TopologyValidationError,
    UnknownEdgeError,
    UnknownNodeError,
)
from .ingest import FacetSchema

BIPARTITE = "bipartite"
UNIPARTITE = "unipartite"

SIDE_SOURCE = "source"
SIDE_TARGET = "target"
SIDE_BOTH = "both"

#: Clutter ceilings; truncation keeps the highest-size nodes and the
#: item-richest edges, deterministically.
DEFAULT_MAX_NODES = 2_000
DEFAULT_MAX_EDGES = 10_000

NODE_LINK_MAGIC = "facetscope-network"
NODE_LINK_VERSION = 1
GRAPHML_NS = "http://graphml.graphdrawing.org/xmlns"


@dataclass(frozen=True)
class TopologySpec:
    """The graph recipe: source/target/link facets plus optional thematic."""

    source_var: str
    target_var: str
    link_var: str
    thematic_var: str | None = None

    @property
    def kind(self) -> str:
        return UNIPARTITE if self.source_var == self.target_var else BIPARTITE


@dataclass(frozen=True)
class EdgeItem:
    """One link value on an edge: who contributed it and their themes.

    ``themes`` is the multiset (sorted tuple) of thematic-facet values
    over the contributing records; empty when no thematic variable was
    chosen or none of the contributors carry it.
    """

    link_value: str
    records: frozenset[str]
    themes: tuple[str, ...] = ()


@dataclass(frozen=True)
class Node:
    id: str
    side: str
    size: int


@dataclass(frozen=True)
class Edge:
    u: str
    v: str
    items: tuple[EdgeItem, ...]


@dataclass(frozen=True)
class Provenance:
    filter: FilterSpec
    topology: TopologySpec


@dataclass(frozen=True)
class Truncation:
    nodes_dropped: int
    edges_dropped: int


@dataclass(frozen=True)
class Network:
    kind: str
    nodes: tuple[Node, ...]
    edges: tuple[Edge, ...]
    provenance: Provenance
    truncation: Truncation | None = None


def _topology_problems(spec: TopologySpec, known: frozenset[str]) -> list[str]:
    problems = []
    for role, facet in (
        ("source", spec.source_var),
        ("target", spec.target_var),
        ("link", spec.link_var),
    ):
        if facet not in known:
            problems.append(f"{role} variable {facet!r} is not a known facet")
    if spec.link_var == spec.source_var:
        problems.append("link variable must differ from the source variable")
    if spec.link_var == spec.target_var and spec.target_var != spec.source_var:
        problems.append("link variable must differ from the target variable")
    if spec.thematic_var is not None and spec.thematic_var not in known:
        problems.append(f"thematic variable {spec.thematic_var!r} is not a known facet")
    return problems


def validate_topology(spec: TopologySpec, schema: FacetSchema) -> list[str]:
    """All problems with the spec (empty list means valid); the spec's
    ``kind`` property tells bipartite from unipartite."""
    return _topology_problems(spec, schema.known_facets)


def build_network(
    index: FacetIndex,
    active: FilterSpec,
    spec: TopologySpec,
    *,
    max_nodes: int = DEFAULT_MAX_NODES,
    max_edges: int = DEFAULT_MAX_EDGES,
    include_isolated: bool = True,
) -> Network:
    """Construct the network over the records matching ``active``.

    Raises TopologyValidationError (carrying every violation) before
    touching the data. Nodes and edges come out in stable lexicographic
    order; ceilings above DEFAULT_* trade clutter for completeness.
    """
    problems = _topology_problems(spec, index.known_facets)
    if problems:
        raise TopologyValidationError(problems)
    if max_nodes <= 0 or max_edges <= 0:
        raise ValueError("node and edge ceilings must be positive")
    records = [index.record(i) for i in index.apply_filter(active)]

    empty: frozenset[str] = frozenset()
    sides: dict[str, set[str]] = {}
    node_links: dict[str, set[str]] = {}

    def touch(value: str, side: str, links: frozenset[str]) -> None:
        sides.setdefault(value, set()).add(side)
        node_links.setdefault(value, set()).update(links)

    if spec.kind == BIPARTITE:
        for r in records:
            links = r.facets.get(spec.link_var, empty)
            for s in r.facets.get(spec.source_var, empty):
                touch(s, SIDE_SOURCE, links)
            for t in r.facets.get(spec.target_var, empty):
                touch(t, SIDE_TARGET, links)
    else:
        for r in records:
            links = r.facets.get(spec.link_var, empty)
            for x in r.facets.get(spec.source_var, empty):
                touch(x, SIDE_BOTH, links)

    candidates = sorted(sides)
    nodes_dropped = 0
    if len(candidates) > max_nodes:
        ranked = sorted(candidates, key=lambda v: (-len(node_links[v]), v))
        kept = set(ranked[:max_nodes])
        nodes_dropped = len(candidates) - max_nodes
        candidates = [v for v in candidates if v in kept]
    kept_set = set(candidates)

    # value -> link value -> contributing record ids, restricted to kept nodes
    edge_items: dict[tuple[str, str], dict[str, set[str]]] = {}
    if spec.kind == BIPARTITE:
        for r in records:
            sources = r.facets.get(spec.source_var, empty) & kept_set
            targets = r.facets.get(spec.target_var, empty) & kept_set
            links = r.facets.get(spec.link_var, empty)
            if not (sources and targets and links):
                continue
            for s in sources:
                for t in targets:
                    if s == t:
                        continue
                    items = edge_items.setdefault((s, t), {})
                    for link in links:
                        items.setdefault(link, set()).add(r.id)
    else:
        possession: dict[str, dict[str, set[str]]] = {}
        for r in records:
            values = r.facets.get(spec.source_var, empty) & kept_set
            for link in r.facets.get(spec.link_var, empty):
                owners = possession.setdefault(link, {})
                for x in values:
                    owners.setdefault(x, set()).add(r.id)
        for link, owners in possession.items():
            if len(owners) < 2:
                continue
            for u, v in combinations(sorted(owners), 2):
                items = edge_items.setdefault((u, v), {})
                items[link] = owners[u] | owners[v]

    def themes_for(record_ids: Iterable[str]) -> tuple[str, ...]:
        if spec.thematic_var is None:
            return ()
        collected: list[str] = []
        for rid in record_ids:
            collected.extend(index.by_id(rid).facets.get(spec.thematic_var, empty))
        return tuple(sorted(collected))

    edge_keys = sorted(edge_items)
    edges_dropped = 0
    if len(edge_keys) > max_edges:
        ranked_edges = sorted(edge_keys, key=lambda key: (-len(edge_items[key]), key))
        kept_edges = set(ranked_edges[:max_edges])
        edges_dropped = len(edge_keys) - max_edges
        edge_keys = [key for key in edge_keys if key in kept_edges]

    edges = tuple(
        Edge(
            u=u,
            v=v,
            items=tuple(
                EdgeItem(
                    link_value=link,
                    records=frozenset(rids),
                    themes=themes_for(rids),
                )
                for link, rids in sorted(edge_items[(u, v)].items())
            ),
        )
        for u, v in edge_keys
    )

    degree: Counter[str] = Counter()
    for edge in edges:
        degree[edge.u] += 1
        degree[edge.v] += 1
    if not include_isolated:
        candidates = [v for v in candidates if degree[v]]

    def side_of(value: str) -> str:
        tags = sides[value]
        return SIDE_BOTH if len(tags) > 1 or SIDE_BOTH in tags else next(iter(tags))

    nodes = tuple(
        Node(id=value, side=side_of(value), size=len(node_links[value])) for value in candidates
    )
    truncation = None
    if nodes_dropped or edges_dropped:
        truncation = Truncation(nodes_dropped=nodes_dropped, edges_dropped=edges_dropped)
    return Network(
        kind=spec.kind,
        nodes=nodes,
        edges=edges,
        provenance=Provenance(filter=active, topology=spec),
        truncation=truncation,
    )


def find_node(network: Network, node_id: str) -> Node:
    for node in network.nodes:
        if node.id == node_id:
            return node
    raise UnknownNodeError(f"no node {node_id!r} in this network")


def find_edge(network: Network, u: str, v: str) -> Edge:
    """Edge between two node values, endpoint order ignored."""
    for edge in network.edges:
        if (edge.u, edge.v) in ((u, v), (v, u)):
            return edge
    raise UnknownEdgeError(f"no edge between {u!r} and {v!r} in this network")


def incident_edges(network: Network, node_id: str) -> list[Edge]:
    find_node(network, node_id)
    return [e for e in network.edges if node_id in (e.u, e.v)]


@dataclass(frozen=True)
class NodeSummary:
    """Hover-card numbers: connections and unique link items."""

    neighbor_count: int
    distinct_item_count: int
    by_link_value: tuple[tuple[str, int], ...]


def node_summary(network: Network, node_id: str) -> NodeSummary:
    """Connections/unique-items tooltip for one node.

    ``distinct_item_count`` equals the node's size. The per-link-value
    list covers the links shared on incident edges, each with the count
    of distinct contributing records, largest first.
    """
    node = find_node(network, node_id)
    neighbors: set[str] = set()
    contributors: dict[str, set[str]] = {}
    for edge in incident_edges(network, node_id):
        neighbors.add(edge.v if edge.u == node_id else edge.u)
        for item in edge.items:
            contributors.setdefault(item.link_value, set()).update(item.records)
    by_link = tuple(
        sorted(
            ((link, len(rids)) for link, rids in contributors.items()),
            key=lambda kv: (-kv[1], kv[0]),
        )
    )
    return NodeSummary(
        neighbor_count=len(neighbors),
        distinct_item_count=node.size,
        by_link_value=by_link,
    )


def thematic_breakdown(network: Network, edge: Edge, index: FacetIndex) -> list[tuple[str, int]]:
    """Thematic segments for one edge, one unit per (item, record, value).

    Contributing records lacking the thematic facet count under
    "(missing)". Sorted by descending count then value.
    """
    thematic = network.provenance.topology.thematic_var
    if thematic is None:
        raise NoThematicVariableError("network was built without a thematic variable")
    counts: Counter[str] = Counter()
    for item in edge.items:
        for rid in item.records:
            values = index.by_id(rid).facets.get(thematic)
            if values:
                counts.update(values)
            else:
                counts[MISSING_VALUE] += 1
    return sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))


# --- serialization ---------------------------------------------------------

def _item_to_doc(item: EdgeItem) -> dict:
    return {
        "link_value": item.link_value,
        "records": sorted(item.records),
        "themes": dict(Counter(item.themes)),
    }


def _item_from_doc(doc: dict) -> EdgeItem:
    themes: list[str] = []
    for value, count in doc.get("themes", {}).items():
        themes.extend([value] * int(count))
    return EdgeItem(
        link_value=doc["link_value"],
        records=frozenset(doc["records"]),
        themes=tuple(sorted(themes)),
    )


def network_to_dict(network: Network) -> dict:
    """Node-link document with the documented field names."""
    topology = network.provenance.topology
    active = network.provenance.filter
    return {
        "format": NODE_LINK_MAGIC,
        "format_version": NODE_LINK_VERSION,
        "kind": network.kind,
        "nodes": [{"id": n.id, "side": n.side, "size": n.size} for n in network.nodes],
        "edges": [
            {
                "source": e.u,
                "target": e.v,
                "items": [_item_to_doc(item) for item in e.items],
            }
            for e in network.edges
        ],
        "provenance": {
            "filter": {
                "clauses": {f: sorted(v) for f, v in active.clauses.items()},
                "within_facet_mode": active.within_facet_mode,
            },
            "topology": {
                "source": topology.source_var,
                "target": topology.target_var,
                "link": topology.link_var,
                "thematic": topology.thematic_var,
            },
        },
        "truncation": (
            {
                "nodes_dropped": network.truncation.nodes_dropped,
                "edges_dropped": network.truncation.edges_dropped,
            }
            if network.truncation
            else None
        ),
    }


def network_from_dict(doc: dict) -> Network:
    prov = doc["provenance"]
    active = FilterSpec(
        clauses={f: frozenset(v) for f, v in prov["filter"]["clauses"].items()},
        within_facet_mode=prov["filter"]["within_facet_mode"],
    )
    topo_doc = prov["topology"]
    spec = TopologySpec(
        source_var=topo_doc["source"],
        target_var=topo_doc["target"],
        link_var=topo_doc["link"],
        thematic_var=topo_doc.get("thematic"),
    )
    trunc_doc = doc.get("truncation")
    return Network(
        kind=doc["kind"],
        nodes=tuple(Node(id=n["id"], side=n["side"], size=n["size"]) for n in doc["nodes"]),
        edges=tuple(
            Edge(
                u=e["source"],
                v=e["target"],
                items=tuple(_item_from_doc(i) for i in e["items"]),
            )
            for e in doc["edges"]
        ),
        provenance=Provenance(filter=active, topology=spec),
        truncation=(
            Truncation(trunc_doc["nodes_dropped"], trunc_doc["edges_dropped"]) if trunc_doc else None
        ),
    )


def _canonical_json(doc: dict) -> str:
    return json.dumps(doc, sort_keys=True, separators=(",", ":"))


def _network_to_graphml(network: Network) -> str:
    root = ET.Element("graphml", xmlns=GRAPHML_NS)
    for key_id, target, name, attr_type in (
        ("d_kind", "graph", "kind", "string"),
        ("d_provenance", "graph", "provenance", "string"),
        ("d_truncation", "graph", "truncation", "string"),
        ("d_side", "node", "side", "string"),
        ("d_size", "node", "size", "int"),
        ("d_items", "edge", "items", "string"),
    ):
        ET.SubElement(
            root,
            "key",
            {"id": key_id, "for": target, "attr.name": name, "attr.type": attr_type},
        )
    graph = ET.SubElement(root, "graph", id="G", edgedefault="undirected")
    doc = network_to_dict(network)
    ET.SubElement(graph, "data", key="d_kind").text = network.kind
    ET.SubElement(graph, "data", key="d_provenance").text = _canonical_json(doc["provenance"])
    ET.SubElement(graph, "data", key="d_truncation").text = _canonical_json(doc["truncation"] or {})
    for node in network.nodes:
        el = ET.SubElement(graph, "node", id=node.id)
        ET.SubElement(el, "data", key="d_side").text = node.side
        ET.SubElement(el, "data", key="d_size").text = str(node.size)
    for i, edge in enumerate(network.edges):
        el = ET.SubElement(graph, "edge", id=f"e{i}", source=edge.u, target=edge.v)
        ET.SubElement(el, "data", key="d_items").text = _canonical_json(
            {"items": [_item_to_doc(item) for item in edge.items]}
        )
    ET.indent(root)
    return ET.tostring(root, encoding="unicode", xml_declaration=True) + "\n"


def _network_from_graphml(text: str) -> Network:
    ns = {"g": GRAPHML_NS}
    root = ET.fromstring(text)
    graph = root.find("g:graph", ns)
    if graph is None:
        raise ValueError("not a GraphML document with a graph element")

    def data_of(element: ET.Element, key: str) -> str | None:
        for data in element.findall("g:data", ns):
            if data.get("key") == key:
                return data.text or ""
        return None

    kind = data_of(graph, "d_kind") or ""
    prov = json.loads(data_of(graph, "d_provenance") or "{}")
    trunc = json.loads(data_of(graph, "d_truncation") or "{}")
    nodes = []
    for el in graph.findall("g:node", ns):
        nodes.append(
            {
                "id": el.get("id"),
                "side": data_of(el, "d_side"),
                "size": int(data_of(el, "d_size") or 0),
            }
        )
    edges = []
    for el in graph.findall("g:edge", ns):
        items_doc = json.loads(data_of(el, "d_items") or '{"items": []}')
        edges.append(
            {"source": el.get("source"), "target": el.get("target"), "items": items_doc["items"]}
        )
    return network_from_dict(
        {
            "kind": kind,
            "nodes": nodes,
            "edges": edges,
            "provenance": prov,
            "truncation": trunc or None,
        }
    )


NODE_LINK = "node-link"
GRAPHML = "graphml"
_FORMAT_ALIASES = {"json": NODE_LINK, NODE_LINK: NODE_LINK, GRAPHML: GRAPHML}


def export_network(network: Network, fmt: str) -> str:
    """Serialize to "node-link" JSON or "graphml"; output is byte-stable."""
    canonical = _FORMAT_ALIASES.get(fmt)
    if canonical is None:
        raise ValueError(f"unsupported export format {fmt!r} (use node-link or graphml)")
    if canonical == NODE_LINK:
        return json.dumps(network_to_dict(network), sort_keys=True, indent=2) + "\n"
    return _network_to_graphml(network)


def import_network(text: str, fmt: str) -> Network:
    canonical = _FORMAT_ALIASES.get(fmt)
    if canonical is None:
        raise ValueError(f"unsupported import format {fmt!r} (use node-link or graphml)")
    if canonical == NODE_LINK:
        return network_from_dict(json.loads(text))
    return _network_from_graphml(text)
