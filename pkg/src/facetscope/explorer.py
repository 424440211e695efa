"""Exploration sessions: provenance trees of chained views.

A session starts from one built network (the root graph view); every
other view is spawned from a selection in an existing view and owns a
record subset contained in its parent's, so drilling down only ever
narrows the data.
"""

from __future__ import annotations

import secrets
import threading
from collections import Counter, OrderedDict
from dataclasses import dataclass, field
from datetime import datetime, timezone

from .catalog import DEFAULT_URL_TEMPLATES, MISSING_VALUE, FacetIndex, FilterSpec
from .errors import (
    CannotCloseRootError,
    InvalidSelectionError,
    UnknownNodeError,
    UnknownSessionError,
    UnknownViewError,
)
from .ingest import parse_rfc3339
from .networks import (
    DEFAULT_MAX_EDGES,
    DEFAULT_MAX_NODES,
    Edge,
    Network,
    Node,
    TopologySpec,
    build_network,
    find_edge,
    find_node,
    incident_edges,
    thematic_breakdown,
)

GRAPH = "graph"
EGOCENTRIC = "egocentric"
LISTING = "listing"
TEMPORAL = "temporal"

UNKNOWN_BUCKET = "(unknown)"


@dataclass(frozen=True)
class Selection:
    """What was clicked in the parent view: a node, an edge, or an
    egocentric pair (center, neighbor)."""

    kind: str  # node | edge | pair
    a: str
    b: str | None = None

    def __post_init__(self):
        if self.kind not in ("node", "edge", "pair"):
            raise InvalidSelectionError(f"unknown selection kind {self.kind!r}")
        if self.kind in ("edge", "pair") and self.b is None:
            raise InvalidSelectionError(f"{self.kind} selection needs two endpoints")

    @classmethod
    def from_obj(cls, obj: dict) -> "Selection":
        if not isinstance(obj, dict) or len(obj) != 1:
            raise InvalidSelectionError("selection must be {'node': id} or {'edge'|'pair': [a, b]}")
        kind, value = next(iter(obj.items()))
        if kind == "node":
            if not isinstance(value, str):
                raise InvalidSelectionError("node selection must name one node id")
            return cls(kind="node", a=value)
        if kind in ("edge", "pair"):
            if not (isinstance(value, (list, tuple)) and len(value) == 2):
                raise InvalidSelectionError(f"{kind} selection must be a pair of ids")
            return cls(kind=kind, a=str(value[0]), b=str(value[1]))
        raise InvalidSelectionError(f"unknown selection kind {kind!r}")


@dataclass(frozen=True)
class Bar:
    """One egocentric neighbor: shared-link total plus thematic segments."""

    neighbor: str
    total: int
    segments: tuple[tuple[str, int], ...] = ()


@dataclass(frozen=True)
class EgocentricView:
    center: str
    bars: tuple[Bar, ...]


@dataclass(frozen=True)
class ListingRow:
    value: str
    themes: tuple[tuple[str, int], ...]
    url: str | None


@dataclass(frozen=True)
class ListingView:
    rows: tuple[ListingRow, ...]


@dataclass(frozen=True)
class TemporalView:
    buckets: tuple[tuple[str, int], ...]


@dataclass
class ViewNode:
    id: str
    kind: str
    parent_id: str | None
    selection: Selection | None
    payload: object
    subset: frozenset[str]
    children: list[str] = field(default_factory=list)


class ExplorationSession:
    """One user's chained-view tree over a fixed network and index."""

    def __init__(
        self,
        index: FacetIndex,
        network: Network,
        subset: frozenset[str],
        url_templates: dict[str, str] | None = None,
    ):
        self.id = secrets.token_hex(8)
        self.created_at = datetime.now(timezone.utc).isoformat(timespec="seconds")
        self.index = index
        self.url_templates = dict(DEFAULT_URL_TEMPLATES if url_templates is None else url_templates)
        self.lock = threading.RLock()
        self._counter = 0
        root = ViewNode(
            id=self._next_id(),
            kind=GRAPH,
            parent_id=None,
            selection=None,
            payload=network,
            subset=subset,
        )
        self.root_id = root.id
        self.views: dict[str, ViewNode] = {root.id: root}

    def _next_id(self) -> str:
        self._counter += 1
        return f"v{self._counter}"

    def view(self, view_id: str) -> ViewNode:
        try:
            return self.views[view_id]
        except KeyError:
            raise UnknownViewError(f"no view {view_id!r} in session {self.id}") from None

    @property
    def root(self) -> ViewNode:
        return self.views[self.root_id]

    def _attach(self, view: ViewNode) -> ViewNode:
        self.views[view.id] = view
        self.views[view.parent_id].children.append(view.id)
        return view


def create_session(
    index: FacetIndex,
    active: FilterSpec,
    spec: TopologySpec,
    *,
    max_nodes: int = DEFAULT_MAX_NODES,
    max_edges: int = DEFAULT_MAX_EDGES,
    url_templates: dict[str, str] | None = None,
) -> ExplorationSession:
    """Build the network and open a session whose root graph view holds it.

    An invalid topology raises before any session exists.
    """
    network = build_network(index, active, spec, max_nodes=max_nodes, max_edges=max_edges)
    subset = frozenset(index.record(i).id for i in index.apply_filter(active))
    return ExplorationSession(index, network, subset, url_templates)


def _graph_view(session: ExplorationSession, view: ViewNode) -> Network:
    if view.kind != GRAPH:
        raise InvalidSelectionError(f"view {view.id!r} is a {view.kind} view, not a graph view")
    return view.payload


def _node_link_contributors(
    session: ExplorationSession, network: Network, node: Node
) -> dict[str, set[str]]:
    """link value -> record ids establishing it for this node, over the
    root subset (the node's own links, not just the shared ones)."""
    topology = network.provenance.topology
    roles = {
        "source": (topology.source_var,),
        "target": (topology.target_var,),
        "both": (topology.source_var, topology.target_var),
    }[node.side]
    out: dict[str, set[str]] = {}
    for rid in session.root.subset:
        record = session.index.by_id(rid)
        if not any(node.id in record.facets.get(facet, ()) for facet in roles):
            continue
        for link in record.facets.get(topology.link_var, ()):
            out.setdefault(link, set()).add(rid)
    return out


def _edge_rows(session: ExplorationSession, network: Network, edge: Edge) -> list[ListingRow]:
    thematic = network.provenance.topology.thematic_var
    link_facet = network.provenance.topology.link_var
    template = session.url_templates.get(link_facet)
    rows = []
    for item in sorted(edge.items, key=lambda i: i.link_value):
        themes: tuple[tuple[str, int], ...] = ()
        if thematic is not None:
            single = Edge(u=edge.u, v=edge.v, items=(item,))
            themes = tuple(thematic_breakdown(network, single, session.index))
        rows.append(
            ListingRow(
                value=item.link_value,
                themes=themes,
                url=template.replace("{id}", item.link_value) if template else None,
            )
        )
    return rows


def _node_rows(session: ExplorationSession, network: Network, node: Node) -> tuple[list[ListingRow], set[str]]:
    thematic = network.provenance.topology.thematic_var
    link_facet = network.provenance.topology.link_var
    template = session.url_templates.get(link_facet)
    contributors = _node_link_contributors(session, network, node)
    rows = []
    covered: set[str] = set()
    for link in sorted(contributors):
        rids = contributors[link]
        covered |= rids
        themes: tuple[tuple[str, int], ...] = ()
        if thematic is not None:
            counts: Counter[str] = Counter()
            for rid in rids:
                values = session.index.by_id(rid).facets.get(thematic)
                if values:
                    counts.update(values)
                else:
                    counts[MISSING_VALUE] += 1
            themes = tuple(sorted(counts.items(), key=lambda kv: (-kv[1], kv[0])))
        rows.append(
            ListingRow(
                value=link,
                themes=themes,
                url=template.replace("{id}", link) if template else None,
            )
        )
    return rows, covered


def _resolve_selection(
    session: ExplorationSession, parent: ViewNode, selection: Selection
) -> tuple[Network, Node | None, Edge | None]:
    """Map a selection in the parent view onto the underlying graph."""
    if parent.kind == GRAPH:
        network = parent.payload
        if selection.kind == "node":
            return network, find_node(network, selection.a), None
        if selection.kind in ("edge", "pair"):
            return network, None, find_edge(network, selection.a, selection.b)
        raise InvalidSelectionError(f"cannot resolve a {selection.kind} selection in a graph view")
    if parent.kind == EGOCENTRIC:
        if selection.kind != "pair":
            raise InvalidSelectionError("egocentric views only support pair selections")
        center = parent.payload.center
        if center == selection.a:
            neighbor = selection.b
        elif center == selection.b:
            neighbor = selection.a
        else:
            raise InvalidSelectionError(
                f"pair must include the egocentric center {center!r}"
            )
        graph_parent = session.view(parent.parent_id)
        network = _graph_view(session, graph_parent)
        return network, None, find_edge(network, center, neighbor)
    raise InvalidSelectionError(f"cannot spawn from a {parent.kind} view")


def spawn_egocentric(session: ExplorationSession, parent_id: str, center: str) -> ViewNode:
    """Pairwise view centered on one node: one bar per neighbor, bar length
    = shared link count, segments per the thematic variable."""
    with session.lock:
        parent = session.view(parent_id)
        network = _graph_view(session, parent)
        find_node(network, center)  # raises UnknownNodeError
        thematic = network.provenance.topology.thematic_var
        bars = []
        subset: set[str] = set()
        for edge in incident_edges(network, center):
            neighbor = edge.v if edge.u == center else edge.u
            segments: tuple[tuple[str, int], ...] = ()
            if thematic is not None:
                segments = tuple(thematic_breakdown(network, edge, session.index))
            for item in edge.items:
                subset |= item.records
            bars.append(Bar(neighbor=neighbor, total=len(edge.items), segments=segments))
        bars.sort(key=lambda b: (-b.total, b.neighbor))
        view = ViewNode(
            id=session._next_id(),
            kind=EGOCENTRIC,
            parent_id=parent.id,
            selection=Selection(kind="node", a=center),
            payload=EgocentricView(center=center, bars=tuple(bars)),
            subset=frozenset(subset),
        )
        return session._attach(view)


def spawn_listing(session: ExplorationSession, parent_id: str, selection: Selection) -> ViewNode:
    """Rows for the selected edge's link values, or a node's own link
    values, each with thematic counts and an external URL."""
    with session.lock:
        parent = session.view(parent_id)
        network, node, edge = _resolve_selection(session, parent, selection)
        if node is not None:
            rows, subset = _node_rows(session, network, node)
        else:
            rows = _edge_rows(session, network, edge)
            subset = set()
            for item in edge.items:
                subset |= item.records
        view = ViewNode(
            id=session._next_id(),
            kind=LISTING,
            parent_id=parent.id,
            selection=selection,
            payload=ListingView(rows=tuple(rows)),
            subset=frozenset(subset),
        )
        return session._attach(view)


def spawn_temporal(session: ExplorationSession, parent_id: str, selection: Selection) -> ViewNode:
    """Per-calendar-month histogram of the contributing records'
    creation timestamps; records without one land in "(unknown)"."""
    with session.lock:
        parent = session.view(parent_id)
        network, node, edge = _resolve_selection(session, parent, selection)
        if node is not None:
            contributors = _node_link_contributors(session, network, node)
            subset: set[str] = set()
            for rids in contributors.values():
                subset |= rids
        else:
            subset = set()
            for item in edge.items:
                subset |= item.records
        months: dict[str, int] = {}
        unknown = 0
        for rid in subset:
            stamp = session.index.by_id(rid).scalars.get("created_at")
            try:
                month = parse_rfc3339(stamp).strftime("%Y-%m") if stamp else None
            except ValueError:
                month = None
            if month is None:
                unknown += 1
            else:
                months[month] = months.get(month, 0) + 1
        buckets = sorted(months.items())
        if unknown:
            buckets.append((UNKNOWN_BUCKET, unknown))
        view = ViewNode(
            id=session._next_id(),
            kind=TEMPORAL,
            parent_id=parent.id,
            selection=selection,
            payload=TemporalView(buckets=tuple(buckets)),
            subset=frozenset(subset),
        )
        return session._attach(view)


def close_view(session: ExplorationSession, view_id: str) -> int:
    """Remove a view and all its descendants; the root cannot be closed.

    Returns how many views were removed.
    """
    with session.lock:
        view = session.view(view_id)
        if view.id == session.root_id:
            raise CannotCloseRootError("the root graph view cannot be closed")
        doomed = []
        stack = [view.id]
        while stack:
            current = stack.pop()
            doomed.append(current)
            stack.extend(session.views[current].children)
        session.views[view.parent_id].children.remove(view.id)
        for vid in doomed:
            del session.views[vid]
        return len(doomed)


class SessionStore:
    """Bounded LRU map of live sessions; oldest-touched evicted first."""

    def __init__(self, cap: int = 64):
        if cap <= 0:
            raise ValueError("session cap must be positive")
        self.cap = cap
        self._sessions: OrderedDict[str, ExplorationSession] = OrderedDict()
        self._lock = threading.Lock()

    def add(self, session: ExplorationSession) -> ExplorationSession:
        with self._lock:
            while len(self._sessions) >= self.cap:
                self._sessions.popitem(last=False)
            self._sessions[session.id] = session
        return session

    def get(self, session_id: str) -> ExplorationSession:
        with self._lock:
            try:
                session = self._sessions[session_id]
            except KeyError:
                raise UnknownSessionError(f"no session {session_id!r}") from None
            self._sessions.move_to_end(session_id)
            return session

    def __len__(self) -> int:
        return len(self._sessions)

    def __contains__(self, session_id: str) -> bool:
        return session_id in self._sessions
