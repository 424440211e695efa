"""Faceted dataset-catalog search, co-occurrence networks, chained views."""

from .catalog import FacetIndex, FilterSpec, apply_filter, build_index, external_url, facet_values, get_record
from .explorer import (
    ExplorationSession,
    Selection,
    SessionStore,
    close_view,
    create_session,
    spawn_egocentric,
    spawn_listing,
    spawn_temporal,
)
from .ingest import (
    CatalogSnapshot,
    DatasetRecord,
    FacetSchema,
    RawCard,
    build_snapshot,
    fetch_catalog,
    load_catalog,
    load_snapshot,
    normalize_record,
    parse_tag,
    save_snapshot,
)
from .networks import (
    Edge,
    EdgeItem,
    Network,
    Node,
    TopologySpec,
    build_network,
    export_network,
    import_network,
    node_summary,
    thematic_breakdown,
    validate_topology,
)

__version__ = "0.1.0"

__all__ = [
    "CatalogSnapshot",
    "DatasetRecord",
    "Edge",
    "EdgeItem",
    "ExplorationSession",
    "FacetIndex",
    "FacetSchema",
    "FilterSpec",
    "Network",
    "Node",
    "RawCard",
    "Selection",
    "SessionStore",
    "TopologySpec",
    "apply_filter",
    "build_index",
    "build_network",
    "build_snapshot",
    "close_view",
    "create_session",
    "export_network",
    "external_url",
    "facet_values",
    "fetch_catalog",
    "get_record",
    "import_network",
    "load_catalog",
    "load_snapshot",
    "node_summary",
    "normalize_record",
    "parse_tag",
    "save_snapshot",
    "spawn_egocentric",
    "spawn_listing",
    "spawn_temporal",
    "thematic_breakdown",
    "validate_topology",
]
