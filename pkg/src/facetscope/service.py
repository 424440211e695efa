"""HTTP API over one immutable index plus a bounded session store.

All state except sessions is read-only, so responses are a pure function
of (snapshot, request); errors come back as {"error": {code, message}}
with no stack traces. Filters travel in request bodies because facet
values legally contain ":" and "<".
"""

from __future__ import annotations

import logging
from typing import Any

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from . import explorer
from .catalog import FacetIndex, FilterSpec, build_index, external_url
from .config import ServiceConfig
from .errors import (
    FacetscopeError,
    InvalidSelectionError,
    RecordNotFoundError,
    TopologyValidationError,
    UnknownEdgeError,
    UnknownNodeError,
    UnknownSessionError,
    UnknownViewError,
)
from .explorer import (
    EgocentricView,
    ExplorationSession,
    ListingView,
    Selection,
    SessionStore,
    TemporalView,
    ViewNode,
)
from .ingest import load_snapshot
from .networks import Network, TopologySpec, build_network, network_to_dict

logger = logging.getLogger(__name__)

API_PREFIX = "/api/v1"

_NOT_FOUND = (
    RecordNotFoundError,
    UnknownSessionError,
    UnknownViewError,
    UnknownNodeError,
    UnknownEdgeError,
)


class FilterBody(BaseModel):
    clauses: dict[str, list[str]] = Field(default_factory=dict)
    within_facet_mode: str | None = None


class TopologyBody(BaseModel):
    source: str
    target: str
    link: str
    thematic: str | None = None


class NetworkRequest(BaseModel):
    filter: FilterBody = Field(default_factory=FilterBody)
    topology: TopologyBody


class ValuesRequest(BaseModel):
    filter: FilterBody = Field(default_factory=FilterBody)


class ViewRequest(BaseModel):
    parent: str
    kind: str
    selection: dict[str, Any]


def _selection_to_obj(selection: Selection | None) -> dict | None:
    if selection is None:
        return None
    if selection.kind == "node":
        return {"node": selection.a}
    return {selection.kind: [selection.a, selection.b]}


def _payload_to_obj(payload: object) -> dict:
    if isinstance(payload, Network):
        return {"network": network_to_dict(payload)}
    if isinstance(payload, EgocentricView):
        return {
            "center": payload.center,
            "bars": [
                {
                    "neighbor": bar.neighbor,
                    "total": bar.total,
                    "segments": [{"value": v, "count": c} for v, c in bar.segments],
                }
                for bar in payload.bars
            ],
        }
    if isinstance(payload, ListingView):
        return {
            "rows": [
                {
                    "value": row.value,
                    "themes": [{"value": v, "count": c} for v, c in row.themes],
                    "url": row.url,
                }
                for row in payload.rows
            ]
        }
    if isinstance(payload, TemporalView):
        return {"buckets": [{"month": m, "count": c} for m, c in payload.buckets]}
    raise TypeError(f"unserializable payload {type(payload).__name__}")


def view_to_dict(view: ViewNode) -> dict:
    return {
        "view_id": view.id,
        "kind": view.kind,
        "parent": view.parent_id,
        "selection": _selection_to_obj(view.selection),
        "payload": _payload_to_obj(view.payload),
        "subset_size": len(view.subset),
    }


def create_app(config: ServiceConfig, index: FacetIndex | None = None) -> FastAPI:
    """Wire the endpoints over a loaded snapshot.

    Pass a prebuilt ``index`` to skip the snapshot file (tests do).
    """
    config.validate()
    if index is None:
        if not config.snapshot_path:
            raise FacetscopeError("no snapshot configured")
        index = build_index(load_snapshot(config.snapshot_path))
    store = SessionStore(cap=config.session_cap)
    app = FastAPI(title="facetscope", version="0.1.0", docs_url=None, redoc_url=None)
    # the browser UI is hosted statically, usually on another port
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )

    def _filter_spec(body: FilterBody) -> FilterSpec:
        mode = body.within_facet_mode or config.within_facet_mode
        try:
            return FilterSpec.of(body.clauses, mode=mode)
        except ValueError as exc:
            raise InvalidSelectionError(str(exc)) from exc

    def _topology(body: TopologyBody) -> TopologySpec:
        return TopologySpec(
            source_var=body.source,
            target_var=body.target,
            link_var=body.link,
            thematic_var=body.thematic,
        )

    def _error_response(status: int, code: str, message: str, details: list[str] | None = None):
        body: dict[str, Any] = {"error": {"code": code, "message": message}}
        if details:
            body["error"]["details"] = details
        return JSONResponse(status_code=status, content=body)

    @app.exception_handler(FacetscopeError)
    async def _facetscope_error(request: Request, exc: FacetscopeError):
        status = 404 if isinstance(exc, _NOT_FOUND) else 400
        details = exc.problems if isinstance(exc, TopologyValidationError) else None
        return _error_response(status, exc.code, str(exc), details)

    @app.exception_handler(RequestValidationError)
    async def _validation_error(request: Request, exc: RequestValidationError):
        return _error_response(400, "invalid_request", str(exc))

    @app.get(API_PREFIX + "/health")
    def health():
        return {
            "status": "ok",
            "records": len(index),
            "source_label": index.snapshot.source_label,
        }

    @app.get(API_PREFIX + "/facets")
    def facets():
        listed = []
        for name in sorted(index.known_facets):
            listed.append(
                {
                    "name": name,
                    "values": len(index.postings.get(name, {})),
                    "records": len(index) - len(index.missing[name]),
                }
            )
        return {"facets": listed}

    @app.post(API_PREFIX + "/facets/{facet}/values")
    def facet_values(facet: str, body: ValuesRequest):
        active = _filter_spec(body.filter)
        values = index.facet_values(facet, active)
        return {
            "facet": facet,
            "values": [{"value": v, "count": c} for v, c in values],
            "matched_records": len(index.apply_filter(active)),
        }

    @app.post(API_PREFIX + "/network")
    def network(body: NetworkRequest):
        built = build_network(
            index,
            _filter_spec(body.filter),
            _topology(body.topology),
            max_nodes=config.max_nodes,
            max_edges=config.max_edges,
        )
        return network_to_dict(built)

    @app.post(API_PREFIX + "/sessions", status_code=201)
    def create_session(body: NetworkRequest):
        session = explorer.create_session(
            index,
            _filter_spec(body.filter),
            _topology(body.topology),
            max_nodes=config.max_nodes,
            max_edges=config.max_edges,
            url_templates=config.url_templates,
        )
        store.add(session)
        return {
            "session_id": session.id,
            "created_at": session.created_at,
            "root_view_id": session.root_id,
            "root": view_to_dict(session.root),
        }

    @app.post(API_PREFIX + "/sessions/{session_id}/views", status_code=201)
    def spawn_view(session_id: str, body: ViewRequest):
        session = store.get(session_id)
        selection = Selection.from_obj(body.selection)
        with session.lock:
            if body.kind == explorer.EGOCENTRIC:
                if selection.kind != "node":
                    raise InvalidSelectionError("egocentric views are centered on a node")
                view = explorer.spawn_egocentric(session, body.parent, selection.a)
            elif body.kind == explorer.LISTING:
                view = explorer.spawn_listing(session, body.parent, selection)
            elif body.kind == explorer.TEMPORAL:
                view = explorer.spawn_temporal(session, body.parent, selection)
            else:
                raise InvalidSelectionError(f"unknown view kind {body.kind!r}")
        return view_to_dict(view)

    @app.delete(API_PREFIX + "/sessions/{session_id}/views/{view_id}")
    def close_view(session_id: str, view_id: str):
        session = store.get(session_id)
        removed = explorer.close_view(session, view_id)
        return {"removed": removed}

    @app.get(API_PREFIX + "/records/{record_id:path}")
    def record(record_id: str):
        rec = index.by_id(record_id)
        return {
            "id": rec.id,
            "scalars": dict(rec.scalars),
            "facets": {f: sorted(v) for f, v in rec.facets.items()},
            "description": rec.description,
            "url": external_url(rec, config.dataset_url_template),
        }

    return app


def serve(config: ServiceConfig) -> None:
    """Load the snapshot, then block serving HTTP until interrupted."""
    import uvicorn

    app = create_app(config)
    logger.info("serving on %s:%d", config.host, config.port)
    uvicorn.run(app, host=config.host, port=config.port, log_level="warning")
