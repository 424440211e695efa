"""Shared fixtures: the three-record F3 corpus, the 12-record scenario
corpus, random corpus generation, and a local paginating hub server."""

from __future__ import annotations

import json
import random
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from urllib.parse import parse_qs, urlparse

import pytest

from facetscope.catalog import build_index
from facetscope.ingest import (
    DatasetRecord,
    FacetSchema,
    build_snapshot,
    load_catalog,
    normalize_cards,
)

DATA_DIR = Path(__file__).parent / "data"
CATALOG12_PATH = DATA_DIR / "catalog12.json"


def record(rid: str, scalars: dict | None = None, **facets) -> DatasetRecord:
    """Terse DatasetRecord builder for hand-rolled corpora."""
    facet_map = {name: frozenset(values) for name, values in facets.items() if values}
    facet_map["dataset"] = frozenset([rid])
    return DatasetRecord(id=rid, scalars=scalars or {}, facets=facet_map)


def f3_records() -> list[DatasetRecord]:
    # Three-record fixture used throughout; A/B carry card-style timestamps,
    # C deliberately has none.
    return [
        record(
            "A",
            scalars={"created_at": "2022-03-02T23:29:22+00:00"},
            modality={"text", "tabular"},
            task_categories={"qa"},
            model={"m1"},
            license={"mit"},
        ),
        record(
            "B",
            scalars={"created_at": "2024-01-09T11:39:57+00:00"},
            modality={"text"},
            task_categories={"qa", "summarization"},
            model={"m1", "m2"},
            license={"apache-2.0"},
        ),
        record(
            "C",
            modality={"audio"},
            task_categories={"asr"},
            model={"m2"},
            license={"mit"},
        ),
    ]


@pytest.fixture
def f3_index():
    return build_index(build_snapshot(f3_records(), FacetSchema(), built_at="2026-01-01T00:00:00+00:00"))


@pytest.fixture(scope="session")
def catalog12_cards():
    cards = load_catalog(CATALOG12_PATH)
    assert len(cards) == 12
    return cards


@pytest.fixture(scope="session")
def catalog12_index(catalog12_cards):
    records = normalize_cards(catalog12_cards, FacetSchema())
    snapshot = build_snapshot(records, FacetSchema(), source_label="catalog12", built_at="2026-01-01T00:00:00+00:00")
    return build_index(snapshot)


FACET_POOL = {
    "modality": ["text", "audio", "image", "tabular", "video"],
    "task_categories": [f"task-{i}" for i in range(12)],
    "license": ["mit", "apache-2.0", "cc-by-4.0", "cc0-1.0"],
    "language": ["en", "fr", "de", "pt", "zh"],
    "model": [f"model-{i}" for i in range(20)],
    "size_categories": ["1K<n<10K", "10K<n<100K", "100K<n<1M", "1M<n<10M"],
}


def random_corpus(rng: random.Random, size: int) -> list[DatasetRecord]:
    """Records with randomly present, randomly sized facet value sets."""
    out = []
    for i in range(size):
        facets = {}
        for facet, pool in FACET_POOL.items():
            if rng.random() < 0.25:
                continue  # facet absent on this record
            k = rng.randint(1, min(3, len(pool)))
            facets[facet] = set(rng.sample(pool, k))
        scalars = {}
        if rng.random() < 0.8:
            year = rng.randint(2018, 2025)
            month = rng.randint(1, 12)
            scalars["created_at"] = f"{year:04d}-{month:02d}-15T12:00:00+00:00"
        out.append(record(f"org-{i:03d}/set-{i:03d}", scalars=scalars, **facets))
    return out


def random_filter(rng: random.Random, max_clauses: int = 3) -> dict[str, frozenset[str]]:
    clauses = {}
    for facet in rng.sample(sorted(FACET_POOL), rng.randint(0, max_clauses)):
        pool = FACET_POOL[facet]
        clauses[facet] = frozenset(rng.sample(pool, rng.randint(1, min(3, len(pool)))))
    return clauses


class _HubHandler(BaseHTTPRequestHandler):
    cards: list[dict] = []
    fail_first = 0  # 500s served before the first success
    _failures = 0

    def do_GET(self):
        cls = type(self)
        if cls._failures < cls.fail_first:
            cls._failures += 1
            self.send_response(500)
            self.end_headers()
            return
        query = parse_qs(urlparse(self.path).query)
        limit = int(query.get("limit", ["100"])[0])
        offset = int(query.get("offset", ["0"])[0])
        page = self.cards[offset : offset + limit]
        body = json.dumps(page).encode()
        self.send_response(200)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def log_message(self, *args):
        pass


@pytest.fixture
def hub_server():
    """Local hub fixture server paginating the 12-record corpus."""
    handler = type("Handler", (_HubHandler,), {})
    handler.cards = json.loads(CATALOG12_PATH.read_text())
    handler.fail_first = 0
    handler._failures = 0
    server = ThreadingHTTPServer(("127.0.0.1", 0), handler)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    yield f"http://127.0.0.1:{server.server_address[1]}/api/datasets", handler
    server.shutdown()
    thread.join(timeout=5)
