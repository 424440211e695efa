"""Catalog ingestion: raw dataset cards to normalized records and snapshots.

Cards arrive either from JSON files (newline-delimited or array form) or
from a catalog hub API. Tag strings like ``"license:mit"`` are parsed into
a facet map; the result is frozen into a versioned single-file snapshot
that every other module consumes, so the rest of the system runs fully
offline.
"""

from __future__ import annotations

import json
import logging
import os
import time
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterable, Mapping

from .errors import CatalogError, FetchError, SnapshotError, SnapshotVersionError, TagParseError

logger = logging.getLogger(__name__)

SNAPSHOT_MAGIC = "facetscope-snapshot"
SNAPSHOT_VERSION = 1

#: Facet the record id is mirrored into, so "dataset" can serve as a
#: source/target/link variable like any other facet.
DATASET_FACET = "dataset"

#: Facet separator-less tags fall back to.
FALLBACK_FACET = "tag"

#: Scalar card fields copied onto records (absent stays absent, never zero).
SCALAR_FIELDS = ("author", "created_at", "last_modified", "downloads", "likes", "paperswithcode_id")

#: Tag prefixes every schema must know, plus the reserved "dataset" facet.
BASE_FACETS = frozenset(
    {
        DATASET_FACET,
        "annotations_creators",
        "format",
        "language",
        "language_creators",
        "library",
        "license",
        "model",
        "modality",
        "multilinguality",
        "size_categories",
        "source_datasets",
        "task_categories",
    }
)

HUB_TOKEN_ENV = "FACETSCOPE_HUB_TOKEN"


def parse_rfc3339(value: str) -> datetime:
    """Parse an RFC3339 instant; raises ValueError for naive or bad values."""
    text = value.strip()
    if text.endswith(("Z", "z")):
        text = text[:-1] + "+00:00"
    parsed = datetime.fromisoformat(text)
    if parsed.tzinfo is None:
        raise ValueError(f"timestamp {value!r} has no UTC offset")
    return parsed


@dataclass(frozen=True)
class RawCard:
    """One catalog entry exactly as the source provided it."""

    id: str
    tags: tuple[str, ...] = ()
    author: str | None = None
    created_at: str | None = None
    last_modified: str | None = None
    downloads: int | None = None
    likes: int | None = None
    paperswithcode_id: str | None = None
    description: str = ""


@dataclass(frozen=True)
class FacetSchema:
    """Known facet names plus the policy for tags outside them.

    ``known_facets`` always includes the reserved "dataset" facet, the
    standard card prefixes and the fallback facet; the constructor unions
    them in so callers cannot build a schema that forgets them.
    """

    known_facets: frozenset[str] = frozenset()
    open_schema: bool = True
    fallback_facet: str = FALLBACK_FACET

    def __post_init__(self):
        merged = frozenset(self.known_facets) | BASE_FACETS | {self.fallback_facet}
        object.__setattr__(self, "known_facets", merged)

    def extend(self, facets: Iterable[str]) -> "FacetSchema":
        return FacetSchema(
            known_facets=self.known_facets | frozenset(facets),
            open_schema=self.open_schema,
            fallback_facet=self.fallback_facet,
        )


@dataclass(frozen=True)
class DatasetRecord:
    """Normalized catalog entry: scalar metadata plus a multi-valued facet map.

    Facet value sets are deduplicated and never empty; an absent facet means
    the key is absent. The record id is mirrored as the single value of the
    reserved "dataset" facet.
    """

    id: str
    scalars: Mapping[str, object] = field(default_factory=dict)
    facets: Mapping[str, frozenset[str]] = field(default_factory=dict)
    description: str = ""


@dataclass(frozen=True)
class CatalogSnapshot:
    """Immutable catalog: records sorted by id, with the schema that built them."""

    records: tuple[DatasetRecord, ...]
    schema: FacetSchema
    source_label: str = ""
    built_at: str = ""


@dataclass(frozen=True)
class CardIssue:
    """One skipped card or tag, with where it came from."""

    where: str
    reason: str


def parse_tag(tag: str, schema: FacetSchema) -> tuple[str, str]:
    """Split a tag into (facet name, value) on the FIRST ":" only.

    The value side is kept verbatim, so values containing ":" or "<"
    (size buckets, model ids) survive intact. Separator-less tags map to
    the schema's fallback facet with the whole tag as the value.
    """
    if not tag:
        raise TagParseError("empty tag")
    name, sep, value = tag.partition(":")
    if not sep:
        return schema.fallback_facet, tag
    if not name:
        raise TagParseError(f"tag {tag!r} has an empty facet name")
    if not schema.open_schema and name not in schema.known_facets:
        raise TagParseError(f"tag {tag!r} uses unknown facet {name!r} and the schema is closed")
    return name, value


def normalize_record(
    card: RawCard,
    schema: FacetSchema,
    skipped: list[CardIssue] | None = None,
) -> DatasetRecord:
    """Parse every tag on a card into the facet map, with set semantics.

    Tags that fail to parse are skipped, not fatal; they are appended to
    ``skipped`` when a list is given (so skipped + parsed = total tags).
    The reserved "dataset" facet is forced to {card.id} regardless of tags.
    """
    if not card.id:
        raise ValueError("card id must be non-empty")
    facets: dict[str, set[str]] = {}
    for tag in card.tags:
        try:
            name, value = parse_tag(tag, schema)
        except TagParseError as exc:
            if skipped is not None:
                skipped.append(CardIssue(where=f"card {card.id!r} tag {tag!r}", reason=str(exc)))
            continue
        facets.setdefault(name, set()).add(value)
    facets[DATASET_FACET] = {card.id}
    scalars: dict[str, object] = {}
    for name in SCALAR_FIELDS:
        value = getattr(card, name)
        if value is not None:
            scalars[name] = value
    return DatasetRecord(
        id=card.id,
        scalars=scalars,
        facets={name: frozenset(values) for name, values in facets.items()},
        description=card.description or "",
    )


def normalize_cards(
    cards: Iterable[RawCard],
    schema: FacetSchema,
    skipped: list[CardIssue] | None = None,
) -> list[DatasetRecord]:
    return [normalize_record(card, schema, skipped) for card in cards]


def _card_from_obj(obj: object, where: str) -> RawCard:
    if not isinstance(obj, dict):
        raise CatalogError(f"{where}: card is not a JSON object")
    card_id = obj.get("id")
    if not isinstance(card_id, str) or not card_id:
        raise CatalogError(f"{where}: missing or empty id")
    tags_raw = obj.get("tags", [])
    if not isinstance(tags_raw, list) or any(not isinstance(t, str) for t in tags_raw):
        raise CatalogError(f"{where}: tags must be a list of strings")
    for stamp_field in ("created_at", "last_modified"):
        stamp = obj.get(stamp_field)
        if stamp is not None:
            if not isinstance(stamp, str):
                raise CatalogError(f"{where}: {stamp_field} must be a string")
            try:
                parse_rfc3339(stamp)
            except ValueError as exc:
                raise CatalogError(f"{where}: bad {stamp_field}: {exc}") from exc
    counts: dict[str, int | None] = {}
    for count_field in ("downloads", "likes"):
        value = obj.get(count_field)
        if value is None:
            counts[count_field] = None
            continue
        if isinstance(value, bool) or not isinstance(value, int) or value < 0:
            raise CatalogError(f"{where}: {count_field} must be a non-negative integer")
        counts[count_field] = value
    for text_field in ("author", "paperswithcode_id", "description"):
        value = obj.get(text_field)
        if value is not None and not isinstance(value, str):
            raise CatalogError(f"{where}: {text_field} must be a string")
    return RawCard(
        id=card_id,
        tags=tuple(tags_raw),
        author=obj.get("author"),
        created_at=obj.get("created_at"),
        last_modified=obj.get("last_modified"),
        downloads=counts["downloads"],
        likes=counts["likes"],
        paperswithcode_id=obj.get("paperswithcode_id"),
        description=obj.get("description") or "",
    )


def _dedupe_keep_last(cards: list[RawCard]) -> list[RawCard]:
    by_id: dict[str, RawCard] = {}
    for card in cards:
        if card.id in by_id:
            del by_id[card.id]
        by_id[card.id] = card
    return list(by_id.values())


def load_catalog(path: str | Path, errors: list[CardIssue] | None = None) -> list[RawCard]:
    """Load raw cards from a JSON file, newline-delimited or array form.

    Malformed cards are skipped and reported (appended to ``errors`` and
    logged); an unreadable or structurally broken file is fatal. Duplicate
    ids keep the last occurrence.
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise CatalogError(f"cannot read {path}: {exc}") from exc

    cards: list[RawCard] = []

    def note(where: str, reason: str) -> None:
        issue = CardIssue(where=where, reason=reason)
        logger.warning("skipping card (%s): %s", issue.where, issue.reason)
        if errors is not None:
            errors.append(issue)

    if text.lstrip().startswith("["):
        try:
            items = json.loads(text)
        except json.JSONDecodeError as exc:
            raise CatalogError(f"{path}: not valid JSON: {exc}") from exc
        for i, obj in enumerate(items):
            where = f"{path.name} item {i}"
            try:
                cards.append(_card_from_obj(obj, where))
            except CatalogError as exc:
                note(where, str(exc))
    else:
        for lineno, line in enumerate(text.splitlines(), start=1):
            if not line.strip():
                continue
            where = f"{path.name} line {lineno}"
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                note(where, f"not valid JSON: {exc}")
                continue
            try:
                cards.append(_card_from_obj(obj, where))
            except CatalogError as exc:
                note(where, str(exc))
    return _dedupe_keep_last(cards)


def fetch_catalog(
    endpoint: str,
    page_size: int = 100,
    max_records: int | None = None,
    *,
    token: str | None = None,
    delay: float = 0.1,
    retries: int = 3,
    timeout: float = 30.0,
    errors: list[CardIssue] | None = None,
) -> list[RawCard]:
    """Fetch raw cards from a hub API with offset pagination.

    Pages ``endpoint?limit=<page_size>&offset=<n>`` until ``max_records``
    cards are collected or a short page signals exhaustion. Retries 5xx
    and connection failures up to ``retries`` times with backoff, sleeping
    ``delay`` seconds between pages to stay polite. The auth token falls
    back to the FACETSCOPE_HUB_TOKEN environment variable.
    """
    import httpx

    if page_size <= 0:
        raise ValueError("page_size must be positive")
    token = token or os.environ.get(HUB_TOKEN_ENV)
    headers = {"Authorization": f"Bearer {token}"} if token else {}

    cards: list[RawCard] = []
    offset = 0
    page_no = 0
    with httpx.Client(timeout=timeout, headers=headers) as client:
        while max_records is None or len(cards) < max_records:
            params = {"limit": page_size, "offset": offset}
            response = None
            last_error: Exception | None = None
            for attempt in range(retries + 1):
                if attempt:
                    time.sleep(delay * attempt)
                try:
                    response = client.get(endpoint, params=params)
                except httpx.HTTPError as exc:
                    last_error = exc
                    continue
                if response.status_code >= 500:
                    last_error = FetchError(
                        f"page {page_no}: HTTP {response.status_code} from {endpoint}"
                    )
                    continue
                break
            if response is None:
                raise FetchError(f"page {page_no}: {endpoint} unreachable: {last_error}")
            if response.status_code >= 500:
                raise FetchError(f"page {page_no}: HTTP {response.status_code} after {retries} retries")
            if response.status_code >= 400:
                raise FetchError(f"page {page_no}: HTTP {response.status_code} from {endpoint}")
            try:
                items = response.json()
            except ValueError as exc:
                raise FetchError(f"page {page_no}: response is not JSON: {exc}") from exc
            if not isinstance(items, list):
                raise FetchError(f"page {page_no}: expected a JSON array of cards")
            for i, obj in enumerate(items):
                where = f"page {page_no} item {i}"
                try:
                    cards.append(_card_from_obj(obj, where))
                except CatalogError as exc:
                    issue = CardIssue(where=where, reason=str(exc))
                    logger.warning("skipping card (%s): %s", issue.where, issue.reason)
                    if errors is not None:
                        errors.append(issue)
            if len(items) < page_size:
                break
            offset += page_size
            page_no += 1
            if delay:
                time.sleep(delay)
    cards = _dedupe_keep_last(cards)
    if max_records is not None:
        cards = cards[:max_records]
    return cards


def build_snapshot(
    records: Iterable[DatasetRecord],
    schema: FacetSchema,
    *,
    source_label: str = "",
    built_at: str | None = None,
) -> CatalogSnapshot:
    """Freeze records into a snapshot: sorted by id, schema extended with
    every facet actually observed."""
    ordered = sorted(records, key=lambda r: r.id)
    seen: set[str] = set()
    for record in ordered:
        if record.id in seen:
            raise ValueError(f"duplicate record id {record.id!r}")
        seen.add(record.id)
    observed: set[str] = set()
    for record in ordered:
        observed.update(record.facets)
    if built_at is None:
        built_at = datetime.now(timezone.utc).isoformat(timespec="seconds")
    return CatalogSnapshot(
        records=tuple(ordered),
        schema=schema.extend(observed),
        source_label=source_label,
        built_at=built_at,
    )


def _record_to_doc(record: DatasetRecord) -> dict:
    return {
        "id": record.id,
        "scalars": dict(record.scalars),
        "facets": {name: sorted(values) for name, values in record.facets.items()},
        "description": record.description,
    }


def _record_from_doc(doc: dict) -> DatasetRecord:
    return DatasetRecord(
        id=doc["id"],
        scalars=dict(doc["scalars"]),
        facets={name: frozenset(values) for name, values in doc["facets"].items()},
        description=doc.get("description", ""),
    )


def snapshot_to_text(snapshot: CatalogSnapshot) -> str:
    """Canonical serialized form: sorted keys, sorted records, compact separators."""
    doc = {
        "format": SNAPSHOT_MAGIC,
        "format_version": SNAPSHOT_VERSION,
        "source_label": snapshot.source_label,
        "built_at": snapshot.built_at,
        "schema": {
            "known_facets": sorted(snapshot.schema.known_facets),
            "open_schema": snapshot.schema.open_schema,
            "fallback_facet": snapshot.schema.fallback_facet,
        },
        "records": [_record_to_doc(r) for r in snapshot.records],
    }
    return json.dumps(doc, sort_keys=True, separators=(",", ":")) + "\n"


def save_snapshot(
    records: Iterable[DatasetRecord],
    schema: FacetSchema,
    path: str | Path,
    *,
    source_label: str = "",
    built_at: str | None = None,
) -> CatalogSnapshot:
    """Write a snapshot file; same inputs always produce identical bytes."""
    records = list(records)
    if not records:
        raise ValueError("refusing to save an empty snapshot")
    snapshot = build_snapshot(records, schema, source_label=source_label, built_at=built_at)
    Path(path).write_text(snapshot_to_text(snapshot), encoding="utf-8")
    return snapshot


def load_snapshot(path: str | Path) -> CatalogSnapshot:
    """Read a snapshot file back; corrupt files and version mismatches are fatal."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise SnapshotError(f"cannot read snapshot {path}: {exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SnapshotError(f"{path}: corrupt snapshot (not valid JSON: {exc})") from exc
    if not isinstance(doc, dict) or doc.get("format") != SNAPSHOT_MAGIC:
        raise SnapshotError(f"{path}: not a {SNAPSHOT_MAGIC} file")
    version = doc.get("format_version")
    if version != SNAPSHOT_VERSION:
        raise SnapshotVersionError(
            f"{path}: format version {version!r} unsupported (expected {SNAPSHOT_VERSION})"
        )
    try:
        schema_doc = doc["schema"]
        schema = FacetSchema(
            known_facets=frozenset(schema_doc["known_facets"]),
            open_schema=bool(schema_doc["open_schema"]),
            fallback_facet=schema_doc["fallback_facet"],
        )
        records = tuple(_record_from_doc(r) for r in doc["records"])
        snapshot = CatalogSnapshot(
            records=records,
            schema=schema,
            source_label=doc["source_label"],
            built_at=doc["built_at"],
        )
    except (KeyError, TypeError, AttributeError) as exc:
        raise SnapshotError(f"{path}: corrupt snapshot ({exc!r})") from exc
    ids = [r.id for r in snapshot.records]
    if ids != sorted(ids) or len(set(ids)) != len(ids):
        raise SnapshotError(f"{path}: records are not unique and sorted by id")
    return snapshot
