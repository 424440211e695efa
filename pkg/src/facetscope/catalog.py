"""Immutable faceted inverted index: filter evaluation and value counts.

Built once from a snapshot and never mutated, so any number of readers
(HTTP workers, CLI runs) can share one index; a re-ingest produces a new
index that replaces the old one atomically.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .errors import RecordNotFoundError, UnknownFacetError
from .ingest import CatalogSnapshot, DatasetRecord, FacetSchema

#: Pseudo-value appended by facet_values for records lacking the facet.
MISSING_VALUE = "(missing)"

OR = "or"
AND = "and"

DATASET_URL_TEMPLATE = "https://huggingface.co/datasets/{id}"
MODEL_URL_TEMPLATE = "https://huggingface.co/{id}"

DEFAULT_URL_TEMPLATES = {
    "dataset": DATASET_URL_TEMPLATE,
    "model": MODEL_URL_TEMPLATE,
}


@dataclass(frozen=True)
class FilterSpec:
    """Disjunctive value sets per facet, conjoined across facets.

    An empty clause map matches every record. ``within_facet_mode``
    controls how multiple values of one facet combine: "or" keeps records
    holding ANY selected value (the default, matching "at least this
    task" search semantics), "and" requires ALL of them.
    """

    clauses: Mapping[str, frozenset[str]] = field(default_factory=dict)
    within_facet_mode: str = OR

    def __post_init__(self):
        if self.within_facet_mode not in (OR, AND):
            raise ValueError(f"within_facet_mode must be {OR!r} or {AND!r}")
        frozen = {}
        for facet, values in self.clauses.items():
            values = frozenset(values)
            if not values:
                raise ValueError(f"clause for facet {facet!r} has no values")
            frozen[facet] = values
        object.__setattr__(self, "clauses", frozen)

    @classmethod
    def matching_all(cls) -> "FilterSpec":
        return cls()

    @classmethod
    def of(cls, clauses: Mapping[str, Iterable[str]], mode: str = OR) -> "FilterSpec":
        return cls(clauses={f: frozenset(v) for f, v in clauses.items()}, within_facet_mode=mode)

    def without(self, facet: str) -> "FilterSpec":
        clauses = {f: v for f, v in self.clauses.items() if f != facet}
        return FilterSpec(clauses=clauses, within_facet_mode=self.within_facet_mode)

    def with_clause(self, facet: str, values: Iterable[str]) -> "FilterSpec":
        clauses = dict(self.clauses)
        clauses[facet] = frozenset(values)
        return FilterSpec(clauses=clauses, within_facet_mode=self.within_facet_mode)


class FacetIndex:
    """Postings (facet -> value -> record ordinals) over one snapshot.

    Ordinals are assigned by id order, so identical snapshots index
    identically. For every known facet the postings plus the missing set
    partition the record space.
    """

    def __init__(self, snapshot: CatalogSnapshot):
        self.snapshot = snapshot
        self.schema: FacetSchema = snapshot.schema
        self._records: tuple[DatasetRecord, ...] = snapshot.records
        self._ordinal_by_id = {r.id: i for i, r in enumerate(self._records)}
        postings: dict[str, dict[str, set[int]]] = {}
        for ordinal, record in enumerate(self._records):
            for facet, values in record.facets.items():
                by_value = postings.setdefault(facet, {})
                for value in values:
                    by_value.setdefault(value, set()).add(ordinal)
        self.postings = postings
        self.known_facets: frozenset[str] = self.schema.known_facets | frozenset(postings)
        universe = set(range(len(self._records)))
        self.missing: dict[str, set[int]] = {}
        for facet in self.known_facets:
            have: set[int] = set()
            for ordinals in postings.get(facet, {}).values():
                have |= ordinals
            self.missing[facet] = universe - have

    def __len__(self) -> int:
        return len(self._records)

    @property
    def records(self) -> tuple[DatasetRecord, ...]:
        return self._records

    def record(self, ordinal: int) -> DatasetRecord:
        try:
            return self._records[ordinal]
        except IndexError:
            raise RecordNotFoundError(f"no record at ordinal {ordinal}") from None

    def by_id(self, record_id: str) -> DatasetRecord:
        try:
            return self._records[self._ordinal_by_id[record_id]]
        except KeyError:
            raise RecordNotFoundError(f"no record with id {record_id!r}") from None

    def has_id(self, record_id: str) -> bool:
        return record_id in self._ordinal_by_id

    def _check_known(self, facet: str) -> None:
        if facet not in self.known_facets:
            raise UnknownFacetError(facet)

    def apply_filter(self, spec: FilterSpec) -> list[int]:
        """Record ordinals matching the filter, sorted ascending.

        AND across facets; within one facet OR/AND per the spec's mode.
        """
        for facet in spec.clauses:
            self._check_known(facet)
        result: set[int] | None = None
        for facet in sorted(spec.clauses):
            values = spec.clauses[facet]
            by_value = self.postings.get(facet, {})
            if spec.within_facet_mode == OR:
                hit: set[int] = set()
                for value in values:
                    hit |= by_value.get(value, set())
            else:
                hit = None  # type: ignore[assignment]
                for value in values:
                    ordinals = by_value.get(value, set())
                    hit = set(ordinals) if hit is None else hit & ordinals
                hit = hit or set()
            result = hit if result is None else result & hit
            if not result:
                return []
        if result is None:
            return list(range(len(self._records)))
        return sorted(result)

    def facet_values(self, facet: str, active: FilterSpec | None = None) -> list[tuple[str, int]]:
        """(value, count) pairs for one facet under the active filter.

        Multi-select convention: the clause for ``facet`` itself is removed
        before counting, so the list guides the next selection within that
        facet. Sorted by descending count then value; a "(missing)" row is
        appended when matching records lack the facet entirely.
        """
        self._check_known(facet)
        active = active or FilterSpec()
        matched = self.apply_filter(active.without(facet))
        counts: Counter[str] = Counter()
        missing = 0
        for ordinal in matched:
            values = self._records[ordinal].facets.get(facet)
            if values:
                counts.update(values)
            else:
                missing += 1
        out = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
        if missing:
            out.append((MISSING_VALUE, missing))
        return out


def build_index(snapshot: CatalogSnapshot) -> FacetIndex:
    return FacetIndex(snapshot)


def apply_filter(index: FacetIndex, spec: FilterSpec) -> list[int]:
    return index.apply_filter(spec)


def facet_values(index: FacetIndex, facet: str, active: FilterSpec | None = None) -> list[tuple[str, int]]:
    return index.facet_values(facet, active)


def get_record(index: FacetIndex, key: int | str) -> DatasetRecord:
    """Look a record up by ordinal (int) or id (str)."""
    if isinstance(key, bool):
        raise TypeError("record key must be an ordinal or an id")
    if isinstance(key, int):
        return index.record(key)
    return index.by_id(key)


def external_url(item: DatasetRecord | str, template: str) -> str:
    """Substitute a record id (or bare facet value) into a URL template."""
    if "{id}" not in template:
        raise ValueError(f"url template {template!r} lacks an {{id}} placeholder")
    value = item.id if isinstance(item, DatasetRecord) else item
    return template.replace("{id}", value)
