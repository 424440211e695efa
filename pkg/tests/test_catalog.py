"""Inverted index: filter evaluation, value counts, record lookup."""

from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import FACET_POOL, f3_records, random_corpus, random_filter, record
from oracles import naive_facet_values, naive_filter

from facetscope.catalog import (
    DATASET_URL_TEMPLATE,
    MISSING_VALUE,
    MODEL_URL_TEMPLATE,
    FilterSpec,
    apply_filter,
    build_index,
    external_url,
    facet_values,
    get_record,
)
from facetscope.errors import RecordNotFoundError, UnknownFacetError
from facetscope.ingest import FacetSchema, build_snapshot


def index_of(records):
    return build_index(build_snapshot(records, FacetSchema(), built_at="2026-01-01T00:00:00+00:00"))


def ids(index, ordinals):
    return [index.record(i).id for i in ordinals]


class TestBuildIndex:
    def test_postings_match_naive_scan(self, f3_index):
        assert sorted(f3_index.postings["modality"]["text"]) == [0, 1]  # A, B
        # cross-check every posting against a direct scan
        for facet, by_value in f3_index.postings.items():
            for value, ordinals in by_value.items():
                expected = {
                    i for i, r in enumerate(f3_index.records) if value in r.facets.get(facet, ())
                }
                assert ordinals == expected
                assert ordinals, "postings must never hold empty sets"

    def test_missing_partitions_records(self, f3_index):
        everyone = set(range(len(f3_index)))
        for facet in f3_index.known_facets:
            have = set()
            for ordinals in f3_index.postings.get(facet, {}).values():
                have |= ordinals
            assert have | f3_index.missing[facet] == everyone
            assert not have & f3_index.missing[facet]

    def test_record_without_facet_listed_missing(self):
        index = index_of(f3_records() + [record("D", task_categories={"qa"})])
        d = index.apply_filter(FilterSpec.of({"dataset": ["D"]}))[0]
        assert d in index.missing["modality"]


class TestApplyFilter:
    def test_single_clause(self, f3_index):
        got = apply_filter(f3_index, FilterSpec.of({"task_categories": ["qa"]}))
        assert ids(f3_index, got) == ["A", "B"]

    def test_empty_filter_matches_all(self, f3_index):
        assert ids(f3_index, apply_filter(f3_index, FilterSpec())) == ["A", "B", "C"]

    def test_and_across_facets(self, f3_index):
        got = apply_filter(f3_index, FilterSpec.of({"task_categories": ["qa"], "license": ["mit"]}))
        assert ids(f3_index, got) == ["A"]

    def test_or_within_facet(self, f3_index):
        got = apply_filter(f3_index, FilterSpec.of({"modality": ["text", "audio"]}))
        assert ids(f3_index, got) == ["A", "B", "C"]

    def test_and_within_facet(self, f3_index):
        got = apply_filter(f3_index, FilterSpec.of({"modality": ["text", "tabular"]}, mode="and"))
        assert ids(f3_index, got) == ["A"]

    def test_unknown_facet_named_in_error(self, f3_index):
        with pytest.raises(UnknownFacetError) as err:
            apply_filter(f3_index, FilterSpec.of({"nope": ["x"]}))
        assert "nope" in str(err.value)

    def test_unknown_value_is_just_empty(self, f3_index):
        assert apply_filter(f3_index, FilterSpec.of({"license": ["gpl-3.0"]})) == []

    def test_empty_clause_rejected(self):
        with pytest.raises(ValueError):
            FilterSpec.of({"license": []})

    def test_bad_mode_rejected(self):
        with pytest.raises(ValueError):
            FilterSpec.of({"license": ["mit"]}, mode="xor")


class TestFacetValues:
    def test_unfiltered_counts(self, f3_index):
        assert facet_values(f3_index, "modality") == [("text", 2), ("audio", 1), ("tabular", 1)]

    def test_own_clause_excluded(self, f3_index):
        active = FilterSpec.of({"task_categories": ["qa"], "modality": ["audio"]})
        # the modality clause must not constrain the modality listing
        assert facet_values(f3_index, "modality", active) == [("text", 2), ("tabular", 1)]

    def test_missing_pseudo_value_appended(self):
        index = index_of(f3_records() + [record("D", task_categories={"qa"})])
        values = facet_values(index, "modality")
        assert values[-1] == (MISSING_VALUE, 1)

    def test_unknown_facet(self, f3_index):
        with pytest.raises(UnknownFacetError):
            facet_values(f3_index, "nope")

    def test_deterministic_ordering(self, f3_index):
        first = facet_values(f3_index, "model")
        assert first == facet_values(f3_index, "model")
        assert first == [("m1", 2), ("m2", 2)]


class TestGetRecord:
    def test_by_id_and_ordinal(self, f3_index):
        assert get_record(f3_index, "B").id == "B"
        assert get_record(f3_index, 1).id == "B"

    def test_unknown_id(self, f3_index):
        with pytest.raises(RecordNotFoundError):
            get_record(f3_index, "nope")
        with pytest.raises(RecordNotFoundError):
            get_record(f3_index, 99)

    def test_external_url_templates(self, f3_index):
        rec = record("amirveyseh/acronym_identification")
        assert (
            external_url(rec, DATASET_URL_TEMPLATE)
            == "https://huggingface.co/datasets/amirveyseh/acronym_identification"
        )
        assert external_url("m1", MODEL_URL_TEMPLATE) == "https://huggingface.co/m1"

    def test_template_without_placeholder_rejected(self):
        with pytest.raises(ValueError):
            external_url("m1", "https://example.org/fixed")


corpus_strategy = st.integers(min_value=0, max_value=2**32 - 1)


class TestOracleEquivalence:
    @given(seed=corpus_strategy)
    @settings(max_examples=60, deadline=None)
    def test_filters_match_naive_scan(self, seed):
        rng = random.Random(seed)
        records = random_corpus(rng, rng.randint(1, 40))
        index = index_of(records)
        for _ in range(5):
            clauses = random_filter(rng)
            mode = rng.choice(["or", "and"])
            spec = FilterSpec(clauses=clauses, within_facet_mode=mode)
            assert index.apply_filter(spec) == naive_filter(index.records, clauses, mode)

    @given(seed=corpus_strategy)
    @settings(max_examples=40, deadline=None)
    def test_facet_values_match_naive_scan(self, seed):
        rng = random.Random(seed)
        records = random_corpus(rng, rng.randint(1, 30))
        index = index_of(records)
        clauses = random_filter(rng)
        facet = rng.choice(sorted(FACET_POOL))
        got = index.facet_values(facet, FilterSpec(clauses=clauses))
        assert got == naive_facet_values(index.records, facet, clauses)

    @given(seed=corpus_strategy)
    @settings(max_examples=60, deadline=None)
    def test_monotonicity(self, seed):
        rng = random.Random(seed)
        records = random_corpus(rng, rng.randint(1, 40))
        index = index_of(records)
        clauses = random_filter(rng, max_clauses=2)
        base = FilterSpec(clauses=clauses)
        matched = set(index.apply_filter(base))

        # adding a clause never enlarges the result
        extra_facet = rng.choice([f for f in FACET_POOL if f not in clauses])
        extra_value = rng.choice(FACET_POOL[extra_facet])
        narrowed = base.with_clause(extra_facet, {extra_value})
        assert set(index.apply_filter(narrowed)) <= matched

        # adding a value to an existing OR clause never shrinks it
        if clauses:
            facet = rng.choice(sorted(clauses))
            widened = base.with_clause(facet, set(clauses[facet]) | {rng.choice(FACET_POOL[facet])})
            assert set(index.apply_filter(widened)) >= matched

    @given(seed=corpus_strategy)
    @settings(max_examples=40, deadline=None)
    def test_count_identities(self, seed):
        rng = random.Random(seed)
        records = random_corpus(rng, rng.randint(1, 40))
        index = index_of(records)
        clauses = random_filter(rng)
        facet = rng.choice(sorted(FACET_POOL))
        active = FilterSpec(clauses=clauses)
        values = dict(index.facet_values(facet, active))
        matched = index.apply_filter(active.without(facet))
        with_facet = sum(1 for i in matched if index.record(i).facets.get(facet))
        assert values.get(MISSING_VALUE, 0) + with_facet == len(matched)
        # every matched record lands somewhere (a value row or the missing row)
        assert sum(values.values()) >= len(matched)
