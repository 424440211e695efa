"""Topology validation, both construction rules, summaries, export."""

from __future__ import annotations

import random
from itertools import combinations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import FACET_POOL, f3_records, random_corpus, random_filter, record
from oracles import naive_bipartite, naive_unipartite, network_as_plain

from facetscope.catalog import FilterSpec, build_index
from facetscope.errors import (
    NoThematicVariableError,
    TopologyValidationError,
    UnknownEdgeError,
    UnknownNodeError,
)
from facetscope.ingest import FacetSchema, build_snapshot
from facetscope.networks import (
    Edge,
    TopologySpec,
    build_network,
    export_network,
    find_edge,
    find_node,
    import_network,
    node_summary,
    thematic_breakdown,
    validate_topology,
)

SCHEMA = FacetSchema()


def index_of(records):
    return build_index(build_snapshot(records, SCHEMA, built_at="2026-01-01T00:00:00+00:00"))


def edge_map(network):
    return {(e.u, e.v): {i.link_value: set(i.records) for i in e.items} for e in network.edges}


class TestValidateTopology:
    def test_bipartite_recipe_valid(self):
        spec = TopologySpec("dataset", "modality", "task_categories")
        assert validate_topology(spec, SCHEMA) == []
        assert spec.kind == "bipartite"

    def test_unipartite_recipe_valid(self):
        spec = TopologySpec("task_categories", "task_categories", "dataset", "license")
        assert validate_topology(spec, SCHEMA) == []
        assert spec.kind == "unipartite"

    def test_link_equals_source(self):
        problems = validate_topology(TopologySpec("dataset", "modality", "dataset"), SCHEMA)
        assert len(problems) == 1
        assert "source" in problems[0]

    def test_collects_all_violations(self):
        spec = TopologySpec("nope", "modality", "nope", "also-nope")
        problems = validate_topology(spec, SCHEMA)
        # unknown source, unknown link, link=source, unknown thematic
        assert len(problems) == 4

    def test_build_raises_with_all_problems(self, f3_index):
        spec = TopologySpec("nope", "modality", "nope", "also-nope")
        with pytest.raises(TopologyValidationError) as err:
            build_network(f3_index, FilterSpec(), spec)
        assert len(err.value.problems) == 4


class TestBipartiteRule:
    def test_f3_dataset_modality_by_task(self, f3_index):
        network = build_network(
            f3_index, FilterSpec(), TopologySpec("dataset", "modality", "task_categories")
        )
        assert network.kind == "bipartite"
        assert edge_map(network) == {
            ("A", "text"): {"qa": {"A"}},
            ("A", "tabular"): {"qa": {"A"}},
            ("B", "text"): {"qa": {"B"}, "summarization": {"B"}},
            ("C", "audio"): {"asr": {"C"}},
        }
        assert find_node(network, "text").size == 2
        assert find_node(network, "text").side == "target"
        assert find_node(network, "A").side == "source"

    def test_record_without_link_values_emits_no_edges(self):
        index = index_of([record("D", modality={"text"})])  # no task_categories
        network = build_network(index, FilterSpec(), TopologySpec("dataset", "modality", "task_categories"))
        assert network.edges == ()
        assert {n.id for n in network.nodes} == {"D", "text"}
        assert find_node(network, "D").size == 0

    def test_overlapping_value_spaces_merge_to_both_side(self):
        # same value on the source and target facets: one node, no self-loop
        records = [record("r1", left={"x", "y"}, right={"x", "z"}, stuff={"l1"})]
        index = index_of(records)
        network = build_network(index, FilterSpec(), TopologySpec("left", "right", "stuff"))
        assert find_node(network, "x").side == "both"
        assert ("x", "x") not in edge_map(network)
        assert set(edge_map(network)) == {("x", "z"), ("y", "x"), ("y", "z")}
        assert_matches_oracle(index, {}, TopologySpec("left", "right", "stuff"))

    def test_nodes_and_edges_sorted(self, f3_index):
        network = build_network(
            f3_index, FilterSpec(), TopologySpec("dataset", "modality", "task_categories")
        )
        assert [n.id for n in network.nodes] == sorted(n.id for n in network.nodes)
        assert [(e.u, e.v) for e in network.edges] == sorted((e.u, e.v) for e in network.edges)


class TestUnipartiteRule:
    def test_f3_task_network_with_license_theme(self, f3_index):
        network = build_network(
            f3_index,
            FilterSpec(),
            TopologySpec("task_categories", "task_categories", "dataset", "license"),
        )
        assert network.kind == "unipartite"
        assert edge_map(network) == {("qa", "summarization"): {"B": {"B"}}}
        edge = network.edges[0]
        assert edge.items[0].themes == ("apache-2.0",)
        assert find_node(network, "qa").size == 2  # datasets A and B
        assert find_node(network, "asr").size == 1  # isolated but sized

    def test_f3_shared_model_network(self, f3_index):
        network = build_network(f3_index, FilterSpec(), TopologySpec("dataset", "dataset", "model"))
        assert edge_map(network) == {
            ("A", "B"): {"m1": {"A", "B"}},
            ("B", "C"): {"m2": {"B", "C"}},
        }
        assert find_edge(network, "C", "B") is network.edges[1]  # order-insensitive lookup

    def test_unshared_links_leave_node_isolated(self):
        index = index_of(f3_records() + [record("D", model={"m-lonely"})])
        network = build_network(index, FilterSpec(), TopologySpec("dataset", "dataset", "model"))
        incident = {e.u for e in network.edges} | {e.v for e in network.edges}
        assert "D" in {n.id for n in network.nodes}
        assert "D" not in incident
        assert find_node(network, "D").size == 1

    def test_filter_restricts_the_record_set(self, f3_index):
        network = build_network(
            f3_index,
            FilterSpec.of({"license": ["mit"]}),
            TopologySpec("dataset", "dataset", "model"),
        )
        # only A and C match; they share no model
        assert network.edges == ()
        assert {n.id for n in network.nodes} == {"A", "C"}


class TestNodeSummary:
    def test_f3_text_tooltip(self, f3_index):
        network = build_network(
            f3_index, FilterSpec(), TopologySpec("dataset", "modality", "task_categories")
        )
        summary = node_summary(network, "text")
        assert (summary.neighbor_count, summary.distinct_item_count) == (2, 2)
        assert summary.by_link_value == (("qa", 2), ("summarization", 1))

    def test_isolated_node_keeps_own_count(self, f3_index):
        network = build_network(
            f3_index, FilterSpec(), TopologySpec("task_categories", "task_categories", "dataset")
        )
        summary = node_summary(network, "asr")
        assert summary.neighbor_count == 0
        assert summary.distinct_item_count == 1  # dataset C
        assert summary.by_link_value == ()

    def test_size_always_equals_tooltip_count(self, f3_index):
        for spec in (
            TopologySpec("dataset", "modality", "task_categories"),
            TopologySpec("task_categories", "task_categories", "dataset"),
            TopologySpec("dataset", "dataset", "model"),
        ):
            network = build_network(f3_index, FilterSpec(), spec)
            for node in network.nodes:
                assert node_summary(network, node.id).distinct_item_count == node.size

    def test_unknown_node(self, f3_index):
        network = build_network(f3_index, FilterSpec(), TopologySpec("dataset", "dataset", "model"))
        with pytest.raises(UnknownNodeError):
            node_summary(network, "nope")


class TestThematicBreakdown:
    def task_network(self, index):
        return build_network(
            index,
            FilterSpec(),
            TopologySpec("task_categories", "task_categories", "dataset", "license"),
        )

    def test_f3_qa_summarization_edge(self, f3_index):
        network = self.task_network(f3_index)
        edge = find_edge(network, "qa", "summarization")
        assert thematic_breakdown(network, edge, f3_index) == [("apache-2.0", 1)]

    def test_contributor_without_theme_counts_missing(self):
        records = f3_records() + [record("D", task_categories={"qa", "ranking"})]  # no license
        index = index_of(records)
        network = self.task_network(index)
        edge = find_edge(network, "qa", "ranking")
        assert thematic_breakdown(network, edge, index) == [("(missing)", 1)]

    def test_two_contributors_same_license(self):
        records = [
            record("X", task_categories={"qa", "nli"}, license={"mit"}),
            record("Y", task_categories={"qa", "nli"}, license={"mit"}),
        ]
        index = index_of(records)
        network = self.task_network(index)
        edge = find_edge(network, "nli", "qa")
        assert thematic_breakdown(network, edge, index) == [("mit", 2)]

    def test_errors_without_thematic_var(self, f3_index):
        network = build_network(
            f3_index, FilterSpec(), TopologySpec("task_categories", "task_categories", "dataset")
        )
        edge = network.edges[0]
        with pytest.raises(NoThematicVariableError):
            thematic_breakdown(network, edge, f3_index)

    def test_segment_total_at_least_item_count(self, f3_index):
        network = self.task_network(f3_index)
        for edge in network.edges:
            total = sum(c for _, c in thematic_breakdown(network, edge, f3_index))
            assert total >= len(edge.items)


class TestExport:
    def model_network(self, index):
        return build_network(index, FilterSpec(), TopologySpec("dataset", "dataset", "model"))

    def test_graphml_counts(self, f3_index):
        text = export_network(self.model_network(f3_index), "graphml")
        assert text.count("<node ") == 3
        assert text.count("<edge ") == 2
        assert text.startswith("<?xml")

    def test_roundtrip_both_formats(self, f3_index):
        network = self.model_network(f3_index)
        for fmt in ("node-link", "graphml"):
            assert import_network(export_network(network, fmt), fmt) == network

    def test_empty_network_valid(self, f3_index):
        network = build_network(
            f3_index,
            FilterSpec.of({"license": ["gpl-3.0"]}),
            TopologySpec("dataset", "dataset", "model"),
        )
        assert network.nodes == ()
        for fmt in ("node-link", "graphml"):
            assert import_network(export_network(network, fmt), fmt) == network

    def test_export_twice_byte_identical(self, f3_index):
        for fmt in ("node-link", "graphml"):
            one = export_network(self.model_network(f3_index), fmt)
            two = export_network(self.model_network(f3_index), fmt)
            assert one.encode() == two.encode()

    def test_unsupported_format(self, f3_index):
        with pytest.raises(ValueError):
            export_network(self.model_network(f3_index), "gexf")
        with pytest.raises(ValueError):
            import_network("{}", "gexf")

    def test_json_alias(self, f3_index):
        network = self.model_network(f3_index)
        assert export_network(network, "json") == export_network(network, "node-link")


class TestTruncation:
    def test_keeps_highest_size_nodes(self):
        records = [
            record(f"r{i}", model={f"m{j}" for j in range(i + 1)}, group={"g"})
            for i in range(6)
        ]
        index = index_of(records)
        full = build_network(index, FilterSpec(), TopologySpec("dataset", "dataset", "model"))
        cut = build_network(
            index, FilterSpec(), TopologySpec("dataset", "dataset", "model"), max_nodes=3
        )
        assert {n.id for n in cut.nodes} == {"r3", "r4", "r5"}  # largest model sets
        assert cut.truncation.nodes_dropped == 3
        assert len({n.id for n in full.nodes}) == 6

    def test_edge_ceiling(self, f3_index):
        cut = build_network(
            f3_index, FilterSpec(), TopologySpec("dataset", "dataset", "model"), max_edges=1
        )
        assert len(cut.edges) == 1
        assert cut.truncation.edges_dropped == 1

    def test_truncation_deterministic(self):
        rng = random.Random(7)
        records = random_corpus(rng, 60)
        index = index_of(records)
        spec = TopologySpec("dataset", "dataset", "model")
        one = build_network(index, FilterSpec(), spec, max_nodes=10, max_edges=5)
        two = build_network(index, FilterSpec(), spec, max_nodes=10, max_edges=5)
        assert one == two

    def test_drop_isolated_option(self, f3_index):
        network = build_network(
            f3_index,
            FilterSpec(),
            TopologySpec("task_categories", "task_categories", "dataset"),
            include_isolated=False,
        )
        assert {n.id for n in network.nodes} == {"qa", "summarization"}


def assert_matches_oracle(index, clauses, spec):
    """Full structural comparison against the pair-centric reference."""
    network = build_network(index, FilterSpec(clauses=clauses), spec)
    matched = [index.record(i) for i in index.apply_filter(FilterSpec(clauses=clauses))]
    if spec.kind == "bipartite":
        expected_nodes, expected_edges = naive_bipartite(
            matched, spec.source_var, spec.target_var, spec.link_var, spec.thematic_var
        )
    else:
        expected_nodes, expected_edges = naive_unipartite(
            matched, spec.source_var, spec.link_var, spec.thematic_var
        )
    got_nodes, got_edges = network_as_plain(network)
    assert got_nodes == expected_nodes
    assert got_edges == expected_edges


SPEC_POOL = [
    TopologySpec("dataset", "modality", "task_categories"),
    TopologySpec("dataset", "modality", "task_categories", "license"),
    TopologySpec("task_categories", "task_categories", "dataset", "license"),
    TopologySpec("dataset", "dataset", "model"),
    TopologySpec("modality", "task_categories", "dataset", "language"),
    TopologySpec("license", "license", "dataset", "modality"),
    TopologySpec("modality", "modality", "task_categories"),
]


class TestOracleEquivalence:
    @given(seed=st.integers(min_value=0, max_value=2**32 - 1))
    @settings(max_examples=40, deadline=None)
    def test_random_corpora_match_reference(self, seed):
        rng = random.Random(seed)
        records = random_corpus(rng, rng.randint(1, 30))
        index = index_of(records)
        spec = rng.choice(SPEC_POOL)
        clauses = random_filter(rng, max_clauses=2)
        assert_matches_oracle(index, clauses, spec)

    @given(seed=st.integers(min_value=0, max_value=2**32 - 1))
    @settings(max_examples=40, deadline=None)
    def test_identity_link_is_within_record_pairing(self, seed):
        # unipartite with link = the record-identity facet reduces to
        # enumerating value pairs inside each record
        rng = random.Random(seed)
        records = random_corpus(rng, rng.randint(1, 30))
        index = index_of(records)
        spec = TopologySpec("task_categories", "task_categories", "dataset")
        network = build_network(index, FilterSpec(), spec)
        expected: dict[tuple[str, str], dict[str, set[str]]] = {}
        for r in records:
            for u, v in combinations(sorted(r.facets.get("task_categories", ())), 2):
                expected.setdefault((u, v), {})[r.id] = {r.id}
        assert edge_map(network) == expected

    @given(seed=st.integers(min_value=0, max_value=2**32 - 1))
    @settings(max_examples=30, deadline=None)
    def test_properties_hold(self, seed):
        rng = random.Random(seed)
        records = random_corpus(rng, rng.randint(1, 30))
        index = index_of(records)
        spec = rng.choice(SPEC_POOL)
        clauses = random_filter(rng, max_clauses=2)
        base = FilterSpec(clauses=clauses)
        network = build_network(index, base, spec)

        # no self-loops; contributors stay within the filtered set
        matched_ids = {index.record(i).id for i in index.apply_filter(base)}
        for edge in network.edges:
            assert edge.u != edge.v
            assert edge.items
            for item in edge.items:
                assert item.records
                assert item.records <= matched_ids

        # adding a clause only ever shrinks the network
        extra_facet = rng.choice([f for f in FACET_POOL if f not in clauses])
        narrowed = base.with_clause(extra_facet, {rng.choice(FACET_POOL[extra_facet])})
        sub = build_network(index, narrowed, spec)
        assert {n.id for n in sub.nodes} <= {n.id for n in network.nodes}
        assert set(edge_map(sub)) <= set(edge_map(network))
