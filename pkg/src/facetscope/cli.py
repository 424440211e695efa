"""Command-line interface: ingest, fetch, facets, network, serve.

Exit codes: 0 success, 2 usage error (argparse or semantically bad
flags), 1 runtime failure (I/O, bad snapshot, unreachable hub).
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

from .catalog import FilterSpec, build_index
from .config import load_config
from .errors import FacetscopeError
from .ingest import (
    CardIssue,
    FacetSchema,
    fetch_catalog,
    load_catalog,
    load_snapshot,
    normalize_cards,
    save_snapshot,
)
from .networks import (
    DEFAULT_MAX_EDGES,
    DEFAULT_MAX_NODES,
    TopologySpec,
    export_network,
    build_network,
    validate_topology,
)

logger = logging.getLogger(__name__)


def _add_snapshot_arg(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--snapshot",
        default=os.environ.get("FACETSCOPE_SNAPSHOT"),
        help="snapshot file (defaults to $FACETSCOPE_SNAPSHOT)",
    )


def _add_filter_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--filter",
        action="append",
        default=[],
        metavar="FACET=VALUE",
        help="facet filter, repeatable; repeated facets OR together by default",
    )
    parser.add_argument(
        "--mode",
        choices=["or", "and"],
        default="or",
        help="how multiple values of one facet combine",
    )


def _parse_filters(parser: argparse.ArgumentParser, pairs: list[str], mode: str) -> FilterSpec:
    clauses: dict[str, set[str]] = {}
    for pair in pairs:
        facet, sep, value = pair.partition("=")
        if not sep or not facet:
            parser.error(f"--filter needs FACET=VALUE, got {pair!r}")
        clauses.setdefault(facet, set()).add(value)
    return FilterSpec.of(clauses, mode=mode)


def _load_index(parser: argparse.ArgumentParser, snapshot_path: str | None):
    if not snapshot_path:
        parser.error("no snapshot given (use --snapshot or set FACETSCOPE_SNAPSHOT)")
    return build_index(load_snapshot(snapshot_path))


def _schema_from_args(args: argparse.Namespace) -> FacetSchema:
    return FacetSchema(
        open_schema=not args.closed_schema,
        fallback_facet=args.fallback_facet,
    )


def _report_issues(issues: list[CardIssue]) -> None:
    for issue in issues:
        print(f"warning: {issue.where}: {issue.reason}", file=sys.stderr)


def _cmd_ingest(parser: argparse.ArgumentParser, args: argparse.Namespace) -> int:
    card_issues: list[CardIssue] = []
    tag_issues: list[CardIssue] = []
    cards = load_catalog(args.input, errors=card_issues)
    records = normalize_cards(cards, _schema_from_args(args), skipped=tag_issues)
    _report_issues(card_issues + tag_issues)
    if not records:
        print("error: no usable cards", file=sys.stderr)
        return 1
    save_snapshot(records, _schema_from_args(args), args.out, source_label=args.source_label)
    print(
        f"wrote {args.out}: {len(records)} records"
        f" ({len(card_issues)} cards skipped, {len(tag_issues)} tags skipped)"
    )
    return 0


def _cmd_fetch(parser: argparse.ArgumentParser, args: argparse.Namespace) -> int:
    card_issues: list[CardIssue] = []
    tag_issues: list[CardIssue] = []
    cards = fetch_catalog(
        args.endpoint,
        page_size=args.page_size,
        max_records=args.max_records,
        delay=args.delay,
        errors=card_issues,
    )
    records = normalize_cards(cards, _schema_from_args(args), skipped=tag_issues)
    _report_issues(card_issues + tag_issues)
    if not records:
        print("error: the hub returned no usable cards", file=sys.stderr)
        return 1
    save_snapshot(
        records,
        _schema_from_args(args),
        args.out,
        source_label=args.source_label or args.endpoint,
    )
    print(f"wrote {args.out}: {len(records)} records from {args.endpoint}")
    return 0


def _cmd_facets(parser: argparse.ArgumentParser, args: argparse.Namespace) -> int:
    index = _load_index(parser, args.snapshot)
    active = _parse_filters(parser, args.filter, args.mode)
    for value, count in index.facet_values(args.facet, active):
        print(f"{value}\t{count}")
    return 0


def _cmd_network(parser: argparse.ArgumentParser, args: argparse.Namespace) -> int:
    index = _load_index(parser, args.snapshot)
    spec = TopologySpec(
        source_var=args.source,
        target_var=args.target,
        link_var=args.link,
        thematic_var=args.thematic,
    )
    problems = validate_topology(spec, index.snapshot.schema)
    if problems:
        parser.error("; ".join(problems))
    active = _parse_filters(parser, args.filter, args.mode)
    fmt = args.format
    if fmt is None:
        fmt = "graphml" if args.out.endswith(".graphml") else "node-link"
    network = build_network(
        index,
        active,
        spec,
        max_nodes=args.max_nodes,
        max_edges=args.max_edges,
        include_isolated=not args.drop_isolated,
    )
    Path(args.out).write_text(export_network(network, fmt), encoding="utf-8")
    truncated = ""
    if network.truncation:
        truncated = (
            f" (truncated: {network.truncation.nodes_dropped} nodes,"
            f" {network.truncation.edges_dropped} edges dropped)"
        )
    print(f"wrote {args.out}: {len(network.nodes)} nodes, {len(network.edges)} edges{truncated}")
    return 0


def _cmd_serve(parser: argparse.ArgumentParser, args: argparse.Namespace) -> int:
    from .service import serve

    config = load_config(
        args.config,
        snapshot_path=args.snapshot,
        host=args.host,
        port=args.port,
    )
    serve(config)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="facetscope",
        description="Faceted dataset-catalog search and co-occurrence network exploration.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def schema_flags(p: argparse.ArgumentParser) -> None:
        p.add_argument("--fallback-facet", default="tag", help="facet for separator-less tags")
        p.add_argument(
            "--closed-schema",
            action="store_true",
            help="reject tags whose prefix is not a known facet",
        )

    p_ingest = sub.add_parser("ingest", help="build a snapshot from a card file")
    p_ingest.add_argument("--input", required=True, help="JSON cards (array or one per line)")
    p_ingest.add_argument("--out", required=True, help="snapshot file to write")
    p_ingest.add_argument("--source-label", default="", help="label stored in the snapshot")
    schema_flags(p_ingest)
    p_ingest.set_defaults(func=_cmd_ingest)

    p_fetch = sub.add_parser("fetch", help="build a snapshot from a hub API")
    p_fetch.add_argument("--endpoint", required=True, help="catalog API URL")
    p_fetch.add_argument("--page-size", type=int, default=100)
    p_fetch.add_argument("--max-records", type=int, default=None)
    p_fetch.add_argument("--delay", type=float, default=0.1, help="seconds between pages")
    p_fetch.add_argument("--out", required=True)
    p_fetch.add_argument("--source-label", default="")
    schema_flags(p_fetch)
    p_fetch.set_defaults(func=_cmd_fetch)

    p_facets = sub.add_parser("facets", help="list a facet's values with counts")
    p_facets.add_argument("facet")
    _add_snapshot_arg(p_facets)
    _add_filter_args(p_facets)
    p_facets.set_defaults(func=_cmd_facets)

    p_network = sub.add_parser("network", help="build and export a network")
    p_network.add_argument("--source", required=True, help="source variable (facet)")
    p_network.add_argument("--target", required=True, help="target variable (facet)")
    p_network.add_argument("--link", required=True, help="link variable (facet)")
    p_network.add_argument("--thematic", default=None, help="thematic variable (facet)")
    p_network.add_argument("--out", required=True)
    p_network.add_argument(
        "--format",
        choices=["graphml", "node-link", "json"],
        default=None,
        help="export format (default: from --out extension)",
    )
    p_network.add_argument("--max-nodes", type=int, default=DEFAULT_MAX_NODES)
    p_network.add_argument("--max-edges", type=int, default=DEFAULT_MAX_EDGES)
    p_network.add_argument("--drop-isolated", action="store_true", help="omit degree-0 nodes")
    _add_snapshot_arg(p_network)
    _add_filter_args(p_network)
    p_network.set_defaults(func=_cmd_network)

    p_serve = sub.add_parser("serve", help="run the HTTP API")
    p_serve.add_argument("--config", default=None, help="JSON config file")
    p_serve.add_argument("--host", default=None)
    p_serve.add_argument("--port", type=int, default=None)
    _add_snapshot_arg(p_serve)
    p_serve.set_defaults(func=_cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(parser, args)
    except FacetscopeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
