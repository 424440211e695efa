"""Exception types shared across the package.

Every error carries a stable machine-readable ``code`` so the HTTP layer
can map failures to structured responses without leaking stack traces.
"""

from __future__ import annotations


class FacetscopeError(Exception):
    """Base class for all package errors."""

    code = "error"


class TagParseError(FacetscopeError):
    """A tag string could not be parsed into a facet assignment."""

    code = "invalid_tag"


class CatalogError(FacetscopeError):
    """A card file or API response was unusable as a whole."""

    code = "bad_catalog"


class FetchError(FacetscopeError):
    """The hub API could not be fetched after bounded retries."""

    code = "fetch_failed"


class SnapshotError(FacetscopeError):
    """A snapshot file is corrupt or structurally invalid."""

    code = "bad_snapshot"


class SnapshotVersionError(SnapshotError):
    """A snapshot file declares an unsupported format version."""

    code = "snapshot_version"


class UnknownFacetError(FacetscopeError):
    """A filter or topology referenced a facet the index does not know."""

    code = "unknown_facet"

    def __init__(self, facet: str):
        super().__init__(f"unknown facet: {facet!r}")
        self.facet = facet


class RecordNotFoundError(FacetscopeError):
    code = "unknown_record"


class TopologyValidationError(FacetscopeError):
    """One or more problems with a topology spec; collects all of them."""

    code = "invalid_topology"

    def __init__(self, problems: list[str]):
        super().__init__("; ".join(problems))
        self.problems = list(problems)


class UnknownNodeError(FacetscopeError):
    code = "unknown_node"


class UnknownEdgeError(FacetscopeError):
    code = "unknown_edge"


class NoThematicVariableError(FacetscopeError):
    """Thematic breakdown requested on a network built without one."""

    code = "no_thematic"


class UnknownSessionError(FacetscopeError):
    code = "unknown_session"


class UnknownViewError(FacetscopeError):
    code = "unknown_view"


class InvalidSelectionError(FacetscopeError):
    code = "invalid_selection"


class CannotCloseRootError(FacetscopeError):
    code = "cannot_close_root"


class ConfigError(FacetscopeError):
    code = "bad_config"
