"""
Graph-core operations on FiniteGraph values.

Key Functions:
- square(): the graph G² (same vertices, pairs at distance 1 or 2 joined)
- distance(): BFS distance, None when the vertices are in different components
- validate_path(): checks a vertex sequence against a particular graph
- encode() / decode(): the canonical graph document

All functions are pure; FiniteGraph values are immutable, so any of them can
be called from concurrent workers.
"""

import logging
from collections.abc import Sequence

import networkx as nx
from pydantic import ValidationError

from .errors import GraphFormatError, GraphInputError
from .models import FiniteGraph, PathCheck

logger = logging.getLogger(__name__)


def square(g: FiniteGraph) -> FiniteGraph:
    """Returns G²: u~v iff 1 <= d_G(u, v) <= 2.

    Distances are taken per component, so vertices of different components of
    g stay non-adjacent.
    """
    squared = nx.power(g.nx_graph, 2)
    return FiniteGraph(
        vertices=g.vertices,
        edges=[tuple(edge) for edge in squared.edges],
        labels=g.labels,
    )


def distance(g: FiniteGraph, u: int, v: int) -> int | None:
    """Length of a shortest u-v path, or None for "unreachable"."""
    for vertex in (u, v):
        if vertex not in g.adjacency:
            raise GraphInputError(f"unknown vertex id {vertex}")
    try:
        return nx.shortest_path_length(g.nx_graph, u, v)
    except nx.NetworkXNoPath:
        return None


def validate_path(g: FiniteGraph, path: Sequence[int]) -> PathCheck:
    """Checks that path has distinct vertices and consecutive pairs are edges of g.

    The index of a repeat is the position of the second occurrence; the index
    of a missing edge is the position of its first endpoint.
    """
    if not path:
        return PathCheck(ok=False, index=0, reason="empty path")
    seen: set[int] = set()
    for index, vertex in enumerate(path):
        if vertex not in g.adjacency:
            return PathCheck(ok=False, index=index, reason=f"unknown vertex {vertex}")
        if vertex in seen:
            return PathCheck(ok=False, index=index, reason=f"repeated vertex {vertex}")
        seen.add(vertex)
    for index, (a, b) in enumerate(zip(path, path[1:])):
        if not g.has_edge(a, b):
            return PathCheck(ok=False, index=index, reason=f"{a} and {b} not adjacent")
    return PathCheck(ok=True)


def encode(g: FiniteGraph) -> str:
    """Canonical document: {"vertices":[...],"edges":[[u,v],...],"labels":{...}}."""
    return g.model_dump_json()


def decode(text: str | bytes) -> FiniteGraph:
    """Parses a canonical graph document; edges may arrive in any orientation."""
    try:
        return FiniteGraph.model_validate_json(text)
    except ValidationError as exc:
        first = exc.errors()[0]
        location = ".".join(str(part) for part in first["loc"]) or "document"
        logger.debug(f"graph document rejected at {location}: {first['msg']}")
        raise GraphFormatError(first["msg"], location=location) from exc
