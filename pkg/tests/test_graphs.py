"""
Tests for the graph-core operations: square, distance, path validation and
the canonical graph document.
"""

import random
from collections import deque

import networkx as nx
import pytest

from square_minors.errors import GraphFormatError, GraphInputError
from square_minors.graphs import decode, distance, encode, square, validate_path
from square_minors.models import FiniteGraph


def path_graph(n: int) -> FiniteGraph:
    return FiniteGraph.from_networkx(nx.path_graph(n))


def cycle_graph(n: int) -> FiniteGraph:
    return FiniteGraph.from_networkx(nx.cycle_graph(n))


def bfs_distances(g: FiniteGraph, source: int) -> dict[int, int]:
    seen = {source: 0}
    queue = deque([source])
    while queue:
        v = queue.popleft()
        for u in g.adjacency[v]:
            if u not in seen:
                seen[u] = seen[v] + 1
                queue.append(u)
    return seen


# --- square ---


def test_square_of_path_joins_vertices_two_apart():
    assert square(path_graph(4)).edges == ((0, 1), (0, 2), (1, 2), (1, 3), (2, 3))


def test_square_of_four_cycle_is_complete():
    assert square(cycle_graph(4)) == FiniteGraph.complete(4)


def test_square_of_star_is_complete():
    star = FiniteGraph.from_networkx(nx.star_graph(4))
    assert square(star) == FiniteGraph.complete(5)


def test_square_keeps_components_apart():
    g = FiniteGraph(vertices=[0, 1, 2, 3], edges=[(0, 1), (2, 3)])
    assert square(g).edges == ((0, 1), (2, 3))


def test_square_keeps_vertices_and_labels():
    g = FiniteGraph(vertices=[0, 1, 2], edges=[(0, 1), (1, 2)], labels={0: "a", 2: "c"})
    squared = square(g)
    assert squared.vertices == g.vertices
    assert squared.labels == g.labels


def test_square_of_empty_graph():
    assert square(FiniteGraph()) == FiniteGraph()


@pytest.mark.parametrize("seed", range(50))
def test_square_matches_all_pairs_bfs(seed):
    rng = random.Random(seed)
    n = rng.randint(1, 12)
    g = FiniteGraph.from_networkx(nx.gnp_random_graph(n, 0.3, seed=seed))
    squared = square(g)
    for u in g.vertices:
        reach = bfs_distances(g, u)
        for v in g.vertices:
            if u < v:
                expected = v in reach and reach[v] <= 2
                assert squared.has_edge(u, v) == expected


# --- distance ---


def test_distance_on_path():
    g = path_graph(5)
    assert distance(g, 0, 4) == 4
    assert distance(g, 2, 2) == 0


def test_distance_unreachable_is_none():
    g = FiniteGraph(vertices=[0, 1, 2], edges=[(0, 1)])
    assert distance(g, 0, 2) is None


def test_distance_unknown_vertex_raises():
    with pytest.raises(GraphInputError):
        distance(path_graph(3), 0, 7)


# --- validate_path ---


def test_validate_path_accepts_a_path():
    assert validate_path(path_graph(4), [0, 1, 2, 3]).ok


def test_validate_path_reports_missing_edge():
    check = validate_path(path_graph(4), [0, 2, 3])
    assert not check.ok
    assert check.index == 0


def test_validate_path_reports_repeat_at_second_occurrence():
    check = validate_path(cycle_graph(4), [0, 1, 2, 3, 0])
    assert not check.ok
    assert check.index == 4
    assert "repeated" in check.reason


def test_validate_path_is_graph_specific():
    g = path_graph(3)
    assert not validate_path(g, [0, 2]).ok
    assert validate_path(square(g), [0, 2]).ok


def test_validate_path_rejects_empty_sequence():
    assert not validate_path(path_graph(2), []).ok


# --- graph documents ---


def test_encode_triangle_canonical_document():
    triangle = FiniteGraph(vertices=[2, 0, 1], edges=[(2, 1), (0, 2), (1, 0)])
    assert encode(triangle) == (
        '{"vertices":[0,1,2],"edges":[[0,1],[0,2],[1,2]],"labels":{}}'
    )


def test_encode_empty_graph():
    assert encode(FiniteGraph()) == '{"vertices":[],"edges":[],"labels":{}}'


def test_decode_accepts_any_edge_orientation():
    g = decode('{"vertices":[0,1,2],"edges":[[2,1],[1,0]]}')
    assert g.edges == ((0, 1), (1, 2))
    assert g.labels == {}


def test_decode_keeps_labels():
    g = decode('{"vertices":[0,1],"edges":[[0,1]],"labels":{"1":"1,0","0":"0,0"}}')
    assert g.labels == {0: "0,0", 1: "1,0"}
    assert encode(g) == encode(decode(encode(g)))


def test_equal_graphs_encode_identically():
    a = FiniteGraph(vertices=[0, 1, 2], edges=[(0, 1), (1, 2)])
    b = FiniteGraph(vertices=[2, 1, 0], edges=[(2, 1), (1, 0)])
    assert a == b
    assert encode(a) == encode(b)


def test_decode_malformed_text():
    with pytest.raises(GraphFormatError) as exc_info:
        decode("not json")
    assert exc_info.value.location == "document"


def test_decode_reports_field_location():
    with pytest.raises(GraphFormatError) as exc_info:
        decode('{"vertices":["a"],"edges":[]}')
    assert exc_info.value.location == "vertices.0"


@pytest.mark.parametrize(
    "document",
    [
        '{"vertices":[0],"edges":[[0,0]]}',
        '{"vertices":[0,1],"edges":[[0,1],[1,0]]}',
        '{"vertices":[0],"edges":[[0,5]]}',
        '{"vertices":[0,0],"edges":[]}',
    ],
)
def test_decode_rejects_non_simple_graphs(document):
    with pytest.raises(GraphFormatError):
        decode(document)
