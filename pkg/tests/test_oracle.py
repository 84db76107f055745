"""
Tests for the minor oracle: model verification, minor search and Hadwiger numbers.

Small hosts are cross-checked against a naive enumeration of branch-set
assignments.
"""

from itertools import product

import networkx as nx
import pytest
from networkx.algorithms import isomorphism

from square_minors.families import cut_window
from square_minors.graphs import square
from square_minors.models import (
    FamilySpec,
    FiniteGraph,
    MinorModel,
    MinorOutcome,
    SearchBudget,
)
from square_minors.oracle import hadwiger_number, has_minor, verify_model


def graph(nx_graph: nx.Graph) -> FiniteGraph:
    return FiniteGraph.from_networkx(nx.convert_node_labels_to_integers(nx_graph))


C4 = graph(nx.cycle_graph(4))
K3, K4, K5, K6 = (FiniteGraph.complete(n) for n in (3, 4, 5, 6))
PETERSEN = graph(nx.petersen_graph())


def naive_has_minor(host: FiniteGraph, pattern: FiniteGraph) -> bool:
    """Tries every assignment of host vertices to branch sets (or to none)."""
    k = len(pattern.vertices)
    unused = k
    for assignment in product(range(k + 1), repeat=len(host.vertices)):
        sets = {x: [v for v, a in zip(host.vertices, assignment) if a == x] for x in range(k)}
        if any(not vs for vs in sets.values()):
            continue
        if not all(nx.is_connected(host.nx_graph.subgraph(vs)) for vs in sets.values()):
            continue
        owner = {v: a for v, a in zip(host.vertices, assignment) if a != unused}
        realised = {
            (min(owner[u], owner[v]), max(owner[u], owner[v]))
            for u, v in host.edges
            if u in owner and v in owner and owner[u] != owner[v]
        }
        if all(edge in realised for edge in pattern.edges):
            return True
    return False


# --- verify_model ---


def test_verify_model_accepts_contracted_cycle():
    model = MinorModel(pattern=K3, host=C4, branch_sets={0: (0, 1), 1: (2,), 2: (3,)})
    assert verify_model(C4, K3, model).ok


def test_verify_model_rejects_missing_edge():
    model = MinorModel(pattern=K3, host=C4, branch_sets={0: (0,), 1: (2,), 2: (3,)})
    check = verify_model(C4, K3, model)
    assert not check.ok
    assert any("no host edge" in v for v in check.violations)


def test_verify_model_rejects_disconnected_branch_set():
    model = MinorModel(pattern=K3, host=C4, branch_sets={0: (0, 2), 1: (1,), 2: (3,)})
    check = verify_model(C4, K3, model)
    assert any("not connected" in v for v in check.violations)


def test_verify_model_rejects_overlapping_branch_sets():
    model = MinorModel(pattern=K3, host=C4, branch_sets={0: (0, 1), 1: (1, 2), 2: (3,)})
    check = verify_model(C4, K3, model)
    assert any("share" in v for v in check.violations)


def test_verify_model_rejects_empty_branch_set():
    model = MinorModel(pattern=K3, host=C4, branch_sets={0: (0, 1), 1: (), 2: (3,)})
    assert not verify_model(C4, K3, model).ok


# --- has_minor ---


@pytest.mark.parametrize(
    "host,pattern,outcome",
    [
        (C4, K3, MinorOutcome.YES),
        (C4, K4, MinorOutcome.NO),
        (K5, K5, MinorOutcome.YES),
        (PETERSEN, K5, MinorOutcome.YES),
        (K4, C4, MinorOutcome.YES),
        (graph(nx.path_graph(5)), K3, MinorOutcome.NO),
    ],
)
def test_has_minor_corpus(host, pattern, outcome):
    result = has_minor(host, pattern)
    assert result.outcome is outcome
    if outcome is MinorOutcome.YES:
        assert verify_model(host, pattern, result.model).ok
    else:
        assert result.model is None


def test_ladder_window_has_no_k4():
    w = cut_window(FamilySpec.parse("ladder"), 8)
    assert has_minor(w.graph, K4).outcome is MinorOutcome.NO


def test_square_tree_has_no_k5():
    w = cut_window(FamilySpec.parse("square(regular_tree(3))"), 2)
    assert has_minor(w.graph, K5).outcome is MinorOutcome.NO


def test_suppressed_vertices_are_lifted_back():
    subdivided = nx.Graph()
    for a, b in nx.complete_graph(4).edges:
        middle = f"{a}-{b}"
        subdivided.add_edge(a, middle)
        subdivided.add_edge(middle, b)
    host = graph(subdivided)
    result = has_minor(host, K4)
    assert result.outcome is MinorOutcome.YES
    assert verify_model(host, K4, result.model).ok
    assert sum(len(vs) for vs in result.model.branch_sets.values()) == 10


@pytest.mark.parametrize(
    "host",
    [
        graph(nx.cycle_graph(5)),
        graph(nx.wheel_graph(6)),
        graph(nx.complete_bipartite_graph(3, 3)),
        graph(nx.circular_ladder_graph(3)),
        graph(nx.star_graph(5)),
        graph(nx.path_graph(6)),
        graph(nx.complete_graph(4)),
        square(graph(nx.path_graph(6))),
        graph(nx.ladder_graph(3)),
    ],
)
@pytest.mark.parametrize(
    "pattern",
    [graph(nx.path_graph(3)), K3, graph(nx.cycle_graph(4)), K4],
)
def test_has_minor_matches_naive_enumeration(host, pattern):
    result = has_minor(host, pattern)
    assert result.outcome is not MinorOutcome.EXHAUSTED
    assert (result.outcome is MinorOutcome.YES) == naive_has_minor(host, pattern)


def contraction_has_minor(host: FiniteGraph, pattern: FiniteGraph) -> bool:
    """Contracts every edge subset of host and looks for pattern as a subgraph of the quotient."""
    index = {v: i for i, v in enumerate(host.vertices)}
    k = len(pattern.vertices)
    seen = set()
    for mask in range(1 << len(host.edges)):
        parent = list(range(len(host.vertices)))

        def find(i: int) -> int:
            while parent[i] != i:
                parent[i] = parent[parent[i]]
                i = parent[i]
            return i

        for bit, (u, v) in enumerate(host.edges):
            if mask >> bit & 1:
                parent[find(index[u])] = find(index[v])
        classes = tuple(find(i) for i in range(len(host.vertices)))
        if classes in seen:
            continue
        seen.add(classes)
        quotient = nx.Graph()
        quotient.add_nodes_from(set(classes))
        quotient.add_edges_from(
            (classes[index[u]], classes[index[v]])
            for u, v in host.edges
            if classes[index[u]] != classes[index[v]]
        )
        if quotient.number_of_nodes() < k or quotient.number_of_edges() < len(pattern.edges):
            continue
        if isomorphism.GraphMatcher(quotient, pattern.nx_graph).subgraph_is_monomorphic():
            return True
    return False


@pytest.mark.parametrize(
    "host,pattern",
    [
        (PETERSEN, K5),
        (PETERSEN, K6),
        (PETERSEN, graph(nx.complete_bipartite_graph(3, 3))),
        (K5, K5),
        (C4, K5),
        (graph(nx.circular_ladder_graph(4)), K4),
    ],
)
def test_has_minor_matches_contraction_search(host, pattern):
    result = has_minor(host, pattern)
    assert result.outcome is not MinorOutcome.EXHAUSTED
    assert (result.outcome is MinorOutcome.YES) == contraction_has_minor(host, pattern)


def test_petersen_has_no_k6_within_a_small_budget():
    # 15 host edges leave no room to grow a branch set past its root
    result = has_minor(PETERSEN, K6, SearchBudget(max_nodes=5000))
    assert result.outcome is MinorOutcome.NO


@pytest.mark.parametrize(
    "host",
    [
        PETERSEN,
        C4,
        graph(nx.wheel_graph(6)),
        square(graph(nx.path_graph(6))),
        graph(nx.ladder_graph(4)),
    ],
)
def test_clique_minors_are_monotone(host):
    outcomes = [has_minor(host, FiniteGraph.complete(n)).outcome for n in range(1, 8)]
    assert MinorOutcome.EXHAUSTED not in outcomes
    found = [outcome is MinorOutcome.YES for outcome in outcomes]
    assert found == sorted(found, reverse=True)
    assert hadwiger_number(host).value == sum(found)


@pytest.mark.parametrize(
    "host",
    [
        graph(nx.wheel_graph(6)),
        graph(nx.circular_ladder_graph(3)),
        graph(nx.complete_bipartite_graph(3, 3)),
    ],
)
@pytest.mark.parametrize("pattern", [K4, graph(nx.cycle_graph(4))])
def test_minors_survive_adding_an_edge(host, pattern):
    full = has_minor(host, pattern)
    for u, v in host.edges:
        smaller = host.nx_graph.copy()
        smaller.remove_edge(u, v)
        result = has_minor(FiniteGraph.from_networkx(smaller), pattern)
        if result.outcome is MinorOutcome.YES:
            assert full.outcome is MinorOutcome.YES
            assert verify_model(host, pattern, result.model.model_copy(update={"host": host})).ok


def test_exhausted_budget_is_not_no():
    result = has_minor(PETERSEN, K5, SearchBudget(max_nodes=1))
    assert result.outcome is MinorOutcome.EXHAUSTED
    assert result.model is None


def test_search_is_deterministic():
    first = has_minor(PETERSEN, K5)
    second = has_minor(PETERSEN, K5)
    assert first.model == second.model


# --- hadwiger_number ---


@pytest.mark.parametrize(
    "host,value",
    [
        (K5, 5),
        (C4, 3),
        (graph(nx.path_graph(4)), 2),
        (FiniteGraph(vertices=[0]), 1),
    ],
)
def test_hadwiger_number(host, value):
    result = hadwiger_number(host)
    assert result.exact
    assert result.value == value


@pytest.mark.parametrize("radius", [4, 8, 12])
def test_ladder_hadwiger_number_is_three(radius):
    w = cut_window(FamilySpec.parse("ladder"), radius)
    result = hadwiger_number(w.graph)
    assert (result.value, result.exact) == (3, True)
    assert result.per_n[4] is MinorOutcome.NO


def test_hadwiger_lower_bound_when_exhausted():
    result = hadwiger_number(PETERSEN, SearchBudget(max_nodes=1))
    assert not result.exact
    assert result.value >= 1
    assert MinorOutcome.EXHAUSTED in result.per_n.values()
