"""
Utility functions for documents and DOT renderings.

Key Functions:
- graph_to_dot(): DOT source for a graph, optionally colouring vertex groups
- bundle_to_dot(): window with each ray in its own colour
- model_to_dot(): host with each branch set in its own colour
- write_text(): writes an artifact, creating parent directories

DOT sources are produced with the graphviz package; nothing here needs the
Graphviz binaries, only rendering to images would.
"""

from collections.abc import Sequence
from pathlib import Path

import graphviz

from .models import FiniteGraph, MinorModel, RayBundle, Window

PALETTE = (
    "red",
    "blue",
    "forestgreen",
    "darkorange",
    "purple",
    "gold",
    "deeppink",
    "cyan4",
    "saddlebrown",
    "gray40",
)


def graph_to_dot(
    g: FiniteGraph,
    groups: Sequence[Sequence[int]] = (),
    name: str = "G",
    group_edges: bool = False,
) -> str:
    """Renders g as an undirected DOT graph.

    Vertices of groups[i] are filled with PALETTE[i]; with group_edges, edges
    between consecutive members of a group are drawn in the same colour.
    """
    colour_of: dict[int, str] = {}
    for index, group in enumerate(groups):
        for v in group:
            colour_of[v] = PALETTE[index % len(PALETTE)]
    coloured_edges: dict[tuple[int, int], str] = {}
    if group_edges:
        for index, group in enumerate(groups):
            for a, b in zip(group, group[1:]):
                coloured_edges[(min(a, b), max(a, b))] = PALETTE[index % len(PALETTE)]

    dot = graphviz.Graph(name=name, comment=name)
    dot.attr("node", shape="circle", fontsize="10")
    for v in g.vertices:
        label = g.labels.get(v, str(v))
        if v in colour_of:
            dot.node(str(v), label, style="filled", fillcolor=colour_of[v])
        else:
            dot.node(str(v), label)
    for u, v in g.edges:
        colour = coloured_edges.get((u, v))
        if colour:
            dot.edge(str(u), str(v), color=colour, penwidth="2")
        else:
            dot.edge(str(u), str(v))
    return dot.source


def bundle_to_dot(bundle: RayBundle, window: Window) -> str:
    return graph_to_dot(
        window.graph, groups=bundle.rays, name=f"rays_{bundle.m}", group_edges=True
    )


def model_to_dot(model: MinorModel) -> str:
    groups = [model.branch_sets[x] for x in sorted(model.branch_sets)]
    return graph_to_dot(model.host, groups=groups, name="minor_model")


def write_text(path: Path, text: str) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")
    return path

