"""
Quasi-transitive locally finite graph families as implicit graphs.

Every family is a neighbor rule on hashable coordinates plus a root, and a
window is the metric ball around the root cut out by BFS.

Canonical neighbor orders (vertex numbering of every window depends on them):
- grid_z2: (x+1, y), (x-1, y), (x, y+1), (x, y-1)
- ladder (Z x K2): (n+1, i), (n-1, i), (n, 1-i)
- line_z(S): n+s, n-s for s in ascending S
- regular_tree(d): parent first, then children in index order
- free_product_demo(k): right multiplication by a1, a1^-1, ..., ak, ak^-1,
  reduced words only
- square(F): base neighbors in order, then the new distance-2 vertices in
  order of discovery through them
"""

import logging
from collections import deque
from collections.abc import Callable, Hashable, Iterator

from .errors import WindowBudgetError
from .models import FamilyKind, FamilySpec, FiniteGraph, Window

logger = logging.getLogger(__name__)

DEFAULT_WINDOW_BUDGET = 50_000

Coord = Hashable
NeighborRule = Callable[[Coord], Iterator[Coord]]


def _grid_neighbors(p: tuple[int, int]) -> Iterator[tuple[int, int]]:
    x, y = p
    yield (x + 1, y)
    yield (x - 1, y)
    yield (x, y + 1)
    yield (x, y - 1)


def _ladder_neighbors(p: tuple[int, int]) -> Iterator[tuple[int, int]]:
    n, i = p
    yield (n + 1, i)
    yield (n - 1, i)
    yield (n, 1 - i)


def _line_neighbors(generators: tuple[int, ...]) -> NeighborRule:
    def neighbors(n: int) -> Iterator[int]:
        for s in generators:
            yield n + s
            yield n - s

    return neighbors


def _tree_neighbors(degree: int) -> NeighborRule:
    def neighbors(word: tuple[int, ...]) -> Iterator[tuple[int, ...]]:
        if word:
            yield word[:-1]
            yield from (word + (i,) for i in range(degree - 1))
        else:
            yield from ((i,) for i in range(degree))

    return neighbors


def _free_group_neighbors(rank: int) -> NeighborRule:
    letters = [g for i in range(1, rank + 1) for g in (i, -i)]

    def neighbors(word: tuple[int, ...]) -> Iterator[tuple[int, ...]]:
        for g in letters:
            if word and word[-1] == -g:
                yield word[:-1]
            else:
                yield word + (g,)

    return neighbors


def _squared(rule: NeighborRule) -> NeighborRule:
    def neighbors(p: Coord) -> Iterator[Coord]:
        seen = {p}
        first = []
        for q in rule(p):
            if q not in seen:
                seen.add(q)
                first.append(q)
                yield q
        for q in first:
            for r in rule(q):
                if r not in seen:
                    seen.add(r)
                    yield r

    return neighbors


def _root_and_rule(spec: FamilySpec) -> tuple[Coord, NeighborRule]:
    kind = spec.family
    if kind is FamilyKind.GRID_Z2:
        root, rule = (0, 0), _grid_neighbors
    elif kind is FamilyKind.LADDER:
        root, rule = (0, 0), _ladder_neighbors
    elif kind is FamilyKind.LINE_Z:
        root, rule = 0, _line_neighbors(spec.generators)
    elif kind is FamilyKind.REGULAR_TREE:
        root, rule = (), _tree_neighbors(spec.degree or 2)
    elif kind is FamilyKind.FREE_PRODUCT_DEMO:
        root, rule = (), _free_group_neighbors(spec.rank or 1)
    else:
        raise ValueError(f"unsupported family {kind}")
    if spec.squared:
        rule = _squared(rule)
    return root, rule


def _coordinate_label(spec: FamilySpec, p: Coord) -> str:
    kind = spec.family
    if kind in (FamilyKind.GRID_Z2, FamilyKind.LADDER):
        return f"{p[0]},{p[1]}"
    if kind is FamilyKind.LINE_Z:
        return str(p)
    if kind is FamilyKind.REGULAR_TREE:
        return "/" + "/".join(str(i) for i in p)
    # free group words: a, b, ... for generators, upper case for inverses
    if not p:
        return "e"
    return "".join(
        chr(ord("a") + abs(g) - 1) if g > 0 else chr(ord("A") + abs(g) - 1) for g in p
    )


def neighbors(spec: FamilySpec, p: Coord) -> list[Coord]:
    """Neighbors of coordinate p in canonical order."""
    _, rule = _root_and_rule(spec)
    return list(rule(p))


def cut_window(
    spec: FamilySpec, radius: int, budget: int = DEFAULT_WINDOW_BUDGET
) -> Window:
    """Returns the exact ball B(root, radius) of the family.

    Vertices are numbered in BFS order from the root (id 0) following the
    family's canonical neighbor order, so cut_window(spec, r) is the induced
    subgraph of cut_window(spec, r + 1) on ids below |B(r)|.
    """
    if radius < 0:
        raise ValueError("radius must be non-negative")
    root, rule = _root_and_rule(spec)
    ids: dict[Coord, int] = {root: 0}
    coords: list[Coord] = [root]
    depths: list[int] = [0]
    queue: deque[Coord] = deque([root])
    while queue:
        p = queue.popleft()
        d = depths[ids[p]]
        if d == radius:
            continue
        for q in rule(p):
            if q in ids:
                continue
            if len(coords) >= budget:
                raise WindowBudgetError(spec.name, radius, budget)
            ids[q] = len(coords)
            coords.append(q)
            depths.append(d + 1)
            queue.append(q)

    edges = set()
    for v, p in enumerate(coords):
        for q in rule(p):
            u = ids.get(q)
            if u is not None and u != v:
                edges.add((min(u, v), max(u, v)))
    labels = {v: _coordinate_label(spec, p) for v, p in enumerate(coords)}
    graph = FiniteGraph(vertices=range(len(coords)), edges=sorted(edges), labels=labels)
    window = Window(
        family=spec,
        graph=graph,
        radius=radius,
        root_id=0,
        boundary=tuple(v for v, d in enumerate(depths) if d == radius),
        depths=tuple(depths),
    )
    logger.debug(
        f"cut {spec.name} at radius {radius}: {len(coords)} vertices, {len(edges)} edges"
    )
    return window


def max_degree(spec: FamilySpec) -> int:
    """Exact maximum degree of the infinite family.

    Every shipped family is vertex-transitive, so the degree of the root is the
    degree everywhere.
    """
    base = spec.base
    if not spec.squared:
        if base.family is FamilyKind.GRID_Z2:
            return 4
        if base.family is FamilyKind.LADDER:
            return 3
        if base.family is FamilyKind.LINE_Z:
            return 2 * len(base.generators)
        if base.family is FamilyKind.REGULAR_TREE:
            return base.degree or 2
        return 2 * (base.rank or 1)
    return len(cut_window(base, 2).graph.vertices) - 1
