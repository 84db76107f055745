"""
Square-minor construction: a K_m minor model in G² from m disjoint rays.

The builder runs one stage per pair of rays. At stage i it looks for a
connector in the window minus the finite set S, reroutes it around the
intermediate rays it crosses by parity splitting (a path in G²), and grows S
so that every ray still agrees with its original outside S. After the last
stage each ray contributes the minimal subpath spanning its connector
endpoints, and each connector is split at its middle edge between the two
branch sets it joins.

Key Functions:
- build_km_minor(): the whole construction, returning a MinorModel in G²
- reroute(): parity rerouting of one connector
- verify_builder_state(): literal check of the stage conditions (i)-(vi)
"""

import logging
from collections.abc import Iterator, Sequence
from itertools import combinations

import networkx as nx

from .errors import ConstructionError
from .graphs import square, validate_path
from .models import (
    BuilderState,
    FiniteGraph,
    MinorModel,
    RayBundle,
    StateCheck,
    Window,
    WitnessEdge,
)

logger = logging.getLogger(__name__)

_SOURCE = -1
_SINK = -2


def reroute(
    q: Sequence[int], state: BuilderState, w: Window
) -> tuple[tuple[int, ...], tuple[tuple[int, ...], ...]]:
    """Reroutes connector q around the intermediate rays it crosses.

    Crossed rays are handled in order of first contact along q. For a ray
    met first at x1 and last at x2, the segment x1..x2 of q is replaced by the
    ray vertices of the ray segment x1..x2 of one offset parity (counted from
    x1), and the ray keeps the other parity. The first common vertex goes to
    the path at the first crossing, and afterwards iff the previous crossing
    left its last common vertex on the ray. Returns the new path and rays;
    both are paths in square(w.graph).
    """
    rays = [list(ray) for ray in state.rays]
    ends = (q[0], q[-1])
    owner = {v: j for j, ray in enumerate(rays) for v in ray}
    target_rays = {owner.get(q[0]), owner.get(q[-1])}
    assert None not in target_rays, "connector endpoints must lie on rays"

    path = list(q)
    processed: set[int] = set()
    last_in_path: bool | None = None
    while True:
        first = next(
            (
                i
                for i in range(1, len(path) - 1)
                if owner.get(path[i]) is not None
                and owner[path[i]] not in target_rays
                and owner[path[i]] not in processed
            ),
            None,
        )
        if first is None:
            break
        j = owner[path[first]]
        last = max(i for i in range(first, len(path) - 1) if owner.get(path[i]) == j)
        ray = rays[j]
        p1, p2 = ray.index(path[first]), ray.index(path[last])
        parity = 0 if last_in_path is None or not last_in_path else 1
        step = 1 if p2 >= p1 else -1
        segment = range(p1, p2 + step, step)
        to_path = [ray[p] for p in segment if abs(p - p1) % 2 == parity]
        to_ray = {ray[p] for p in segment if abs(p - p1) % 2 != parity}
        lo, hi = min(p1, p2), max(p1, p2)
        kept = ray[:lo] + [ray[p] for p in range(lo, hi + 1) if ray[p] in to_ray] + ray[hi + 1 :]
        if not kept:
            raise AssertionError(f"rerouting around ray {j} leaves it empty")
        logger.debug(
            f"crossing with ray {j}: offsets {p1}..{p2}, parity {parity}, "
            f"{len(to_path)} vertices to the path"
        )
        for v in to_path:
            del owner[v]
        rays[j] = kept
        path = path[:first] + to_path + path[last + 1 :]
        last_in_path = abs(p2 - p1) % 2 == parity
        processed.add(j)

    assert (path[0], path[-1]) == ends
    return tuple(path), tuple(tuple(ray) for ray in rays)


def _common_suffix(a: Sequence[int], b: Sequence[int]) -> int:
    n = 0
    while n < min(len(a), len(b)) and a[-1 - n] == b[-1 - n]:
        n += 1
    return n


class SquareMinorBuilder:
    """Runs the stage-by-stage construction for one bundle.

    Besides conditions (i)-(iii), S is kept large enough that the edge from
    the last S vertex of a ray into its tail is an edge of the window graph,
    so a later crossing near the start of a tail still splices in G².
    """

    def __init__(
        self, bundle: RayBundle, w: Window, m: int, check_stages: bool = False
    ):
        if m < 1:
            raise ConstructionError(f"m must be >= 1, got {m}")
        if bundle.m != m:
            raise ConstructionError(f"bundle has {bundle.m} rays, expected {m}")
        self.bundle = bundle
        self.window = w
        self.m = m
        self.check_stages = check_stages
        self.pair_order = tuple(combinations(range(m), 2))
        self.host = square(w.graph)

    def initial_state(self) -> BuilderState:
        return BuilderState(
            stage=0,
            pair_order=self.pair_order,
            separator=frozenset(),
            rays=self.bundle.rays,
            connectors=(),
        )

    def _connector(self, state: BuilderState, k: int, l: int) -> list[int]:
        """Shortest path in window - S from the tail of ray k to the tail of ray l."""
        tails = [
            [v for v in state.rays[j] if v not in state.separator] for j in (k, l)
        ]
        if not tails[0] or not tails[1]:
            raise ConstructionError(
                f"ray {k if not tails[0] else l} has no vertices outside S when "
                f"connecting pair ({k}, {l}); try a larger radius",
                pair=(k, l),
            )
        free = [v for v in self.window.graph.vertices if v not in state.separator]
        graph = self.window.graph.nx_graph.subgraph(free).copy()
        graph.add_edges_from((_SOURCE, v) for v in tails[0])
        graph.add_edges_from((v, _SINK) for v in tails[1])
        try:
            return nx.shortest_path(graph, _SOURCE, _SINK)[1:-1]
        except nx.NetworkXNoPath:
            raise ConstructionError(
                f"no connector between rays {k} and {l} avoids S inside the "
                f"window of radius {self.window.radius}; try a larger radius",
                pair=(k, l),
            ) from None

    def _grow_separator(
        self, separator: set[int], rays: Sequence[Sequence[int]]
    ) -> None:
        """Adds to S the shortest ray prefixes that restore (i)-(iii)."""
        adjacency = self.window.graph.adjacency
        for original, current in zip(self.bundle.rays, rays):
            inside = [i for i, v in enumerate(current) if v in separator]
            start_limit = len(current) - (inside[-1] + 1 if inside else 0)
            tail = min(_common_suffix(current, original), start_limit)
            while 0 < tail < len(current):
                before, first = current[-tail - 1], current[-tail]
                if first in adjacency[before]:
                    break
                tail -= 1
            separator.update(current[: len(current) - tail])
            separator.update(original[: len(original) - tail])

    def stages(self) -> Iterator[BuilderState]:
        """Yields the state after every stage, starting with stage 0."""
        state = self.initial_state()
        yield state
        for index, (k, l) in enumerate(self.pair_order, start=1):
            q = self._connector(state, k, l)
            q_new, rays = reroute(q, state, self.window)
            separator = set(state.separator) | set(q_new)
            self._grow_separator(separator, rays)
            state = BuilderState(
                stage=index,
                pair_order=self.pair_order,
                separator=frozenset(separator),
                rays=rays,
                connectors=state.connectors + (q_new,),
            )
            logger.debug(
                f"stage {index}: pair ({k}, {l}) joined by {len(q_new)} vertices, "
                f"|S|={len(separator)}"
            )
            if self.check_stages:
                check = verify_builder_state(state, self.bundle, self.window)
                assert check.ok, f"stage {index} violates {list(check.violations)}"
            yield state

    def assemble(self, state: BuilderState) -> MinorModel:
        """Branch sets from the final stage: ray subpaths plus connector halves."""
        sets: dict[int, list[int]] = {}
        for j, ray in enumerate(state.rays):
            touched = [
                i for i, v in enumerate(ray) if any(v in (c[0], c[-1]) for c in state.connectors)
            ]
            sets[j] = list(ray[min(touched) : max(touched) + 1]) if touched else list(ray)
        witnesses = []
        owner = {v: j for j, ray in enumerate(state.rays) for v in ray}
        for c in state.connectors:
            k, l = sorted((owner[c[0]], owner[c[-1]]))
            if owner[c[0]] != k:
                c = tuple(reversed(c))
            half = (len(c) + 1) // 2
            sets[k].extend(c[1:half])
            sets[l].extend(c[half:-1])
            witnesses.append(WitnessEdge(x=k, y=l, u=c[half - 1], v=c[half]))
        return MinorModel(
            pattern=FiniteGraph.complete(self.m),
            host=self.host,
            branch_sets={j: tuple(vs) for j, vs in sets.items()},
            witnesses=tuple(sorted(witnesses, key=lambda e: (e.x, e.y))),
        )

    def build(self) -> MinorModel:
        state = None
        for state in self.stages():
            pass
        model = self.assemble(state)
        logger.info(
            f"built K{self.m} model in the square of {self.window.family.name} "
            f"at radius {self.window.radius}"
        )
        return model


def build_km_minor(
    bundle: RayBundle, w: Window, m: int, check_stages: bool = False
) -> MinorModel:
    """K_m minor model in square(w.graph) from a bundle of m disjoint rays."""
    return SquareMinorBuilder(bundle, w, m, check_stages=check_stages).build()


def verify_builder_state(
    state: BuilderState, bundle: RayBundle, w: Window
) -> StateCheck:
    """Checks the stage conditions literally, for every ray index j.

    Violations are tagged with the condition they break: (i)-(vi), or
    "paths" for validity and disjointness.
    """
    host = square(w.graph)
    separator = state.separator
    violations: list[str] = []
    if len(state.rays) != len(bundle.rays):
        return StateCheck(ok=False, violations=("paths: wrong number of rays",))

    ray_vertices: dict[int, int] = {}
    for j, (ray, original) in enumerate(zip(state.rays, bundle.rays)):
        check = validate_path(host, ray)
        if not check.ok:
            violations.append(f"paths: ray {j} invalid in the square: {check.reason}")
        for v in ray:
            if v in ray_vertices:
                violations.append(f"paths: rays {ray_vertices[v]} and {j} share {v}")
            ray_vertices[v] = j
        if [v for v in ray if v not in separator] != [
            v for v in original if v not in separator
        ]:
            violations.append(f"(i) ray {j} differs from its original outside S")
        inside = [v for v in ray if v in separator]
        if inside and inside[-1] not in original:
            violations.append(f"(ii) last S vertex of ray {j} is not on the original ray")
        outside = [i for i, v in enumerate(ray) if v not in separator]
        if outside and outside != list(range(outside[0], len(ray))):
            violations.append(f"(iii) vertices of ray {j} outside S are not a tail")

    connector_vertices: dict[int, int] = {}
    for index, c in enumerate(state.connectors):
        check = validate_path(host, c)
        if not check.ok:
            violations.append(f"paths: connector {index} invalid in the square: {check.reason}")
        for v in c:
            if v in connector_vertices:
                violations.append(
                    f"paths: connectors {connector_vertices[v]} and {index} share {v}"
                )
            connector_vertices[v] = index
        if any(v in ray_vertices for v in c[1:-1]):
            violations.append(f"(iv) connector {index} meets a ray internally")
        if any(v not in separator for v in c):
            violations.append(f"(v) connector {index} leaves S")

    if len(state.connectors) != state.stage:
        violations.append(
            f"(vi) {len(state.connectors)} connectors at stage {state.stage}"
        )
    for index, (k, l) in enumerate(state.pair_order[: state.stage]):
        if index >= len(state.connectors):
            break
        c = state.connectors[index]
        if {ray_vertices.get(c[0]), ray_vertices.get(c[-1])} != {k, l}:
            violations.append(f"(vi) connector {index} does not join rays {k} and {l}")
    return StateCheck(ok=not violations, violations=tuple(violations))
