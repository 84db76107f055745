"""
Disjoint ray truncations toward one end of a window.

Key Functions:
- disjoint_rays(): m vertex-disjoint, end-coherent rays from the sphere of
  radius r* to the window boundary (vertex-split max-flow, then a greedy
  inward extension toward the root)
- check_bundle(): independent re-check of every RayBundle property
- ray_overlay(): the window document with the bundle attached as labeled paths
- end_degree_profile(): per-radius largest m, a finite-scale thin/thick proxy

Rays are stored root-outward; the tail of a ray at radius r is its suffix
outside B(root, r).
"""

import logging
from collections.abc import Iterable

import networkx as nx
from networkx.algorithms.flow import edmonds_karp

from .errors import RayInputError
from .families import DEFAULT_WINDOW_BUDGET, cut_window
from .graphs import validate_path
from .models import FamilySpec, RayBundle, RayOverlay, StateCheck, Window

logger = logging.getLogger(__name__)

_SOURCE = "source"
_SINK = "sink"


def _outer_components(w: Window, r: int) -> list[list[int]]:
    """Components of the window minus B(root, r), each sorted, ordered by min id."""
    outer = [v for v, d in enumerate(w.depths) if d > r]
    components = nx.connected_components(w.graph.nx_graph.subgraph(outer))
    return sorted((sorted(c) for c in components), key=lambda c: c[0])


def _flow_paths(w: Window, r_star: int, component: list[int], m: int) -> list[list[int]]:
    """Up to m disjoint sphere(r*) -> boundary paths whose other vertices lie in component.

    Every vertex v is split into ("in", v) -> ("out", v) with capacity 1, so
    integral flows decompose into vertex-disjoint paths (Menger).
    """
    adjacency = w.graph.adjacency
    inside = set(component)
    boundary = set(w.boundary)
    sources = [s for s in w.sphere(r_star) if adjacency[s] & inside]
    if not sources:
        return []

    network = nx.DiGraph()
    for s in sources:
        network.add_edge(_SOURCE, ("in", s), capacity=1)
        network.add_edge(("in", s), ("out", s), capacity=1)
        for c in sorted(adjacency[s] & inside):
            network.add_edge(("out", s), ("in", c), capacity=1)
    for v in component:
        network.add_edge(("in", v), ("out", v), capacity=1)
        for u in sorted(adjacency[v] & inside):
            network.add_edge(("out", v), ("in", u), capacity=1)
        if v in boundary:
            network.add_edge(("out", v), _SINK, capacity=1)
    if _SINK not in network:
        return []

    value, flow = nx.maximum_flow(
        network, _SOURCE, _SINK, flow_func=edmonds_karp, cutoff=m
    )
    logger.debug(f"flow from sphere({r_star}) into component at {component[0]}: {value}")

    paths: list[list[int]] = []
    for start in sorted(t for t, f in flow[_SOURCE].items() if f > 0):
        path: list[int] = []
        node = start
        while node != _SINK:
            kind, v = node
            if kind == "in":
                path.append(v)
                node = ("out", v)
            else:
                # unit vertex capacities leave exactly one outgoing unit
                node = next(t for t, f in flow[node].items() if f > 0)
        paths.append(path)
    paths.sort(key=lambda p: p[0])
    return paths[:m]


def _sphere_groups(w: Window) -> list[list[int]]:
    """For r* = radius: boundary vertices grouped by components of the boundary subgraph."""
    subgraph = w.graph.nx_graph.subgraph(w.boundary)
    return sorted((sorted(c) for c in nx.connected_components(subgraph)), key=lambda c: c[0])


def _extend_inward(w: Window, paths: list[list[int]]) -> list[tuple[int, ...]]:
    """Greedily prepends unused neighbors one level closer to the root."""
    adjacency = w.graph.adjacency
    used = {v for p in paths for v in p}
    rays = []
    for path in paths:
        ray = list(path)
        while w.depths[ray[0]] > 0:
            level = w.depths[ray[0]] - 1
            candidates = sorted(
                u for u in adjacency[ray[0]] if w.depths[u] == level and u not in used
            )
            if not candidates:
                break
            ray.insert(0, candidates[0])
            used.add(candidates[0])
        rays.append(tuple(ray))
    return rays


def disjoint_rays(w: Window, m: int, r_star: int) -> RayBundle | None:
    """Finds m disjoint end-coherent ray truncations, or None.

    Components of the window minus B(root, r*) are tried in order of their
    smallest vertex id; the first one carrying m disjoint paths from the
    sphere of radius r* to the boundary wins. None is a statement about this
    window only, never about the infinite graph.
    """
    if m < 1:
        raise RayInputError(f"m must be >= 1, got {m}")
    if not 1 <= r_star <= w.radius:
        raise RayInputError(f"r_star must lie in [1, {w.radius}], got {r_star}")

    if r_star == w.radius:
        candidates = [[[v] for v in group] for group in _sphere_groups(w)]
    else:
        candidates = [
            _flow_paths(w, r_star, component, m)
            for component in _outer_components(w, r_star)
        ]
    for paths in candidates:
        if len(paths) >= m:
            bundle = RayBundle(
                rays=_extend_inward(w, paths[:m]),
                window_radius=w.radius,
                coherence_radius=r_star,
            )
            logger.info(
                f"found {m} disjoint rays in {w.family.name} at radius {w.radius} "
                f"(r*={r_star})"
            )
            return bundle
    logger.info(f"no {m} disjoint rays in {w.family.name} at radius {w.radius}")
    return None


def check_bundle(bundle: RayBundle, w: Window) -> StateCheck:
    """Re-checks disjointness, path validity, endpoints and coherence for every r <= r*."""
    violations: list[str] = []
    r_star = bundle.coherence_radius
    if r_star > w.radius or bundle.window_radius != w.radius:
        violations.append("bundle radii do not fit the window")
    boundary = set(w.boundary)
    seen: dict[int, int] = {}
    for j, ray in enumerate(bundle.rays):
        check = validate_path(w.graph, ray)
        if not check.ok:
            violations.append(f"ray {j} invalid at {check.index}: {check.reason}")
            continue
        for v in ray:
            if v in seen:
                violations.append(f"rays {seen[v]} and {j} share vertex {v}")
            seen[v] = j
        if w.depths[ray[0]] > r_star:
            violations.append(f"ray {j} starts outside B(root, {r_star})")
        if ray[-1] not in boundary:
            violations.append(f"ray {j} does not end on the boundary")

    for r in range(min(r_star, w.radius) + 1):
        component_of = {
            v: index for index, c in enumerate(_outer_components(w, r)) for v in c
        }
        hit = {component_of[v] for ray in bundle.rays for v in ray if v in component_of}
        if len(hit) > 1:
            violations.append(f"rays leave B(root, {r}) in {len(hit)} components")
    return StateCheck(ok=not violations, violations=tuple(violations))


def ray_overlay(bundle: RayBundle, w: Window) -> RayOverlay:
    labels = w.graph.labels
    return RayOverlay(
        graph=w.graph,
        bundle=bundle,
        labeled_rays=tuple(
            tuple(labels.get(v, str(v)) for v in ray) for ray in bundle.rays
        ),
    )


def end_degree_profile(
    spec: FamilySpec, radii: Iterable[int], budget: int = DEFAULT_WINDOW_BUDGET
) -> dict[int, int]:
    """Largest m with disjoint_rays(window, m, radius // 2) succeeding, per radius.

    Monotonicity in m makes binary search exact; the sphere of radius r* caps m.
    """
    profile: dict[int, int] = {}
    for radius in radii:
        if radius < 2:
            raise RayInputError(f"profile radii must be >= 2, got {radius}")
        w = cut_window(spec, radius, budget)
        r_star = radius // 2
        lo, hi = 0, len(w.sphere(r_star))
        while lo < hi:
            mid = (lo + hi + 1) // 2
            if disjoint_rays(w, mid, r_star) is not None:
                lo = mid
            else:
                hi = mid - 1
        profile[radius] = lo
        logger.info(f"end degree profile of {spec.name}: radius {radius} -> {lo}")
    return profile
