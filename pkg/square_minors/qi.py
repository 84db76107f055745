"""
Quasi-isometry certificates and the clique-minor exclusion bound.

Key Functions:
- verify_qi(): checks both QI inequalities on the inner half-radius ball
- ball_bounds() / clique_bound(): the ball-size quantities M_T, M_G and the
  bound max{2 M_T^2 M_G^2, M_G (D_T M_T + 1)}, in a literal and a safe variant
- fiber_check(): compares preimage sizes of the map with M_G
- shipped_certificate(): explicit certificates for the shipped families

Window distances can exceed family distances near the boundary, so pairs are
only checked inside B(root, radius // 2), where window distances are exact.
"""

import logging
import math
from fractions import Fraction
from itertools import combinations

import networkx as nx

from .errors import BoundInputError, QiInputError
from .families import DEFAULT_WINDOW_BUDGET, cut_window
from .models import (
    BallBounds,
    BoundInputs,
    BoundVariant,
    CliqueBound,
    FamilyKind,
    FamilySpec,
    FiberCheck,
    QiCertificate,
    QiCheck,
    Window,
)

logger = logging.getLogger(__name__)


def _inner_ball(w: Window) -> list[int]:
    return [v for v, d in enumerate(w.depths) if d <= w.radius // 2]


def verify_qi(cert: QiCertificate, source: Window, target: Window) -> QiCheck:
    """Checks d_T/gamma - c <= d_G <= gamma d_T + c on inner-ball pairs in id order.

    Returns the first violating pair and which side of the inequality fails.
    """
    missing = [v for v in source.graph.vertices if v not in cert.map]
    if missing:
        raise QiInputError(f"certificate map misses source vertices, first {missing[0]}")
    unknown = sorted({t for t in cert.map.values() if t not in target.graph.adjacency})
    if unknown:
        raise QiInputError(f"certificate maps onto unknown target ids, first {unknown[0]}")

    inner = _inner_ball(source)
    source_distances = {
        u: nx.single_source_shortest_path_length(source.graph.nx_graph, u) for u in inner
    }
    target_distances: dict[int, dict[int, int]] = {}
    checked = 0
    for u, v in combinations(inner, 2):
        if v not in source_distances[u]:
            raise QiInputError("source window must be connected")
        tu, tv = cert.map[u], cert.map[v]
        if tu not in target_distances:
            target_distances[tu] = nx.single_source_shortest_path_length(
                target.graph.nx_graph, tu
            )
        if tv not in target_distances[tu]:
            raise QiInputError("target window must be connected")
        d_g, d_t = source_distances[u][v], target_distances[tu][tv]
        checked += 1
        side = None
        if Fraction(d_t) / cert.gamma - cert.c > d_g:
            side = "lower"
        elif d_g > cert.gamma * d_t + cert.c:
            side = "upper"
        if side:
            logger.info(
                f"QI inequality ({side}) fails at ({u}, {v}): d_G={d_g}, d_T={d_t}"
            )
            return QiCheck(
                ok=False,
                pair=(u, v),
                side=side,
                source_distance=d_g,
                target_distance=d_t,
                pairs_checked=checked,
            )
    return QiCheck(ok=True, pairs_checked=checked)


def _geometric_sum(base: int, top: int) -> int:
    """sum_{i=0}^{top} base^i, zero when top < 0."""
    return sum(base**i for i in range(top + 1))


def ball_bounds(inputs: BoundInputs) -> BallBounds:
    """M_T and M_G for the chosen variant.

    paper_literal: M_T = sum_{i=0}^{gamma+c-2} (D_T-1)^i, M_G = sum_{i=0}^{c-1} (D_G-1)^i.
    safe: M_T = 1 + D_T sum_{i=0}^{gamma+c-2} (D_T-1)^i, M_G = 1 + D_G sum_{i=0}^{c-1} (D_G-1)^i,
    the largest balls of radius gamma+c-1 and c in graphs of those maximum degrees.
    Non-integral gamma+c or c are rounded up for safe and rejected for paper_literal.
    """
    reach = inputs.gamma + inputs.c
    if inputs.variant is BoundVariant.PAPER_LITERAL:
        if reach.denominator != 1 or inputs.c.denominator != 1:
            raise BoundInputError(
                f"paper_literal needs integral gamma+c and c, got gamma={inputs.gamma}, "
                f"c={inputs.c}; round them up to integers"
            )
        m_t = _geometric_sum(inputs.d_t - 1, int(reach) - 2)
        m_g = _geometric_sum(inputs.d_g - 1, int(inputs.c) - 1)
    else:
        m_t = 1 + inputs.d_t * _geometric_sum(inputs.d_t - 1, math.ceil(reach) - 2)
        m_g = 1 + inputs.d_g * _geometric_sum(inputs.d_g - 1, math.ceil(inputs.c) - 1)
    return BallBounds(m_t=m_t, m_g=m_g, degenerate=m_t == 0 or m_g == 0)


def clique_bound(inputs: BoundInputs) -> CliqueBound:
    """n_max = max{2 M_T^2 M_G^2, M_G (D_T M_T + 1)}."""
    balls = ball_bounds(inputs)
    n_max = max(
        2 * balls.m_t**2 * balls.m_g**2,
        balls.m_g * (inputs.d_t * balls.m_t + 1),
    )
    return CliqueBound(
        variant=inputs.variant,
        m_t=balls.m_t,
        m_g=balls.m_g,
        n_max=n_max,
        degenerate=balls.degenerate,
    )


def fiber_check(cert: QiCertificate, source: Window, inputs: BoundInputs) -> FiberCheck:
    """Largest preimage of a target vertex over the inner ball, against M_G."""
    fibers: dict[int, int] = {}
    for v in _inner_ball(source):
        target = cert.map[v]
        fibers[target] = fibers.get(target, 0) + 1
    bound = ball_bounds(inputs).m_g
    worst = min(fibers, key=lambda t: (-fibers[t], t)) if fibers else None
    largest = fibers[worst] if worst is not None else 0
    return FiberCheck(ok=largest <= bound, max_fiber=largest, bound=bound, worst_target=worst)


def is_tree_family(spec: FamilySpec) -> bool:
    if spec.squared:
        return False
    if spec.family is FamilyKind.LINE_Z:
        return spec.generators == (1,)
    return spec.family in (FamilyKind.REGULAR_TREE, FamilyKind.FREE_PRODUCT_DEMO)


def _map_by_label(
    source: Window, target: Window, project=lambda label: label
) -> dict[int, int]:
    by_label = {label: v for v, label in target.graph.labels.items()}
    try:
        return {v: by_label[project(label)] for v, label in source.graph.labels.items()}
    except KeyError as exc:
        raise QiInputError(f"target window has no vertex labelled {exc.args[0]}") from None


def shipped_certificate(
    spec: FamilySpec, radius: int, budget: int = DEFAULT_WINDOW_BUDGET
) -> tuple[QiCertificate, Window, Window]:
    """Certificate, source window and target window for a shipped family.

    - ladder -> line_z(1), (n, i) -> n, gamma = 1, c = 1
    - line_z(S) with 1 in S -> line_z(1), n -> n, gamma = max S, c = 0
    - square(F) -> F, identity on coordinates, gamma = 2, c = 0
    - free_product_demo(k) -> regular_tree(2k), identity on BFS ids
    - trees and line_z(1) -> themselves, identity
    """
    source = cut_window(spec, radius, budget)
    line = FamilySpec.parse("line_z(1)")
    if spec.squared:
        base = spec.base
        target = cut_window(base, 2 * radius, budget)
        cert_map = _map_by_label(source, target)
        gamma, c = Fraction(2), Fraction(0)
    elif spec.family is FamilyKind.LADDER:
        base = line
        target = cut_window(line, radius, budget)
        cert_map = _map_by_label(source, target, lambda label: label.split(",")[0])
        gamma, c = Fraction(1), Fraction(1)
    elif spec.family is FamilyKind.LINE_Z and spec.generators != (1,):
        if 1 not in spec.generators:
            raise QiInputError(f"no shipped certificate for {spec.name}: 1 is not a generator")
        base = line
        stretch = max(spec.generators)
        target = cut_window(line, radius * stretch, budget)
        cert_map = _map_by_label(source, target)
        gamma, c = Fraction(stretch), Fraction(0)
    elif spec.family is FamilyKind.FREE_PRODUCT_DEMO:
        base = FamilySpec(family=FamilyKind.REGULAR_TREE, degree=2 * (spec.rank or 1))
        target = cut_window(base, radius, budget)
        cert_map = {v: v for v in source.graph.vertices}
        gamma, c = Fraction(1), Fraction(0)
    elif is_tree_family(spec):
        base = spec
        target = source
        cert_map = {v: v for v in source.graph.vertices}
        gamma, c = Fraction(1), Fraction(0)
    else:
        raise QiInputError(f"no shipped certificate for {spec.name}")
    cert = QiCertificate(gamma=gamma, c=c, map=cert_map, source=spec, target=base)
    logger.debug(f"shipped certificate {spec.name} -> {base.name} (gamma={gamma}, c={c})")
    return cert, source, target
