"""
Minor containment by branch-and-bound search over branch sets.

Key Functions:
- verify_model(): independent re-check of a MinorModel
- has_minor(): yes (with a verified model) / no (exact) / exhausted
- hadwiger_number(): largest n with a K_n minor, or a flagged lower bound

The search works on a reduced host. For a pattern of minimum degree delta,
simplicial vertices of degree below delta never help and are deleted, and
when delta >= 3 a degree-2 vertex can be contracted into either neighbor, so
it is suppressed. Models found on the reduced host are lifted back through
the suppressed paths and re-verified on the original host.

Branch sets grow one vertex at a time. Every pattern vertex is rooted at the
smallest vertex of its branch set; for complete patterns the roots increase
with the rooting order. The first unsatisfied pattern edge xy is repaired by
adding a free neighbor to B_x or to B_y, and each failed choice is excluded
for the remaining siblings.
"""

import logging
import time
from collections import deque
from dataclasses import dataclass, field
from itertools import combinations

import networkx as nx

from .models import (
    FiniteGraph,
    HadwigerResult,
    MinorModel,
    MinorOutcome,
    MinorSearchResult,
    ModelCheck,
    SearchBudget,
    WitnessEdge,
)

logger = logging.getLogger(__name__)

_TIME_CHECK_INTERVAL = 256


def verify_model(host: FiniteGraph, pattern: FiniteGraph, model: MinorModel) -> ModelCheck:
    """True iff branch sets are nonempty, disjoint, connected and realise every pattern edge."""
    violations: list[str] = []
    if model.host != host:
        violations.append("model host differs from the given host")
    if model.pattern != pattern:
        violations.append("model pattern differs from the given pattern")
    if set(model.branch_sets) != set(pattern.vertices):
        violations.append("branch sets are not keyed by the pattern vertices")

    owner: dict[int, int] = {}
    for x, branch in model.branch_sets.items():
        if not branch:
            violations.append(f"branch set {x} is empty")
            continue
        unknown = [v for v in branch if v not in host.adjacency]
        if unknown:
            violations.append(f"branch set {x} has vertices {unknown} outside the host")
            continue
        for v in branch:
            if v in owner:
                violations.append(f"branch sets {owner[v]} and {x} share vertex {v}")
            owner[v] = x
        if not nx.is_connected(host.nx_graph.subgraph(branch)):
            violations.append(f"branch set {x} is not connected")

    for x, y in pattern.edges:
        left = model.branch_sets.get(x, ())
        right = set(model.branch_sets.get(y, ()))
        if not any(u in host.adjacency and host.adjacency[u] & right for u in left):
            violations.append(f"no host edge between branch sets {x} and {y}")
    return ModelCheck(ok=not violations, violations=tuple(violations))


def _witnesses(
    host: FiniteGraph, pattern: FiniteGraph, branch_sets: dict[int, tuple[int, ...]]
) -> tuple[WitnessEdge, ...]:
    witnesses = []
    for x, y in pattern.edges:
        right = set(branch_sets[y])
        u, v = min(
            (u, v) for u in branch_sets[x] for v in host.adjacency[u] if v in right
        )
        witnesses.append(WitnessEdge(x=x, y=y, u=u, v=v))
    return tuple(witnesses)


# --- host reduction ---


@dataclass
class _ReducedHost:
    adjacency: dict[int, set[int]]
    # interior vertices of edges created by suppression, ordered min -> max endpoint
    interiors: dict[tuple[int, int], tuple[int, ...]] = field(default_factory=dict)

    def interior(self, a: int, b: int) -> tuple[int, ...]:
        path = self.interiors.get((min(a, b), max(a, b)), ())
        return path if a < b else tuple(reversed(path))

    def remove(self, v: int) -> None:
        for u in self.adjacency.pop(v):
            self.adjacency[u].discard(v)
            self.interiors.pop((min(u, v), max(u, v)), None)


def _reduce(host: FiniteGraph, min_degree: int) -> _ReducedHost:
    reduced = _ReducedHost({v: set(ns) for v, ns in host.adjacency.items()})
    adjacency = reduced.adjacency
    queue = deque(sorted(adjacency))
    queued = set(queue)
    while queue:
        v = queue.popleft()
        queued.discard(v)
        if v not in adjacency:
            continue
        neighbors = sorted(adjacency[v])
        simplicial = all(b in adjacency[a] for a, b in combinations(neighbors, 2))
        if len(neighbors) < min_degree and simplicial:
            reduced.remove(v)
        elif min_degree >= 3 and len(neighbors) == 2:
            a, b = neighbors
            through = reduced.interior(a, v) + (v,) + reduced.interior(v, b)
            reduced.remove(v)
            if b not in adjacency[a]:
                adjacency[a].add(b)
                adjacency[b].add(a)
                reduced.interiors[(a, b)] = through
        else:
            continue
        for u in neighbors:
            if u in adjacency and u not in queued:
                queue.append(u)
                queued.add(u)
    return reduced


# --- branch-and-bound search ---


class _BudgetExhausted(Exception):
    pass


@dataclass
class _Frame:
    options: list[tuple[int, int, bool]]
    index: int = 0
    applied: tuple[int, int, bool] | None = None
    excluded: list[tuple[int, int]] = field(default_factory=list)


class _Search:
    """Explicit-stack depth-first search for branch sets in the reduced host."""

    def __init__(self, adjacency: dict[int, set[int]], pattern: FiniteGraph, budget: SearchBudget):
        self.adjacency = adjacency
        self.budget = budget
        degree = {x: len(pattern.adjacency[x]) for x in pattern.vertices}
        self.order = sorted(pattern.vertices, key=lambda x: (-degree[x], x))
        rank = {x: i for i, x in enumerate(self.order)}
        self.edges = sorted(
            ((x, y) if rank[x] < rank[y] else (y, x) for x, y in pattern.edges),
            key=lambda e: (rank[e[0]], rank[e[1]]),
        )
        n = len(pattern.vertices)
        self.symmetric = len(pattern.edges) == n * (n - 1) // 2
        self.edge_demand = len(pattern.edges) - n
        self.owner: dict[int, int] = {}
        self.sets: dict[int, list[int]] = {x: [] for x in self.order}
        self.roots: dict[int, int] = {}
        self.root_order: list[int] = []
        self.forbidden: dict[int, set[int]] = {x: set() for x in self.order}
        self.nodes = 0
        self.deadline = time.monotonic() + budget.time_cap

    def allowed(self, v: int, x: int) -> bool:
        return (
            v not in self.owner
            and v not in self.forbidden[x]
            and (x not in self.roots or v > self.roots[x])
        )

    def adjacent(self, x: int, y: int) -> bool:
        right = set(self.sets[y])
        return any(self.adjacency[v] & right for v in self.sets[x])

    def degree_sum_short(self, unrooted: int) -> bool:
        """True when the usable host vertices carry too few edges for any completion.

        A model on vertex set W spends |B_x| - 1 edges inside each branch set and
        one edge per pattern edge between them, |E(P)| + |W| - n in total, and
        |W| is at least the owned vertices plus one root per unrooted set.
        """
        usable = set(self.owner)
        usable.update(
            v
            for v in self.adjacency
            if v not in self.owner and any(self.allowed(v, x) for x in self.order)
        )
        degree_sum = sum(len(self.adjacency[v] & usable) for v in usable)
        return degree_sum < 2 * (self.edge_demand + len(self.owner) + unrooted)

    def reach(self, x: int, y: int) -> dict[int, int] | None:
        """BFS distances from B_x through vertices usable by x or y; None if B_y is unreachable."""
        target = set(self.sets[y])
        distance = {v: 0 for v in self.sets[x]}
        queue = deque(self.sets[x])
        found = False
        while queue:
            v = queue.popleft()
            for u in self.adjacency[v]:
                if u in target:
                    found = True
                elif u not in distance and (self.allowed(u, x) or self.allowed(u, y)):
                    distance[u] = distance[v] + 1
                    queue.append(u)
        return distance if found else None

    def apply(self, option: tuple[int, int, bool]) -> None:
        x, v, is_root = option
        self.owner[v] = x
        self.sets[x].append(v)
        if is_root:
            self.roots[x] = v
            self.root_order.append(x)

    def undo(self, option: tuple[int, int, bool]) -> None:
        x, v, is_root = option
        del self.owner[v]
        self.sets[x].pop()
        if is_root:
            del self.roots[x]
            self.root_order.pop()

    def root_options(self, x: int) -> list[tuple[int, int, bool]]:
        floor = self.roots[self.root_order[-1]] if self.symmetric and self.root_order else -1
        return [
            (x, v, True)
            for v in sorted(self.adjacency)
            if v > floor and v not in self.owner and v not in self.forbidden[x]
        ]

    def expand(self) -> list[tuple[int, int, bool]] | None:
        """Options at the current node: None when solved, [] when pruned."""
        unrooted = [x for x in self.order if x not in self.roots]
        if len(unrooted) > len(self.adjacency) - len(self.owner):
            return []
        if self.degree_sum_short(len(unrooted)):
            return []
        pending = None
        for x, y in self.edges:
            if x in self.roots and y in self.roots and not self.adjacent(x, y):
                if self.reach(x, y) is None:
                    return []
                if pending is None:
                    pending = (x, y)
        for x, y in self.edges:
            if x not in self.roots:
                return self.root_options(x)
            if y not in self.roots:
                return self.root_options(y)
            if (x, y) == pending:
                break
        if pending is None:
            if unrooted:
                return self.root_options(unrooted[0])
            return None

        x, y = pending
        toward_y = self.reach(y, x) or {}
        toward_x = self.reach(x, y) or {}
        options = []
        for side, other_distance in ((x, toward_y), (y, toward_x)):
            frontier = {
                u
                for v in self.sets[side]
                for u in self.adjacency[v]
                if self.allowed(u, side)
            }
            options.extend(
                (other_distance.get(u, len(self.adjacency)), side != x, u, side)
                for u in frontier
            )
        options.sort()
        return [(side, u, False) for _, _, u, side in options]

    def tick(self) -> None:
        self.nodes += 1
        if self.nodes > self.budget.max_nodes:
            raise _BudgetExhausted
        if self.nodes % _TIME_CHECK_INTERVAL == 0 and time.monotonic() > self.deadline:
            raise _BudgetExhausted

    def run(self) -> dict[int, tuple[int, ...]] | None:
        """Branch sets of a model, None if none exists; raises _BudgetExhausted."""
        options = self.expand()
        if options is None:
            return self.solution()
        stack = [_Frame(options)]
        while stack:
            frame = stack[-1]
            if frame.applied is not None:
                x, v, is_root = frame.applied
                self.undo(frame.applied)
                frame.applied = None
                if not is_root:
                    self.forbidden[x].add(v)
                    frame.excluded.append((x, v))
            # skip options invalidated by sibling exclusions
            while frame.index < len(frame.options):
                x, v, _ = frame.options[frame.index]
                if self.allowed(v, x):
                    break
                frame.index += 1
            if frame.index >= len(frame.options):
                for x, v in frame.excluded:
                    self.forbidden[x].discard(v)
                stack.pop()
                continue
            option = frame.options[frame.index]
            frame.index += 1
            self.tick()
            self.apply(option)
            frame.applied = option
            children = self.expand()
            if children is None:
                return self.solution()
            stack.append(_Frame(children))
        return None

    def solution(self) -> dict[int, tuple[int, ...]]:
        return {x: tuple(sorted(vs)) for x, vs in self.sets.items()}


def _lift(
    reduced: _ReducedHost,
    pattern: FiniteGraph,
    branch_sets: dict[int, tuple[int, ...]],
) -> dict[int, tuple[int, ...]]:
    """Adds suppressed vertices back so the model holds in the original host."""
    lifted = {x: set(vs) for x, vs in branch_sets.items()}
    owner = {v: x for x, vs in branch_sets.items() for v in vs}
    for x, vs in branch_sets.items():
        for a in vs:
            for b in reduced.adjacency[a]:
                if a < b and owner.get(b) == x:
                    lifted[x].update(reduced.interior(a, b))
    for x, y in pattern.edges:
        candidates = sorted(
            (len(reduced.interior(a, b)), a, b)
            for a in branch_sets[x]
            for b in reduced.adjacency[a]
            if owner.get(b) == y
        )
        _, a, b = candidates[0]
        lifted[x].update(reduced.interior(a, b))
    return {x: tuple(sorted(vs)) for x, vs in lifted.items()}


def has_minor(
    host: FiniteGraph, pattern: FiniteGraph, budget: SearchBudget | None = None
) -> MinorSearchResult:
    """Decides whether pattern is a minor of host within the budget.

    "exhausted" is inconclusive and is never reported as "no".
    """
    budget = budget or SearchBudget()
    if not pattern.vertices:
        raise ValueError("pattern must have at least one vertex")
    min_degree = min(len(pattern.adjacency[x]) for x in pattern.vertices)
    reduced = _reduce(host, min_degree)
    size = len(reduced.adjacency)
    edge_count = sum(len(ns) for ns in reduced.adjacency.values()) // 2
    logger.debug(
        f"host reduced from {len(host.vertices)} to {size} vertices for a pattern "
        f"of minimum degree {min_degree}"
    )
    if size < len(pattern.vertices) or edge_count < len(pattern.edges):
        return MinorSearchResult(outcome=MinorOutcome.NO)

    search = _Search(reduced.adjacency, pattern, budget)
    try:
        found = search.run()
    except _BudgetExhausted:
        logger.warning(
            f"minor search exhausted its budget after {search.nodes} nodes "
            f"({len(pattern.vertices)}-vertex pattern, {size}-vertex reduced host)"
        )
        return MinorSearchResult(outcome=MinorOutcome.EXHAUSTED, nodes=search.nodes)
    if found is None:
        return MinorSearchResult(outcome=MinorOutcome.NO, nodes=search.nodes)

    branch_sets = _lift(reduced, pattern, found)
    model = MinorModel(
        pattern=pattern,
        host=host,
        branch_sets=branch_sets,
        witnesses=_witnesses(host, pattern, branch_sets),
    )
    check = verify_model(host, pattern, model)
    assert check.ok, f"search produced an invalid model: {list(check.violations)}"
    return MinorSearchResult(outcome=MinorOutcome.YES, model=model, nodes=search.nodes)


def hadwiger_number(host: FiniteGraph, budget: SearchBudget | None = None) -> HadwigerResult:
    """Largest n with K_n a minor of host; a lower bound when a search runs out of budget.

    Each has_minor call gets the full budget. Sizes with more pattern edges
    than host edges are answered "no" without a search.
    """
    if not host.vertices:
        raise ValueError("host must have at least one vertex")
    budget = budget or SearchBudget()
    per_n: dict[int, MinorOutcome] = {1: MinorOutcome.YES}
    value, exact, nodes = 1, True, 0
    n = 2
    while True:
        if n * (n - 1) // 2 > len(host.edges) or n > len(host.vertices):
            per_n[n] = MinorOutcome.NO
            break
        result = has_minor(host, FiniteGraph.complete(n), budget)
        nodes += result.nodes
        per_n[n] = result.outcome
        if result.outcome is MinorOutcome.YES:
            value = n
            n += 1
            continue
        exact = result.outcome is MinorOutcome.NO
        break
    logger.info(
        f"hadwiger number {'=' if exact else '>='} {value} on {len(host.vertices)} vertices"
    )
    return HadwigerResult(value=value, exact=exact, nodes=nodes, per_n=per_n)
