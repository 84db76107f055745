"""
Pydantic data models for the square-minors toolkit.

This module defines the data structures shared by every stage of the
pipeline, with validation and canonical JSON serialization:

Model Categories:
- Graph values (FiniteGraph, PathCheck)
- Families and windows (FamilyKind, FamilySpec, Window)
- Rays and the square-minor construction (RayBundle, BuilderState, StateCheck)
- Minor models and the oracle (MinorModel, WitnessEdge, ModelCheck,
  SearchBudget, MinorOutcome, MinorSearchResult, HadwigerResult)
- Quasi-isometry bounds (QiCertificate, QiCheck, FiberCheck, BoundVariant,
  BoundInputs, BallBounds, CliqueBound)
- Experiments (ExperimentKind, ExperimentConfig, ExperimentRow, RowTiming,
  ThickSummary, TreeSummary, ExperimentReport)

Value types are frozen. Documents are produced with model_dump_json and read
back with model_validate_json; equal values serialize byte-identically.
"""

import re
from enum import Enum
from fractions import Fraction
from functools import cached_property
from typing import Any

import networkx as nx
from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    NonNegativeInt,
    PositiveFloat,
    PositiveInt,
    field_validator,
    model_serializer,
    model_validator,
)


class FiniteGraph(BaseModel):
    """Immutable simple undirected graph on integer vertex ids."""

    model_config = ConfigDict(frozen=True)

    vertices: tuple[NonNegativeInt, ...] = Field(
        default=(), description="Vertex ids in ascending order."
    )
    edges: tuple[tuple[NonNegativeInt, NonNegativeInt], ...] = Field(
        default=(), description="Edges as (smaller id, larger id), sorted."
    )
    labels: dict[NonNegativeInt, str] = Field(
        default_factory=dict, description="Optional opaque coordinate tags."
    )

    @model_validator(mode="before")
    @classmethod
    def _canonical_order(cls, data: Any) -> Any:
        """Sorts vertices, orients every edge small-to-large and sorts the edges."""
        if not isinstance(data, dict):
            return data
        data = dict(data)
        if "vertices" in data and data["vertices"] is not None:
            vertices = list(data["vertices"])
            if all(isinstance(v, int) for v in vertices):
                if len(set(vertices)) != len(vertices):
                    raise ValueError("duplicate vertex id")
                data["vertices"] = sorted(vertices)
        if "edges" in data and data["edges"] is not None:
            edges = []
            for edge in data["edges"]:
                pair = list(edge)
                if len(pair) != 2:
                    raise ValueError(f"edge {pair} does not have two endpoints")
                u, v = pair
                if isinstance(u, int) and isinstance(v, int) and u > v:
                    u, v = v, u
                edges.append((u, v))
            if all(isinstance(u, int) and isinstance(v, int) for u, v in edges):
                edges.sort()
            data["edges"] = edges
        if isinstance(data.get("labels"), dict):
            data["labels"] = dict(
                sorted(data["labels"].items(), key=lambda item: int(item[0]))
            )
        return data

    @model_validator(mode="after")
    def _simple_graph(self) -> "FiniteGraph":
        known = set(self.vertices)
        seen: set[tuple[int, int]] = set()
        for u, v in self.edges:
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            if u not in known or v not in known:
                raise ValueError(f"edge ({u}, {v}) has an endpoint outside vertices")
            if (u, v) in seen:
                raise ValueError(f"parallel edge ({u}, {v})")
            seen.add((u, v))
        stray = [v for v in self.labels if v not in known]
        if stray:
            raise ValueError(f"labels for unknown vertices {stray}")
        return self

    @cached_property
    def nx_graph(self) -> nx.Graph:
        """A networkx view of the graph, built once per value."""
        graph = nx.Graph()
        graph.add_nodes_from(self.vertices)
        graph.add_edges_from(self.edges)
        return graph

    @cached_property
    def adjacency(self) -> dict[int, frozenset[int]]:
        neighbors: dict[int, set[int]] = {v: set() for v in self.vertices}
        for u, v in self.edges:
            neighbors[u].add(v)
            neighbors[v].add(u)
        return {v: frozenset(ns) for v, ns in neighbors.items()}

    def has_edge(self, u: int, v: int) -> bool:
        return v in self.adjacency.get(u, ())

    @classmethod
    def from_networkx(
        cls, graph: nx.Graph, labels: dict[int, str] | None = None
    ) -> "FiniteGraph":
        return cls(
            vertices=list(graph.nodes),
            edges=[tuple(edge) for edge in graph.edges],
            labels=labels or {},
        )

    @classmethod
    def complete(cls, n: int) -> "FiniteGraph":
        """K_n on ids 0..n-1."""
        return cls.from_networkx(nx.complete_graph(n))


class PathCheck(BaseModel):
    """Outcome of validating a vertex sequence as a path."""

    model_config = ConfigDict(frozen=True)

    ok: bool
    index: int | None = Field(None, description="Position of the first violation.")
    reason: str | None = None


# --- Families and windows ---


class FamilyKind(str, Enum):
    GRID_Z2 = "grid_z2"
    REGULAR_TREE = "regular_tree"
    LINE_Z = "line_z"
    LADDER = "ladder"
    FREE_PRODUCT_DEMO = "free_product_demo"


_FAMILY_NAME = re.compile(r"^\s*([a-z_0-9]+)\s*(?:\(\s*([0-9,\s]*)\s*\))?\s*$")
_SQUARE_NAME = re.compile(r"^\s*square\s*\((.*)\)\s*$")


def _parse_family_name(text: str) -> dict[str, Any]:
    squared = False
    outer = _SQUARE_NAME.match(text)
    if outer:
        squared = True
        text = outer.group(1)
    match = _FAMILY_NAME.match(text)
    if not match:
        raise ValueError(f"cannot parse family name {text!r}")
    kind, raw_args = match.group(1), match.group(2)
    args = [int(a) for a in raw_args.split(",") if a.strip()] if raw_args else []
    data: dict[str, Any] = {"family": kind, "squared": squared}
    if kind == FamilyKind.REGULAR_TREE.value:
        if len(args) != 1:
            raise ValueError("regular_tree takes exactly one degree argument")
        data["degree"] = args[0]
    elif kind == FamilyKind.FREE_PRODUCT_DEMO.value:
        if len(args) != 1:
            raise ValueError("free_product_demo takes exactly one rank argument")
        data["rank"] = args[0]
    elif kind == FamilyKind.LINE_Z.value:
        data["generators"] = args or [1]
    elif args:
        raise ValueError(f"{kind} takes no arguments")
    return data


class FamilySpec(BaseModel):
    """Generator description of an implicit locally finite graph family.

    Written and read as its canonical name, e.g. ``regular_tree(3)``,
    ``line_z(1,2)`` or ``square(ladder)``.
    """

    model_config = ConfigDict(frozen=True)

    family: FamilyKind
    degree: int | None = Field(None, description="d for regular_tree(d).")
    generators: tuple[PositiveInt, ...] = Field(
        default=(), description="Generator set S for line_z(S)."
    )
    rank: int | None = Field(None, description="k for free_product_demo(k).")
    squared: bool = Field(False, description="Use the square of the family.")

    @model_validator(mode="before")
    @classmethod
    def _from_name(cls, data: Any) -> Any:
        if isinstance(data, str):
            return _parse_family_name(data)
        return data

    @model_validator(mode="after")
    def _parameters_fit_family(self) -> "FamilySpec":
        if self.family is FamilyKind.REGULAR_TREE:
            if self.degree is None or self.degree < 2:
                raise ValueError("regular_tree requires degree d >= 2")
        elif self.degree is not None:
            raise ValueError("degree only applies to regular_tree")
        if self.family is FamilyKind.LINE_Z:
            if not self.generators:
                raise ValueError("line_z requires a non-empty generator set")
            if list(self.generators) != sorted(set(self.generators)):
                object.__setattr__(
                    self, "generators", tuple(sorted(set(self.generators)))
                )
        elif self.generators:
            raise ValueError("generators only apply to line_z")
        if self.family is FamilyKind.FREE_PRODUCT_DEMO:
            if self.rank is None or self.rank < 1:
                raise ValueError("free_product_demo requires rank k >= 1")
        elif self.rank is not None:
            raise ValueError("rank only applies to free_product_demo")
        return self

    @property
    def name(self) -> str:
        if self.family is FamilyKind.REGULAR_TREE:
            base = f"regular_tree({self.degree})"
        elif self.family is FamilyKind.LINE_Z:
            base = f"line_z({','.join(str(s) for s in self.generators)})"
        elif self.family is FamilyKind.FREE_PRODUCT_DEMO:
            base = f"free_product_demo({self.rank})"
        else:
            base = self.family.value
        return f"square({base})" if self.squared else base

    @property
    def base(self) -> "FamilySpec":
        """The unsquared family."""
        return self.model_copy(update={"squared": False}) if self.squared else self

    @classmethod
    def parse(cls, text: str) -> "FamilySpec":
        return cls.model_validate(text)

    @model_serializer(mode="plain")
    def _as_name(self) -> str:
        return self.name

    def __str__(self) -> str:
        return self.name


class Window(BaseModel):
    """The ball B(root, radius) of a family, numbered in BFS order."""

    model_config = ConfigDict(frozen=True)

    family: FamilySpec
    graph: FiniteGraph
    radius: NonNegativeInt
    root_id: NonNegativeInt = 0
    boundary: tuple[int, ...] = Field(
        default=(), description="Vertices at distance exactly radius from the root."
    )
    depths: tuple[int, ...] = Field(
        default=(), description="Distance from the root, indexed by vertex id."
    )

    def sphere(self, r: int) -> tuple[int, ...]:
        return tuple(v for v, d in enumerate(self.depths) if d == r)


# --- Rays and the square-minor construction ---


class RayBundle(BaseModel):
    """m pairwise disjoint ray truncations toward one end of a window."""

    model_config = ConfigDict(frozen=True)

    rays: tuple[tuple[int, ...], ...]
    window_radius: NonNegativeInt
    coherence_radius: NonNegativeInt = Field(
        ..., description="r*: rays are end-coherent for every r <= r*."
    )

    @property
    def m(self) -> int:
        return len(self.rays)


class RayOverlay(BaseModel):
    """A window's graph document with a ray bundle drawn on it."""

    model_config = ConfigDict(frozen=True)

    graph: FiniteGraph
    bundle: RayBundle
    labeled_rays: tuple[tuple[str, ...], ...] = Field(
        default=(), description="Each ray as the sequence of its vertex labels."
    )


class BuilderState(BaseModel):
    """One stage of the pairwise-connection construction."""

    model_config = ConfigDict(frozen=True)

    stage: NonNegativeInt
    pair_order: tuple[tuple[int, int], ...]
    separator: frozenset[int] = Field(
        default=frozenset(), description="The finite vertex set S of this stage."
    )
    rays: tuple[tuple[int, ...], ...]
    connectors: tuple[tuple[int, ...], ...] = Field(
        default=(), description="connectors[j] joins the rays of pair_order[j]."
    )


class StateCheck(BaseModel):
    model_config = ConfigDict(frozen=True)

    ok: bool
    violations: tuple[str, ...] = ()


# --- Minor models and the oracle ---


class WitnessEdge(BaseModel):
    """Host edge uv realising pattern edge xy (u in G_x, v in G_y)."""

    model_config = ConfigDict(frozen=True)

    x: int
    y: int
    u: int
    v: int


class MinorModel(BaseModel):
    """Branch sets certifying that pattern is a minor of host."""

    model_config = ConfigDict(frozen=True)

    pattern: FiniteGraph
    host: FiniteGraph
    branch_sets: dict[int, tuple[int, ...]]
    witnesses: tuple[WitnessEdge, ...] = ()

    @field_validator("branch_sets", mode="after")
    @classmethod
    def _sorted_sets(cls, value: dict[int, tuple[int, ...]]) -> dict[int, tuple[int, ...]]:
        return {x: tuple(sorted(value[x])) for x in sorted(value)}


class ModelCheck(BaseModel):
    model_config = ConfigDict(frozen=True)

    ok: bool
    violations: tuple[str, ...] = ()


class SearchBudget(BaseModel):
    model_config = ConfigDict(frozen=True)

    max_nodes: PositiveInt = Field(1_000_000, description="Search-tree node cap.")
    time_cap: PositiveFloat = Field(60.0, description="Wall-clock cap in seconds.")


class MinorOutcome(str, Enum):
    YES = "yes"
    NO = "no"
    EXHAUSTED = "exhausted"


class MinorSearchResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    outcome: MinorOutcome
    model: MinorModel | None = None
    nodes: int = 0


class HadwigerResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    value: int = Field(..., description="Largest n with a confirmed K_n minor.")
    exact: bool = Field(..., description="False when value is only a lower bound.")
    nodes: int = 0
    per_n: dict[int, MinorOutcome] = Field(default_factory=dict)


# --- Quasi-isometry bounds ---


class QiCertificate(BaseModel):
    """A vertex map between two windows with constants (gamma, c)."""

    model_config = ConfigDict(frozen=True)

    gamma: Fraction = Field(Fraction(1), description="Multiplicative constant >= 1.")
    c: Fraction = Field(Fraction(0), description="Additive constant >= 0.")
    map: dict[int, int] = Field(..., description="Source vertex id -> target vertex id.")
    source: FamilySpec
    target: FamilySpec

    @field_validator("gamma")
    @classmethod
    def _gamma_at_least_one(cls, value: Fraction) -> Fraction:
        if value < 1:
            raise ValueError("gamma must be >= 1")
        return value

    @field_validator("c")
    @classmethod
    def _c_non_negative(cls, value: Fraction) -> Fraction:
        if value < 0:
            raise ValueError("c must be >= 0")
        return value


class QiCheck(BaseModel):
    model_config = ConfigDict(frozen=True)

    ok: bool
    pair: tuple[int, int] | None = Field(None, description="First violating pair.")
    side: str | None = Field(None, description="'lower' or 'upper' inequality.")
    source_distance: int | None = None
    target_distance: int | None = None
    pairs_checked: int = 0


class BoundVariant(str, Enum):
    PAPER_LITERAL = "paper_literal"
    SAFE = "safe"


class BoundInputs(BaseModel):
    model_config = ConfigDict(frozen=True)

    d_g: PositiveInt = Field(..., description="Maximum degree of G.")
    d_t: PositiveInt = Field(..., description="Maximum degree of the tree T.")
    gamma: Fraction = Fraction(1)
    c: Fraction = Fraction(0)
    variant: BoundVariant = BoundVariant.SAFE

    @field_validator("gamma")
    @classmethod
    def _gamma_at_least_one(cls, value: Fraction) -> Fraction:
        if value < 1:
            raise ValueError("gamma must be >= 1")
        return value

    @field_validator("c")
    @classmethod
    def _c_non_negative(cls, value: Fraction) -> Fraction:
        if value < 0:
            raise ValueError("c must be >= 0")
        return value


class BallBounds(BaseModel):
    model_config = ConfigDict(frozen=True)

    m_t: int
    m_g: int
    degenerate: bool = False


class CliqueBound(BaseModel):
    model_config = ConfigDict(frozen=True)

    variant: BoundVariant
    m_t: int
    m_g: int
    n_max: int
    degenerate: bool = False


class FiberCheck(BaseModel):
    model_config = ConfigDict(frozen=True)

    ok: bool
    max_fiber: int
    bound: int
    worst_target: int | None = None


# --- Experiments ---


class ExperimentKind(str, Enum):
    THICK = "thick"
    TREE = "tree"


def _int_list(value: Any) -> Any:
    """Accepts "6,8,10", "2..5" or a list."""
    if isinstance(value, int):
        return [value]
    if isinstance(value, str):
        items: list[int] = []
        for part in value.split(","):
            part = part.strip()
            if not part:
                continue
            if ".." in part:
                lo, hi = part.split("..", 1)
                items.extend(range(int(lo), int(hi) + 1))
            else:
                items.append(int(part))
        return items
    return value


class ExperimentConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    name: str = "experiment"
    experiment: ExperimentKind = ExperimentKind.THICK
    family: FamilySpec = Field(default_factory=lambda: FamilySpec.parse("grid_z2"))
    radii: tuple[PositiveInt, ...] = (6, 8, 10)
    m_range: tuple[PositiveInt, ...] = (2, 3, 4, 5)
    budget: SearchBudget = Field(default_factory=SearchBudget)
    bound_variant: BoundVariant = BoundVariant.SAFE
    output_dir: str | None = None

    @field_validator("radii", "m_range", mode="before")
    @classmethod
    def _expand_ranges(cls, value: Any) -> Any:
        return _int_list(value)

    @field_validator("radii")
    @classmethod
    def _radii_ascending(cls, value: tuple[int, ...]) -> tuple[int, ...]:
        if not value:
            raise ValueError("radii must be non-empty")
        if any(b <= a for a, b in zip(value, value[1:])):
            raise ValueError("radii must be strictly ascending")
        return value

    @field_validator("m_range")
    @classmethod
    def _m_range_non_empty(cls, value: tuple[int, ...]) -> tuple[int, ...]:
        if not value:
            raise ValueError("m_range must be non-empty")
        return tuple(sorted(set(value)))


class ExperimentRow(BaseModel):
    model_config = ConfigDict(frozen=True)

    radius: int
    m: int
    ray_found: bool = False
    built: bool = False
    verified: bool = False
    oracle_nodes: int = 0
    outcome: str = ""
    detail: str | None = None


class RowTiming(BaseModel):
    model_config = ConfigDict(frozen=True)

    radius: int
    m: int
    millis: int


class ThickSummary(BaseModel):
    model_config = ConfigDict(frozen=True)

    radius: int
    largest_verified_m: int


class TreeSummary(BaseModel):
    model_config = ConfigDict(frozen=True)

    radius: int
    qi_ok: bool
    fiber_safe: bool
    fiber_paper_literal: bool
    max_fiber: int
    hadwiger: int
    hadwiger_exact: bool
    bound_safe: int
    bound_paper_literal: int


class ExperimentReport(BaseModel):
    """Machine-readable experiment outcome; timings are kept out of the JSON."""

    name: str
    experiment: ExperimentKind
    family: FamilySpec
    rows: list[ExperimentRow] = Field(default_factory=list)
    thick: list[ThickSummary] = Field(default_factory=list)
    tree: list[TreeSummary] = Field(default_factory=list)
    bounds: list[CliqueBound] = Field(default_factory=list)
    inconclusive: bool = False
    warnings: list[str] = Field(default_factory=list)
    timings: list[RowTiming] = Field(default_factory=list, exclude=True)
