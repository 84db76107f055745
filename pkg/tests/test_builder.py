"""
Tests for the square-minor construction and parity rerouting.
"""

import pytest

from square_minors.builder import (
    SquareMinorBuilder,
    build_km_minor,
    reroute,
    verify_builder_state,
)
from square_minors.errors import ConstructionError
from square_minors.graphs import square, validate_path
from square_minors.models import BuilderState, FiniteGraph, RayBundle
from square_minors.oracle import verify_model
from square_minors.rays import disjoint_rays


def state_for(rays, pair_order=((0, 1), (0, 2), (1, 2))) -> BuilderState:
    return BuilderState(stage=0, pair_order=pair_order, rays=tuple(tuple(r) for r in rays))


def test_single_ray_gives_k1(grid_window):
    w = grid_window(6)
    bundle = disjoint_rays(w, 1, 2)
    model = build_km_minor(bundle, w, 1)
    assert model.branch_sets == {0: tuple(sorted(bundle.rays[0]))}
    assert verify_model(square(w.graph), FiniteGraph.complete(1), model).ok


@pytest.mark.parametrize("radius,m", [(6, 2), (8, 3), (10, 4)])
def test_builds_verified_clique_models(grid_window, radius, m):
    w = grid_window(radius)
    bundle = disjoint_rays(w, m, radius // 2)
    assert bundle is not None
    model = build_km_minor(bundle, w, m, check_stages=True)
    check = verify_model(square(w.graph), FiniteGraph.complete(m), model)
    assert check.ok, check.violations
    assert len(model.witnesses) == m * (m - 1) // 2


def test_model_lives_in_the_square_not_the_window(grid_window):
    w = grid_window(8)
    bundle = disjoint_rays(w, 3, 4)
    model = build_km_minor(bundle, w, 3)
    assert model.host == square(w.graph)


def test_construction_is_deterministic(grid_window):
    w = grid_window(8)
    bundle = disjoint_rays(w, 3, 4)
    assert build_km_minor(bundle, w, 3) == build_km_minor(bundle, w, 3)


def test_every_stage_satisfies_the_invariants(grid_window):
    w = grid_window(10)
    bundle = disjoint_rays(w, 4, 5)
    builder = SquareMinorBuilder(bundle, w, 4)
    states = list(builder.stages())
    assert [s.stage for s in states] == list(range(7))
    for state in states:
        check = verify_builder_state(state, bundle, w)
        assert check.ok, check.violations


def test_stage_zero_is_the_bundle(grid_window):
    w = grid_window(6)
    bundle = disjoint_rays(w, 2, 3)
    state = SquareMinorBuilder(bundle, w, 2).initial_state()
    assert state.separator == frozenset()
    assert state.rays == bundle.rays
    assert state.connectors == ()
    assert verify_builder_state(state, bundle, w).ok


def test_connector_through_a_ray_is_reported(grid_window):
    w = grid_window(8)
    bundle = disjoint_rays(w, 3, 4)
    state = list(SquareMinorBuilder(bundle, w, 3).stages())[1]
    ray = state.rays[1]
    broken = state.model_copy(update={"connectors": (tuple(ray[-3:]),)})
    check = verify_builder_state(broken, bundle, w)
    assert not check.ok
    assert any(v.startswith("(iv)") for v in check.violations)


def test_wrong_stage_count_is_reported(grid_window):
    w = grid_window(6)
    bundle = disjoint_rays(w, 2, 3)
    state = SquareMinorBuilder(bundle, w, 2).initial_state().model_copy(update={"stage": 1})
    check = verify_builder_state(state, bundle, w)
    assert any(v.startswith("(vi)") for v in check.violations)


def test_bundle_size_must_match_m(grid_window):
    w = grid_window(6)
    bundle = disjoint_rays(w, 2, 3)
    with pytest.raises(ConstructionError):
        SquareMinorBuilder(bundle, w, 3)


def test_window_too_small_for_connectors(ladder_window, label_ids):
    w = ladder_window(3)
    ids = label_ids(w)
    # S swallows both rays, leaving no tail to connect
    bundle = RayBundle(
        rays=((ids["0,0"], ids["1,0"], ids["2,0"], ids["3,0"]), (ids["0,1"], ids["1,1"], ids["2,1"])),
        window_radius=3,
        coherence_radius=1,
    )
    builder = SquareMinorBuilder(bundle, w, 2)
    separator = frozenset(bundle.rays[0] + bundle.rays[1])
    state = builder.initial_state().model_copy(update={"separator": separator})
    with pytest.raises(ConstructionError) as exc_info:
        builder._connector(state, 0, 1)
    assert exc_info.value.pair == (0, 1)
    assert "larger radius" in str(exc_info.value)


# --- reroute ---


def test_reroute_without_crossings_keeps_everything(grid_window, label_ids):
    w = grid_window(10)
    ids = label_ids(w)
    ray0 = [ids["0,-1"], ids["0,-2"], ids["0,-3"]]
    ray1 = [ids["2,-1"], ids["2,-2"], ids["2,-3"]]
    q = [ids["0,-1"], ids["1,-1"], ids["2,-1"]]
    path, rays = reroute(q, state_for([ray0, ray1], ((0, 1),)), w)
    assert path == tuple(q)
    assert rays == (tuple(ray0), tuple(ray1))


def test_reroute_long_crossing_splits_by_parity(grid_window, label_ids):
    w = grid_window(10)
    ids = label_ids(w)
    v = lambda x, y: ids[f"{x},{y}"]  # noqa: E731
    ray0 = [v(1, -2), v(1, -3), v(1, -4)]
    ray1 = [v(5, -2), v(5, -3), v(5, -4)]
    ray2 = [v(x, 0) for x in range(7)]
    q = [v(1, -2), v(1, -1), v(1, 0), v(1, 1), v(2, 1), v(3, 1), v(4, 1), v(5, 1),
         v(5, 0), v(5, -1), v(5, -2)]
    assert validate_path(w.graph, q).ok

    path, rays = reroute(q, state_for([ray0, ray1, ray2]), w)

    assert path == (v(1, -2), v(1, -1), v(1, 0), v(3, 0), v(5, 0), v(5, -1), v(5, -2))
    assert rays[2] == (v(0, 0), v(2, 0), v(4, 0), v(6, 0))
    assert rays[:2] == (tuple(ray0), tuple(ray1))
    host = square(w.graph)
    assert validate_path(host, path).ok
    assert validate_path(host, rays[2]).ok
    assert not set(path) & set(rays[2])


def test_reroute_alternates_parity_between_crossings(grid_window, label_ids):
    w = grid_window(10)
    ids = label_ids(w)
    v = lambda x, y: ids[f"{x},{y}"]  # noqa: E731
    ray0 = [v(1, -2), v(1, -3), v(1, -4)]
    ray1 = [v(1, 3), v(1, 4), v(1, 5)]
    ray2 = [v(x, 0) for x in range(-1, 4)]
    ray3 = [v(x, 1) for x in range(-1, 4)]
    q = [v(1, -2), v(1, -1), v(1, 0), v(1, 1), v(1, 2), v(1, 3)]

    path, rays = reroute(q, state_for([ray0, ray1, ray2, ray3], ((0, 1),)), w)

    # first crossing: the common vertex joins the path; second: it stays on the ray
    assert path == (v(1, -2), v(1, -1), v(1, 0), v(1, 2), v(1, 3))
    assert rays[2] == (v(-1, 0), v(0, 0), v(2, 0), v(3, 0))
    assert rays[3] == tuple(ray3)
    host = square(w.graph)
    assert validate_path(host, path).ok
    assert validate_path(host, rays[2]).ok
    assert not set(path) & (set(rays[2]) | set(rays[3]))
