"""
Tests for the disjoint end-coherent ray finder.

Small windows are checked against an exhaustive search over path systems.
"""

import pytest

from square_minors.errors import RayInputError
from square_minors.families import cut_window
from square_minors.models import FamilySpec, RayBundle, Window
from square_minors.rays import check_bundle, disjoint_rays, end_degree_profile, ray_overlay


def window(name: str, radius: int) -> Window:
    return cut_window(FamilySpec.parse(name), radius)


def outer_components(w: Window, r: int) -> list[set[int]]:
    outer = {v for v in w.graph.vertices if w.depths[v] > r}
    components, seen = [], set()
    for start in sorted(outer):
        if start in seen:
            continue
        component, stack = set(), [start]
        while stack:
            v = stack.pop()
            if v in component:
                continue
            component.add(v)
            stack.extend(u for u in w.graph.adjacency[v] if u in outer)
        seen |= component
        components.append(component)
    return components


def brute_force_max_rays(w: Window, r_star: int) -> int:
    """Largest number of disjoint sphere(r*) -> boundary paths through one outer component."""
    boundary = set(w.boundary)
    best = 0
    for component in outer_components(w, r_star):
        sources = [
            s for s in w.sphere(r_star) if w.graph.adjacency[s] & component
        ]
        paths: dict[int, list[frozenset[int]]] = {s: [] for s in sources}

        def extend(s: int, path: list[int]) -> None:
            for u in sorted(w.graph.adjacency[path[-1]]):
                if u in component and u not in path:
                    if u in boundary:
                        paths[s].append(frozenset(path + [u]))
                    else:
                        extend(s, path + [u])

        for s in sources:
            extend(s, [s])

        def pack(index: int, used: frozenset[int]) -> int:
            if index == len(sources):
                return 0
            result = pack(index + 1, used)
            for p in paths[sources[index]]:
                if not p & used:
                    result = max(result, 1 + pack(index + 1, used | p))
            return result

        best = max(best, pack(0, frozenset()))
    return best


def solver_max_rays(w: Window, r_star: int) -> int:
    m = 0
    while disjoint_rays(w, m + 1, r_star) is not None:
        m += 1
    return m


def test_grid_has_four_rays():
    w = window("grid_z2", 6)
    bundle = disjoint_rays(w, 4, 2)
    assert bundle is not None
    assert bundle.m == 4
    assert bundle.coherence_radius == 2
    assert check_bundle(bundle, w).ok


def test_line_has_no_two_coherent_rays():
    assert disjoint_rays(window("line_z(1)", 8), 2, 2) is None


@pytest.mark.parametrize(
    "name", ["grid_z2", "ladder", "line_z(1)", "regular_tree(3)", "free_product_demo(2)"]
)
def test_one_ray_always_exists(name):
    w = window(name, 4)
    bundle = disjoint_rays(w, 1, 1)
    assert bundle is not None
    assert check_bundle(bundle, w).ok


def test_rays_start_at_root_when_possible():
    w = window("grid_z2", 6)
    bundle = disjoint_rays(w, 1, 2)
    assert w.depths[bundle.rays[0][0]] == 0
    assert bundle.rays[0][-1] in w.boundary


def test_coherence_radius_equal_to_window_radius():
    w = window("grid_z2", 3)
    bundle = disjoint_rays(w, 1, 3)
    assert bundle is not None
    assert check_bundle(bundle, w).ok


@pytest.mark.parametrize("m,r_star", [(0, 2), (-1, 2), (2, 0), (2, 7)])
def test_invalid_ray_parameters(m, r_star):
    with pytest.raises(RayInputError):
        disjoint_rays(window("grid_z2", 6), m, r_star)


def test_found_for_m_implies_found_for_smaller_m():
    w = window("grid_z2", 6)
    found = [disjoint_rays(w, m, 3) is not None for m in range(1, 14)]
    assert found == sorted(found, reverse=True)
    assert found[0]


@pytest.mark.parametrize(
    "name,radius,r_star",
    [
        ("grid_z2", 2, 1),
        ("grid_z2", 3, 1),
        ("grid_z2", 3, 2),
        ("ladder", 3, 1),
        ("ladder", 4, 2),
        ("line_z(1,2)", 2, 1),
        ("regular_tree(3)", 3, 1),
        ("free_product_demo(2)", 2, 1),
    ],
)
def test_solver_matches_exhaustive_search(name, radius, r_star):
    w = window(name, radius)
    assert solver_max_rays(w, r_star) == brute_force_max_rays(w, r_star)


def test_check_bundle_rejects_shared_vertices():
    w = window("grid_z2", 6)
    bundle = disjoint_rays(w, 2, 2)
    broken = RayBundle(
        rays=(bundle.rays[0], bundle.rays[0]),
        window_radius=bundle.window_radius,
        coherence_radius=bundle.coherence_radius,
    )
    check = check_bundle(broken, w)
    assert not check.ok
    assert any("share" in v for v in check.violations)


def test_check_bundle_rejects_incoherent_rays():
    w = window("line_z(1)", 6)
    right = tuple(v for v in w.graph.vertices if int(w.graph.labels[v]) >= 1)
    left = tuple(v for v in w.graph.vertices if int(w.graph.labels[v]) <= -1)
    ordered = [
        tuple(sorted(ray, key=lambda v: abs(int(w.graph.labels[v])))) for ray in (right, left)
    ]
    bundle = RayBundle(rays=tuple(ordered), window_radius=6, coherence_radius=2)
    check = check_bundle(bundle, w)
    assert not check.ok
    assert any("components" in v for v in check.violations)


def test_ray_overlay_labels_follow_the_rays():
    w = window("line_z(1)", 4)
    bundle = disjoint_rays(w, 1, 1)
    overlay = ray_overlay(bundle, w)
    assert overlay.graph == w.graph
    assert overlay.bundle == bundle
    (labels,) = overlay.labeled_rays
    steps = [abs(int(b) - int(a)) for a, b in zip(labels, labels[1:])]
    assert steps == [1] * (len(labels) - 1)
    assert abs(int(labels[-1])) == 4

def test_end_degree_profile_grows_on_the_grid():
    profile = end_degree_profile(FamilySpec.parse("grid_z2"), [4, 6, 8])
    values = [profile[r] for r in (4, 6, 8)]
    assert values == sorted(values)
    assert all(value >= r for value, r in zip(values, (4, 6, 8)))


@pytest.mark.parametrize("name", ["regular_tree(3)", "line_z(1)"])
def test_end_degree_profile_is_one_on_thin_families(name):
    profile = end_degree_profile(FamilySpec.parse(name), [4, 6, 8])
    assert profile == {4: 1, 6: 1, 8: 1}


def test_end_degree_profile_rejects_small_radii():
    with pytest.raises(RayInputError):
        end_degree_profile(FamilySpec.parse("grid_z2"), [1])
