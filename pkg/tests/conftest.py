"""
Pytest configuration and fixtures for the square-minors tests.

Fixtures:
- anyio_backend: runs every @pytest.mark.anyio test on asyncio and trio
- config: a Config writing into a per-test temporary directory
- grid_window / ladder_window: windows shared across a test session
- label_ids: coordinate label -> vertex id lookup for hand-built fixtures

Windows are immutable values, so session scope is safe.
"""

from pathlib import Path

import pytest

from square_minors.config import Config
from square_minors.families import cut_window
from square_minors.models import FamilySpec, Window


@pytest.fixture(params=["asyncio", "trio"])
def anyio_backend(request):
    return request.param


@pytest.fixture
def config(tmp_path: Path) -> Config:
    """Config isolated from the environment and any .env file."""
    return Config(output_dir=str(tmp_path / "results"), workers=2, check_stages=True)


@pytest.fixture(scope="session")
def grid_window():
    """grid_z2 windows by radius, cut once per session."""
    cache: dict[int, Window] = {}

    def get(radius: int) -> Window:
        if radius not in cache:
            cache[radius] = cut_window(FamilySpec.parse("grid_z2"), radius)
        return cache[radius]

    return get


@pytest.fixture(scope="session")
def ladder_window():
    cache: dict[int, Window] = {}

    def get(radius: int) -> Window:
        if radius not in cache:
            cache[radius] = cut_window(FamilySpec.parse("ladder"), radius)
        return cache[radius]

    return get


@pytest.fixture
def label_ids():
    """Coordinate label -> vertex id lookup for a window."""

    def lookup(w: Window) -> dict[str, int]:
        return {label: v for v, label in w.graph.labels.items()}

    return lookup
