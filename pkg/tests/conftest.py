"""
Shared pytest fixtures for the vertex-frequency test suite.
"""

import sys
from pathlib import Path

import numpy as np
import pytest


# Add project root to path
PROJECT_ROOT = Path(__file__).parent.parent.resolve()
sys.path.insert(0, str(PROJECT_ROOT))

from src.graph_core import GraphSpec, Variant, build_graph, generate_graph, geodesic_distances  # noqa: E402
from src.spectral import spectrum_from_graph  # noqa: E402


# =============================================================================
# Small graphs
# =============================================================================

@pytest.fixture
def make_graph():
    """Factory: make_graph("comet", 60, center_degree=20) -> Graph."""
    def _make(kind, n, **params):
        return generate_graph(GraphSpec.create(kind, n, **params))
    return _make


@pytest.fixture
def path10(make_graph):
    return make_graph("path", 10)


@pytest.fixture
def path30(make_graph):
    return make_graph("path", 30)


@pytest.fixture
def ring12(make_graph):
    return make_graph("ring", 12)


@pytest.fixture
def comet60(make_graph):
    return make_graph("comet", 60, center_degree=20)


@pytest.fixture
def sensor100(make_graph):
    return make_graph("sensor", 100, sigma1=0.17, sigma2=0.17, seed=3)


@pytest.fixture
def two_cliques():
    """Cliques of 4 and 6 vertices joined by one edge of weight 1e-3."""
    edges = []
    for block in (range(0, 4), range(4, 10)):
        block = list(block)
        edges += [(a, b, 1.0) for idx, a in enumerate(block) for b in block[idx + 1:]]
    edges.append((3, 4, 1e-3))
    return build_graph(edges, 10, index_base=0, name="two_cliques")


# =============================================================================
# Spectra
# =============================================================================

@pytest.fixture
def path10_spectrum(path10):
    return spectrum_from_graph(path10)


@pytest.fixture
def path30_spectrum(path30):
    return spectrum_from_graph(path30)


@pytest.fixture
def comet60_spectrum(comet60):
    return spectrum_from_graph(comet60)


@pytest.fixture
def sensor100_spectrum(sensor100):
    return spectrum_from_graph(sensor100)


@pytest.fixture
def sensor100_normalized(sensor100):
    return spectrum_from_graph(sensor100, Variant.NORMALIZED)


@pytest.fixture
def path30_distances(path30):
    return geodesic_distances(path30)


# =============================================================================
# Randomness and environment
# =============================================================================

@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def cache_dir(tmp_path, monkeypatch):
    """Point VF_CACHE_DIR at a temporary directory."""
    directory = tmp_path / "cache"
    monkeypatch.setenv("VF_CACHE_DIR", str(directory))
    return directory


# =============================================================================
# Markers
# =============================================================================

def pytest_configure(config):
    """Register custom markers."""
    config.addinivalue_line("markers", "unit: Unit tests (fast, no external dependencies)")
    config.addinivalue_line("markers", "integration: Integration tests (multi-module pipelines)")
    config.addinivalue_line("markers", "e2e: End-to-end tests (CLI and shell wrapper via subprocess)")
    config.addinivalue_line("markers", "slow: Tests that take longer to execute")
