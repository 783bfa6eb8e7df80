"""
Tests for src/graph_core.py: construction, validation, generators, Laplacians,
geodesic distances and the edge-list format.
"""

import numpy as np
import pytest

from src.errors import (
    ConnectivityRetriesExceeded,
    DisconnectedGraph,
    DuplicateEdge,
    IndexOutOfRange,
    InfeasibleSpec,
    NonPositiveWeight,
    NotSymmetric,
    SelfLoop,
)
from src.graph_core import (
    CONNECTIVITY_RETRIES,
    GraphKind,
    GraphSpec,
    Variant,
    build_graph,
    edge_list_text,
    generate_graph,
    geodesic_distances,
    graph_from_adjacency,
    laplacian,
    read_edge_list,
    write_coordinates,
    write_edge_list,
)


# =============================================================================
# build_graph
# =============================================================================

@pytest.mark.unit
class TestBuildGraph:
    """Edge-list assembly and validation."""

    def test_triangle_from_one_based_edges(self):
        g = build_graph([(1, 2, 1.0), (2, 3, 1.0), (1, 3, 1.0)], 3)
        expected = np.ones((3, 3)) - np.eye(3)
        np.testing.assert_array_equal(g.adjacency, expected)
        np.testing.assert_array_equal(g.degrees, [2.0, 2.0, 2.0])

    def test_zero_based_edges(self):
        g = build_graph([(0, 1, 0.5)], 2, index_base=0)
        assert g.adjacency[0, 1] == g.adjacency[1, 0] == 0.5

    def test_adjacency_is_read_only(self):
        g = build_graph([(1, 2, 1.0)], 2)
        with pytest.raises(ValueError):
            g.adjacency[0, 1] = 3.0

    def test_disconnected_raises(self):
        with pytest.raises(DisconnectedGraph):
            build_graph([(1, 2, 1.0)], 3)

    def test_self_loop_raises(self):
        with pytest.raises(SelfLoop):
            build_graph([(1, 1, 1.0), (1, 2, 1.0)], 2)

    @pytest.mark.parametrize("weight", [0.0, -1.0])
    def test_non_positive_weight_raises(self, weight):
        with pytest.raises(NonPositiveWeight):
            build_graph([(1, 2, weight)], 2)

    def test_duplicate_edge_in_either_orientation_raises(self):
        with pytest.raises(DuplicateEdge):
            build_graph([(1, 2, 1.0), (2, 1, 1.0)], 2)

    def test_vertex_out_of_range_raises(self):
        with pytest.raises(IndexOutOfRange):
            build_graph([(1, 4, 1.0)], 3)

    def test_graph_error_exit_code_is_data_mismatch(self):
        assert DisconnectedGraph.exit_code == 4

    def test_asymmetric_adjacency_rejected(self):
        W = np.array([[0.0, 1.0], [2.0, 0.0]])
        with pytest.raises(NotSymmetric):
            graph_from_adjacency(W)

    def test_support_degrees_ignore_weights(self):
        g = build_graph([(1, 2, 0.25), (2, 3, 4.0)], 3)
        np.testing.assert_array_equal(g.support_degrees, [1, 2, 1])
        assert g.d_max == pytest.approx(4.25)


# =============================================================================
# Generators
# =============================================================================

@pytest.mark.unit
class TestGenerators:
    """Deterministic and seeded graph families."""

    def test_path_has_n_minus_one_edges(self, make_graph):
        g = make_graph("path", 180)
        assert len(g.edges()) == 179
        assert g.d_min == 1.0 and g.d_max == 2.0

    def test_ring_is_two_regular(self, make_graph):
        g = make_graph("ring", 12)
        np.testing.assert_array_equal(g.degrees, np.full(12, 2.0))

    def test_comet_center_degree(self, make_graph):
        g = make_graph("comet", 60, center_degree=20)
        assert g.degrees[0] == 20
        assert len(g.edges()) == 59
        assert sorted(np.unique(g.degrees).tolist()) == [1.0, 2.0, 20.0]

    def test_comet_center_degree_out_of_range(self, make_graph):
        with pytest.raises(InfeasibleSpec):
            make_graph("comet", 10, center_degree=10)

    def test_random_regular_degrees(self, make_graph):
        g = make_graph("random_regular", 50, degree=4, seed=1)
        np.testing.assert_array_equal(g.degrees, np.full(50, 4.0))

    def test_random_regular_odd_product_infeasible(self, make_graph):
        with pytest.raises(InfeasibleSpec):
            make_graph("random_regular", 11, degree=3)

    def test_sensor_same_seed_is_identical(self, make_graph):
        a = make_graph("sensor", 80, sigma1=0.2, sigma2=0.2, seed=5)
        b = make_graph("sensor", 80, sigma1=0.2, sigma2=0.2, seed=5)
        np.testing.assert_array_equal(a.adjacency, b.adjacency)
        np.testing.assert_array_equal(a.coordinates, b.coordinates)
        assert a.content_hash() == b.content_hash()

    def test_sensor_weights_follow_thresholded_gaussian(self, make_graph):
        g = make_graph("sensor", 80, sigma1=0.1, sigma2=0.2, seed=5)
        i, j, w = g.edges()[0]
        dist = np.linalg.norm(g.coordinates[i] - g.coordinates[j])
        assert dist <= 0.2
        assert w == pytest.approx(np.exp(-dist ** 2 / (2 * 0.1 ** 2)))

    def test_sensor_default_radius_connects(self, make_graph):
        g = make_graph("sensor", 200, seed=2)
        assert g.n_vertices == 200

    def test_swiss_roll_has_unit_diameter(self, make_graph):
        g = make_graph("swiss_roll", 150, sigma1=0.1, sigma2=0.25, seed=4)
        coords = g.coordinates
        diffs = coords[:, None, :] - coords[None, :, :]
        assert np.sqrt((diffs ** 2).sum(axis=-1)).max() == pytest.approx(1.0)

    def test_tiny_radius_exhausts_retries(self, make_graph):
        with pytest.raises(ConnectivityRetriesExceeded) as exc:
            make_graph("sensor", 50, sigma1=1e-4, sigma2=1e-4, seed=0)
        assert str(CONNECTIVITY_RETRIES) in str(exc.value)
        assert exc.value.exit_code == 3

    def test_graph_kinds_are_all_generatable(self):
        assert {k.value for k in GraphKind} == {
            "path", "ring", "comet", "random_regular", "sensor", "swiss_roll",
        }

    def test_spec_create_accepts_strings(self):
        spec = GraphSpec.create("comet", 30, center_degree=5)
        assert spec.kind is GraphKind.COMET


# =============================================================================
# Laplacians
# =============================================================================

@pytest.mark.unit
class TestLaplacian:
    """Combinatorial and normalized Laplacians."""

    def test_path3_combinatorial(self, make_graph):
        L = laplacian(make_graph("path", 3))
        expected = np.array([[1, -1, 0], [-1, 2, -1], [0, -1, 1]], dtype=float)
        np.testing.assert_array_equal(L, expected)

    def test_rows_sum_to_zero(self, sensor100):
        L = laplacian(sensor100)
        np.testing.assert_allclose(L.sum(axis=1), 0.0, atol=1e-12)

    def test_normalized_has_unit_diagonal(self, sensor100):
        L = laplacian(sensor100, Variant.NORMALIZED)
        np.testing.assert_allclose(np.diag(L), 1.0, atol=1e-12)
        np.testing.assert_allclose(L, L.T, atol=1e-12)

    def test_variant_accepts_string(self, path10):
        np.testing.assert_array_equal(laplacian(path10, "combinatorial"), laplacian(path10))


# =============================================================================
# Geodesic distances
# =============================================================================

@pytest.mark.unit
class TestGeodesicDistances:
    """Hop distances on the support of W."""

    def test_path_distances(self, path10):
        dm = geodesic_distances(path10)
        assert dm.diam == 9
        assert dm.dist[0, 9] == 9
        assert dm.dist[3, 5] == 2

    def test_ring_diameter(self, ring12):
        assert geodesic_distances(ring12).diam == 6

    def test_comet_diameter(self, comet60):
        # leaf -> center -> last branch -> end of tail
        assert geodesic_distances(comet60).diam == 1 + 1 + 39

    def test_weights_are_ignored(self):
        g = build_graph([(1, 2, 100.0), (2, 3, 0.01)], 3)
        assert geodesic_distances(g).dist[0, 2] == 2

    def test_ring_sizes(self, path10):
        sizes = geodesic_distances(path10).ring_sizes(4)
        assert sizes[0] == 1
        assert sizes[1] == 2
        assert sizes.sum() == 10


# =============================================================================
# Edge-list format
# =============================================================================

@pytest.mark.unit
class TestEdgeListFormat:
    """CSV edge lists and coordinates."""

    def test_header_and_one_based_rows(self, make_graph):
        text = edge_list_text(make_graph("path", 3))
        assert text.splitlines() == ["i,j,weight", "1,2,1.0", "2,3,1.0"]

    def test_write_then_read_preserves_weights(self, tmp_path, make_graph):
        g = make_graph("sensor", 60, sigma1=0.2, sigma2=0.25, seed=9)
        path = write_edge_list(g, tmp_path / "graph.csv")
        loaded = read_edge_list(path, n=60)
        np.testing.assert_array_equal(loaded.adjacency, g.adjacency)
        assert loaded.content_hash() == g.content_hash()

    def test_bad_header_rejected(self, tmp_path):
        path = tmp_path / "graph.csv"
        path.write_text("a,b,c\n1,2,1.0\n")
        with pytest.raises(IndexOutOfRange):
            read_edge_list(path)

    def test_coordinates_skipped_without_positions(self, tmp_path, path10):
        assert write_coordinates(path10, tmp_path / "coords.csv") is None

    def test_coordinates_written(self, tmp_path, sensor100):
        path = write_coordinates(sensor100, tmp_path / "coords.csv")
        lines = path.read_text().splitlines()
        assert lines[0] == "vertex,x,y"
        assert len(lines) == 101
