"""
Tests for src/clustering.py: k-means wrapper, spectral and signal-adapted
clustering, band filters and planted partitions.
"""

import numpy as np
import pytest

from src.clustering import (
    _canonical_labels,
    ball,
    band_filter_bank,
    equal_bands,
    equal_count_bands,
    farthest_point_centers,
    kmeans,
    planted_partition_signal,
    restrict,
    signal_adapted_cluster,
    signal_features,
    spectral_cluster,
)
from src.errors import BadBand, BadK, DimensionMismatch, InfeasibleSpec
from src.graph_core import geodesic_distances
from src.operators import Kernel
from src.spectral import spectrum_from_graph


@pytest.fixture
def blobs(rng):
    """Two tight 2-D blobs of 15 and 25 points."""
    a = rng.normal(0.0, 0.05, size=(15, 2))
    b = rng.normal(5.0, 0.05, size=(25, 2))
    return np.vstack([a, b])


# =============================================================================
# k-means
# =============================================================================

@pytest.mark.unit
class TestKMeans:
    """k-means++ with restarts and canonical labels."""

    def test_canonical_labels_follow_first_appearance(self):
        np.testing.assert_array_equal(_canonical_labels(np.array([2, 2, 0, 1, 0])),
                                      [0, 0, 1, 2, 1])

    def test_separates_blobs(self, blobs):
        result = kmeans(blobs, 2, seed=0, n_init=10)
        np.testing.assert_array_equal(result.labels, [0] * 15 + [1] * 25)
        np.testing.assert_array_equal(result.sizes(), [15, 25])
        assert result.inertia >= 0

    def test_same_seed_same_labels(self, rng):
        features = rng.standard_normal((60, 3))
        a = kmeans(features, 4, seed=7, n_init=5)
        b = kmeans(features, 4, seed=7, n_init=5)
        np.testing.assert_array_equal(a.labels, b.labels)
        assert a.inertia == b.inertia

    def test_every_cluster_non_empty(self, rng):
        result = kmeans(rng.standard_normal((30, 2)), 6, seed=1, n_init=3)
        assert np.all(result.sizes() > 0)

    @pytest.mark.parametrize("k", [1, 41])
    def test_k_out_of_range(self, blobs, k):
        with pytest.raises(BadK):
            kmeans(blobs, k)

    def test_constant_features(self):
        with pytest.raises(BadK):
            kmeans(np.ones((10, 3)), 2)

    def test_too_few_distinct_rows(self):
        features = np.array([[0.0], [0.0], [1.0], [1.0]])
        with pytest.raises(BadK):
            kmeans(features, 3)

    def test_bad_k_is_a_usage_error(self):
        assert BadK.exit_code == 2


# =============================================================================
# Spectral clustering
# =============================================================================

@pytest.mark.unit
class TestSpectralCluster:
    """k-means on the leading eigenvectors."""

    def test_two_cliques(self, two_cliques):
        s = spectrum_from_graph(two_cliques)
        result = spectral_cluster(s, 2, seed=0)
        np.testing.assert_array_equal(result.labels, [0] * 4 + [1] * 6)

    def test_k_larger_than_n(self, path10_spectrum):
        with pytest.raises(BadK):
            spectral_cluster(path10_spectrum, 11)

    def test_path_splits_into_contiguous_halves(self, path30_spectrum):
        labels = spectral_cluster(path30_spectrum, 2, seed=3).labels
        assert np.count_nonzero(np.diff(labels)) == 1


# =============================================================================
# Signal-adapted clustering
# =============================================================================

@pytest.mark.unit
class TestSignalAdapted:
    """tanh(alpha |Sf|) features."""

    def test_feature_range_and_shape(self, path30_spectrum, rng):
        y = signal_features(path30_spectrum, rng.standard_normal(30), Kernel.heat(0.3), 0.75)
        assert y.shape == (30, 30)
        assert y.min() >= 0.0 and y.max() < 1.0

    def test_alpha_must_be_positive(self, path30_spectrum):
        with pytest.raises(InfeasibleSpec):
            signal_features(path30_spectrum, np.ones(30), Kernel.heat(0.3), 0.0)

    def test_workers_do_not_change_labels(self, comet60_spectrum, rng):
        f = rng.standard_normal(60)
        g = Kernel.heat(0.3)
        a = signal_adapted_cluster(comet60_spectrum, f, g, 0.75, 3, seed=2, n_init=5)
        b = signal_adapted_cluster(comet60_spectrum, f, g, 0.75, 3, seed=2, n_init=5)
        np.testing.assert_array_equal(a.labels, b.labels)
        assert a.labels[0] == 0

    def test_zero_signal_cannot_be_clustered(self, path30_spectrum):
        with pytest.raises(BadK):
            signal_adapted_cluster(path30_spectrum, np.zeros(30), Kernel.heat(0.3), 0.75, 2)


# =============================================================================
# Band filters and planted partitions
# =============================================================================

@pytest.mark.unit
class TestBands:
    """Band-limited test signals on known regions."""

    def test_bump_zero_outside_band(self, sensor100_spectrum):
        lam = sensor100_spectrum.eigenvalues
        lo, hi = 0.25 * lam[-1], 0.5 * lam[-1]
        (kernel,) = band_filter_bank(sensor100_spectrum, [(lo, hi)])
        values = np.asarray(kernel.values)
        assert np.all(values[(lam < lo) | (lam > hi)] == 0.0)
        assert np.all(values[(lam > lo + 0.25 * (hi - lo)) & (lam < hi - 0.25 * (hi - lo))] == 1.0)
        assert values.max() <= 1.0

    def test_spectrum_ends_stay_flat(self, path30_spectrum):
        low, high = band_filter_bank(path30_spectrum, equal_bands(path30_spectrum, 2))
        assert low.values[0] == 1.0
        assert high.values[-1] == 1.0

    def test_overlapping_bands_cover_spectrum(self, sensor100_spectrum):
        top = sensor100_spectrum.lambda_max
        bands = [(0.0, 0.4 * top), (0.3 * top, 0.7 * top), (0.6 * top, top)]
        total = sum(np.asarray(k.values) for k in band_filter_bank(sensor100_spectrum, bands))
        assert total.min() > 0

    def test_equal_bands_tile_the_spectrum(self, path30_spectrum):
        bands = equal_bands(path30_spectrum, 4)
        assert bands[0][0] == 0.0
        assert bands[-1][1] == pytest.approx(path30_spectrum.lambda_max)
        assert all(a[1] == b[0] for a, b in zip(bands, bands[1:]))

    @pytest.mark.parametrize("band", [(1.0, 0.5), (-1.0, 1.0), (0.0, 100.0)])
    def test_bad_band(self, path30_spectrum, band):
        with pytest.raises(BadBand):
            band_filter_bank(path30_spectrum, [band])

    def test_ball_and_restrict(self, path10):
        dm = geodesic_distances(path10)
        mask = ball(dm, 0, 2)
        np.testing.assert_array_equal(np.flatnonzero(mask), [0, 1, 2])
        np.testing.assert_array_equal(restrict(np.arange(10.0), mask), [0, 1, 2] + [0] * 7)

    def test_restrict_shape_mismatch(self):
        with pytest.raises(DimensionMismatch):
            restrict(np.ones(4), np.ones(5, dtype=bool))

    def test_farthest_point_centers(self, path10):
        assert farthest_point_centers(geodesic_distances(path10), 3) == [0, 9, 4]

    def test_planted_partition(self, sensor100, sensor100_spectrum):
        dm = geodesic_distances(sensor100)
        bands = equal_bands(sensor100_spectrum, 3)
        signal, truth = planted_partition_signal(sensor100_spectrum, dm, bands, radius=1, seed=4)
        assert signal.shape == truth.shape == (100,)
        assert set(np.unique(truth)) <= {0, 1, 2}
        centers = farthest_point_centers(dm, 2)
        assert truth[centers[0]] == 0 and truth[centers[1]] == 1
        again, _ = planted_partition_signal(sensor100_spectrum, dm, bands, radius=1, seed=4)
        np.testing.assert_array_equal(signal, again)

    def test_planted_partition_center_count(self, sensor100, sensor100_spectrum):
        dm = geodesic_distances(sensor100)
        with pytest.raises(InfeasibleSpec):
            planted_partition_signal(sensor100_spectrum, dm, equal_bands(sensor100_spectrum, 3),
                                     radius=1, centers=[0])

    def test_planted_cells(self, sensor100, sensor100_spectrum):
        dm = geodesic_distances(sensor100)
        bands = equal_count_bands(sensor100_spectrum, 4)
        signal, truth = planted_partition_signal(sensor100_spectrum, dm, bands, seed=2)
        centers = farthest_point_centers(dm, 4)
        assert [int(truth[c]) for c in centers] == [0, 1, 2, 3]
        np.testing.assert_array_equal(truth, np.argmin(dm.dist[centers], axis=0))
        for region in range(4):
            mask = truth == region
            assert mask.any()
            assert np.sqrt(np.mean(signal[mask] ** 2)) == pytest.approx(1.0)

    def test_equal_count_bands_split_the_eigenvalues(self, sensor100_spectrum):
        bands = equal_count_bands(sensor100_spectrum, 4)
        lam = sensor100_spectrum.eigenvalues
        assert bands[0][0] == 0.0
        assert bands[-1][1] == sensor100_spectrum.lambda_max
        assert all(a[1] == b[0] for a, b in zip(bands, bands[1:]))
        counts = [np.count_nonzero((lam > lo) & (lam < hi)) for lo, hi in bands[1:-1]]
        # an eigenvalue repeated across an edge sits on it and is not counted
        assert all(23 <= c <= 25 for c in counts)

    @pytest.mark.parametrize("count", [0, 101])
    def test_equal_count_bands_range(self, sensor100_spectrum, count):
        with pytest.raises(BadBand):
            equal_count_bands(sensor100_spectrum, count)
