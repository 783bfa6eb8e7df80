"""
Spectral and signal-adapted clustering of graph vertices.

Both methods run k-means on per-vertex feature rows: the first k Laplacian
eigenvectors, or tanh(alpha |Sf(i, k)|) built from the windowed transform.
"""

import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np
from sklearn.cluster import KMeans

from src.errors import BadBand, BadK, DimensionMismatch, InfeasibleSpec
from src.graph_core import DistanceMatrix
from src.operators import Kernel, Window, _check_index
from src.spectral import Spectrum, gft, igft
from src.wgft import transform

logger = logging.getLogger(__name__)

MAX_RESTARTS = 100
MAX_ITERATIONS = 300
KMEANS_TOL = 1e-9
CONSTANT_FEATURE_TOL = 1e-12
BAND_TAPER = 0.25


@dataclass(frozen=True, eq=False)
class ClusterAssignment:
    labels: np.ndarray
    k: int
    inertia: float

    def sizes(self) -> np.ndarray:
        return np.bincount(self.labels, minlength=self.k)


# =============================================================================
# k-means
# =============================================================================

def _canonical_labels(labels: np.ndarray) -> np.ndarray:
    """Relabel clusters in order of first appearance."""
    _, first = np.unique(labels, return_index=True)
    order = np.argsort(first)
    mapping = np.empty(order.shape[0], dtype=int)
    mapping[np.unique(labels)[order]] = np.arange(order.shape[0])
    return mapping[labels]


def _repair_empty_clusters(features: np.ndarray, labels: np.ndarray, k: int) -> np.ndarray:
    """Move the point farthest from its centroid in the largest cluster into each empty one."""
    labels = labels.copy()
    for empty in np.flatnonzero(np.bincount(labels, minlength=k) == 0):
        largest = int(np.bincount(labels, minlength=k).argmax())
        members = np.flatnonzero(labels == largest)
        centroid = features[members].mean(axis=0)
        farthest = members[np.argmax(np.sum((features[members] - centroid) ** 2, axis=1))]
        labels[farthest] = empty
        logger.debug("cluster %d was empty, took vertex %d from cluster %d", empty, farthest, largest)
    return labels


def _inertia(features: np.ndarray, labels: np.ndarray, k: int) -> float:
    total = 0.0
    for c in range(k):
        members = features[labels == c]
        total += float(np.sum((members - members.mean(axis=0)) ** 2))
    return total


def kmeans(features: np.ndarray, k: int, seed: int = 0,
           n_init: int = MAX_RESTARTS) -> ClusterAssignment:
    """
    k-means++ with ``n_init`` restarts (best inertia kept) on feature rows.

    Raises:
        BadK: k outside 2..N, or features too degenerate to split into k groups
    """
    features = np.asarray(features, dtype=float)
    n = features.shape[0]
    if not 2 <= k <= n:
        raise BadK(f"k must be in 2..{n}, got {k}")
    if np.ptp(features, axis=0).max(initial=0.0) <= CONSTANT_FEATURE_TOL:
        raise BadK("Features are numerically constant; no partition into clusters exists")
    if np.unique(features, axis=0).shape[0] < k:
        raise BadK(f"Only {np.unique(features, axis=0).shape[0]} distinct feature rows for k={k}")

    model = KMeans(
        n_clusters=k,
        init="k-means++",
        n_init=max(1, min(MAX_RESTARTS, n_init)),
        max_iter=MAX_ITERATIONS,
        tol=KMEANS_TOL,
        random_state=seed,
    )
    labels = model.fit_predict(features)
    if np.any(np.bincount(labels, minlength=k) == 0):
        labels = _repair_empty_clusters(features, labels, k)
        inertia = _inertia(features, labels, k)
    else:
        inertia = float(model.inertia_)
    return ClusterAssignment(labels=_canonical_labels(labels), k=k, inertia=max(0.0, inertia))


def spectral_cluster(s: Spectrum, k: int, seed: int = 0,
                     n_init: int = MAX_RESTARTS) -> ClusterAssignment:
    """k-means on the rows of [chi_0 .. chi_{k-1}]."""
    if not 2 <= k <= s.n:
        raise BadK(f"k must be in 2..{s.n}, got {k}")
    features = np.real(s.eigenvectors[:, :k])
    return kmeans(features, k, seed, n_init)


def signal_features(s: Spectrum, f: np.ndarray, g: Window, alpha: float,
                    workers: int = 1) -> np.ndarray:
    """y_i(k) = tanh(alpha |Sf(i, k)|), one row per vertex."""
    if alpha <= 0:
        raise InfeasibleSpec(f"alpha must be positive, got {alpha}")
    coefficients = transform(s, g, f, workers=workers)
    return np.tanh(alpha * np.abs(coefficients.matrix))


def signal_adapted_cluster(s: Spectrum, f: np.ndarray, g: Window, alpha: float, k: int,
                           seed: int = 0, n_init: int = MAX_RESTARTS,
                           workers: int = 1) -> ClusterAssignment:
    """Cluster vertices by the local frequency content of ``f``."""
    return kmeans(signal_features(s, f, g, alpha, workers), k, seed, n_init)


# =============================================================================
# Synthetic partitions
# =============================================================================

def _bump(lam: np.ndarray, lo: float, hi: float, taper_lo: bool, taper_hi: bool) -> np.ndarray:
    # Flat top with raised-cosine flanks, zero outside [lo, hi]
    width = BAND_TAPER * (hi - lo)
    values = np.where((lam >= lo) & (lam <= hi), 1.0, 0.0)
    if taper_lo:
        rising = (lam >= lo) & (lam < lo + width)
        values[rising] = 0.5 * (1.0 - np.cos(np.pi * (lam[rising] - lo) / width))
    if taper_hi:
        falling = (lam > hi - width) & (lam <= hi)
        values[falling] = 0.5 * (1.0 - np.cos(np.pi * (hi - lam[falling]) / width))
    return values


def band_filter_bank(s: Spectrum, bands: Sequence[Tuple[float, float]]) -> List[Kernel]:
    """
    One sampled kernel per (lo, hi) band.

    Each bump is 1 inside the band and falls to 0 at its edges with a
    raised-cosine taper; edges at 0 or lambda_max are left flat so the
    ends of the spectrum stay covered.
    """
    tol = 1e-12 * max(1.0, s.lambda_max)
    kernels = []
    for lo, hi in bands:
        if not (-tol <= lo < hi <= s.lambda_max + tol):
            raise BadBand(f"Band ({lo}, {hi}) not inside [0, {s.lambda_max}]")
        values = _bump(s.eigenvalues, lo, hi,
                       taper_lo=lo > tol, taper_hi=hi < s.lambda_max - tol)
        kernels.append(Kernel.sampled(values))
    return kernels


def equal_bands(s: Spectrum, count: int) -> List[Tuple[float, float]]:
    """``count`` adjacent bands splitting [0, lambda_max] evenly."""
    edges = np.linspace(0.0, s.lambda_max, count + 1)
    return [(float(lo), float(hi)) for lo, hi in zip(edges[:-1], edges[1:])]


def equal_count_bands(s: Spectrum, count: int) -> List[Tuple[float, float]]:
    """
    ``count`` adjacent bands holding about N / count eigenvalues each.

    Inner edges sit halfway between consecutive eigenvalues, so no
    eigenvalue lands on an edge unless it is repeated there.
    """
    if not 1 <= count <= s.n:
        raise BadBand(f"Band count must be in 1..{s.n}, got {count}")
    lam = s.eigenvalues
    cuts = np.round(np.arange(1, count) * s.n / count).astype(int)
    edges = np.concatenate([[0.0], 0.5 * (lam[cuts - 1] + lam[cuts]), [s.lambda_max]])
    if np.any(np.diff(edges) <= 0):
        raise BadBand(f"Repeated eigenvalues leave an empty band among {count}")
    return [(float(lo), float(hi)) for lo, hi in zip(edges[:-1], edges[1:])]


def ball(dm: DistanceMatrix, center: int, radius: int) -> np.ndarray:
    """Boolean mask of vertices within ``radius`` hops of ``center``."""
    center = _check_index(center, dm.dist.shape[0], "vertex")
    return dm.dist[center] <= radius


def restrict(f: np.ndarray, mask: np.ndarray) -> np.ndarray:
    """f on the masked vertices, zero elsewhere."""
    f = np.asarray(f)
    mask = np.asarray(mask, dtype=bool)
    if mask.shape != f.shape:
        raise DimensionMismatch(f"Mask shape {mask.shape} does not match signal shape {f.shape}")
    return np.where(mask, f, 0)


def farthest_point_centers(dm: DistanceMatrix, count: int, start: int = 0) -> List[int]:
    """Greedy centers, each as far as possible (in hops) from those already chosen."""
    centers = [_check_index(start, dm.dist.shape[0], "vertex")]
    nearest = dm.dist[centers[0]].astype(float)
    while len(centers) < count:
        nxt = int(nearest.argmax())
        centers.append(nxt)
        nearest = np.minimum(nearest, dm.dist[nxt])
    return centers


def planted_partition_signal(s: Spectrum, dm: DistanceMatrix, bands: Sequence[Tuple[float, float]],
                             radius: Optional[int] = None, centers: Optional[Sequence[int]] = None,
                             seed: int = 0) -> Tuple[np.ndarray, np.ndarray]:
    """
    Piecewise band-limited test signal with known regions, one band per region.

    With ``radius`` unset, the regions are the nearest-center cells of
    ``len(bands)`` centers (ties go to the earlier center). With ``radius``
    set, they are balls of that many hops around ``len(bands) - 1`` centers
    (earlier balls win overlaps) plus the remaining vertices.

    Region i carries zero-mean Gaussian noise filtered by band i, scaled to
    unit RMS over the region.

    Returns:
        (signal, ground-truth labels)

    Raises:
        InfeasibleSpec: wrong number of centers, or a region that is empty
            or gets no energy from its band
    """
    n_regions = len(bands)
    n_centers = n_regions if radius is None else n_regions - 1
    if centers is None:
        centers = farthest_point_centers(dm, n_centers)
    if len(centers) != n_centers:
        raise InfeasibleSpec(f"{n_regions} bands need {n_centers} centers, got {len(centers)}")
    centers = [_check_index(c, s.n, "vertex") for c in centers]

    if radius is None:
        truth = np.argmin(dm.dist[centers], axis=0)
    else:
        truth = np.full(s.n, n_regions - 1, dtype=int)
        for region in reversed(range(len(centers))):
            truth[ball(dm, centers[region], radius)] = region

    rng = np.random.default_rng(seed)
    signal = np.zeros(s.n)
    for region, h in enumerate(band_filter_bank(s, bands)):
        mask = truth == region
        noise = rng.standard_normal(s.n)
        filtered = np.real(igft(s, np.asarray(h.values) * gft(s, noise)))
        rms = np.sqrt(np.mean(filtered[mask] ** 2)) if mask.any() else 0.0
        if rms <= CONSTANT_FEATURE_TOL:
            raise InfeasibleSpec(f"Region {region} is empty or gets no energy from band {bands[region]}")
        signal += restrict(filtered / rms, mask)
        logger.debug("region %d: %d vertices", region, int(mask.sum()))
    return signal, truth
