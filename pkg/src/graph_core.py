"""
Graph construction, generation, validation and measurement.

Graphs are undirected, connected and weighted, stored densely as an N x N
adjacency matrix. Both Laplacians and unweighted geodesic distances are
derived here; everything spectral lives in ``src.spectral``.
"""

import csv
import hashlib
import io
import logging
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Iterable, List, Optional, Sequence, Tuple, Union

import networkx as nx
import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components, shortest_path
from scipy.spatial.distance import pdist, squareform

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

logger = logging.getLogger(__name__)

SYMMETRY_TOL = 1e-12
CONNECTIVITY_RETRIES = 50

# Swiss-roll parametrization (unit-diameter rescaling happens afterwards)
SWISS_T_RANGE = (1.5 * np.pi, 4.5 * np.pi)
SWISS_HEIGHT = 21.0

Edge = Tuple[int, int, float]


class Variant(Enum):
    """Which Laplacian a spectrum is built from."""
    COMBINATORIAL = "combinatorial"
    NORMALIZED = "normalized"


class GraphKind(Enum):
    PATH = "path"
    RING = "ring"
    COMET = "comet"
    RANDOM_REGULAR = "random_regular"
    SENSOR = "sensor"
    SWISS_ROLL = "swiss_roll"


def _frozen(array: np.ndarray) -> np.ndarray:
    array = np.array(array, copy=True)
    array.flags.writeable = False
    return array


@dataclass(frozen=True, eq=False)
class Graph:
    """Undirected connected weighted graph with dense adjacency."""
    adjacency: np.ndarray
    coordinates: Optional[np.ndarray] = None
    name: str = "graph"
    degrees: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        W = _frozen(np.asarray(self.adjacency, dtype=float))
        object.__setattr__(self, "adjacency", W)
        object.__setattr__(self, "degrees", _frozen(W.sum(axis=0)))
        if self.coordinates is not None:
            object.__setattr__(self, "coordinates", _frozen(self.coordinates))

    @property
    def n_vertices(self) -> int:
        return self.adjacency.shape[0]

    @property
    def d_min(self) -> float:
        return float(self.degrees.min())

    @property
    def d_max(self) -> float:
        return float(self.degrees.max())

    @property
    def support_degrees(self) -> np.ndarray:
        """Number of neighbours of each vertex (edge weights ignored)."""
        return (self.adjacency > 0).sum(axis=0)

    def edges(self) -> List[Edge]:
        """Upper-triangular edge list, 0-based, in row-major order."""
        rows, cols = np.nonzero(np.triu(self.adjacency, k=1))
        return [(int(i), int(j), float(self.adjacency[i, j])) for i, j in zip(rows, cols)]

    def content_hash(self) -> str:
        """SHA-256 of the canonical edge-list CSV bytes."""
        return hashlib.sha256(edge_list_text(self).encode("utf-8")).hexdigest()


@dataclass(frozen=True, eq=False)
class DistanceMatrix:
    """Unweighted shortest-path (hop) distances."""
    dist: np.ndarray
    diam: int

    def ring_sizes(self, i: int) -> np.ndarray:
        """|R(i, r)| for r = 0..diam: number of vertices at distance exactly r."""
        return np.bincount(self.dist[i], minlength=self.diam + 1)


@dataclass(frozen=True)
class GraphSpec:
    """Parameters for ``generate_graph``."""
    kind: GraphKind
    n: int
    center_degree: Optional[int] = None
    degree: Optional[int] = None
    sigma1: Optional[float] = None
    sigma2: Optional[float] = None
    seed: int = 0

    @classmethod
    def create(cls, kind: Union[str, GraphKind], n: int, **params) -> "GraphSpec":
        return cls(kind=GraphKind(kind), n=int(n), **params)


# =============================================================================
# Construction and validation
# =============================================================================

def is_connected(adjacency: np.ndarray) -> bool:
    n_components, _ = connected_components(csr_matrix(adjacency > 0), directed=False)
    return n_components == 1


def build_graph(edge_list: Iterable[Sequence], n: int, index_base: int = 1,
                name: str = "graph", coordinates: Optional[np.ndarray] = None) -> Graph:
    """
    Assemble a symmetric adjacency matrix from an undirected edge list.

    Args:
        edge_list: (i, j, weight) triples; indices are ``index_base``-based
        n: number of vertices
        index_base: 1 for the external edge-list format, 0 for internal callers

    Raises:
        SelfLoop, NonPositiveWeight, DuplicateEdge, IndexOutOfRange,
        DisconnectedGraph
    """
    if n < 1:
        raise IndexOutOfRange(f"Graph needs at least one vertex, got n={n}")

    W = np.zeros((n, n))
    seen = set()
    for raw_i, raw_j, weight in edge_list:
        i, j = int(raw_i) - index_base, int(raw_j) - index_base
        if not (0 <= i < n and 0 <= j < n):
            raise IndexOutOfRange(f"Edge ({raw_i}, {raw_j}) outside 1..{n}" if index_base
                                  else f"Edge ({raw_i}, {raw_j}) outside 0..{n - 1}")
        if i == j:
            raise SelfLoop(f"Self-loop at vertex {raw_i}")
        weight = float(weight)
        if not weight > 0:
            raise NonPositiveWeight(f"Edge ({raw_i}, {raw_j}) has weight {weight}")
        key = (min(i, j), max(i, j))
        if key in seen:
            raise DuplicateEdge(f"Edge ({raw_i}, {raw_j}) listed twice")
        seen.add(key)
        W[i, j] = W[j, i] = weight

    if not is_connected(W):
        raise DisconnectedGraph(f"Graph '{name}' with {n} vertices is not connected")

    return Graph(adjacency=W, coordinates=coordinates, name=name)


def graph_from_adjacency(W: np.ndarray, name: str = "graph",
                         coordinates: Optional[np.ndarray] = None) -> Graph:
    """Validate a dense adjacency matrix and wrap it in a Graph."""
    W = np.asarray(W, dtype=float)
    if W.ndim != 2 or W.shape[0] != W.shape[1]:
        raise IndexOutOfRange(f"Adjacency must be square, got shape {W.shape}")
    if np.any(np.diag(W) != 0):
        raise SelfLoop("Adjacency has a nonzero diagonal entry")
    if np.any(W < 0):
        raise NonPositiveWeight("Adjacency has a negative entry")
    if np.max(np.abs(W - W.T), initial=0.0) > SYMMETRY_TOL:
        raise NotSymmetric("Adjacency is not symmetric")
    if not is_connected(W):
        raise DisconnectedGraph(f"Graph '{name}' is not connected")
    return Graph(adjacency=0.5 * (W + W.T), coordinates=coordinates, name=name)


# =============================================================================
# Generators
# =============================================================================

def _path_edges(n: int) -> List[Edge]:
    return [(k, k + 1, 1.0) for k in range(n - 1)]


def _comet_edges(n: int, center_degree: int) -> List[Edge]:
    # Vertex 0 is the center; branch vertices 1..center_degree; the last
    # branch continues as a path through the remaining vertices.
    edges = [(0, leaf, 1.0) for leaf in range(1, center_degree + 1)]
    tail = [center_degree] + list(range(center_degree + 1, n))
    edges.extend((a, b, 1.0) for a, b in zip(tail[:-1], tail[1:]))
    return edges


def _kernel_weights(coords: np.ndarray, sigma1: float, sigma2: float) -> np.ndarray:
    """Thresholded Gaussian kernel weights on Euclidean distances."""
    dist = squareform(pdist(coords))
    W = np.where(dist <= sigma2, np.exp(-dist ** 2 / (2 * sigma1 ** 2)), 0.0)
    np.fill_diagonal(W, 0.0)
    return W


def _sensor_coords(rng: np.random.Generator, n: int) -> np.ndarray:
    return rng.uniform(0.0, 1.0, size=(n, 2))


def _swiss_roll_coords(rng: np.random.Generator, n: int) -> np.ndarray:
    t = rng.uniform(*SWISS_T_RANGE, size=n)
    h = rng.uniform(0.0, SWISS_HEIGHT, size=n)
    coords = np.column_stack([t * np.cos(t), h, t * np.sin(t)])
    coords -= coords.mean(axis=0)
    return coords / pdist(coords).max()


def _default_radius(n: int) -> float:
    # Expected degree about 2 ln N in the unit square.
    return float(np.sqrt(2.0 * np.log(n) / (np.pi * n)))


def _generate_geometric(spec: GraphSpec, sampler) -> Graph:
    sigma2 = spec.sigma2 if spec.sigma2 is not None else _default_radius(spec.n)
    sigma1 = spec.sigma1 if spec.sigma1 is not None else sigma2
    if sigma1 <= 0 or sigma2 <= 0:
        raise InfeasibleSpec(f"sigma values must be positive, got ({sigma1}, {sigma2})")

    rng = np.random.default_rng(spec.seed)
    for attempt in range(1, CONNECTIVITY_RETRIES + 1):
        coords = sampler(rng, spec.n)
        W = _kernel_weights(coords, sigma1, sigma2)
        if is_connected(W):
            logger.debug("%s(%d) connected after %d attempt(s)", spec.kind.value, spec.n, attempt)
            return Graph(adjacency=W, coordinates=coords,
                         name=f"{spec.kind.value}{spec.n}")
        logger.debug("%s(%d) attempt %d disconnected, resampling",
                     spec.kind.value, spec.n, attempt)

    raise ConnectivityRetriesExceeded(
        f"{spec.kind.value}({spec.n}, sigma1={sigma1}, sigma2={sigma2}) not connected "
        f"after {CONNECTIVITY_RETRIES} attempts"
    )


def _generate_random_regular(spec: GraphSpec) -> Graph:
    n, d = spec.n, spec.degree
    if d is None or d < 1 or d >= n or (n * d) % 2:
        raise InfeasibleSpec(f"No {d}-regular graph on {n} vertices")

    rng = np.random.default_rng(spec.seed)
    for attempt in range(1, CONNECTIVITY_RETRIES + 1):
        G = nx.random_regular_graph(d, n, seed=int(rng.integers(2 ** 31 - 1)))
        W = nx.to_numpy_array(G, nodelist=range(n))
        if is_connected(W):
            return Graph(adjacency=W, name=f"random_regular{n}")
        logger.debug("random_regular(%d, %d) attempt %d disconnected", n, d, attempt)

    raise ConnectivityRetriesExceeded(
        f"random_regular({n}, {d}) not connected after {CONNECTIVITY_RETRIES} attempts"
    )


def generate_graph(spec: GraphSpec) -> Graph:
    """
    Generate a graph from a ``GraphSpec``.

    Random kinds are bit-identical for the same seed; geometric kinds resample
    placements until connected (bounded by CONNECTIVITY_RETRIES).
    """
    n = spec.n
    if spec.kind is GraphKind.PATH:
        if n < 2:
            raise InfeasibleSpec("path needs n >= 2")
        return build_graph(_path_edges(n), n, index_base=0, name=f"path{n}")

    if spec.kind is GraphKind.RING:
        if n < 3:
            raise InfeasibleSpec("ring needs n >= 3")
        edges = _path_edges(n) + [(n - 1, 0, 1.0)]
        return build_graph(edges, n, index_base=0, name=f"ring{n}")

    if spec.kind is GraphKind.COMET:
        c = spec.center_degree
        if c is None or not 1 <= c <= n - 1:
            raise InfeasibleSpec(f"comet center degree must be in 1..{n - 1}, got {c}")
        return build_graph(_comet_edges(n, c), n, index_base=0, name=f"comet{n}_{c}")

    if spec.kind is GraphKind.RANDOM_REGULAR:
        return _generate_random_regular(spec)

    if spec.kind is GraphKind.SENSOR:
        return _generate_geometric(spec, _sensor_coords)

    if spec.kind is GraphKind.SWISS_ROLL:
        return _generate_geometric(spec, _swiss_roll_coords)

    raise InfeasibleSpec(f"Unknown graph kind: {spec.kind}")


# =============================================================================
# Laplacians and distances
# =============================================================================

def laplacian(g: Graph, variant: Union[str, Variant] = Variant.COMBINATORIAL) -> np.ndarray:
    """L = D - W, or the normalized D^{-1/2} L D^{-1/2}."""
    variant = Variant(variant)
    L = np.diag(g.degrees) - g.adjacency
    if variant is Variant.NORMALIZED:
        inv_sqrt = 1.0 / np.sqrt(g.degrees)
        L = inv_sqrt[:, None] * L * inv_sqrt[None, :]
        np.fill_diagonal(L, 1.0)
    return 0.5 * (L + L.T)


def geodesic_distances(g: Graph) -> DistanceMatrix:
    """Breadth-first hop distances on the support of W."""
    hops = shortest_path(csr_matrix(g.adjacency > 0), directed=False, unweighted=True)
    dist = hops.astype(np.int64)
    return DistanceMatrix(dist=_frozen(dist), diam=int(dist.max()))


# =============================================================================
# File formats
# =============================================================================

def edge_list_text(g: Graph) -> str:
    """Edge-list CSV (header ``i,j,weight``, 1-based, i < j)."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["i", "j", "weight"])
    for i, j, w in g.edges():
        writer.writerow([i + 1, j + 1, repr(w)])
    return buffer.getvalue()


def write_edge_list(g: Graph, path: Path) -> Path:
    path = Path(path)
    path.write_text(edge_list_text(g))
    return path


def read_edge_list(path: Path, n: Optional[int] = None) -> Graph:
    """Load an edge-list CSV; ``n`` defaults to the largest vertex index."""
    path = Path(path)
    with path.open(newline="") as handle:
        reader = csv.DictReader(handle)
        if reader.fieldnames is None or [f.strip() for f in reader.fieldnames] != ["i", "j", "weight"]:
            raise IndexOutOfRange(f"{path}: expected header 'i,j,weight'")
        edges = [(int(row["i"]), int(row["j"]), float(row["weight"])) for row in reader]
    if n is None:
        n = max((max(i, j) for i, j, _ in edges), default=1)
    return build_graph(edges, n, index_base=1, name=path.stem)


def write_coordinates(g: Graph, path: Path) -> Optional[Path]:
    """Coordinate CSV ``vertex,x,y[,z]``; skipped for graphs without coordinates."""
    if g.coordinates is None:
        return None
    path = Path(path)
    dims = g.coordinates.shape[1]
    header = ["vertex"] + ["x", "y", "z"][:dims]
    with path.open("w", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        for vertex, row in enumerate(g.coordinates, start=1):
            writer.writerow([vertex] + [repr(float(x)) for x in row])
    return path
