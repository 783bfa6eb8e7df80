"""
On-disk cache of Laplacian spectra.

Entries are keyed by the SHA-256 of the graph's canonical edge-list bytes
plus the Laplacian variant. Each entry is three files in the cache
directory:

    <key>.csv   eigenvalues, ``l,lambda``
    <key>.bin   eigenvectors, row-major little-endian float64
    <key>.json  entry metadata (N, variant, cache format)

The directory comes from ``VF_CACHE_DIR`` and defaults to
~/.cache/vertex-frequency.
"""

import csv
import hashlib
import json
import logging
import os
from pathlib import Path
from typing import Optional, Union

import numpy as np

from src.errors import DimensionMismatch
from src.graph_core import Graph, Variant, edge_list_text
from src.spectral import (
    Spectrum,
    eigenvalue_table,
    eigenvector_bytes,
    eigenvectors_from_bytes,
    spectrum_from_graph,
)
from src.version import CACHE_FORMAT_VERSION

logger = logging.getLogger(__name__)

CACHE_ENV_VAR = "VF_CACHE_DIR"
DEFAULT_CACHE_DIR = Path.home() / ".cache" / "vertex-frequency"


def default_cache_dir() -> Path:
    configured = os.environ.get(CACHE_ENV_VAR)
    return Path(configured).expanduser() if configured else DEFAULT_CACHE_DIR


def cache_key(g: Graph, variant: Union[str, Variant]) -> str:
    variant = Variant(variant)
    digest = hashlib.sha256(edge_list_text(g).encode("utf-8"))
    digest.update(f"|{variant.value}|v{CACHE_FORMAT_VERSION}".encode("utf-8"))
    return digest.hexdigest()


class SpectrumCache:
    """Load-or-compute access to cached spectra."""

    def __init__(self, cache_dir: Optional[Path] = None):
        self.cache_dir = Path(cache_dir) if cache_dir is not None else default_cache_dir()

    def _paths(self, key: str):
        return (self.cache_dir / f"{key}.csv",
                self.cache_dir / f"{key}.bin",
                self.cache_dir / f"{key}.json")

    def load(self, g: Graph, variant: Union[str, Variant] = Variant.COMBINATORIAL) -> Optional[Spectrum]:
        """
        Cached spectrum of ``g``, or None when absent.

        Unreadable or inconsistent entries are removed and reported as a miss.
        """
        variant = Variant(variant)
        key = cache_key(g, variant)
        values_path, vectors_path, meta_path = self._paths(key)
        if not (values_path.exists() and vectors_path.exists() and meta_path.exists()):
            return None

        try:
            meta = json.loads(meta_path.read_text())
            if meta.get("n") != g.n_vertices or meta.get("variant") != variant.value:
                raise DimensionMismatch("cache metadata does not match graph")
            with values_path.open(newline="") as handle:
                eigenvalues = np.array([float(row["lambda"]) for row in csv.DictReader(handle)])
            eigenvectors = eigenvectors_from_bytes(vectors_path.read_bytes(), g.n_vertices)
            if eigenvalues.shape[0] != g.n_vertices:
                raise DimensionMismatch("cached eigenvalue count does not match graph")
        except (OSError, ValueError, KeyError, DimensionMismatch) as e:
            logger.warning("Discarding corrupt cache entry %s: %s", key[:12], e)
            self.clear(key)
            return None

        logger.debug("cache hit %s", key[:12])
        return Spectrum(eigenvalues=eigenvalues, eigenvectors=eigenvectors,
                        variant=variant, degrees=np.array(g.degrees))

    def store(self, g: Graph, s: Spectrum) -> str:
        """Write ``s`` as the cached spectrum of ``g``; returns the entry key."""
        key = cache_key(g, s.variant)
        values_path, vectors_path, meta_path = self._paths(key)
        self.cache_dir.mkdir(parents=True, exist_ok=True)
        values_path.write_text(eigenvalue_table(s))
        vectors_path.write_bytes(eigenvector_bytes(s))
        meta = {"n": s.n, "variant": s.variant.value, "cache_format": CACHE_FORMAT_VERSION}
        meta_path.write_text(json.dumps(meta, indent=2, sort_keys=True))
        logger.debug("cached spectrum %s (N=%d)", key[:12], s.n)
        return key

    def get_or_compute(self, g: Graph, variant: Union[str, Variant] = Variant.COMBINATORIAL) -> Spectrum:
        cached = self.load(g, variant)
        if cached is not None:
            return cached
        s = spectrum_from_graph(g, variant)
        try:
            self.store(g, s)
        except OSError as e:
            logger.warning("Could not write spectrum cache in %s: %s", self.cache_dir, e)
        return s

    def clear(self, key: str) -> None:
        for path in self._paths(key):
            try:
                if path.exists():
                    path.unlink()
            except OSError:
                pass
