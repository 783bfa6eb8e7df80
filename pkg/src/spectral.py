"""
Laplacian eigendecomposition, graph Fourier transform and coherence.

A ``Spectrum`` fixes one orthonormal eigenbasis of either Laplacian. The
basis is made deterministic by a fixed solver path, ascending eigenvalue
order and a sign convention on each eigenvector.
"""

import logging
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np
import scipy.linalg

from src.errors import DimensionMismatch, EigensolverFailure, NotSymmetric
from src.graph_core import Graph, Variant, laplacian

logger = logging.getLogger(__name__)

SYMMETRY_TOL = 1e-10
CLAMP_TOL = 1e-10
SIGN_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Ordered eigenvalues and the matching orthonormal eigenvectors (columns)."""
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    variant: Variant = Variant.COMBINATORIAL
    degrees: Optional[np.ndarray] = None

    @property
    def n(self) -> int:
        return self.eigenvalues.shape[0]

    @property
    def lambda_max(self) -> float:
        return float(self.eigenvalues[-1])

    @property
    def is_normalized(self) -> bool:
        return self.variant is Variant.NORMALIZED

    @property
    def sqrt_degrees(self) -> np.ndarray:
        if self.degrees is None:
            raise DimensionMismatch("Spectrum was built without degree information")
        return np.sqrt(self.degrees)

    @property
    def sqrt_degree_norm(self) -> float:
        """||sqrt(d)||_2, the normalized-basis counterpart of sqrt(N)."""
        return float(np.linalg.norm(self.sqrt_degrees))


@dataclass(frozen=True, eq=False)
class CoherenceReport:
    mu: float
    mu_per_eigvec: np.ndarray
    nu_per_vertex: np.ndarray


def _check_length(s: Spectrum, values: np.ndarray, what: str) -> np.ndarray:
    values = np.asarray(values)
    if values.shape[0] != s.n:
        raise DimensionMismatch(f"{what} has length {values.shape[0]}, spectrum has N={s.n}")
    return values


def _apply_sign_convention(vectors: np.ndarray) -> np.ndarray:
    """Make the first entry above SIGN_TOL in magnitude positive, per column."""
    significant = np.abs(vectors) > SIGN_TOL
    first = significant.argmax(axis=0)
    signs = np.sign(vectors[first, np.arange(vectors.shape[1])])
    signs[signs == 0] = 1.0
    return vectors * signs


def eigendecompose(L: np.ndarray, variant: Union[str, Variant] = Variant.COMBINATORIAL,
                   degrees: Optional[np.ndarray] = None) -> Spectrum:
    """
    Full symmetric eigendecomposition of a graph Laplacian.

    Eigenvalues within CLAMP_TOL below zero are clamped to 0 and the first
    eigenvector is replaced by its exact closed form (constant for the
    combinatorial Laplacian, sqrt(d)/||sqrt(d)|| for the normalized one).

    Raises:
        NotSymmetric: L deviates from L^T beyond tolerance
        EigensolverFailure: LAPACK did not converge or L is not PSD
    """
    variant = Variant(variant)
    L = np.asarray(L, dtype=float)
    if L.ndim != 2 or L.shape[0] != L.shape[1]:
        raise NotSymmetric(f"Laplacian must be square, got shape {L.shape}")
    scale = max(1.0, float(np.abs(L).max(initial=0.0)))
    if np.abs(L - L.T).max(initial=0.0) > SYMMETRY_TOL * scale:
        raise NotSymmetric("Laplacian is not symmetric")

    logger.debug("eigendecomposing %d x %d %s Laplacian", L.shape[0], L.shape[0], variant.value)
    try:
        eigenvalues, eigenvectors = scipy.linalg.eigh(L)
    except (np.linalg.LinAlgError, ValueError) as e:
        raise EigensolverFailure(f"eigh failed: {e}") from e

    if not np.all(np.isfinite(eigenvalues)):
        raise EigensolverFailure("eigh returned non-finite eigenvalues")
    if eigenvalues[0] < -CLAMP_TOL * scale:
        raise EigensolverFailure(f"Laplacian has negative eigenvalue {eigenvalues[0]:.3e}")
    eigenvalues = np.where(eigenvalues < 0, 0.0, eigenvalues)
    if eigenvalues[0] <= CLAMP_TOL:
        eigenvalues[0] = 0.0

    n = L.shape[0]
    if variant is Variant.COMBINATORIAL:
        eigenvectors[:, 0] = 1.0 / np.sqrt(n)
    elif degrees is not None:
        root = np.sqrt(np.asarray(degrees, dtype=float))
        eigenvectors[:, 0] = root / np.linalg.norm(root)

    eigenvectors = _apply_sign_convention(eigenvectors)
    return Spectrum(
        eigenvalues=eigenvalues,
        eigenvectors=eigenvectors,
        variant=variant,
        degrees=None if degrees is None else np.asarray(degrees, dtype=float),
    )


def spectrum_from_graph(g: Graph, variant: Union[str, Variant] = Variant.COMBINATORIAL) -> Spectrum:
    """Laplacian of ``g`` followed by ``eigendecompose``."""
    return eigendecompose(laplacian(g, variant), variant, degrees=g.degrees)


def fourier_ring_spectrum(n: int) -> Spectrum:
    """
    Complex DFT eigenbasis of the unweighted ring on ``n`` vertices.

    chi_l(m) = exp(2 pi i l m / n) / sqrt(n), ordered by eigenvalue and then
    by l, so conjugate pairs sit next to each other.
    """
    ell = np.arange(n)
    folded = np.minimum(ell, n - ell)
    eigenvalues = 2.0 - 2.0 * np.cos(2.0 * np.pi * folded / n)
    eigenvalues[0] = 0.0
    order = np.lexsort((ell, folded))
    phases = np.outer(np.arange(n), ell[order])
    eigenvectors = np.exp(2j * np.pi * phases / n) / np.sqrt(n)
    return Spectrum(
        eigenvalues=eigenvalues[order],
        eigenvectors=eigenvectors,
        variant=Variant.COMBINATORIAL,
        degrees=np.full(n, 2.0),
    )


# =============================================================================
# Graph Fourier transform
# =============================================================================

def gft(s: Spectrum, f: np.ndarray) -> np.ndarray:
    """f_hat(l) = <f, chi_l> = sum_n f(n) conj(chi_l(n))."""
    f = _check_length(s, f, "signal")
    return s.eigenvectors.conj().T @ f


def igft(s: Spectrum, fhat: np.ndarray) -> np.ndarray:
    """f(n) = sum_l f_hat(l) chi_l(n)."""
    fhat = _check_length(s, fhat, "spectral vector")
    return s.eigenvectors @ fhat


def coherence(s: Spectrum) -> CoherenceReport:
    magnitudes = np.abs(s.eigenvectors)
    mu_per_eigvec = magnitudes.max(axis=0)
    nu_per_vertex = magnitudes.max(axis=1)
    return CoherenceReport(
        mu=float(mu_per_eigvec.max()),
        mu_per_eigvec=mu_per_eigvec,
        nu_per_vertex=nu_per_vertex,
    )


# =============================================================================
# Export
# =============================================================================

def eigenvalue_table(s: Spectrum) -> str:
    """CSV ``l,lambda`` with one row per eigenvalue."""
    rows = ["l,lambda"] + [f"{ell},{lam!r}" for ell, lam in enumerate(s.eigenvalues.tolist())]
    return "\n".join(rows) + "\n"


def eigenvector_bytes(s: Spectrum) -> bytes:
    """Row-major little-endian float64 dump of the (real) eigenvector matrix."""
    if np.iscomplexobj(s.eigenvectors):
        raise DimensionMismatch("Binary eigenvector dump supports real bases only")
    return np.ascontiguousarray(s.eigenvectors, dtype="<f8").tobytes(order="C")


def eigenvectors_from_bytes(raw: bytes, n: int) -> np.ndarray:
    values = np.frombuffer(raw, dtype="<f8")
    if values.size != n * n:
        raise DimensionMismatch(f"Eigenvector dump has {values.size} values, expected {n * n}")
    return values.reshape(n, n).astype(float)
