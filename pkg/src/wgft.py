"""
Windowed graph Fourier transform.

Atoms are g_{i,k} = M_k T_i g. The transform is computed through the
windowed-signal route (one GFT per translated copy of the window); the
explicit inner-product route is kept for cross-checking.
"""

import hashlib
import logging
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Dict, Iterable, Optional

import numpy as np

from src.errors import (
    BoundViolation,
    DimensionMismatch,
    InfeasibleSpec,
    NearSingularNorm,
    VariantMismatch,
    ZeroMeanWindow,
    ZeroSignal,
    ZeroWindow,
)
from src.operators import (
    Kernel,
    Window,
    modulate,
    translate,
    translate_all,
    translation_norms_sq,
    window_hat,
)
from src.spectral import Spectrum, coherence, igft

logger = logging.getLogger(__name__)

NORM_WARN_TOL = 1e-6
NORM_FAIL_TOL = 1e-12
FRAME_REL_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class WgftCoefficients:
    """Sf(i, k) indexed [vertex, frequency]."""
    matrix: np.ndarray
    window_ref: str
    graph_ref: str = ""

    @property
    def n(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class FrameBounds:
    """
    lower_theory <= A <= B <= upper_theory, where A and B are the tight
    frame bounds min_n / max_n of N ||T_n g||^2.
    """
    lower_theory: float
    A: float
    B: float
    upper_theory: float

    def holds(self, rel_tol: float = FRAME_REL_TOL) -> bool:
        slack = rel_tol * max(1.0, self.upper_theory)
        return (self.lower_theory <= self.A + slack
                and self.A <= self.B + slack
                and self.B <= self.upper_theory + slack)


@dataclass(frozen=True)
class FrameCheck:
    """Energy ratio sum |Sf|^2 / ||f||^2 against the frame bounds."""
    ratio: float
    A: float
    B: float
    energy: float
    identity_energy: float

    @property
    def within_bounds(self) -> bool:
        slack = FRAME_REL_TOL * max(1.0, self.B)
        return self.A - slack <= self.ratio <= self.B + slack


def window_ref(window: Window) -> str:
    """Stable identifier for a window (kernel parameters or signal bytes)."""
    if isinstance(window, Kernel):
        return window.content_hash()
    data = np.ascontiguousarray(np.asarray(window, dtype=complex))
    return hashlib.sha256(data.tobytes()).hexdigest()


def _nonzero_window(s: Spectrum, g: Window) -> np.ndarray:
    ghat = window_hat(s, g)
    if not np.any(np.abs(ghat) > 0):
        raise ZeroWindow("Window is identically zero")
    return ghat


def _require_combinatorial(s: Spectrum):
    if s.is_normalized:
        raise VariantMismatch("The windowed transform is defined on the combinatorial basis")


def _check_signal(s: Spectrum, f: np.ndarray) -> np.ndarray:
    _require_combinatorial(s)
    f = np.asarray(f)
    if f.ndim != 1 or f.shape[0] != s.n:
        raise DimensionMismatch(f"Signal has shape {f.shape}, spectrum has N={s.n}")
    return f


# =============================================================================
# Atoms and transform
# =============================================================================

def atom(s: Spectrum, g: Window, i: int, k: int, order: str = "MT") -> np.ndarray:
    """
    Windowed Fourier atom centred at vertex ``i`` and frequency ``k``.

    order="MT" gives M_k T_i g (the default dictionary); order="TM" gives
    T_i M_k g, which differs on non-ring graphs.
    """
    if order == "MT":
        return modulate(s, translate(s, g, i), k)
    if order == "TM":
        g_vertex = igft(s, window_hat(s, g))
        return translate(s, modulate(s, g_vertex, k), i)
    raise InfeasibleSpec(f"Unknown atom order: {order}")


def _coefficient_rows(s: Spectrum, translated: np.ndarray, f: np.ndarray) -> np.ndarray:
    # Sf(i, k) = sqrt(N) * GFT(f * conj(T_i g))(k)
    windowed = f[None, :] * translated.conj()
    return np.sqrt(s.n) * (windowed @ s.eigenvectors.conj())


def transform(s: Spectrum, g: Window, f: np.ndarray, workers: int = 1,
              graph_ref: str = "") -> WgftCoefficients:
    """
    Sf(i, k) = <f, g_{i,k}> for every vertex i and frequency k.

    With ``workers`` > 1 the rows are split into that many fixed contiguous
    blocks evaluated on a thread pool; the block layout depends only on
    ``workers``, so results do not depend on scheduling.

    Raises:
        ZeroWindow: g_hat vanishes everywhere
        DimensionMismatch: len(f) != N
    """
    f = _check_signal(s, f)
    _nonzero_window(s, g)
    translated = translate_all(s, g)

    if workers <= 1:
        matrix = _coefficient_rows(s, translated, f)
    else:
        blocks = np.array_split(np.arange(s.n), workers)
        with ThreadPoolExecutor(max_workers=workers) as executor:
            parts = list(executor.map(
                lambda rows: _coefficient_rows(s, translated[rows], f), blocks
            ))
        matrix = np.vstack(parts)

    logger.debug("WGFT of %d-vertex signal (%d worker(s))", s.n, max(1, workers))
    return WgftCoefficients(matrix=matrix.astype(complex), window_ref=window_ref(g),
                            graph_ref=graph_ref)


def transform_direct(s: Spectrum, g: Window, f: np.ndarray,
                     graph_ref: str = "") -> WgftCoefficients:
    """Same coefficients, built atom by atom as explicit inner products."""
    f = _check_signal(s, f)
    _nonzero_window(s, g)
    translated = translate_all(s, g)
    matrix = np.empty((s.n, s.n), dtype=complex)
    for i in range(s.n):
        # column k is the atom M_k T_i g = sqrt(N) chi_k (T_i g)
        atoms = np.sqrt(s.n) * translated[i][:, None] * s.eigenvectors
        matrix[i] = atoms.conj().T @ f
    return WgftCoefficients(matrix=matrix, window_ref=window_ref(g), graph_ref=graph_ref)


# =============================================================================
# Frame bounds
# =============================================================================

def frame_bounds(s: Spectrum, g: Window) -> FrameBounds:
    """
    Frame bounds of the atom dictionary.

    A = min_n N ||T_n g||^2, B = max_n N ||T_n g||^2, sandwiched between
    N |g_hat(0)|^2 and N^2 mu^2 ||g||^2.
    """
    _require_combinatorial(s)
    ghat = _nonzero_window(s, g)
    scaled = s.n * translation_norms_sq(s, g)
    mu = coherence(s).mu
    return FrameBounds(
        lower_theory=float(s.n * abs(ghat[0]) ** 2),
        A=float(scaled.min()),
        B=float(scaled.max()),
        upper_theory=float(s.n ** 2 * mu ** 2 * np.sum(np.abs(ghat) ** 2)),
    )


def frame_inequality_check(s: Spectrum, g: Window, f: np.ndarray) -> FrameCheck:
    """
    Compare sum |Sf|^2 with the frame bounds and with the exact energy
    identity sum_n N ||T_n g||^2 |f(n)|^2.

    Raises:
        ZeroSignal: f is identically zero
        BoundViolation: the ratio leaves [A, B] or the identity fails
    """
    f = _check_signal(s, f)
    norm_sq = float(np.sum(np.abs(f) ** 2))
    if norm_sq == 0:
        raise ZeroSignal("Frame check needs a nonzero signal")

    bounds = frame_bounds(s, g)
    energy = float(np.sum(np.abs(transform(s, g, f).matrix) ** 2))
    identity = float(np.sum(s.n * translation_norms_sq(s, g) * np.abs(f) ** 2))
    check = FrameCheck(ratio=energy / norm_sq, A=bounds.A, B=bounds.B,
                       energy=energy, identity_energy=identity)

    if not check.within_bounds:
        raise BoundViolation(
            f"Energy ratio {check.ratio:.6g} outside frame bounds [{bounds.A:.6g}, {bounds.B:.6g}]",
            report=check,
        )
    if abs(energy - identity) > FRAME_REL_TOL * max(1.0, identity):
        raise BoundViolation(f"Energy {energy:.12g} differs from identity value {identity:.12g}",
                             report=check)
    return check


# =============================================================================
# Reconstruction and spectrogram
# =============================================================================

def reconstruct(s: Spectrum, g: Window, c: WgftCoefficients) -> np.ndarray:
    """
    f(n) = 1 / (N ||T_n g||^2) * sum_i sum_k Sf(i, k) g_{i,k}(n).

    Raises:
        ZeroMeanWindow: g_hat(0) = 0, so the frame is not guaranteed
        NearSingularNorm: min_n ||T_n g|| below 1e-12
    """
    _require_combinatorial(s)
    if c.matrix.shape != (s.n, s.n):
        raise DimensionMismatch(f"Coefficients have shape {c.matrix.shape}, N={s.n}")
    ghat = _nonzero_window(s, g)
    if abs(ghat[0]) <= NORM_FAIL_TOL * np.abs(ghat).max():
        raise ZeroMeanWindow("Window has g_hat(0) = 0; reconstruction is not guaranteed")

    norms_sq = translation_norms_sq(s, g)
    smallest = float(np.sqrt(norms_sq.min()))
    if smallest < NORM_FAIL_TOL:
        raise NearSingularNorm(f"min ||T_n g|| = {smallest:.3e}")
    if smallest < NORM_WARN_TOL:
        warnings.warn(f"min ||T_n g|| = {smallest:.3e}; reconstruction is ill-conditioned",
                      RuntimeWarning, stacklevel=2)

    translated = translate_all(s, g)
    # sum_k Sf(i, k) g_{i,k}(n) = sqrt(N) (T_i g)(n) sum_k Sf(i, k) chi_k(n)
    summed = np.sqrt(s.n) * translated * (c.matrix @ s.eigenvectors.T)
    result = summed.sum(axis=0) / (s.n * norms_sq)
    return np.real_if_close(result, tol=1000)


def spectrogram(c: WgftCoefficients) -> np.ndarray:
    """|Sf(i, k)|^2, rows are vertices and columns frequencies."""
    return np.abs(c.matrix) ** 2


def spectrogram_frames(c: WgftCoefficients, ks: Optional[Iterable[int]] = None) -> Dict[int, np.ndarray]:
    """Vertex maps |Sf(., k)|^2 for selected frequencies (all when ``ks`` is None)."""
    power = spectrogram(c)
    ks = range(c.n) if ks is None else ks
    frames = {}
    for k in ks:
        if not 0 <= int(k) < c.n:
            raise DimensionMismatch(f"frequency index {k} outside 0..{c.n - 1}")
        frames[int(k)] = power[:, int(k)]
    return frames
