"""
Generalized convolution, translation and modulation on graphs.

All operators work in the eigenbasis carried by a ``Spectrum``. Windows may
be given as a ``Kernel`` (evaluated on the spectrum) or as a vertex-domain
signal (transformed with the GFT).
"""

import hashlib
import json
import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, Optional, Sequence, Tuple, Union

import numpy as np
from numpy.polynomial import chebyshev

from src.errors import (
    DisconnectedDual,
    IndexOutOfRange,
    InfeasibleSpec,
    UnsupportedKernelForm,
    VariantMismatch,
    ZeroKernel,
)
from src.graph_core import Graph, Variant, is_connected, laplacian
from src.spectral import Spectrum, gft, igft, spectrum_from_graph

logger = logging.getLogger(__name__)

DUAL_REGULARIZER = 1e-6
CHEBYSHEV_QUADRATURE_POINTS = 1000


class KernelForm(Enum):
    HEAT = "heat"
    POLYNOMIAL = "polynomial"
    SAMPLED = "sampled"


@dataclass(frozen=True, eq=False)
class Kernel:
    """
    A spectral-domain window g_hat on [0, lambda_max].

    heat:        C * exp(-tau * lambda)
    polynomial:  sum_k a_k lambda^k
    sampled:     explicit values, one per eigenvalue

    With ``normalized`` set, the constant is chosen on each spectrum so that
    sum_l g_hat(lambda_l)^2 = 1, i.e. ||g||_2 = 1.
    """
    form: KernelForm
    tau: float = 0.0
    coeffs: Tuple[float, ...] = ()
    values: Optional[Tuple[float, ...]] = None
    constant: float = 1.0
    normalized: bool = False

    @classmethod
    def heat(cls, tau: float, normalized: bool = False, constant: float = 1.0) -> "Kernel":
        if tau < 0:
            raise InfeasibleSpec(f"Heat kernel needs tau >= 0, got {tau}")
        return cls(form=KernelForm.HEAT, tau=float(tau), constant=float(constant),
                   normalized=normalized)

    @classmethod
    def polynomial(cls, coeffs: Sequence[float], normalized: bool = False) -> "Kernel":
        if len(coeffs) == 0:
            raise InfeasibleSpec("Polynomial kernel needs at least one coefficient")
        return cls(form=KernelForm.POLYNOMIAL, coeffs=tuple(float(a) for a in coeffs),
                   normalized=normalized)

    @classmethod
    def sampled(cls, values: Sequence[float], normalized: bool = False) -> "Kernel":
        return cls(form=KernelForm.SAMPLED, values=tuple(float(v) for v in values),
                   normalized=normalized)

    @property
    def degree(self) -> int:
        if self.form is not KernelForm.POLYNOMIAL:
            raise UnsupportedKernelForm(f"{self.form.value} kernel has no polynomial degree")
        return len(self.coeffs) - 1

    @property
    def is_analytic(self) -> bool:
        return self.form in (KernelForm.HEAT, KernelForm.POLYNOMIAL)

    def evaluate_at(self, lam: np.ndarray) -> np.ndarray:
        """Unnormalized analytic evaluation at arbitrary points."""
        lam = np.asarray(lam, dtype=float)
        if self.form is KernelForm.HEAT:
            return self.constant * np.exp(-self.tau * lam)
        if self.form is KernelForm.POLYNOMIAL:
            return np.polynomial.polynomial.polyval(lam, self.coeffs)
        raise UnsupportedKernelForm("Sampled kernels have no analytic form")

    def to_dict(self) -> Dict[str, Any]:
        if self.form is KernelForm.HEAT:
            params = {"tau": self.tau, "constant": self.constant}
        elif self.form is KernelForm.POLYNOMIAL:
            params = {"coeffs": list(self.coeffs)}
        else:
            params = {"values": list(self.values)}
        return {"form": self.form.value, "params": params, "normalized": self.normalized}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "Kernel":
        form = KernelForm(data.get("form"))
        params = data.get("params", {})
        normalized = bool(data.get("normalized", False))
        if form is KernelForm.HEAT:
            return cls.heat(params["tau"], normalized, params.get("constant", 1.0))
        if form is KernelForm.POLYNOMIAL:
            return cls.polynomial(params["coeffs"], normalized)
        return cls.sampled(params["values"], normalized)

    @classmethod
    def from_json(cls, text: str) -> "Kernel":
        return cls.from_dict(json.loads(text))

    def content_hash(self) -> str:
        return hashlib.sha256(self.to_json().encode("utf-8")).hexdigest()


Window = Union[Kernel, np.ndarray]


# =============================================================================
# Kernel evaluation and convolution
# =============================================================================

def kernel_evaluate(k: Kernel, s: Spectrum) -> np.ndarray:
    """g_hat(lambda_l) for every eigenvalue of ``s``."""
    if k.form is KernelForm.SAMPLED:
        values = np.asarray(k.values, dtype=float)
        if values.shape[0] != s.n:
            raise IndexOutOfRange(f"Sampled kernel has {values.shape[0]} values, N={s.n}")
    else:
        values = k.evaluate_at(s.eigenvalues)

    if k.normalized:
        norm = np.linalg.norm(values)
        if norm == 0:
            raise ZeroKernel("Cannot normalize an all-zero kernel")
        values = values / norm
    return values


def window_hat(s: Spectrum, window: Window) -> np.ndarray:
    """Spectral representation of a window given as a Kernel or a signal."""
    if isinstance(window, Kernel):
        return kernel_evaluate(window, s)
    return gft(s, window)


def convolve(s: Spectrum, f: np.ndarray, g: np.ndarray) -> np.ndarray:
    """(f * g)(n) = sum_l f_hat(l) g_hat(l) chi_l(n)."""
    return igft(s, gft(s, f) * gft(s, g))


def convolution_identity(s: Spectrum) -> np.ndarray:
    """g0(n) = sum_l chi_l(n), whose spectrum is all ones."""
    return s.eigenvectors.sum(axis=1)


# =============================================================================
# Translation
# =============================================================================

def _check_index(value: int, n: int, what: str) -> int:
    if not 0 <= int(value) < n:
        raise IndexOutOfRange(f"{what} {value} outside 0..{n - 1}")
    return int(value)


def _require_variant(s: Spectrum, variant: Variant, operation: str):
    if s.variant is not variant:
        raise VariantMismatch(
            f"{operation} needs a {variant.value} spectrum, got {s.variant.value}"
        )


def _translation_scale(s: Spectrum) -> float:
    return s.sqrt_degree_norm if s.is_normalized else float(np.sqrt(s.n))


def _translate_hat(s: Spectrum, ghat: np.ndarray, i: int, scale: float) -> np.ndarray:
    return scale * (s.eigenvectors @ (ghat * s.eigenvectors[i].conj()))


def translate(s: Spectrum, g: Window, i: int) -> np.ndarray:
    """(T_i g)(n) = sqrt(N) sum_l g_hat(l) conj(chi_l(i)) chi_l(n)."""
    _require_variant(s, Variant.COMBINATORIAL, "translate")
    i = _check_index(i, s.n, "vertex")
    return _translate_hat(s, window_hat(s, g), i, np.sqrt(s.n))


def translate_all(s: Spectrum, g: Window) -> np.ndarray:
    """Matrix whose row i is T_i g."""
    ghat = window_hat(s, g)
    scale = _translation_scale(s)
    chi = s.eigenvectors
    # entry [i, n] = (T_i g)(n) / scale
    return scale * (chi.conj() @ (ghat[:, None] * chi.T))


def translation_norms_sq(s: Spectrum, g: Window) -> np.ndarray:
    """||T_n g||_2^2 = N sum_l |g_hat(l)|^2 |chi_l(n)|^2 for every n."""
    ghat = window_hat(s, g)
    return _translation_scale(s) ** 2 * (np.abs(s.eigenvectors) ** 2 @ (np.abs(ghat) ** 2))


def translate_normalized(s: Spectrum, g: Window, i: int) -> np.ndarray:
    """Translation in the normalized-Laplacian basis, scaled by ||sqrt(d)||_2."""
    _require_variant(s, Variant.NORMALIZED, "translate_normalized")
    i = _check_index(i, s.n, "vertex")
    return _translate_hat(s, window_hat(s, g), i, s.sqrt_degree_norm)


# =============================================================================
# Modulation
# =============================================================================

def modulate(s: Spectrum, f: np.ndarray, k: int) -> np.ndarray:
    """(M_k f)(n) = sqrt(N) f(n) chi_k(n); M_0 is the identity."""
    _require_variant(s, Variant.COMBINATORIAL, "modulate")
    k = _check_index(k, s.n, "frequency index")
    f = np.asarray(f)
    if k == 0:
        return f.copy()
    return np.sqrt(s.n) * f * s.eigenvectors[:, k]


def modulate_normalized(s: Spectrum, f: np.ndarray, k: int) -> np.ndarray:
    """(M~_k f)(n) = f(n) chi~_k(n) ||sqrt(d)||_2 / sqrt(d_n); M~_0 is the identity."""
    _require_variant(s, Variant.NORMALIZED, "modulate_normalized")
    k = _check_index(k, s.n, "frequency index")
    f = np.asarray(f)
    if k == 0:
        return f.copy()
    return f * s.eigenvectors[:, k] * s.sqrt_degree_norm / s.sqrt_degrees


# =============================================================================
# Dual graph on the spectrum
# =============================================================================

class DualWeighting(Enum):
    INVERSE_GAP = "inverse_gap"
    EXPONENTIAL = "exponential"
    THRESHOLDED = "thresholded"


@dataclass(frozen=True, eq=False)
class DualGraph:
    """Graph whose vertex l is the eigenvalue lambda_l of the base spectrum."""
    base: Graph
    weighting: DualWeighting
    spectrum: Spectrum = field(repr=False)


def _dual_adjacency(eigenvalues: np.ndarray, weighting: DualWeighting,
                    hops: int, scale: Optional[float]) -> np.ndarray:
    n = eigenvalues.shape[0]
    gaps = np.abs(np.diff(eigenvalues))
    W = np.zeros((n, n))
    idx = np.arange(n - 1)

    if weighting is DualWeighting.INVERSE_GAP:
        W[idx, idx + 1] = 1.0 / (gaps + DUAL_REGULARIZER)
    elif weighting is DualWeighting.EXPONENTIAL:
        theta = scale if scale is not None else max(gaps.mean(), DUAL_REGULARIZER)
        W[idx, idx + 1] = np.exp(-gaps / theta)
    else:
        sigma = scale if scale is not None else max(gaps.max(), DUAL_REGULARIZER)
        for offset in range(1, hops + 1):
            rows = np.arange(n - offset)
            dist = np.abs(eigenvalues[rows + offset] - eigenvalues[rows])
            W[rows, rows + offset] = np.where(
                dist <= sigma, np.exp(-dist ** 2 / (2 * sigma ** 2)), 0.0
            )
    return W + W.T


def build_dual_graph(s: Spectrum, weighting: Union[str, DualWeighting] = DualWeighting.INVERSE_GAP,
                     hops: int = 2, scale: Optional[float] = None) -> DualGraph:
    """
    Build a graph on sigma(L) so that modulation becomes translation on it.

    inverse_gap:  path, W_{k,k+1} = 1 / (|lambda_k - lambda_{k+1}| + 1e-6)
    exponential:  path, W_{k,k+1} = exp(-gap / scale), scale = mean gap by default
    thresholded:  ``hops`` neighbours per side, Gaussian weights cut at ``scale``
                  (largest consecutive gap by default)
    """
    weighting = DualWeighting(weighting)
    W = _dual_adjacency(s.eigenvalues, weighting, hops, scale)
    if not is_connected(W):
        raise DisconnectedDual(f"{weighting.value} dual graph is disconnected")
    dual = Graph(adjacency=W, name=f"dual_{weighting.value}")
    return DualGraph(base=dual, weighting=weighting, spectrum=spectrum_from_graph(dual))


def alt_modulate_hat(s: Spectrum, dg: DualGraph, window: Window, k: int,
                     placement: str = "original") -> np.ndarray:
    """
    Spectral-domain result of modulation as translation on the dual graph.

    placement="original": ``window`` is f_hat on sigma(L) (a Kernel evaluated
    on ``s`` or a vertex signal f); it is transformed once more on the dual.
    placement="dual": ``window`` is f_hat_hat on sigma(L_dual) (a Kernel
    evaluated on the dual spectrum, or explicit values).
    """
    k = _check_index(k, s.n, "frequency index")
    if placement == "original":
        fhathat = gft(dg.spectrum, window_hat(s, window))
    elif placement == "dual":
        if isinstance(window, Kernel):
            fhathat = kernel_evaluate(window, dg.spectrum)
        else:
            fhathat = np.asarray(window)
            if fhathat.shape[0] != s.n:
                raise IndexOutOfRange(f"Dual kernel has {fhathat.shape[0]} values, N={s.n}")
    else:
        raise InfeasibleSpec(f"Unknown kernel placement: {placement}")
    return _translate_hat(dg.spectrum, fhathat, k, np.sqrt(s.n))


def alt_modulate(s: Spectrum, dg: DualGraph, window: Window, k: int,
                 placement: str = "original") -> np.ndarray:
    """Vertex-domain dual-graph modulation (inverse GFT on the base spectrum)."""
    return igft(s, alt_modulate_hat(s, dg, window, k, placement))


# =============================================================================
# Chebyshev approximation
# =============================================================================

def chebyshev_coefficients(kernel: Kernel, order: int, lambda_bound: float,
                           constant: float = 1.0,
                           points: int = CHEBYSHEV_QUADRATURE_POINTS) -> np.ndarray:
    """Coefficients c_0..c_order of g_hat on [0, lambda_bound] (Gauss-Chebyshev quadrature)."""
    x, w = chebyshev.chebgauss(points)
    samples = constant * kernel.evaluate_at(lambda_bound / 2.0 * (x + 1.0))
    return 2.0 / np.pi * (chebyshev.chebvander(x, order).T @ (w * samples))


def chebyshev_filter(g: Graph, k: Kernel, f: np.ndarray, order: int,
                     spectrum: Optional[Spectrum] = None,
                     variant: Union[str, Variant] = Variant.COMBINATORIAL) -> np.ndarray:
    """
    Approximate g_hat(L) f with a truncated Chebyshev expansion.

    Only matrix-vector products with L are used. The expansion interval is
    [0, lambda_max] when ``spectrum`` is given, otherwise [0, 2 d_max]
    (2 for the normalized Laplacian).

    Raises:
        UnsupportedKernelForm: sampled kernels, or normalized kernels without
            a spectrum to normalize on
    """
    if not k.is_analytic:
        raise UnsupportedKernelForm("Chebyshev filtering needs a heat or polynomial kernel")
    if order < 1:
        raise InfeasibleSpec(f"Chebyshev order must be >= 1, got {order}")
    variant = Variant(variant)

    constant = 1.0
    if k.normalized:
        if spectrum is None:
            raise UnsupportedKernelForm("Normalized kernels need a spectrum for their constant")
        constant = 1.0 / np.linalg.norm(k.evaluate_at(spectrum.eigenvalues))

    if spectrum is not None:
        bound = spectrum.lambda_max
    else:
        bound = 2.0 if variant is Variant.NORMALIZED else 2.0 * g.d_max

    L = laplacian(g, variant)
    coeffs = chebyshev_coefficients(k, order, bound, constant)
    half = bound / 2.0

    def shifted(x):
        return (L @ x - half * x) / half

    f = np.asarray(f)
    previous, current = f, shifted(f)
    result = 0.5 * coeffs[0] * previous + coeffs[1] * current
    for m in range(2, order + 1):
        previous, current = current, 2.0 * shifted(current) - previous
        result = result + coeffs[m] * current
    return result
