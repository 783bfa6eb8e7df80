"""
Vertex- and spectral-domain localization checks.

Each check measures a quantity and compares it with the closed-form bound
it is guaranteed to satisfy. A measured violation beyond tolerance raises
``BoundViolation``; vacuous bounds (right-hand side above 1 for normalized
ratios) are reported, not hidden.
"""

import logging
import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.special import gammaln, lambertw

from src.errors import (
    BoundViolation,
    DegenerateDegrees,
    InfeasibleSpec,
    SameVertex,
    VariantMismatch,
    WrongKernelForm,
    ZeroDC,
    ZeroSignal,
)
from src.graph_core import DistanceMatrix, Graph, geodesic_distances
from src.operators import (
    Kernel,
    KernelForm,
    Window,
    _check_index,
    modulate,
    modulate_normalized,
    translate,
    translate_normalized,
    window_hat,
)
from src.spectral import Spectrum, coherence, gft, igft

logger = logging.getLogger(__name__)

BOUND_REL_TOL = 1e-9
POLY_OUTSIDE_TOL = 1e-8
INF_GAMMA_TOL = 1e-10


@dataclass(frozen=True)
class SpreadReport:
    center: int
    spread_sq: float
    bound: float = float("inf")

    @property
    def satisfied(self) -> bool:
        return self.spread_sq <= self.bound * (1 + BOUND_REL_TOL) + BOUND_REL_TOL


@dataclass(frozen=True)
class NormBounds:
    """lower <= ||T_i g|| <= upper."""
    vertex: int
    lower: float
    value: float
    upper: float


@dataclass(frozen=True)
class PolyLocalization:
    vertex: int
    degree: int
    outside_max: float
    overall_max: float


@dataclass(frozen=True)
class DecayBound:
    """|T_i g(n)| / ||T_i g|| against the factorial bound and its Stirling form."""
    vertex: int
    target: int
    distance: int
    lhs: float
    rhs: float
    rhs_stirling: float

    @property
    def vacuous(self) -> bool:
        return self.rhs > 1.0


@dataclass(frozen=True, eq=False)
class ConcentrationReport:
    """Spectral concentration of M_k f around lambda_k."""
    frequency: int
    condition_met: bool
    gamma: float
    gamma_max: float
    ratios: np.ndarray
    energy_ratio: float
    energy_bound: Optional[float]


def _translate_any(s: Spectrum, g: Window, i: int) -> np.ndarray:
    if s.is_normalized:
        return translate_normalized(s, g, i)
    return translate(s, g, i)


def _violates(lhs: float, rhs: float) -> bool:
    return lhs > rhs * (1 + BOUND_REL_TOL) + BOUND_REL_TOL


# =============================================================================
# Translation norms
# =============================================================================

def translation_norm_bounds(s: Spectrum, g: Window, i: int) -> NormBounds:
    """|g_hat(0)| <= ||T_i g|| <= sqrt(N) nu_i ||g|| (combinatorial basis)."""
    if s.is_normalized:
        raise VariantMismatch("Use translation_norm_bounds_normalized for normalized spectra")
    i = _check_index(i, s.n, "vertex")
    ghat = window_hat(s, g)
    nu_i = coherence(s).nu_per_vertex[i]
    bounds = NormBounds(
        vertex=i,
        lower=float(abs(ghat[0])),
        value=float(np.linalg.norm(translate(s, g, i))),
        upper=float(np.sqrt(s.n) * nu_i * np.linalg.norm(ghat)),
    )
    _assert_norm_bounds(bounds)
    return bounds


def translation_norm_bounds_normalized(s: Spectrum, g: Window, i: int) -> NormBounds:
    """sqrt(d_i) |g_hat(0)| <= ||T~_i g|| <= nu~_i ||sqrt(d)|| ||g||."""
    if not s.is_normalized:
        raise VariantMismatch("translation_norm_bounds_normalized needs a normalized spectrum")
    i = _check_index(i, s.n, "vertex")
    ghat = window_hat(s, g)
    nu_i = coherence(s).nu_per_vertex[i]
    bounds = NormBounds(
        vertex=i,
        lower=float(s.sqrt_degrees[i] * abs(ghat[0])),
        value=float(np.linalg.norm(translate_normalized(s, g, i))),
        upper=float(nu_i * s.sqrt_degree_norm * np.linalg.norm(ghat)),
    )
    _assert_norm_bounds(bounds)
    return bounds


def _assert_norm_bounds(bounds: NormBounds):
    if _violates(bounds.lower, bounds.value) or _violates(bounds.value, bounds.upper):
        raise BoundViolation(
            f"||T_{bounds.vertex} g|| = {bounds.value:.6g} outside "
            f"[{bounds.lower:.6g}, {bounds.upper:.6g}]",
            report=bounds,
        )


# =============================================================================
# Vertex-domain localization
# =============================================================================

def poly_localization_check(g: Graph, s: Spectrum, p: Kernel, i: int,
                            dm: Optional[DistanceMatrix] = None) -> PolyLocalization:
    """
    A degree-K polynomial kernel translated to ``i`` vanishes beyond K hops.

    Raises:
        WrongKernelForm: ``p`` is not a polynomial kernel
        BoundViolation: some vertex farther than K hops carries mass
    """
    if not isinstance(p, Kernel) or p.form is not KernelForm.POLYNOMIAL:
        raise WrongKernelForm("Localization check needs a polynomial kernel")
    dm = dm or geodesic_distances(g)
    i = _check_index(i, s.n, "vertex")

    magnitudes = np.abs(_translate_any(s, p, i))
    outside = dm.dist[i] > p.degree
    report = PolyLocalization(
        vertex=i,
        degree=p.degree,
        outside_max=float(magnitudes[outside].max(initial=0.0)),
        overall_max=float(magnitudes.max()),
    )
    if report.outside_max > POLY_OUTSIDE_TOL * report.overall_max:
        raise BoundViolation(
            f"Degree-{p.degree} kernel at vertex {i} leaks {report.outside_max:.3e} "
            f"beyond {p.degree} hops",
            report=report,
        )
    return report


def _log_factorial_bound(log_prefactor: float, distance: int, rate: float) -> float:
    # log(prefactor / d! * rate^d)
    if distance == 0:
        return log_prefactor
    if rate <= 0:
        return -np.inf
    return log_prefactor - gammaln(distance + 1) + distance * np.log(rate)


def smooth_decay_bound(s: Spectrum, g: Kernel, i: int, n: int,
                       dm: DistanceMatrix) -> DecayBound:
    """
    Heat-kernel decay: |T_i g(n)| / ||T_i g|| <= 2 sqrt(N) / d! (tau lambda_max / 4)^d
    with d the hop distance between i and n. Normalized spectra use
    ||sqrt(d)|| / sqrt(d_i) in place of sqrt(N).

    Raises:
        WrongKernelForm: ``g`` is not a heat kernel
        SameVertex: i == n
    """
    if not isinstance(g, Kernel) or g.form is not KernelForm.HEAT:
        raise WrongKernelForm("Smooth decay bound needs a heat kernel")
    i = _check_index(i, s.n, "vertex")
    n = _check_index(n, s.n, "vertex")
    if i == n:
        raise SameVertex(f"Decay bound needs two distinct vertices, got {i} twice")

    distance = int(dm.dist[i, n])
    translated = _translate_any(s, g, i)
    lhs = float(abs(translated[n]) / np.linalg.norm(translated))

    if s.is_normalized:
        prefactor = 2.0 * s.sqrt_degree_norm / s.sqrt_degrees[i]
    else:
        prefactor = 2.0 * np.sqrt(s.n)
    rate = g.tau * s.lambda_max / 4.0
    rhs = float(np.exp(_log_factorial_bound(np.log(prefactor), distance, rate)))

    # d! >= sqrt(2 pi d) (d/e)^d exp(1/(12d+1))
    if rate > 0:
        log_stirling = (np.log(prefactor) - 0.5 * np.log(2 * np.pi * distance)
                        - 1.0 / (12 * distance + 1) + distance * np.log(rate * np.e / distance))
        rhs_stirling = float(np.exp(log_stirling))
    else:
        rhs_stirling = 0.0

    report = DecayBound(vertex=i, target=n, distance=distance, lhs=lhs, rhs=rhs,
                        rhs_stirling=rhs_stirling)
    if report.vacuous:
        warnings.warn(f"Decay bound {rhs:.3g} at distance {distance} exceeds 1 and is vacuous",
                      RuntimeWarning, stacklevel=2)
    if _violates(lhs, rhs):
        raise BoundViolation(f"Decay {lhs:.6g} exceeds bound {rhs:.6g} at distance {distance}",
                             report=report)
    return report


# =============================================================================
# Vertex spread
# =============================================================================

def graph_spread(dm: DistanceMatrix, f: np.ndarray, i: int) -> SpreadReport:
    """Delta_i^2(f) = sum_n d(i, n)^2 |f(n)|^2 / ||f||^2."""
    f = np.asarray(f)
    norm_sq = float(np.sum(np.abs(f) ** 2))
    if norm_sq == 0:
        raise ZeroSignal("Spread of the zero signal is undefined")
    i = _check_index(i, f.shape[0], "vertex")
    spread = float(np.sum(dm.dist[i].astype(float) ** 2 * np.abs(f) ** 2) / norm_sq)
    return SpreadReport(center=i, spread_sq=spread)


def _degree_terms(g: Graph, i: int):
    support = g.support_degrees
    d_max = int(support.max())
    if d_max < 2:
        raise DegenerateDegrees("Spread bound needs a vertex with at least two neighbours")
    return int(support[i]), d_max


def heat_spread_bound(g: Graph, s: Spectrum, tau: float, i: int) -> float:
    """(N tau^2 lambda_max^2 d_i / 4) exp(tau^2 lambda_max^2 / (16 (d_max - 1)))."""
    i = _check_index(i, s.n, "vertex")
    d_i, d_max = _degree_terms(g, i)
    x = (tau * s.lambda_max) ** 2
    return float(s.n * x * d_i / 4.0 * np.exp(x / (16.0 * (d_max - 1))))


def heat_spread_bound_normalized(g: Graph, s: Spectrum, tau: float) -> float:
    """||sqrt(d)||^2 tau^2 exp(tau^2 / (4 (d_max - 1))) for the normalized basis."""
    if not s.is_normalized:
        raise VariantMismatch("heat_spread_bound_normalized needs a normalized spectrum")
    _, d_max = _degree_terms(g, 0)
    return float(s.sqrt_degree_norm ** 2 * tau ** 2 * np.exp(tau ** 2 / (4.0 * (d_max - 1))))


def tau_for_spread(g: Graph, s: Spectrum, epsilon: float, i: int,
                   dm: Optional[DistanceMatrix] = None) -> float:
    """
    Heat parameter whose spread bound equals ``epsilon``:

        tau = (4 / lambda_max) sqrt((d_max - 1) W(eps / (4 N d_i (d_max - 1))))

    The measured spread of T_i g_tau is checked against ``epsilon``.
    """
    if epsilon <= 0:
        raise InfeasibleSpec(f"epsilon must be positive, got {epsilon}")
    i = _check_index(i, s.n, "vertex")
    d_i, d_max = _degree_terms(g, i)
    omega = float(lambertw(epsilon / (4.0 * s.n * d_i * (d_max - 1))).real)
    tau = 4.0 / s.lambda_max * np.sqrt((d_max - 1) * omega)

    measured = graph_spread(dm or geodesic_distances(g),
                            _translate_any(s, Kernel.heat(tau), i), i)
    logger.debug("tau=%.6g gives spread %.6g at vertex %d (target %.6g)",
                 tau, measured.spread_sq, i, epsilon)
    if _violates(measured.spread_sq, epsilon):
        raise BoundViolation(f"Spread {measured.spread_sq:.6g} exceeds {epsilon:.6g} at tau={tau:.6g}",
                             report=measured)
    return float(tau)


# =============================================================================
# Spectral spread and concentration
# =============================================================================

def dual_spread_bound(n: int, tau_dual: float) -> float:
    """Spectral-spread bound 8 N tau^2 exp(tau^2) for a heat kernel placed on the dual graph."""
    return float(8.0 * n * tau_dual ** 2 * np.exp(tau_dual ** 2))


def spectral_spread(s: Spectrum, fhat: np.ndarray, k: int) -> float:
    """sum_l (lambda_l - lambda_k)^2 |f_hat(l)|^2 / ||f_hat||^2."""
    k = _check_index(k, s.n, "frequency index")
    power = np.abs(np.asarray(fhat)) ** 2
    total = power.sum()
    if total == 0:
        raise ZeroSignal("Spectral spread of the zero signal is undefined")
    return float(np.sum((s.eigenvalues - s.eigenvalues[k]) ** 2 * power) / total)


def maximal_gamma(s: Spectrum, f: Window) -> float:
    """Largest gamma for which the concentration hypothesis holds (inf if unbounded)."""
    fhat = window_hat(s, f)
    if abs(fhat[0]) == 0:
        raise ZeroDC("Concentration needs f_hat(0) != 0")
    mu = coherence(s).mu_per_eigvec
    if s.is_normalized:
        leak = np.sum(mu[1:] * np.abs(fhat[1:]))
        scale = s.sqrt_degrees.min() / s.sqrt_degree_norm
    else:
        leak = np.sqrt(s.n) * np.sum(mu[1:] * np.abs(fhat[1:]))
        scale = 1.0
    if leak == 0:
        return float("inf")
    return float(scale * abs(fhat[0]) / leak - 1.0)


def _concentration(s: Spectrum, f: Window, k: int, gamma: Optional[float],
                   modulated_hat: np.ndarray, energy_bound) -> ConcentrationReport:
    gamma_max = maximal_gamma(s, f)
    gamma = gamma_max if gamma is None else float(gamma)
    condition_met = gamma > 0 and gamma <= gamma_max

    magnitudes = np.abs(modulated_hat)
    peak = magnitudes[k]
    with np.errstate(divide="ignore"):
        ratios = np.where(magnitudes > 0, peak / np.where(magnitudes > 0, magnitudes, 1.0), np.inf)
    ratios[k] = 1.0
    energy_ratio = float(peak ** 2 / np.sum(magnitudes ** 2))
    bound = energy_bound(gamma) if condition_met and energy_bound else None

    report = ConcentrationReport(frequency=k, condition_met=condition_met, gamma=gamma,
                                 gamma_max=gamma_max, ratios=ratios,
                                 energy_ratio=energy_ratio, energy_bound=bound)
    if condition_met:
        off = np.delete(magnitudes, k)
        if np.isinf(gamma):
            failed = off.max(initial=0.0) > INF_GAMMA_TOL * peak
        else:
            failed = peak < gamma * off.max(initial=0.0) * (1 - BOUND_REL_TOL)
        if failed:
            raise BoundViolation(f"|M_k f| at lambda_{k} is not {gamma:.6g} times every other value",
                                 report=report)
        if bound is not None and energy_ratio < bound - BOUND_REL_TOL:
            raise BoundViolation(f"Energy ratio {energy_ratio:.6g} below {bound:.6g}", report=report)
    return report


def _energy_bound(n: int):
    def bound(gamma: float) -> float:
        if np.isinf(gamma):
            return 1.0
        return gamma ** 2 / (n + 3 + 4 * gamma + gamma ** 2)
    return bound


def modulation_concentration(s: Spectrum, f: Window, k: int,
                             gamma: Optional[float] = None) -> ConcentrationReport:
    """
    If sqrt(N) sum_{l>=1} mu_l |f_hat(l)| <= |f_hat(0)| / (1 + gamma), then
    |M_k f_hat(lambda_k)| >= gamma |M_k f_hat(lambda_l)| for every l != k.

    ``gamma`` defaults to the largest value the hypothesis allows.

    Raises:
        ZeroDC: f_hat(0) = 0
        BoundViolation: the hypothesis holds but the conclusion fails
    """
    if s.is_normalized:
        raise VariantMismatch("Use modulation_concentration_normalized for normalized spectra")
    k = _check_index(k, s.n, "frequency index")
    fhat = window_hat(s, f)
    modulated_hat = gft(s, modulate(s, igft(s, fhat), k))
    return _concentration(s, f, k, gamma, modulated_hat, _energy_bound(s.n))


def modulation_concentration_normalized(s: Spectrum, f: Window, k: int,
                                        gamma: Optional[float] = None) -> ConcentrationReport:
    """Normalized-basis counterpart; the hypothesis gains a sqrt(d_min)/||sqrt(d)|| factor."""
    if not s.is_normalized:
        raise VariantMismatch("modulation_concentration_normalized needs a normalized spectrum")
    k = _check_index(k, s.n, "frequency index")
    fhat = window_hat(s, f)
    modulated_hat = gft(s, modulate_normalized(s, igft(s, fhat), k))
    return _concentration(s, f, k, gamma, modulated_hat, None)
