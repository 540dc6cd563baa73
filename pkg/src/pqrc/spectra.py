"""Entanglement entropy and spectrum diagnostics.

The entanglement spectrum of a reduced state rho_M is the set
eps_i = -log2(lambda_i) over eigenvalues lambda_i >= cutoff.  Its
consecutive-gap ratios r = min(delta, delta')/max(delta, delta')
distinguish chaotic dynamics (GUE surmise, mean r ~ 0.60) from the
uncorrelated limit (Poisson, mean r = 2 ln 2 - 1 ~ 0.386).  Stabilizer
states have exactly flat spectra, so gap statistics are reported as
unavailable rather than fabricated there.

All entropies and fitted decay rates use base-2 logarithms throughout.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import integrate

from .states import DensityMatrix, eigh_hermitian

SPECTRUM_CUTOFF = 1e-12
DEGENERATE_GAP = 1e-10
DEFAULT_KL_BINS = 50
EIGENVALUE_FLOOR = -1e-8


class DegenerateSpectrumError(ValueError):
    """Spectrum too flat for gap-ratio statistics."""


def _reduced_eigenvalues(rho: DensityMatrix) -> np.ndarray:
    vals, _ = eigh_hermitian(rho.matrix)
    if vals.min() < EIGENVALUE_FLOOR:
        raise ValueError(f"eigenvalue {vals.min():.3e} below {EIGENVALUE_FLOOR}")
    return np.clip(vals, 0.0, None)


def entanglement_entropy(rho: DensityMatrix, order: str = "von_neumann") -> float:
    """Base-2 entropy of a reduced density matrix.

    order 'von_neumann': -sum lambda log2 lambda; order 'renyi2':
    -log2 Tr rho^2.  Zero for pure reduced states.
    """
    vals = _reduced_eigenvalues(rho)
    if order == "von_neumann":
        pos = vals[vals > 0]
        return float(-np.sum(pos * np.log2(pos)))
    if order == "renyi2":
        purity = float(np.sum(vals**2))
        if purity <= 0:
            raise ValueError("numerically zero purity")
        return float(-np.log2(purity))
    raise ValueError(f"unknown entropy order {order!r}")


@dataclass(frozen=True)
class EntanglementSpectrum:
    """Levels eps_i = -log2 lambda_i, ascending (descending lambda)."""

    levels: np.ndarray
    degeneracy_fraction: float


def entanglement_spectrum(
    rho: DensityMatrix, cutoff: float = SPECTRUM_CUTOFF
) -> EntanglementSpectrum:
    """Entanglement spectrum of a reduced state.

    Eigenvalues below cutoff are discarded; their total weight must stay
    below cutoff * dim for the retained levels to satisfy completeness.
    degeneracy_fraction is the fraction of consecutive gaps < 1e-10.
    """
    if not (0.0 < cutoff < 1.0):
        raise ValueError("cutoff must lie in (0, 1)")
    vals = _reduced_eigenvalues(rho)
    kept = vals[vals >= cutoff]
    if kept.size == 0:
        raise ValueError("all eigenvalues below cutoff")
    weight = float(kept.sum())
    if abs(weight - 1.0) > 1e-8 + cutoff * vals.size:
        raise ValueError(f"retained weight {weight} violates completeness")
    levels = np.sort(-np.log2(kept))
    gaps = np.diff(levels)
    if gaps.size:
        degeneracy_fraction = float(np.mean(gaps < DEGENERATE_GAP))
    else:
        degeneracy_fraction = 1.0
    return EntanglementSpectrum(levels=levels, degeneracy_fraction=degeneracy_fraction)


@dataclass(frozen=True)
class SpectrumStats:
    """Consecutive-gap ratio statistics of an entanglement spectrum.

    available is False in the degenerate (Clifford) regime where fewer
    than three non-degenerate levels survive; mean_r and kl_to_gue are
    NaN there rather than fabricated numbers.
    """

    r_values: np.ndarray
    mean_r: float
    kl_to_gue: float
    available: bool


def spacing_ratios(spectrum: EntanglementSpectrum) -> SpectrumStats:
    """Gap ratios r_i = min(d_i, d_{i+1})/max(d_i, d_{i+1}).

    Gaps below 1e-10 are removed first; exactly flat stabilizer spectra
    would otherwise produce 0/0.  Requires at least two surviving gaps.
    """
    gaps = np.diff(spectrum.levels)
    gaps = gaps[gaps >= DEGENERATE_GAP]
    if gaps.size < 2:
        return SpectrumStats(
            r_values=np.empty(0), mean_r=np.nan, kl_to_gue=np.nan, available=False
        )
    a, b = gaps[:-1], gaps[1:]
    r = np.minimum(a, b) / np.maximum(a, b)
    return SpectrumStats(
        r_values=r,
        mean_r=float(np.mean(r)),
        kl_to_gue=kl_to_gue(r),
        available=True,
    )


def _gue_unnormalized(r):
    return (r + r**2) ** 2 / (1.0 + r + r**2) ** 4


@lru_cache(maxsize=1)
def _gue_normalization() -> float:
    # Quadrature instead of a hard-coded constant; the source law is
    # stated only up to proportionality.
    z, _ = integrate.quad(_gue_unnormalized, 0.0, 1.0, epsabs=1e-12, epsrel=1e-12)
    return z


def gue_surmise_pdf(r):
    """Normalized GUE gap-ratio surmise on [0, 1]."""
    r = np.asarray(r, dtype=float)
    if np.any((r < 0) | (r > 1)):
        raise ValueError("r outside [0, 1]")
    return _gue_unnormalized(r) / _gue_normalization()


def poisson_surmise_pdf(r):
    """Poisson gap-ratio density 2/(1+r)^2 on [0, 1], reference only."""
    r = np.asarray(r, dtype=float)
    if np.any((r < 0) | (r > 1)):
        raise ValueError("r outside [0, 1]")
    return 2.0 / (1.0 + r) ** 2


@lru_cache(maxsize=1)
def gue_surmise_mean() -> float:
    """Mean gap ratio under the normalized surmise (~0.60)."""
    m, _ = integrate.quad(
        lambda r: r * _gue_unnormalized(r), 0.0, 1.0, epsabs=1e-12, epsrel=1e-12
    )
    return m / _gue_normalization()


POISSON_MEAN_R = 2.0 * np.log(2.0) - 1.0


@lru_cache(maxsize=8)
def _gue_bin_masses(bins: int) -> np.ndarray:
    z = _gue_normalization()
    edges = np.linspace(0.0, 1.0, bins + 1)
    masses = np.empty(bins)
    for i in range(bins):
        m, _ = integrate.quad(
            _gue_unnormalized, edges[i], edges[i + 1], epsabs=1e-12, epsrel=1e-12
        )
        masses[i] = m / z
    return masses


def kl_to_gue(r_values: np.ndarray, bins: int = DEFAULT_KL_BINS) -> float:
    """Base-2 KL divergence of an r histogram from the GUE surmise.

    Uniform bins on [0, 1] with one pseudocount per bin keep the
    divergence finite when bins are empty; the surmise side uses
    bin-integrated masses.
    """
    r_values = np.asarray(r_values, dtype=float)
    if r_values.size == 0:
        raise ValueError("empty r_values")
    counts, _ = np.histogram(r_values, bins=bins, range=(0.0, 1.0))
    counts = counts + 1.0
    p_emp = counts / counts.sum()
    p_ref = _gue_bin_masses(bins)
    return float(np.sum(p_emp * np.log2(p_emp / p_ref)))


def r_histogram(r_values: np.ndarray, bins: int = DEFAULT_KL_BINS):
    """(bin centers, empirical density, surmise density) for plotting."""
    r_values = np.asarray(r_values, dtype=float)
    edges = np.linspace(0.0, 1.0, bins + 1)
    counts, _ = np.histogram(r_values, bins=edges)
    width = edges[1] - edges[0]
    centers = 0.5 * (edges[:-1] + edges[1:])
    empirical = counts / max(counts.sum(), 1) / width
    surmise = gue_surmise_pdf(centers)
    return centers, empirical, surmise


def fit_linear(x, y):
    """Least-squares line fit; returns (slope, intercept, r_squared)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.size < 3:
        raise ValueError("need at least 3 points")
    xm, ym = x.mean(), y.mean()
    sxx = np.sum((x - xm) ** 2)
    if sxx <= 0:
        raise ValueError("degenerate x: zero variance")
    slope = np.sum((x - xm) * (y - ym)) / sxx
    intercept = ym - slope * xm
    resid = y - (slope * x + intercept)
    ss_res = np.sum(resid**2)
    ss_tot = np.sum((y - ym) ** 2)
    if ss_tot <= 0:
        r_squared = 1.0 if ss_res < 1e-20 else 0.0
    else:
        r_squared = 1.0 - ss_res / ss_tot
    return float(slope), float(intercept), float(r_squared)


def fit_exp_decay(n, d_values):
    """Fit D(n) = D0 * 2^(-eta n); returns (D0, eta, r_squared).

    The decay exponent is in base-2 units per step, matching the
    base-2 convention used for every entropy in this package.
    """
    n = np.asarray(n, dtype=float)
    d_values = np.asarray(d_values, dtype=float)
    if np.any(d_values <= 0):
        raise ValueError("exponential fit requires strictly positive values")
    slope, intercept, r_squared = fit_linear(n, np.log2(d_values))
    return float(2.0**intercept), float(-slope), r_squared


def saturation_value(s_values: np.ndarray) -> float:
    """Plateau estimate: mean of the last quarter of the curve."""
    s_values = np.asarray(s_values, dtype=float)
    tail = max(3, s_values.size // 4)
    return float(np.mean(s_values[-tail:]))


GROWTH_WINDOW_FRACTION = 0.8


def entanglement_velocity(d_values, s_values, s_inf: float | None = None):
    """Slope of S vs depth inside the growth window S < 0.8 * S_inf.

    Returns (velocity, intercept, r_squared, s_inf).  Raises when no
    growth window exists (e.g. diagonal dynamics with S identically 0).
    """
    d_values = np.asarray(d_values, dtype=float)
    s_values = np.asarray(s_values, dtype=float)
    if s_inf is None:
        s_inf = saturation_value(s_values)
    if s_inf <= 0:
        raise ValueError("no growth window: curve never leaves zero")
    mask = s_values < GROWTH_WINDOW_FRACTION * s_inf
    if mask.sum() < 3:
        raise ValueError("no growth window: fewer than 3 pre-saturation points")
    slope, intercept, r_squared = fit_linear(d_values[mask], s_values[mask])
    return float(slope), float(intercept), r_squared, float(s_inf)


def saturation_depth(d_values, s_values, level: float = 0.9) -> float:
    """First depth where S crosses level * S_inf, linearly interpolated."""
    d_values = np.asarray(d_values, dtype=float)
    s_values = np.asarray(s_values, dtype=float)
    target = level * saturation_value(s_values)
    above = np.nonzero(s_values >= target)[0]
    if above.size == 0:
        raise ValueError("curve never reaches the saturation level")
    k = above[0]
    if k == 0:
        return float(d_values[0])
    # linear interpolation of the upcrossing between samples k-1 and k
    s0, s1 = s_values[k - 1], s_values[k]
    d0, d1 = d_values[k - 1], d_values[k]
    frac = (target - s0) / (s1 - s0)
    return float(d0 + frac * (d1 - d0))


def collapse_spread(curves, n_qubits: int, n_grid: int = 64):
    """Vertical spread of S curves rescaled to x = (1-p) d / N.

    curves: iterable of (p, d_values, s_values).  All curves are
    interpolated onto a shared x grid covering the common growth window
    (S below 0.8 of the mean plateau).  Returns (spread / S_inf, x_lo,
    x_hi) where spread is the maximum over the grid of the vertical
    range across curves.
    """
    rescaled = []
    plateaus = []
    for p, d_values, s_values in curves:
        x = (1.0 - p) * np.asarray(d_values, dtype=float) / n_qubits
        s = np.asarray(s_values, dtype=float)
        rescaled.append((x, s))
        plateaus.append(saturation_value(s))
    s_inf = float(np.mean(plateaus))
    threshold = GROWTH_WINDOW_FRACTION * s_inf
    x_lo = max(x[0] for x, _ in rescaled)
    x_hi = min(
        _first_crossing(x, s, threshold) for x, s in rescaled
    )
    if x_hi <= x_lo:
        raise ValueError("no common growth window across curves")
    grid = np.linspace(x_lo, x_hi, n_grid)
    stack = np.array([np.interp(grid, x, s) for x, s in rescaled])
    spread = float(np.max(stack.max(axis=0) - stack.min(axis=0)))
    return spread / s_inf, float(x_lo), float(x_hi)


def _first_crossing(x: np.ndarray, s: np.ndarray, level: float) -> float:
    above = np.nonzero(s >= level)[0]
    if above.size == 0:
        return float(x[-1])
    k = above[0]
    if k == 0:
        return float(x[0])
    frac = (level - s[k - 1]) / (s[k] - s[k - 1])
    return float(x[k - 1] + frac * (x[k] - x[k - 1]))
