"""White-dwarf luminosity function with CSL heating, and chi-square bounds.

In the intermediate-luminosity regime (no neutrino cooling, no
crystallization) a population with constant birthrate follows Mestel's law,

    dN/dM_bol = B3 2.2e-4 10^(-4 M/35) L_sun / (78.7 L_sun 10^(-2 M/5) + L_X)
                (M_WD/M_sun)^(5/7) sum_j X_j/A_j     [pc^-3 mag^-1]

where L_X is any extra energy loss. CSL heating enters as L_X = -L_CSL, which
makes the denominator vanish at a finite "divergence magnitude": white dwarfs
pile up there because they can no longer cool.

Bounds are obtained by normalizing the model to the observed star count in a
magnitude window, computing the reduced chi-square against the observed bins
and finding the coupling at which it crosses the threshold for a given
confidence level.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace

import numpy as np
from scipy import integrate, optimize, stats

from .core import (
    CONSTANTS,
    DivergenceError,
    DomainError,
    NoCrossingError,
    RatioBound,
    heating_coefficient,
)

__all__ = [
    "WdlfModel",
    "WdlfDataset",
    "FitWindow",
    "CARBON_OXYGEN",
    "composition_factor",
    "csl_luminosity",
    "divergence_magnitude",
    "ratio_for_divergence_at",
    "wdlf_density",
    "bin_density",
    "window_integral",
    "normalize_birthrate",
    "normalized",
    "degrees_of_freedom",
    "chi2_red",
    "chi2_threshold",
    "chi2_profile",
    "best_fit_ratio",
    "solve_bound",
    "synthetic_dataset",
]

MESTEL_PREFACTOR = 2.2e-4  # pc^-3 mag^-1 for B3 = 1
COOLING_COEFFICIENT = 78.7  # L_sun, photon luminosity at M_bol = 0 in this law

CARBON_OXYGEN = ((0.5, 12), (0.5, 16))


@dataclass(frozen=True)
class WdlfModel:
    """Theoretical WDLF parameters.

    ``b3`` is the birthrate in units of 1e-3 pc^-3 Gyr^-1, ``m_wd`` the
    typical white-dwarf mass in kg, ``composition`` a sequence of
    ``(mass_fraction, mass_number)`` pairs and ``ratio`` the CSL coupling.
    """

    b3: float = 1.0
    m_wd: float = 0.6 * CONSTANTS.M_sun
    composition: tuple = CARBON_OXYGEN
    ratio: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "composition", tuple((float(x), int(a)) for x, a in self.composition))
        if not self.b3 > 0:
            raise DomainError(f"b3 must be > 0, got {self.b3!r}")
        if not self.m_wd > 0:
            raise DomainError(f"m_wd must be > 0, got {self.m_wd!r}")
        if not self.ratio >= 0:
            raise DomainError(f"ratio must be >= 0, got {self.ratio!r}")
        composition_factor(self.composition)

    def with_ratio(self, ratio):
        return replace(self, ratio=float(ratio))

    def with_b3(self, b3):
        return replace(self, b3=float(b3))


@dataclass(frozen=True)
class FitWindow:
    m_bol_min: float = 10.5
    m_bol_max: float = 15.0

    def __post_init__(self):
        if not self.m_bol_min < self.m_bol_max:
            raise DomainError(f"empty fit window [{self.m_bol_min}, {self.m_bol_max}]")


@dataclass(frozen=True, eq=False)
class WdlfDataset:
    """Binned observed luminosity function.

    Bins are identified by their central magnitude; ``bin_width`` is the
    common box width in magnitudes.
    """

    m_bol: np.ndarray
    density: np.ndarray
    error: np.ndarray
    bin_width: float = 0.5
    name: str = ""

    def __post_init__(self):
        for attr in ("m_bol", "density", "error"):
            object.__setattr__(self, attr, np.array(getattr(self, attr), dtype=float))
        n = len(self.m_bol)
        if self.m_bol.ndim != 1 or self.density.shape != (n,) or self.error.shape != (n,):
            raise DomainError("m_bol, density and error must be 1-d arrays of equal length")
        if not np.all(np.isfinite(self.m_bol)) or np.any(np.diff(self.m_bol) <= 0):
            raise DomainError("m_bol must be finite and strictly increasing")
        if np.any(~(self.density >= 0)):
            raise DomainError("densities must be >= 0")
        if np.any(~(self.error >= 0)):
            raise DomainError("errors must be >= 0")
        if not self.bin_width > 0:
            raise DomainError(f"bin_width must be > 0, got {self.bin_width!r}")

    def __len__(self):
        return len(self.m_bol)

    def in_window(self, window):
        return (self.m_bol >= window.m_bol_min) & (self.m_bol <= window.m_bol_max)

    def scaled(self, factor):
        return replace(self, density=self.density * factor, error=self.error * factor)


def composition_factor(composition):
    """``sum_j X_j / A_j`` over ``(mass_fraction, mass_number)`` pairs."""
    composition = tuple(composition)
    if not composition:
        raise DomainError("composition must not be empty")
    fractions = [x for x, _ in composition]
    if any(a <= 0 for _, a in composition) or any(x < 0 for x in fractions):
        raise DomainError("mass numbers must be positive and fractions non-negative")
    if abs(math.fsum(fractions) - 1.0) > 1e-9:
        raise DomainError(f"mass fractions sum to {math.fsum(fractions)!r}, not 1")
    return math.fsum(x / a for x, a in composition)


def csl_luminosity(model, constants=CONSTANTS):
    """CSL heating power [W] of a white dwarf of mass ``model.m_wd``."""
    return heating_coefficient(constants) * model.ratio * model.m_wd


def divergence_magnitude(model, constants=CONSTANTS):
    """Magnitude where the cooling term equals CSL heating; None without heating."""
    lx = csl_luminosity(model, constants)
    if lx <= 0:
        return None
    return -2.5 * math.log10(lx / (COOLING_COEFFICIENT * constants.L_sun))


def ratio_for_divergence_at(m_bol, model, constants=CONSTANTS):
    """Coupling whose divergence magnitude is ``m_bol`` (inverse of the above)."""
    lx = COOLING_COEFFICIENT * constants.L_sun * 10.0 ** (-2.0 * m_bol / 5.0)
    return lx / (heating_coefficient(constants) * model.m_wd)


def _shape(m_bol, model, constants):
    # L_sun cancels in the luminosity ratio but is kept to make units explicit
    cooling = COOLING_COEFFICIENT * constants.L_sun * 10.0 ** (-2.0 * m_bol / 5.0)
    denom = cooling - csl_luminosity(model, constants)
    scale = (
        MESTEL_PREFACTOR
        * (model.m_wd / constants.M_sun) ** (5.0 / 7.0)
        * composition_factor(model.composition)
    )
    return scale * 10.0 ** (-4.0 * m_bol / 35.0) * constants.L_sun / denom


def wdlf_density(m_bol, model, constants=CONSTANTS):
    """Model number density [pc^-3 mag^-1] at bolometric magnitude ``m_bol``.

    Raises
    ------
    DivergenceError
        If any requested magnitude is at or beyond the divergence magnitude.
    """
    m = np.asarray(m_bol, dtype=float)
    m_div = divergence_magnitude(model, constants)
    if m_div is not None and np.any(m >= m_div):
        raise DivergenceError(
            f"luminosity function diverges at M_bol = {m_div:.6g}; requested up to {np.max(m):.6g}",
            m_div,
        )
    out = model.b3 * _shape(m, model, constants)
    return float(out) if out.ndim == 0 else out


def window_integral(model, window, constants=CONSTANTS):
    """Integral of the model density over the fit window [pc^-3]."""
    m_div = divergence_magnitude(model, constants)
    if m_div is not None and m_div <= window.m_bol_max:
        raise DivergenceError(
            f"divergence at M_bol = {m_div:.6g} lies inside the window "
            f"[{window.m_bol_min}, {window.m_bol_max}]",
            m_div,
        )
    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        try:
            value, _ = integrate.quad(
                lambda m: model.b3 * _shape(m, model, constants),
                window.m_bol_min,
                window.m_bol_max,
                epsabs=0.0,
                epsrel=1e-12,
                limit=500,
            )
        except integrate.IntegrationWarning:
            # only reachable right next to the pole; accept the coarser answer
            value, _ = integrate.quad(
                lambda m: model.b3 * _shape(m, model, constants),
                window.m_bol_min,
                window.m_bol_max,
                epsrel=1e-8,
                limit=2000,
            )
    return value


BINNINGS = ("average", "center")


def bin_density(m_bol, bin_width, model, binning="average", constants=CONSTANTS):
    """Model prediction for boxes centered on ``m_bol``.

    ``"average"`` integrates the density over each box and divides by the
    width, which is what a count per magnitude measures; ``"center"``
    evaluates the density at the box center.
    """
    m = np.atleast_1d(np.asarray(m_bol, dtype=float))
    if binning == "center":
        return np.atleast_1d(wdlf_density(m, model, constants))
    if binning != "average":
        raise DomainError(f"binning must be one of {BINNINGS}, got {binning!r}")
    half = 0.5 * bin_width
    wdlf_density(m + half, model, constants)  # raises if a box reaches the pole
    out = np.empty_like(m)
    for i, c in enumerate(m):
        out[i] = integrate.quad(
            lambda x: model.b3 * _shape(x, model, constants), c - half, c + half, epsabs=0.0, epsrel=1e-12
        )[0] / bin_width
    return out


def _window_bins(dataset, window):
    mask = dataset.in_window(window)
    if not np.any(mask):
        raise DomainError(f"no bins inside window [{window.m_bol_min}, {window.m_bol_max}]")
    return mask


def normalize_birthrate(dataset, model, window, constants=CONSTANTS):
    """Birthrate making the model count in the window match the observed count.

    Observed count is ``sum(density) * bin_width`` over bins whose centers
    fall in the window; the model count is the integral over the window.
    The model is linear in ``b3`` so this is a single division.
    """
    mask = _window_bins(dataset, window)
    observed = float(np.sum(dataset.density[mask]) * dataset.bin_width)
    unit = window_integral(model.with_b3(1.0), window, constants)
    b3 = observed / unit
    if not b3 > 0:
        raise DomainError("observed count in window is zero; cannot normalize")
    return b3


def normalized(dataset, model, window, constants=CONSTANTS):
    return model.with_b3(normalize_birthrate(dataset, model, window, constants))


def degrees_of_freedom(n_bins, n_constraints=1):
    dof = int(n_bins) - int(n_constraints)
    if dof < 1:
        raise DomainError(f"{n_bins} bins with {n_constraints} constraints leave no degrees of freedom")
    return dof


def chi2_red(dataset, model, window, n_constraints=1, binning="average", constants=CONSTANTS):
    """Reduced chi-square of ``model`` (already normalized) against the window bins."""
    mask = _window_bins(dataset, window)
    err = dataset.error[mask]
    if np.any(err <= 0):
        raise DomainError("every bin in the fit window needs a positive error")
    pred = bin_density(dataset.m_bol[mask], dataset.bin_width, model, binning, constants)
    resid = dataset.density[mask] - pred
    dof = degrees_of_freedom(mask.sum(), n_constraints)
    return float(np.sum((resid / err) ** 2) / dof)


def chi2_threshold(dof, confidence):
    """Reduced chi-square value below which a fit is accepted at ``confidence``."""
    if int(dof) != dof or dof < 1:
        raise DomainError(f"dof must be a positive integer, got {dof!r}")
    if not 0.0 < confidence < 1.0:
        raise DomainError(f"confidence must be in (0, 1), got {confidence!r}")
    return float(stats.chi2.ppf(confidence, dof) / dof)


def _search_ceiling(model, window, constants):
    # stop just short of the coupling that puts the pole on the window edge
    return ratio_for_divergence_at(window.m_bol_max + 1e-3, model, constants)


def chi2_profile(dataset, window, template, ratios, n_constraints=1, binning="average", constants=CONSTANTS):
    """Reduced chi-square at each coupling, renormalizing the birthrate each time.

    Couplings that put the divergence inside the window are returned as inf.
    """
    out = []
    for r in np.atleast_1d(ratios):
        trial = template.with_ratio(r)
        try:
            trial = normalized(dataset, trial, window, constants)
            out.append(chi2_red(dataset, trial, window, n_constraints, binning, constants))
        except DivergenceError:
            out.append(math.inf)
    return np.array(out)


def best_fit_ratio(dataset, window, template, n_constraints=1, n_grid=200, binning="average", constants=CONSTANTS):
    """Coupling minimizing the reduced chi-square, and that minimum."""
    ceiling = _search_ceiling(template, window, constants)
    grid = np.linspace(0.0, ceiling, n_grid)
    prof = chi2_profile(dataset, window, template, grid, n_constraints, binning, constants)
    i = int(np.argmin(prof))
    lo, hi = grid[max(i - 1, 0)], grid[min(i + 1, n_grid - 1)]

    def f(r):
        return chi2_profile(dataset, window, template, [r], n_constraints, binning, constants)[0]

    res = optimize.minimize_scalar(f, bounds=(lo, hi), method="bounded", options={"xatol": 1e-9 * ceiling})
    if res.fun < prof[i]:
        return float(res.x), float(res.fun)
    return float(grid[i]), float(prof[i])


def solve_bound(
    dataset,
    window,
    template,
    confidence,
    n_constraints=1,
    rtol=1e-6,
    n_grid=200,
    binning="average",
    constants=CONSTANTS,
):
    """Upper bound on the coupling at the given confidence level.

    The bound is the first coupling above the chi-square minimum where the
    reduced chi-square reaches the threshold: every larger coupling up to
    that crossing is acceptable, and the crossing is located by bracketing
    on a grid then bisecting to relative tolerance ``rtol``.

    Raises
    ------
    NoCrossingError
        If the minimum already exceeds the threshold, or the curve stays
        below it all the way to the coupling where the pole enters the window.
    """
    mask = _window_bins(dataset, window)
    dof = degrees_of_freedom(mask.sum(), n_constraints)
    threshold = chi2_threshold(dof, confidence)
    ceiling = _search_ceiling(template, window, constants)

    def excess(r):
        return chi2_profile(dataset, window, template, [r], n_constraints, binning, constants)[0] - threshold

    r_best, chi_best = best_fit_ratio(dataset, window, template, n_constraints, n_grid, binning, constants)
    if chi_best > threshold:
        raise NoCrossingError(
            f"minimum reduced chi-square {chi_best:.4g} at ratio {r_best:.4g} already exceeds "
            f"the {confidence:g} threshold {threshold:.4g}",
            bracket=(r_best, r_best),
            chi2=(chi_best, chi_best),
        )
    grid = np.linspace(r_best, ceiling, n_grid)
    prev = r_best
    for r in grid[1:]:
        if excess(r) >= 0:
            root = optimize.bisect(excess, prev, r, xtol=1e-12 * ceiling, rtol=rtol)
            label = f"{100 * confidence:g}% C.L."
            return RatioBound(float(root), dataset.name, "wdlf_chi2", label)
        prev = r
    chi_top = excess(ceiling) + threshold
    raise NoCrossingError(
        f"reduced chi-square stays below the {confidence:g} threshold {threshold:.4g} "
        f"between ratio {r_best:.4g} (chi2_red {chi_best:.4g}) and {ceiling:.4g} (chi2_red {chi_top:.4g})",
        bracket=(r_best, ceiling),
        chi2=(chi_best, chi_top),
    )


def synthetic_dataset(
    model, m_bol, rel_error, noise=0.0, rng=None, bin_width=0.5, binning="average", name="synthetic"
):
    """Observed-like bins drawn from ``model``.

    Each density is the model's bin prediction times ``1 + noise * N(0, 1)``;
    the quoted error is ``rel_error`` times the noiseless prediction.
    """
    m_bol = np.asarray(m_bol, dtype=float)
    truth = bin_density(m_bol, bin_width, model, binning)
    density = truth.copy()
    if noise:
        rng = np.random.default_rng(rng)
        density = truth * (1.0 + noise * rng.standard_normal(truth.shape))
    return WdlfDataset(m_bol, np.clip(density, 0.0, None), rel_error * truth, bin_width, name)
