"""Constants, the CSL heating law and exclusion-plane geometry.

Everything here is SI. The only combination of collapse parameters that any
heating bound depends on is the coupling ratio ``lambda / r_C**2``
(units s^-1 m^-2), so most of the package passes that ratio around as a
plain float and :class:`CslParams` is only needed at the edges.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

__all__ = [
    "Constants",
    "CONSTANTS",
    "AMU",
    "CslParams",
    "RatioBound",
    "ExclusionSeries",
    "DomainError",
    "DivergenceError",
    "NoCrossingError",
    "GRW",
    "MAJORANA_RATIO",
    "R_C_REFERENCE",
    "csl_heating_power",
    "heating_power_from_ratio",
    "heating_coefficient",
    "ratio",
    "exclusion_boundary",
    "mbol_to_luminosity",
    "luminosity_to_mbol",
    "UNITS",
    "to_si",
    "error_to_si",
]


class DomainError(ValueError):
    """An input lies outside the domain of an operation."""


class DivergenceError(ArithmeticError):
    """The CSL-modified luminosity function is singular where it was asked for.

    ``magnitude`` holds the divergence magnitude of the offending model.
    """

    def __init__(self, message, magnitude):
        super().__init__(message)
        self.magnitude = magnitude


class NoCrossingError(RuntimeError):
    """A chi-square curve never reaches the requested threshold."""

    def __init__(self, message, bracket=(math.nan, math.nan), chi2=(math.nan, math.nan)):
        super().__init__(message)
        self.bracket = tuple(bracket)
        self.chi2 = tuple(chi2)


# Atomic mass unit (CODATA 2018), kept for m0 sensitivity checks.
AMU = 1.66053906660e-27


@dataclass(frozen=True)
class Constants:
    """Physical and astronomical constants used throughout (SI).

    The reference mass ``m0`` defaults to the proton mass; swap in
    :data:`AMU` to see how much the planetary bounds move (about 1.5%).
    """

    hbar: float = 1.054571817e-34  # J s
    sigma_sb: float = 5.670374419e-8  # W m^-2 K^-4
    m0: float = 1.67262192e-27  # kg
    L_sun: float = 3.828e26  # W, IAU nominal
    M_sun: float = 1.989e30  # kg
    parsec: float = 3.0856775814913673e16  # m
    Mbol_sun: float = 4.74  # mag

    def __post_init__(self):
        for name, value in self.__dict__.items():
            if not value > 0:
                raise DomainError(f"constant {name} must be positive, got {value!r}")


CONSTANTS = Constants()


@dataclass(frozen=True)
class CslParams:
    """Collapse rate ``lam`` [s^-1] and correlation length ``r_c`` [m]."""

    lam: float
    r_c: float

    def __post_init__(self):
        if not self.lam >= 0:
            raise DomainError(f"collapse rate must be >= 0, got {self.lam!r}")
        if not self.r_c > 0:
            raise DomainError(f"correlation length must be > 0, got {self.r_c!r}")

    def ratio(self):
        return self.lam / self.r_c**2


GRW = CslParams(1e-16, 1e-7)
R_C_REFERENCE = 1e-7  # m
MAJORANA_RATIO = 4.94e-1  # s^-1 m^-2, X-ray emission bound used as a plot overlay

METHODS = ("thermal_balance", "surface_flux", "period_drift", "wdlf_chi2")


@dataclass(frozen=True)
class RatioBound:
    """An upper bound on ``lambda / r_C**2`` with its provenance.

    ``value`` is in s^-1 m^-2. A zero value is allowed and comes from
    bodies whose observed power is zero (upper-limit-only rows).
    """

    value: float
    source: str = ""
    method: str = "thermal_balance"
    level: str = ""

    def __post_init__(self):
        if not (self.value >= 0 and math.isfinite(self.value)):
            raise DomainError(f"bound value must be finite and >= 0, got {self.value!r}")
        if self.method not in METHODS:
            raise DomainError(f"unknown method {self.method!r}; expected one of {METHODS}")

    def allows(self, params):
        """True if ``params`` (a :class:`CslParams` or a bare ratio) survives this bound."""
        r = params.ratio() if isinstance(params, CslParams) else float(params)
        return r <= self.value

    def lambda_at(self, r_c=R_C_REFERENCE):
        return self.value * r_c**2


@dataclass(frozen=True)
class ExclusionSeries:
    """Boundary of the excluded region in the (r_C, lambda) plane."""

    r_c: np.ndarray
    lam: np.ndarray
    bound: RatioBound = field(compare=False)

    def points(self):
        return list(zip(self.r_c.tolist(), self.lam.tolist()))


def _ratio_of(params_or_ratio):
    if isinstance(params_or_ratio, CslParams):
        return params_or_ratio.ratio()
    r = float(params_or_ratio)
    if not r >= 0:
        raise DomainError(f"coupling ratio must be >= 0, got {r!r}")
    return r


def heating_coefficient(constants=CONSTANTS):
    """``3 hbar^2 / (4 m0^2)``; heating power is this times ratio times mass."""
    return 3.0 * constants.hbar**2 / (4.0 * constants.m0**2)


def csl_heating_power(mass, params, constants=CONSTANTS):
    """Anomalous CSL heating power [W] of a body of ``mass`` kg.

    Parameters
    ----------
    mass : float or array_like
        Body mass in kg, must be non-negative.
    params : CslParams or float
        Collapse parameters, or directly the ratio ``lambda / r_C**2``.

    Returns
    -------
    float or ndarray
        ``3 hbar^2 lambda M / (4 m0^2 r_C^2)``.
    """
    m = np.asarray(mass, dtype=float)
    if np.any(m < 0) or np.any(np.isnan(m)):
        raise DomainError("mass must be >= 0")
    if isinstance(params, CslParams):
        value = 3.0 * constants.hbar**2 * params.lam * m / (4.0 * constants.m0**2 * params.r_c**2)
    else:
        value = heating_coefficient(constants) * _ratio_of(params) * m
    return _unbox(value)


def heating_power_from_ratio(mass, coupling, constants=CONSTANTS):
    return csl_heating_power(mass, float(coupling), constants)


def ratio(params):
    """Coupling ratio ``lambda / r_C**2`` [s^-1 m^-2]."""
    return params.ratio()


def exclusion_boundary(bound, r_c_min, r_c_max, n_points=50):
    """Log-spaced boundary ``lambda = bound * r_C**2`` between two radii.

    In log-log axes the result is a straight line of slope 2; everything
    above it is excluded by ``bound``.
    """
    if not (0 < r_c_min < r_c_max) or not all(map(math.isfinite, (r_c_min, r_c_max))):
        raise DomainError(f"need 0 < r_c_min < r_c_max, got {r_c_min!r}, {r_c_max!r}")
    if int(n_points) != n_points or n_points < 2:
        raise DomainError(f"n_points must be an integer >= 2, got {n_points!r}")
    r_c = np.logspace(math.log10(r_c_min), math.log10(r_c_max), int(n_points))
    # pin the endpoints; logspace round-trips through log10
    r_c[0], r_c[-1] = r_c_min, r_c_max
    return ExclusionSeries(r_c=r_c, lam=bound.value * r_c**2, bound=bound)


def _unbox(a):
    return float(a) if np.ndim(a) == 0 else a


def mbol_to_luminosity(m_bol, constants=CONSTANTS):
    """Bolometric magnitude to luminosity in W."""
    return _unbox(constants.L_sun * 10.0 ** (-(np.asarray(m_bol, dtype=float) - constants.Mbol_sun) / 2.5))


def luminosity_to_mbol(luminosity, constants=CONSTANTS):
    """Luminosity in W to bolometric magnitude."""
    lum = np.asarray(luminosity, dtype=float)
    if np.any(lum <= 0):
        raise DomainError("luminosity must be > 0 to have a magnitude")
    return _unbox(constants.Mbol_sun - 2.5 * np.log10(lum / constants.L_sun))


# ---------------------------------------------------------------------------
# Unit converters used at the file boundary. Linear units are a plain scale
# factor; "dex(...)" units are logarithmic.

M_EARTH = 5.972e24
M_JUPITER = 1.898e27
R_EARTH = 6.371e6
R_SUN = 6.957e8


def _linear(scale) -> Callable[[float], float]:
    return lambda x: x * scale


UNITS: dict[str, Callable[[float], float]] = {
    "": _linear(1.0),
    "1": _linear(1.0),
    "kg": _linear(1.0),
    "g": _linear(1e-3),
    "M_sun": _linear(CONSTANTS.M_sun),
    "M_earth": _linear(M_EARTH),
    "M_jup": _linear(M_JUPITER),
    "m": _linear(1.0),
    "km": _linear(1e3),
    "R_earth": _linear(R_EARTH),
    "R_sun": _linear(R_SUN),
    "K": _linear(1.0),
    "W": _linear(1.0),
    "TW": _linear(1e12),
    "erg/s": _linear(1e-7),
    "L_sun": _linear(CONSTANTS.L_sun),
    "dex(L_sun)": lambda x: CONSTANTS.L_sun * 10.0**x,
    "W/m^2": _linear(1.0),
    "mW/m^2": _linear(1e-3),
    "erg/s/cm^2": _linear(1e-3),
    "s": _linear(1.0),
    "s/s": _linear(1.0),
    "1e-15 s/s": _linear(1e-15),
    "mag": _linear(1.0),
    "pc^-3 mag^-1": _linear(1.0),
}


def to_si(value, unit):
    """Convert ``value`` expressed in ``unit`` to SI."""
    try:
        conv = UNITS[unit]
    except KeyError:
        raise DomainError(f"unknown unit {unit!r}") from None
    return conv(value)


LOG_UNITS = frozenset({"dex(L_sun)"})


def error_to_si(value, err, unit):
    """Convert an uncertainty attached to ``value``, including for log units."""
    if unit in LOG_UNITS:
        return to_si(value + err, unit) - to_si(value, unit)
    return to_si(err, unit)
