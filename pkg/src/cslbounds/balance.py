"""Thermal-balance bounds for individual bodies.

A body whose emitted power P is known cannot be heated by CSL faster than it
radiates, otherwise it would warm up. Setting P equal to the heating power
gives ``lambda / r_C**2 = 4 m0^2 P / (3 hbar^2 M)``. Stars supply P as a
luminosity or through Stefan-Boltzmann, planets as an intrinsic surface heat
flux. Uncertainties are applied in the least favorable direction, which for
an upper bound is always toward more emitted power.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Union

from .core import CONSTANTS, DomainError, RatioBound, heating_coefficient

__all__ = [
    "Luminosity",
    "Photosphere",
    "SurfaceFlux",
    "AstroObject",
    "KINDS",
    "sigma_label",
    "stefan_boltzmann_luminosity",
    "bound_from_luminosity",
    "bound_from_photosphere",
    "bound_from_surface_flux",
    "conservative_observable",
    "bound_object",
]

KINDS = ("white_dwarf", "neutron_star", "planet", "moon", "other")


@dataclass(frozen=True)
class Luminosity:
    """Total emitted power [W]. Errors on the owning object are in W."""

    luminosity: float


@dataclass(frozen=True)
class Photosphere:
    """Photospheric radius [m] and effective temperature [K]; errors apply to T_eff."""

    radius: float
    t_eff: float


@dataclass(frozen=True)
class SurfaceFlux:
    """Mean radius [m] and intrinsic surface heat flux [W m^-2]; errors apply to the flux."""

    radius: float
    flux: float


Observable = Union[Luminosity, Photosphere, SurfaceFlux]


@dataclass(frozen=True)
class AstroObject:
    name: str
    mass: float
    observable: Observable
    err_plus: float = 0.0
    err_minus: float = 0.0
    kind: str = "other"
    radius_convention: str = ""
    extra: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        if not self.mass > 0:
            raise DomainError(f"{self.name}: mass must be > 0, got {self.mass!r}")
        if not (self.err_plus >= 0 and self.err_minus >= 0):
            raise DomainError(f"{self.name}: errors must be >= 0")
        if self.kind not in KINDS:
            raise DomainError(f"{self.name}: unknown kind {self.kind!r}")
        obs = self.observable
        if isinstance(obs, Luminosity):
            if not obs.luminosity >= 0:
                raise DomainError(f"{self.name}: luminosity must be >= 0")
        elif isinstance(obs, Photosphere):
            if not obs.radius > 0 or not obs.t_eff >= 0:
                raise DomainError(f"{self.name}: need radius > 0 and t_eff >= 0")
        elif isinstance(obs, SurfaceFlux):
            if not obs.radius > 0 or not obs.flux >= 0:
                raise DomainError(f"{self.name}: need radius > 0 and flux >= 0")
        else:
            raise DomainError(f"{self.name}: unsupported observable {obs!r}")


def sigma_label(n):
    return "nominal" if n == 0 else f"{n:g}σ"


def _check_mass(mass):
    if not mass > 0:
        raise DomainError(f"mass must be > 0, got {mass!r}")


def stefan_boltzmann_luminosity(radius, t_eff, constants=CONSTANTS):
    return 4.0 * math.pi * constants.sigma_sb * radius**2 * t_eff**4


def bound_from_luminosity(luminosity, mass, constants=CONSTANTS, source="", level=""):
    """Ratio at which CSL heating of ``mass`` kg equals ``luminosity`` W."""
    _check_mass(mass)
    if not luminosity >= 0:
        raise DomainError(f"luminosity must be >= 0, got {luminosity!r}")
    value = luminosity / (heating_coefficient(constants) * mass)
    return RatioBound(value, source, "thermal_balance", level)


def bound_from_photosphere(radius, t_eff, mass, constants=CONSTANTS, source="", level=""):
    """Thermal-balance bound for a blackbody photosphere.

    Uses the luminosity ``4 pi sigma R^2 T^4``, so the bound is
    ``16 pi sigma m0^2 R^2 T^4 / (3 hbar^2 M)``.
    """
    if not radius > 0:
        raise DomainError(f"radius must be > 0, got {radius!r}")
    if not t_eff >= 0:
        raise DomainError(f"t_eff must be >= 0, got {t_eff!r}")
    lum = stefan_boltzmann_luminosity(radius, t_eff, constants)
    return bound_from_luminosity(lum, mass, constants, source, level)


def bound_from_surface_flux(radius, flux, mass, constants=CONSTANTS, source="", level=""):
    """Bound from an intrinsic heat flux spread over a sphere of ``radius`` m."""
    if not radius > 0:
        raise DomainError(f"radius must be > 0, got {radius!r}")
    if not flux >= 0:
        raise DomainError(f"flux must be >= 0, got {flux!r}")
    power = 4.0 * math.pi * radius**2 * flux
    b = bound_from_luminosity(power, mass, constants, source, level)
    return RatioBound(b.value, source, "surface_flux", level)


def conservative_observable(nominal, err_plus, n=0):
    """Shift ``nominal`` upward by ``n`` times its upper error.

    More emitted power always means a weaker (larger) bound, so upward is
    the least favorable direction whatever the observable is.
    """
    if not err_plus >= 0:
        raise DomainError(f"err_plus must be >= 0, got {err_plus!r}")
    if not n >= 0:
        raise DomainError(f"sigma level must be >= 0, got {n!r}")
    return nominal + n * err_plus


def bound_object(obj, n=0, constants=CONSTANTS):
    """Bound for a catalog object at sigma level ``n``."""
    level = sigma_label(n)
    obs = obj.observable
    if isinstance(obs, Luminosity):
        lum = conservative_observable(obs.luminosity, obj.err_plus, n)
        return bound_from_luminosity(lum, obj.mass, constants, obj.name, level)
    if isinstance(obs, Photosphere):
        t = conservative_observable(obs.t_eff, obj.err_plus, n)
        return bound_from_photosphere(obs.radius, t, obj.mass, constants, obj.name, level)
    if isinstance(obs, SurfaceFlux):
        f = conservative_observable(obs.flux, obj.err_plus, n)
        return bound_from_surface_flux(obs.radius, f, obj.mass, constants, obj.name, level)
    raise DomainError(f"{obj.name}: unsupported observable {obs!r}")
