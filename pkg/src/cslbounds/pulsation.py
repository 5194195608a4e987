"""Bounds from the secular period drift of pulsating white dwarfs (DAVs).

For a cool DAV the drift rate of a pulsation period tracks the cooling rate
of the core, and an extra heat source of luminosity L_CSL changes that drift
by roughly ``L_CSL / L``. A drift measured to fractional precision p then
rules out any CSL heating larger than ``p * L``. Contraction is neglected.
"""

from __future__ import annotations

from dataclasses import dataclass

from .balance import bound_from_luminosity
from .core import CONSTANTS, DomainError, RatioBound

__all__ = ["DavStar", "drift_precision", "dav_bound"]


@dataclass(frozen=True)
class DavStar:
    """A DAV with measured period drift. SI units throughout."""

    name: str
    luminosity: float  # W
    mass: float  # kg
    period: float  # s
    period_drift: float  # s/s
    drift_error: float  # s/s

    def __post_init__(self):
        if not self.period > 0:
            raise DomainError(f"{self.name}: period must be > 0")
        if not self.period_drift > 0:
            raise DomainError(f"{self.name}: period drift must be > 0 (cooling-dominated)")
        if not self.drift_error >= 0:
            raise DomainError(f"{self.name}: drift error must be >= 0")
        if not self.mass > 0:
            raise DomainError(f"{self.name}: mass must be > 0")
        if not self.luminosity >= 0:
            raise DomainError(f"{self.name}: luminosity must be >= 0")


def drift_precision(star):
    """Fractional precision of the period drift, ``drift_error / period_drift``."""
    if not star.period_drift > 0:
        raise DomainError(f"{star.name}: period drift must be > 0")
    return star.drift_error / star.period_drift


def dav_bound(star, constants=CONSTANTS):
    p = drift_precision(star)
    full = bound_from_luminosity(star.luminosity, star.mass, constants)
    return RatioBound(p * full.value, star.name, "period_drift", f"dPdot/Pdot={p:.3g}")
