"""Observational bounds on CSL collapse parameters from astrophysical heating."""

from .core import (
    CONSTANTS,
    GRW,
    Constants,
    CslParams,
    DivergenceError,
    DomainError,
    NoCrossingError,
    RatioBound,
    csl_heating_power,
    exclusion_boundary,
    ratio,
)

__version__ = "0.1.0"
