"""
Heating bounds from planets and compact objects
===============================================

Any massive body heated at a constant rate per unit mass cannot emit less
than that heat. Comparing the predicted power with a measured luminosity or
surface flux gives an upper limit on lambda / r_C^2.
"""

import numpy as np

from cslbounds import balance, core, pulsation
from cslbounds.catalog import data_path, format_report, load_objects, report_rows

###############################################################################
# Heating of one kilogram at the GRW reference point.
p = core.csl_heating_power(1.0, core.GRW)
print(f"1 kg at GRW values: {p:.3e} W")

# Only the ratio matters: doubling r_C and quadrupling lambda changes nothing.
print(core.csl_heating_power(1.0, core.CslParams(4e-16, 2e-7)) / p)

###############################################################################
# Earth by hand: 47 +- 2 TW of internal heat, shifted up by one and three sigma.
earth = balance.AstroObject("Earth", 5.972e24, balance.Luminosity(47e12), 2e12, 2e12, "planet")
for n in (0, 1, 3):
    print(balance.sigma_label(n), f"{balance.bound_object(earth, n).value:.4g}")

###############################################################################
# Every shipped object at 3 sigma.
records = load_objects(data_path("solar_system.csv")) + load_objects(data_path("compact_objects.csv"))
bounds = [
    pulsation.dav_bound(r) if isinstance(r, pulsation.DavStar) else balance.bound_object(r, 3)
    for r in records
]
print(format_report(report_rows(bounds)))

###############################################################################
# The radius convention matters for the giant planets: surface flux times
# 4 pi R^2 scales with R^2.
saturn = next(r for r in records if r.name == "Saturn")
r_alt = float(saturn.extra["radius_alt"]) * 1e3
flux = saturn.observable.flux + saturn.err_plus
print("mean radius      ", f"{balance.bound_object(saturn, 1).value:.4g}")
print("equatorial radius", f"{balance.bound_from_surface_flux(r_alt, flux, saturn.mass).value:.4g}")

###############################################################################
# Tightest to loosest, and how far each sits above the GRW point.
vals = np.array(sorted(b.value for b in bounds))
print(np.log10(vals / core.ratio(core.GRW)).round(2))
