"""
Luminosity-function bounds
==========================

With CSL heating a white dwarf stops cooling once its photon luminosity
drops to the heating power, so the luminosity function piles up at a
finite magnitude. Fitting the model against binned counts bounds the
coupling.

The shipped table is a labelled surrogate (Mestel-law bins with one common
fractional error), not an observed luminosity function.
"""

import numpy as np

from cslbounds import wdlf
from cslbounds.catalog import data_path, load_wdlf

window = wdlf.FitWindow(10.5, 15.0)
data = load_wdlf(data_path("wdlf_surrogate.csv"), window)
template = wdlf.WdlfModel()

###############################################################################
# Where does the pole sit for a few couplings?
for r in (5e5, 1e6, 2e6, 4e6):
    print(f"ratio {r:.0e}: diverges at M_bol = {wdlf.divergence_magnitude(template.with_ratio(r)):.3f}")

###############################################################################
# The chi-square profile. Each point renormalizes the birthrate to the
# observed count in the window before comparing.
ratios = np.linspace(0, 2.6e6, 14)
prof = wdlf.chi2_profile(data, window, template, ratios)
for r, c in zip(ratios, prof):
    print(f"{r:10.3e}  {c:8.3f}")

###############################################################################
# Bounds at three confidence levels; higher confidence means a looser bound.
for cl in (0.70, 0.95, 0.999):
    b = wdlf.solve_bound(data, window, template, cl)
    print(f"{b.level:>10}: {b.value:.4g}")

###############################################################################
# Self-consistency: data drawn from a known coupling give a bound just above it.
truth = template.with_ratio(1e6)
centers = np.arange(10.75, 15.0, 0.5)
for noise in (1e-2, 1e-3, 1e-4):
    synth = wdlf.synthetic_dataset(truth, centers, noise, noise=noise, rng=0)
    print(noise, wdlf.solve_bound(synth, window, template, 0.95).value / 1e6)

###############################################################################
# Model curves, optionally plotted.
try:
    import matplotlib.pyplot as plt
except ImportError:
    plt = None
if plt is not None:
    m = np.linspace(10.5, 15.0, 200)
    for r in (0.0, 1.5e6, 2.3e6):
        model = wdlf.normalized(data, template.with_ratio(r), window)
        plt.semilogy(m, wdlf.wdlf_density(m, model), label=f"ratio {r:.2g}")
    plt.errorbar(data.m_bol, data.density, data.error, fmt="ko", ms=3)
    plt.xlabel("M_bol")
    plt.ylabel("pc^-3 mag^-1")
    plt.legend()
    plt.savefig("wdlf_curves.png", dpi=120)
