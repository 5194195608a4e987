"""
Exclusion plane
===============

Each bound on lambda / r_C^2 is a straight line of slope 2 in the
log-log (r_C, lambda) plane; everything above it is excluded.
"""

import numpy as np

from cslbounds import core
from cslbounds.core import RatioBound

bounds = {
    "Moon": RatioBound(9.533e2, "Moon"),
    "Earth": RatioBound(2.975e3, "Earth"),
    "G117-B15A": RatioBound(5.187e7, "G117-B15A", "period_drift"),
}
series = {k: core.exclusion_boundary(b, 1e-8, 1e-3, 60) for k, b in bounds.items()}

# slope check
s = series["Moon"]
print(np.diff(np.log10(s.lam))[:3] / np.diff(np.log10(s.r_c))[:3])

# the GRW point sits below every line
print({k: b.allows(core.GRW) for k, b in bounds.items()})

try:
    import matplotlib.pyplot as plt
except ImportError:
    plt = None
if plt is not None:
    for k, s in series.items():
        plt.loglog(s.r_c, s.lam, label=k)
    plt.loglog([core.GRW.r_c], [core.GRW.lam], "k*", label="GRW")
    maj = core.exclusion_boundary(RatioBound(core.MAJORANA_RATIO), 1e-8, 1e-3, 60)
    plt.loglog(maj.r_c, maj.lam, "k--", label="Majorana")
    plt.xlabel("r_C [m]")
    plt.ylabel("lambda [1/s]")
    plt.legend()
    plt.savefig("exclusion.png", dpi=120)
