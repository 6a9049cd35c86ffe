"""Dressed quantities across the massless regime.

The Fermi boundary q, Fermi momentum k_F = pi D, and dressed charge Z(q)
follow from the density integral equation; Z(q) alone fixes every critical
exponent of the chain.  At zeta = pi/2 (free fermions) Z = 1 exactly.
"""

import numpy as np

from xxzff.thermo import build_thermo

D = 0.25
print(f"density D = {D}  (k_F = pi/4)\n")
print(f"{'zeta/pi':>8} {'Delta':>8} {'q':>10} {'Z(q)':>10} "
      f"{'theta_zz(1)':>12} {'theta_pm(0)':>12}")
for zeta in np.linspace(0.3, 0.7, 9) * np.pi:
    g = build_thermo(zeta, D)
    Z = float(np.real(g.Z(g.q)))
    print(f"{zeta / np.pi:8.3f} {np.cos(zeta):8.4f} {g.q:10.5f} {Z:10.6f} "
          f"{2 * Z ** 2:12.6f} {0.5 / Z ** 2:12.6f}")
