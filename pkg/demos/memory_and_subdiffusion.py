"""Memory kernels in time: power rule, weighted averages, subdiffusion.

Run:  python demos/memory_and_subdiffusion.py
"""

import math

import numpy as np

from fraclab.core import Domain, GridFunction, gamma
from fraclab.caputo import (CrowdModel, MemoryWeights, TimeSeries,
                            caputo_derivative, crowd_average, memory_average,
                            msd_of_density, timefrac_heat_solve,
                            volterra_inverse)

print("=== power rule: the derivative of t^r is proportional to t^(r-s) ===")
for s in (0.25, 0.5, 0.75):
    v = caputo_derivative(lambda t: t, 1.0, s, scheme="direct_quadrature",
                          derivative=lambda t: np.ones_like(t))
    print(f"  s={s}: derivative of t at 1 is {v:.6f} "
          f"(closed form 1/(1-s) = {1 / (1 - s):.6f})")
v = caputo_derivative(lambda t: t ** 2, 1.0, 0.5, scheme="direct_quadrature",
                      derivative=lambda t: 2.0 * t)
print(f"  s=1/2: derivative of t^2 at 1 is {v:.6f} (= 8/3)")

print()
print("=== inversion and the round trip ===")
grid = np.linspace(0.0, 1.0, 501)
u = volterra_inverse(TimeSeries(grid, np.ones_like(grid)), 0.0, 0.5)
rt = [caputo_derivative(u, t, 0.5) for t in (0.25, 0.5, 1.0)]
print("  derivative of the inverse of f=1:", " ".join(f"{r:.5f}" for r in rt))

print()
print("=== recent events weigh more: the memory average ===")
w = MemoryWeights(0.5, 12)
print("  weights c_j:", " ".join(f"{c:.3f}" for c in w.c[:8]))
print("  staircase (0,0,1,1,2,2) average:",
      f"{memory_average([0, 0, 1, 1, 2, 2], 0.4):.6f}")

print()
print("=== a crowd with power-law stopping times moves like t^s ===")
m = CrowdModel(0.5)
ts = np.geomspace(20.0, 200.0, 8)
us = np.array([crowd_average(m, float(t)) for t in ts])
slope = np.polyfit(np.log(ts), np.log(us), 1)[0]
print(f"  average-position growth exponent: {slope:.3f} (s = 0.5)")

print()
print("=== memory in time slows spatial spreading: MSD ~ t^s ===")
period, n = 32.0, 256
dom = Domain.torus(period, origin=-period / 2.0)
x = dom.a + period * np.arange(n) / n
tgrid = np.linspace(0.0, 1.0, 601)
for s in (0.5, 0.75, 0.999):
    v = np.exp(-x ** 2 / (2 * 0.2 ** 2))
    v /= np.sum(v) * period / n
    sol = timefrac_heat_solve(GridFunction(dom, v), s, tgrid)
    m0 = msd_of_density(sol[0], 0.0)
    idx = np.unique(np.geomspace(60, 600, 8).astype(int))
    msd = np.array([msd_of_density(sol[i], 0.0) for i in idx]) - m0
    slope = np.polyfit(np.log(tgrid[idx]), np.log(msd), 1)[0]
    print(f"  s={s}: exponent {slope:.3f}, MSD(1) = {msd[-1]:.4f} "
          f"(2/Gamma(1+s) = {2 / gamma(1 + s):.4f})")

print()
print("done.")
