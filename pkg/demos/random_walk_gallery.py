"""The four walkers and the equations they shadow.

Run:  python demos/random_walk_gallery.py       (about half a minute)
"""

import math

import numpy as np

from fraclab.core import Domain, GridFunction, normalization_constant
from fraclab.heatflow import regional_heat_solve
from fraclab.walkers import (CombConfig, WalkConfig, empirical_density,
                             lattice_normalizer, run_censored_walk,
                             run_classical_walk, run_comb_walk,
                             run_free_longjump_walk)

print("=== classical walk: diffusive, Gaussian ===")
res = run_classical_walk(WalkConfig(h=0.02, horizon=0.5, ensemble=50000,
                                    seed=7))
mask = res.msd_times >= 0.02
slope = np.polyfit(np.log(res.msd_times[mask]), np.log(res.msd_values[mask]),
                   1)[0]
print(f"  MSD exponent {slope:.3f}, MSD({res.elapsed:.2f}) = "
      f"{res.msd_values[-1]:.4f}")

print()
print("=== free long-jump walk: Cauchy at s = 1/2 ===")
fres = run_free_longjump_walk(WalkConfig(h=0.01, horizon=1.0, ensemble=50000,
                                         seed=3, s=0.5), k_max=10 ** 4)
gam = fres.elapsed / (lattice_normalizer(0.5) * normalization_constant(1, 0.5))
xs = np.sort(fres.positions)
emp = (np.arange(xs.size) + 0.5) / xs.size
ks = np.max(np.abs(emp - (0.5 + np.arctan(xs / gam) / math.pi)))
print(f"  KS distance to the Cauchy law (scale {gam:.3f}): {ks:.4f}")

print()
print("=== censored walk: never leaves the interval, matches the solver ===")
cfg = WalkConfig(h=1 / 128.0, horizon=0.1, ensemble=50000, seed=11, s=0.5,
                 domain=Domain.interval(-1, 1))
cres = run_censored_walk(cfg)
print(f"  containment: max |x| = {np.max(np.abs(cres.positions)):.4f} < 1")
bins = np.linspace(-1, 1, 33)
counts, _ = np.histogram(cres.positions, bins=bins)
walk_mass = counts / cres.positions.size
xsol = np.linspace(-1, 1, 257)
v0 = np.zeros(257)
v0[128] = 128.0
sol = regional_heat_solve(GridFunction(Domain.interval(-1, 1), v0), 0.5,
                          0.955 * cres.elapsed)
mass = np.array([np.trapezoid(
    sol.values[(xsol >= bins[i]) & (xsol <= bins[i + 1])],
    xsol[(xsol >= bins[i]) & (xsol <= bins[i + 1])]) for i in range(32)])
l1 = np.sum(np.abs(mass / mass.sum() - walk_mass))
print(f"  L1 distance to the censored heat solution: {l1:.3f}")

print()
print("=== comb walk: geometry alone makes the backbone subdiffusive ===")
comb = run_comb_walk(CombConfig(n_steps=10 ** 4, ensemble=30000, seed=9))
mask = comb.msd_steps >= 100
sx = np.polyfit(np.log(comb.msd_steps[mask]),
                np.log(comb.msd_values[mask]), 1)[0]
sy = np.polyfit(np.log(comb.msd_steps[mask]),
                np.log(comb.extras["msd_y"][mask]), 1)[0]
print(f"  backbone MSD exponent {sx:.3f} (subdiffusive, 1/2)")
print(f"  finger MSD exponent {sy:.3f} (ordinary diffusion)")

print()
print("done.")
