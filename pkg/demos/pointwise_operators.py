"""Tour of the pointwise fractional Laplacian and its friends.

Run from the repository root:  python demos/pointwise_operators.py

Each section prints the computed values next to the closed-form targets,
so the output doubles as a readable sanity report.  If matplotlib is
installed, figures land in demos/out/.
"""

import math
import os

import numpy as np

from fraclab import (FunctionHandle, QuadratureSpec, extension_halflap,
                     fraclap, nonlocal_classical_lap, regional_fraclap)
from fraclab.core import Domain
from fraclab.oracles import layer_decay_check, oracle, verify_oracle

Q = QuadratureSpec(abs_tol=1e-5)


def maybe_plot(fig_cb, name):
    try:
        import matplotlib
        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError:
        return
    os.makedirs(os.path.join(os.path.dirname(__file__), "out"), exist_ok=True)
    fig = plt.figure(figsize=(7, 4))
    fig_cb(plt)
    fig.tight_layout()
    fig.savefig(os.path.join(os.path.dirname(__file__), "out", name), dpi=120)
    plt.close(fig)


print("=== the arctan layer solves a fractional Allen-Cahn-type equation ===")
layer = oracle("arctan_layer")
for x in (0.0, 0.5, 1.0, 3.0):
    got = fraclap(layer.function, x, 0.5, Q)
    want = 2.0 * x / (math.pi * (x * x + 1.0))
    print(f"  half-laplacian at {x:4.1f}: {got:+.8f}   "
          f"sin(pi u)/pi = {want:+.8f}")

d = layer_decay_check()
print(f"  algebraic tail: t*(1-u) at t={d['t'][-1]:.0f} is "
      f"{d['products'][-1]:.6f}, limit 2/pi = {d['limit']:.6f}")

print()
print("=== profiles with constant or vanishing image on (-1, 1) ===")
for name in ("u_half", "u_minus_half"):
    entry = oracle(name)
    rep = verify_oracle(entry, 0.5, [-0.6, -0.2, 0.3, 0.6], Q)
    if rep.measured_constant is not None:
        print(f"  {name}: image constant {rep.measured_constant:.8f} "
              f"(spread {rep.residual:.1e})")
    else:
        print(f"  {name}: max |image| {rep.residual:.2e} "
              "(harmonic despite the boundary blowup)")

print()
print("=== the harmonic-extension route agrees with the singular integral ===")
g = FunctionHandle.gaussian()
for x in (0.0, 0.7):
    a = extension_halflap(g, x, Q)
    b = fraclap(g, x, 0.5, Q)
    print(f"  x={x:3.1f}: extension {a:.8f}  integral {b:.8f}  "
          f"gap {abs(a - b):.1e}")

print()
print("=== restricting the kernel to a domain changes the operator ===")
par = FunctionHandle(lambda x: 1.0 - x * x)
val = regional_fraclap(par, 0.0, 0.5, Domain.interval(-1, 1), Q)
print(f"  censored operator of 1-x^2 at 0: {val:.8f} "
      f"(exactly 2/pi = {2 / math.pi:.8f})")

print()
print("=== a fourth-order difference makes the classical Laplacian nonlocal ===")
for x in (0.0, 0.7):
    val = nonlocal_classical_lap(g, x, QuadratureSpec(abs_tol=1e-7))
    upp = math.exp(-x * x) * (4 * x * x - 2.0)
    print(f"  x={x:3.1f}: integral/(-u'') = {val / (-upp):.8f}"
          "   (a universal constant)")


def plot_profiles(plt):
    xs = np.linspace(-1.6, 1.6, 801)
    for name in ("u_half", "u_minus_half"):
        vals = oracle(name).function(xs)
        plt.plot(xs, np.clip(vals, 0, 5), label=name)
    plt.legend()
    plt.title("profiles with exceptional fractional images")


maybe_plot(plot_profiles, "profiles.png")
print()
print("done.")
