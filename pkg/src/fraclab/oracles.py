"""Catalog of closed-form functions with known fractional-operator images.

Each entry packages a function, its regularity metadata for the
quadrature engine, and a machine-checkable claim: s-harmonic on an
interval, constant image on an interval, or an explicit image function.
The catalog is the ground truth backing the verification suites.
"""

import math
from dataclasses import dataclass
from typing import Callable, Optional, Tuple

import numpy as np

from .core import FunctionHandle, QuadratureSpec
from .pointops import fraclap

__all__ = ["OracleEntry", "oracle", "oracle_names", "verify_oracle",
           "layer_decay_check", "primitive_identity_check"]


@dataclass
class OracleEntry:
    name: str
    function: FunctionHandle
    s: Optional[float]
    claim: str                    # sharmonic_on | constant_image_on | explicit_image | none
    interval: Optional[Tuple[float, float]] = None
    image: Optional[Callable] = None
    singular_points: Tuple[float, ...] = ()
    notes: str = ""


def _clip_pow(t, p):
    return np.clip(t, 0.0, None) ** p


def _sqrt_profile(x):
    return np.sqrt(np.clip(1.0 - x * x, 0.0, None))


def _inverse_sqrt_profile(x):
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    inside = np.abs(x) < 1.0
    out[inside] = (1.0 - x[inside] ** 2) ** (-0.5)
    return out


def _on_unit_interval(fn):
    def wrapped(x):
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        inside = (x > 0.0) & (x < 1.0)
        out[inside] = fn(x[inside])
        return out
    return wrapped


def oracle_names():
    return ("const", "u_s", "u_half", "u_minus_half", "halfspace_power",
            "arctan_layer", "kelvin_w", "kelvin_wstar", "kelvin_primitive",
            "gaussian")


def oracle(name: str, s: Optional[float] = None) -> OracleEntry:
    """Build a catalog entry; s is required for the s-parametric families."""
    if name == "const":
        return OracleEntry(name, FunctionHandle.constant(1.0), s,
                           claim="sharmonic_on", interval=(-math.inf, math.inf))
    if name == "u_s":
        if s is None:
            raise ValueError("u_s needs a fractional order")
        h = FunctionHandle(lambda x, s=s: _clip_pow(1.0 - x * x, s),
                           smoothness="singular_integrable",
                           support_hint=(-1.0, 1.0),
                           singular_points=(-1.0, 1.0),
                           singular_exponents=(s, s), bound=1.0)
        return OracleEntry(name, h, s, claim="constant_image_on",
                           interval=(-1.0, 1.0), singular_points=(-1.0, 1.0))
    if name == "u_half":
        h = FunctionHandle(_sqrt_profile, smoothness="singular_integrable",
                           support_hint=(-1.0, 1.0),
                           singular_points=(-1.0, 1.0),
                           singular_exponents=(0.5, 0.5), bound=1.0)
        return OracleEntry(name, h, 0.5, claim="constant_image_on",
                           interval=(-1.0, 1.0), singular_points=(-1.0, 1.0),
                           notes="image is the constant 1 under C(1, 1/2)")
    if name == "u_minus_half":
        h = FunctionHandle(_inverse_sqrt_profile,
                           smoothness="singular_integrable",
                           support_hint=(-1.0, 1.0),
                           singular_points=(-1.0, 1.0),
                           singular_exponents=(-0.5, -0.5))
        return OracleEntry(name, h, 0.5, claim="sharmonic_on",
                           interval=(-1.0, 1.0), singular_points=(-1.0, 1.0),
                           notes="explodes at the boundary yet harmonic")
    if name == "halfspace_power":
        if s is None:
            raise ValueError("halfspace_power needs a fractional order")
        h = FunctionHandle(lambda x, s=s: np.where(x > 0, _clip_pow(x, s), 0.0),
                           smoothness="C2_local", singular_points=(0.0,),
                           singular_exponents=(s,), growth=(1.0, s))
        return OracleEntry(name, h, s, claim="sharmonic_on",
                           interval=(0.0, math.inf), singular_points=(0.0,))
    if name == "arctan_layer":
        h = FunctionHandle(lambda t: (2.0 / math.pi) * np.arctan(t),
                           smoothness="bounded", bound=1.0)
        return OracleEntry(name, h, 0.5, claim="explicit_image",
                           interval=(-math.inf, math.inf),
                           image=lambda x, u=h: np.sin(math.pi * u(x)) / math.pi)
    if name == "kelvin_w":
        if s is None:
            raise ValueError("kelvin_w needs a fractional order")
        h = FunctionHandle(
            _on_unit_interval(lambda x, s=s: x ** (s - 1.0) * (1.0 - x) ** s),
            smoothness="singular_integrable", support_hint=(0.0, 1.0),
            singular_points=(0.0, 1.0), singular_exponents=(s - 1.0, s))
        return OracleEntry(name, h, s, claim="sharmonic_on",
                           interval=(0.0, 1.0), singular_points=(0.0, 1.0))
    if name == "kelvin_wstar":
        if s is None:
            raise ValueError("kelvin_wstar needs a fractional order")
        h = FunctionHandle(
            _on_unit_interval(lambda x, s=s: x ** s * (1.0 - x) ** (s - 1.0)),
            smoothness="singular_integrable", support_hint=(0.0, 1.0),
            singular_points=(0.0, 1.0), singular_exponents=(s, s - 1.0))
        return OracleEntry(name, h, s, claim="sharmonic_on",
                           interval=(0.0, 1.0), singular_points=(0.0, 1.0))
    if name == "kelvin_primitive":
        if s is None:
            raise ValueError("kelvin_primitive needs a fractional order")
        h = FunctionHandle(
            _on_unit_interval(lambda x, s=s: x ** s * (1.0 - x) ** s),
            smoothness="singular_integrable", support_hint=(0.0, 1.0),
            singular_points=(0.0, 1.0), singular_exponents=(s, s), bound=1.0)
        return OracleEntry(name, h, s, claim="constant_image_on",
                           interval=(0.0, 1.0), singular_points=(0.0, 1.0))
    if name == "gaussian":
        return OracleEntry(name, FunctionHandle.gaussian(), s, claim="none")
    raise KeyError(f"unknown oracle {name!r}")


@dataclass
class OracleReport:
    name: str
    claim: str
    points: Tuple[float, ...]
    values: Tuple[float, ...]
    residual: float
    scale: float
    measured_constant: Optional[float] = None

    @property
    def relative_residual(self):
        return self.residual / self.scale


def verify_oracle(entry: OracleEntry, s, points, q: Optional[QuadratureSpec] = None):
    """Check the entry's claim at interior points and report the residual.

    sharmonic claims report max |(-Delta)^s u|; constant-image claims the
    max deviation from the mean image (and the measured constant);
    explicit-image claims the max gap to the stated image.  Residuals are
    paired with a characteristic magnitude for relative reading.
    """
    q = q or QuadratureSpec(abs_tol=1e-5)
    svals = [float(fraclap(entry.function, float(x), s, q)) for x in points]
    vals = np.array(svals)
    if entry.claim == "sharmonic_on":
        umax = float(np.max(np.abs(entry.function(np.asarray(points)))))
        scale = max(1.0, umax)
        return OracleReport(entry.name, entry.claim, tuple(points),
                            tuple(svals), float(np.max(np.abs(vals))), scale)
    if entry.claim == "constant_image_on":
        mean = float(np.mean(vals))
        resid = float(np.max(np.abs(vals - mean)))
        return OracleReport(entry.name, entry.claim, tuple(points),
                            tuple(svals), resid, max(abs(mean), 1e-30),
                            measured_constant=mean)
    if entry.claim == "explicit_image":
        img = np.asarray(entry.image(np.asarray(points, dtype=float)))
        resid = float(np.max(np.abs(vals - img)))
        scale = max(1.0, float(np.max(np.abs(img))))
        return OracleReport(entry.name, entry.claim, tuple(points),
                            tuple(svals), resid, scale)
    raise ValueError(f"claim {entry.claim!r} is not checkable")


def layer_decay_check(ts=(10.0, 30.0, 100.0)):
    """Algebraic tail of the explicit arctan layer.

    Returns a dict with the products t*(1 - u(t)), their limit 2/pi, and a
    convexity flag for log(1 - u) that rules out exponential decay.
    """
    u = oracle("arctan_layer").function
    ts = np.asarray(ts, dtype=float)
    products = ts * (1.0 - u(ts))
    tt = np.linspace(1.0, 60.0, 25)
    logs = np.log(1.0 - u(tt))
    second = np.diff(logs, 2)
    return {
        "t": ts,
        "products": products,
        "limit": 2.0 / math.pi,
        "max_rel_gap": float(np.max(np.abs(products - 2.0 / math.pi))
                             / (2.0 / math.pi)),
        "log_one_minus_u_convex": bool(np.all(second > 0.0)),
    }


def primitive_identity_check(s, xs=None):
    """Max gap between d/dx [x^s (1-x)^s] and s*(w_s - w*_s) on (0, 1).

    Both sides are evaluated from their closed forms; the identity is
    algebraic and should hold to float accuracy.
    """
    s = float(s)
    if xs is None:
        xs = np.linspace(0.05, 0.95, 19)
    xs = np.asarray(xs, dtype=float)
    # logarithmic-derivative form of d/dx [x^s (1-x)^s]
    lhs = xs ** s * (1.0 - xs) ** s * s * (1.0 / xs - 1.0 / (1.0 - xs))
    w = xs ** (s - 1.0) * (1.0 - xs) ** s
    wstar = xs ** s * (1.0 - xs) ** (s - 1.0)
    rhs = s * (w - wstar)
    return float(np.max(np.abs(lhs - rhs)))
