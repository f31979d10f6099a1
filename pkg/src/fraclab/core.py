"""Shared domain types: fractional orders, domains, grids, quadrature budgets.

The normalization constant fixed here,

    C(n, s) = 4**s * s * Gamma(n/2 + s) / (pi**(n/2) * Gamma(1 - s)),

makes the singular-integral operator, the Fourier-multiplier operator and
the harmonic-extension operator mutually consistent: with this factor the
singular integral acts on frequency xi as multiplication by |xi|**(2s).
Every evaluator in the package multiplies by C(n, s), and the test suite
verifies the calibration numerically instead of assuming it.
"""

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Tuple

import numpy as np

from ._quadrature import gauss_legendre

__all__ = [
    "FracOrder",
    "Domain",
    "GridFunction",
    "FunctionHandle",
    "QuadratureSpec",
    "Normalization",
    "normalization_constant",
    "mean_value_deficit",
    "gamma",
]


def gamma(x: float) -> float:
    """Euler Gamma function on (0, inf), relative accuracy well below 1e-12.

    Backed by the platform C library; the accuracy contract on (0, 10)
    is pinned by tests against high-precision reference values.
    """
    return math.gamma(x)


@dataclass(frozen=True)
class FracOrder:
    """Fractional exponent s, strictly inside (0, 1)."""

    s: float

    def __post_init__(self):
        s = float(self.s)
        if not (0.0 < s < 1.0):
            raise ValueError(f"fractional order must lie in (0, 1), got {s}")
        object.__setattr__(self, "s", s)

    def __float__(self):
        return self.s


def as_order(s) -> float:
    """Coerce a FracOrder or bare float to a validated float in (0, 1)."""
    if isinstance(s, FracOrder):
        return s.s
    return FracOrder(float(s)).s


@dataclass(frozen=True)
class Domain:
    """Interval, torus, or the full line; n = 1 except where stated."""

    kind: str
    a: float = 0.0
    b: float = 0.0
    period: float = 0.0
    dimension: int = 1

    @classmethod
    def full_line(cls):
        return cls("full_line")

    @classmethod
    def interval(cls, a, b):
        if not a < b:
            raise ValueError("interval needs a < b")
        return cls("interval", a=float(a), b=float(b))

    @classmethod
    def torus(cls, period, origin=0.0):
        if not period > 0:
            raise ValueError("torus period must be positive")
        return cls("torus", a=float(origin), period=float(period))

    @property
    def length(self):
        if self.kind == "interval":
            return self.b - self.a
        if self.kind == "torus":
            return self.period
        raise ValueError("full line has no finite length")

    def contains(self, x):
        if self.kind == "full_line":
            return True
        if self.kind == "interval":
            return self.a < x < self.b
        return True  # torus wraps


@dataclass
class GridFunction:
    """Uniformly sampled real function on an interval or torus.

    Intervals are sampled on the closed grid x_j = a + j*(b-a)/(N-1),
    j = 0..N-1, so both endpoints carry values.  Tori are sampled on the
    half-open grid x_j = a + j*period/N with wrap-around indexing, which
    is the natural FFT layout.
    """

    domain: Domain
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.ndim != 1 or self.values.size < 2:
            raise ValueError("values must be a 1-d vector with N >= 2")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("grid values must be finite")
        if self.domain.kind == "full_line":
            raise ValueError("grid functions need a bounded domain")

    @property
    def n(self):
        return self.values.size

    @property
    def spacing(self):
        if self.domain.kind == "torus":
            return self.domain.period / self.n
        return (self.domain.b - self.domain.a) / (self.n - 1)

    @property
    def nodes(self):
        return self.domain.a + self.spacing * np.arange(self.n)

    @classmethod
    def sample(cls, fn, domain, n):
        x = domain.a + (domain.period / n if domain.kind == "torus"
                        else (domain.b - domain.a) / (n - 1)) * np.arange(n)
        return cls(domain, np.asarray(fn(x), dtype=float))

    def interp(self, x):
        """Piecewise-linear interpolation; wraps around on a torus."""
        x = np.asarray(x, dtype=float)
        if self.domain.kind == "torus":
            p = self.domain.period
            xm = np.mod(x - self.domain.a, p)
            xg = np.append(self.nodes - self.domain.a, p)
            vg = np.append(self.values, self.values[0])
            return np.interp(xm, xg, vg)
        return np.interp(x, self.nodes, self.values)

    def trapezoid(self):
        """Trapezoid integral; on a torus this is the (exact) Riemann sum."""
        if self.domain.kind == "torus":
            return float(np.sum(self.values) * self.spacing)
        return float(np.trapezoid(self.values, dx=self.spacing))


SMOOTHNESS_CLASSES = ("C2_local", "schwartz", "bounded", "singular_integrable")


@dataclass
class FunctionHandle:
    """Pointwise-evaluable function with a declared smoothness/decay class.

    The class drives the analytic tail treatment of the singular-integral
    evaluators:

    - ``schwartz``: rapidly decreasing; truncation radius found by probing.
    - ``bounded``: bounded with (possibly different) limits at +-infinity.
    - ``singular_integrable``: integrable endpoint singularities at the
      declared ``singular_points``; quadrature grades panels toward them.
    - ``C2_local``: no global decay promise beyond ``bound``/``growth``.

    ``growth=(A, g)`` declares the envelope ``|u(t)| <= A*(1+|t|)**g``; it is
    required for unbounded inputs and must satisfy g < 2s at call time.
    ``singular_exponents`` pairs with ``singular_points``: near a declared
    point p the function behaves like const*|y - p|**gamma on each side
    (gamma > -1).  When omitted, gamma = -1/2 is assumed, which is safe for
    kinks and square-root blowups alike.
    """

    fn: Callable[[np.ndarray], np.ndarray]
    smoothness: str = "C2_local"
    support_hint: Optional[Tuple[float, float]] = None
    singular_points: Tuple[float, ...] = ()
    singular_exponents: Optional[Tuple[float, ...]] = None
    bound: Optional[float] = None
    growth: Optional[Tuple[float, float]] = None
    center_hint: float = 0.0
    width_hint: Optional[float] = None

    def __post_init__(self):
        if self.smoothness not in SMOOTHNESS_CLASSES:
            raise ValueError(f"unknown smoothness class {self.smoothness!r}")
        self.singular_points = tuple(float(p) for p in self.singular_points)
        if self.singular_exponents is not None:
            self.singular_exponents = tuple(float(g)
                                            for g in self.singular_exponents)
            if len(self.singular_exponents) != len(self.singular_points):
                raise ValueError("one exponent per singular point")
            if any(g <= -1.0 for g in self.singular_exponents):
                raise ValueError("singular exponents must exceed -1")

    def __call__(self, x):
        return np.asarray(self.fn(np.asarray(x, dtype=float)), dtype=float)

    @classmethod
    def constant(cls, c):
        return cls(lambda x: np.full_like(np.asarray(x, float), float(c)),
                   smoothness="bounded", bound=abs(float(c)))

    @classmethod
    def gaussian(cls):
        return cls(lambda x: np.exp(-x * x), smoothness="schwartz", bound=1.0)


@dataclass
class QuadratureSpec:
    """Budget of every singular-integral evaluator.

    ``inner_radius`` and ``outer_radius`` override the automatic choices
    of the principal-value exclusion and the truncation radius; leaving
    them unset lets each evaluator solve them from ``abs_tol`` and the
    input's decay class.
    """

    inner_radius: Optional[float] = None
    outer_radius: Optional[float] = None
    panels_per_decade: int = 8
    abs_tol: float = 1e-6
    singular_endpoints: Optional[Sequence[float]] = None
    gauss_points: int = 12

    def __post_init__(self):
        if self.panels_per_decade < 4:
            raise ValueError("panels_per_decade must be >= 4")
        if not self.abs_tol > 0:
            raise ValueError("abs_tol must be positive")
        if self.inner_radius is not None and not self.inner_radius > 0:
            raise ValueError("inner_radius must be positive")
        if (self.inner_radius is not None and self.outer_radius is not None
                and not self.inner_radius < self.outer_radius):
            raise ValueError("need inner_radius < outer_radius")


def normalization_constant(n: int, s) -> float:
    """C(n, s) making the singular integral act as the symbol |xi|**(2s).

    Strictly positive and continuous in s on (0, 1); C(1, 1/2) = 1/pi.
    Diverges like const/(1-s) as s -> 1 (Gamma(1-s) pole), with
    (1-s)*C(n, s) staying bounded.
    """
    if n not in (1, 2):
        raise ValueError("only dimensions 1 and 2 are supported")
    s = as_order(s)
    return (4.0 ** s * s * gamma(n / 2.0 + s)
            / (math.pi ** (n / 2.0) * gamma(1.0 - s)))


@dataclass(frozen=True)
class Normalization:
    """Dimension, order, and the bound constant C(n, s)."""

    n: int
    s: FracOrder
    constant: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "constant",
                           normalization_constant(self.n, self.s))


def mean_value_deficit(u, x: float, r: float) -> float:
    """Deficit u(x) - (average of u over the ball of radius r around x).

    For 1-d C^2 functions the ratio deficit/r**2 tends to -u''(x)/6
    as r -> 0, which is the classical second-order comparison with the
    surrounding values.  The raw deficit is returned; only the ratio
    limit is contract-tested (no convention-dependent constant).
    """
    if not r > 0:
        raise ValueError("radius must be positive")
    nodes, weights = gauss_legendre(24)
    y = x + r * nodes
    avg = 0.5 * float(np.dot(weights, u(y)))
    return float(u(np.array([x]))[0]) - avg
