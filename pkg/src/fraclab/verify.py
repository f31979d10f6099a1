"""Named verification suites with residuals, thresholds, and pass flags.

Each check re-derives one of the closed-form identities the library is
built around and compares the numerical operator against it.  The suites
back ``fraclab verify`` and the acceptance tests; ``quick=True`` shrinks
ensemble sizes and point counts but keeps every check and its threshold.
"""

import math
from dataclasses import asdict, dataclass

import numpy as np

from .core import Domain, GridFunction, QuadratureSpec
from .pointops import (MasterKernel, classical_limit_coefficients,
                       master_operator, nonlocal_classical_lap, _hessian_fd)
from .spectral import periodized_fraclap, semigroup_compose, torus_fraclap
from .caputo import (MemoryWeights, TimeSeries, caputo_derivative,
                     laplace_identity_residual, marchaud_derivative,
                     volterra_inverse)
from .heatflow import heat_kernel_fourier, kernel_tail_fit
from .oracles import layer_decay_check, oracle, primitive_identity_check, verify_oracle

__all__ = ["Check", "run_suite", "SUITES"]


@dataclass
class Check:
    name: str
    ref: str
    residual: float
    threshold: float

    @property
    def passed(self):
        return bool(self.residual < self.threshold)

    def as_dict(self):
        d = asdict(self)
        d["pass"] = self.passed
        return d


def _q(tol=1e-5):
    return QuadratureSpec(abs_tol=tol)


def suite_oracles(quick=False, s=0.5):
    checks = []
    pts = np.linspace(-0.9, 0.9, 5 if quick else 9)
    rep = verify_oracle(oracle("u_half"), 0.5, pts, _q())
    checks.append(Check("sqrt_profile_constancy",
                        "constant_image_inside_unit_interval",
                        rep.residual / abs(rep.measured_constant), 1e-3))
    checks.append(Check("sqrt_profile_constant_value",
                        "normalized_constant_equals_one",
                        abs(rep.measured_constant - 1.0), 1e-3))
    rep = verify_oracle(oracle("u_minus_half"), 0.5,
                        [-0.6, -0.2, 0.3, 0.6], _q())
    checks.append(Check("explosive_profile_harmonicity",
                        "boundary_blowup_yet_harmonic", rep.residual, 1e-3))
    rep = verify_oracle(oracle("arctan_layer"), 0.5,
                        [0.0, 0.5, 1.0, 3.0], _q())
    checks.append(Check("layer_explicit_image",
                        "half_laplacian_of_arctan_layer", rep.residual, 1e-4))
    for sv in (0.3, s, 0.7) if not quick else (s,):
        rep = verify_oracle(oracle("kelvin_w", sv), sv, [0.25, 0.5, 0.75], _q())
        checks.append(Check(f"kelvin_profile_harmonicity_s={sv}",
                            "inversion_image_harmonic", rep.residual, 1e-3))
        rep = verify_oracle(oracle("halfspace_power", sv), sv,
                            [0.5, 1.0, 2.0], _q())
        checks.append(Check(f"halfspace_power_harmonicity_s={sv}",
                            "power_profile_harmonic_on_halfline",
                            rep.residual, 1e-3))
    d = layer_decay_check()
    checks.append(Check("layer_algebraic_tail", "tail_limit_two_over_pi",
                        abs(d["products"][-1] - d["limit"]) / d["limit"], 1e-3))
    checks.append(Check("kelvin_primitive_identity",
                        "derivative_matches_weighted_difference",
                        primitive_identity_check(s), 1e-12))
    return checks


def suite_spectral(quick=False):
    checks = []
    dom = Domain.torus(1.0)
    n = 128 if quick else 256
    x = np.arange(n) / n
    u = GridFunction(dom, np.cos(2.0 * math.pi * x))
    out = semigroup_compose(u, 0.5, 0.5)
    coeff = np.fft.rfft(out.values)
    target = np.fft.rfft(u.values) * (2.0 * math.pi) ** 2
    k = np.argmax(np.abs(target))
    checks.append(Check("half_order_composition_is_classical",
                        "semigroup_square_root_property",
                        abs(coeff[k] - target[k]) / abs(target[k]), 1e-12))

    def bump(t):
        return np.exp(np.cos(2.0 * math.pi * np.asarray(t, dtype=float)))

    ub = GridFunction(dom, bump(x))
    spec_out = torus_fraclap(ub, 0.5)
    errs = []
    for p in x[:: n // (4 if quick else 8)]:
        direct = periodized_fraclap(bump, float(p), 0.5, 1.0)
        errs.append(abs(direct - float(spec_out.interp(p))))
    checks.append(Check("torus_vs_singular_integral",
                        "multiplier_matches_lattice_sum", max(errs), 1e-3))
    return checks


def suite_caputo(quick=False):
    checks = []
    val = caputo_derivative(lambda t: t ** 2, 1.0, 0.5,
                            scheme="direct_quadrature",
                            derivative=lambda t: 2.0 * t)
    # independent Beta-moment oracle: theta = 1 - w^2 smooths the endpoint
    from ._quadrature import panel_nodes
    nodes, wts = panel_nodes(np.linspace(0.0, 1.0, 9), 12)
    beta = float(np.dot(wts, 2.0 * (1.0 - nodes ** 2)))
    checks.append(Check("power_rule_quadratic", "beta_moment_oracle",
                        abs(val - 2.0 * beta), 1e-6))

    tg = np.linspace(0.0, 1.0, 257 if quick else 513)
    worst = 0.0
    for f, df in ((lambda t: t, lambda t: np.ones_like(t)),
                  (lambda t: t ** 2, lambda t: 2.0 * t),
                  (lambda t: np.exp(-t), lambda t: -np.exp(-t))):
        ts = TimeSeries(tg, f(tg))
        for s in (0.25, 0.5, 0.75):
            a = caputo_derivative(ts, 0.5, s)
            b = caputo_derivative(f, 0.5, s, scheme="direct_quadrature",
                                  derivative=df)
            worst = max(worst, abs(a - b) / max(abs(b), 1e-12))
    checks.append(Check("l1_vs_direct_quadrature", "scheme_agreement",
                        worst, 1e-3))

    a = marchaud_derivative(lambda t: np.asarray(t, float) ** 2, 0.7, 0.3)
    b = caputo_derivative(lambda t: t ** 2, 0.7, 0.3,
                          scheme="direct_quadrature", derivative=lambda t: 2 * t)
    checks.append(Check("marchaud_equals_caputo", "constant_past_extension",
                        abs(a - b), 1e-4))

    grid = np.linspace(0.0, 1.0, 501)
    f = TimeSeries(grid, np.ones_like(grid))
    u = volterra_inverse(f, 0.0, 0.5)
    worst = max(abs(caputo_derivative(u, t0, 0.5) - 1.0)
                for t0 in (0.2, 0.5, 1.0))
    checks.append(Check("volterra_round_trip", "inversion_constant_pinned",
                        worst, 1e-3))

    rep = laplace_identity_residual(lambda t: np.asarray(t, float), 0.5,
                                    [2.0], derivative=lambda t: np.ones_like(t))
    checks.append(Check("laplace_symbol_linear", "transform_identity",
                        rep["max_residual"], 1e-4))

    w = MemoryWeights(0.5, 64)
    j = np.arange(20, 64)
    prod = w.c[20:] * j ** 0.5
    checks.append(Check("memory_weight_asymptotics", "cj_times_js_near_one",
                        float(np.max(np.abs(prod - 1.0))), 0.1))
    return checks


def suite_kernels(quick=False):
    checks = []
    tab = heat_kernel_fourier(0.5)
    mask = np.abs(tab.x_grid) <= 20.0
    exact = (1.0 / math.pi) / (1.0 + tab.x_grid[mask] ** 2)
    checks.append(Check("cauchy_kernel_closed_form", "half_order_unit_time",
                        float(np.max(np.abs(tab.values[mask] - exact))), 1e-6))
    checks.append(Check("kernel_mass_half", "unit_mass",
                        abs(tab.mass - 1.0), 1e-3))
    for s in (0.5, 0.75) if quick else (0.25, 0.5, 0.75):
        tb = tab if s == 0.5 else heat_kernel_fourier(s)
        radii = [40.0, 80.0, 160.0, 320.0] if s == 0.25 else [10.0, 20.0, 40.0]
        expo, _ = kernel_tail_fit(tb, radii)
        checks.append(Check(f"kernel_tail_exponent_s={s}", "power_law_tail",
                            abs(expo + 1.0 + 2.0 * s), 0.1))
    return checks


def suite_master(quick=False):
    checks = []

    def mdiag(x, y):
        y = np.asarray(y, dtype=float)
        out = np.zeros(y.shape[:-1] + (2, 2))
        out[..., 0, 0] = 1.0
        out[..., 1, 1] = 2.0
        return out

    kern = MasterKernel(matrix=mdiag, form="nondivergence", n=2)
    coef = classical_limit_coefficients(kern, np.array([0.0, 0.0]))
    checks.append(Check("limit_coefficients_closed_form", "circle_quadrature",
                        float(abs(coef.a[0, 0] - math.pi / 8.0)
                              + abs(coef.a[1, 1] - math.pi / 32.0)
                              + abs(coef.a[0, 1])), 1e-10))

    class Bump2:
        smoothness = "schwartz"
        support_hint = None

        def __call__(self, p):
            p = np.asarray(p, dtype=float)
            return np.exp(-(p[..., 0] ** 2 + p[..., 1] ** 2))

    u2 = Bump2()
    worst = 0.0
    points = [np.array([0.1, -0.2])] if quick \
        else [np.array([0.1, -0.2]), np.array([0.3, 0.15])]
    for x0 in points:
        hess = _hessian_fd(u2, x0)
        target = -float(np.einsum("ij,ij->", coef.a, hess))
        sv = np.array([0.90, 0.95, 0.99])
        vals = np.array([master_operator(u2, x0, s, kern, _q(1e-6))
                         for s in sv])
        design = np.vstack([np.ones(3), 1.0 - sv]).T
        c0 = np.linalg.lstsq(design, vals, rcond=None)[0][0]
        worst = max(worst, abs(c0 - target) / abs(target))
    checks.append(Check("classical_limit_extrapolation",
                        "order_one_scaling_to_second_order_operator",
                        worst, 0.05))

    g = (lambda x: np.exp(-x * x))
    ratios = []
    for (fn, xx) in ((g, 0.0), (g, 0.7)):
        from .core import FunctionHandle
        h = FunctionHandle(fn, smoothness="schwartz", bound=1.0)
        val = nonlocal_classical_lap(h, xx, _q(1e-7))
        upp = (fn(np.array([xx + 1e-4])) - 2 * fn(np.array([xx]))
               + fn(np.array([xx - 1e-4])))[0] / 1e-8
        ratios.append(val / (-upp))
    cv = float(np.std(ratios) / np.mean(ratios))
    checks.append(Check("fourth_difference_universality",
                        "classical_laplacian_nonlocal_form", cv, 0.01))
    return checks


SUITES = {
    "oracles": suite_oracles,
    "spectral": suite_spectral,
    "caputo": suite_caputo,
    "kernels": suite_kernels,
    "master": suite_master,
}


def run_suite(name, quick=False, seed=0):
    """Run one suite (or ``all``) and return a JSON-ready report."""
    import numpy
    names = list(SUITES) if name == "all" else [name]
    checks = []
    for n in names:
        if n not in SUITES:
            raise KeyError(f"unknown suite {n!r}")
        checks.extend(SUITES[n](quick=quick))
    return {
        "suite": name,
        "checks": [c.as_dict() for c in checks],
        "seed": int(seed),
        "versions": {"numpy": numpy.__version__},
        "all_pass": all(c.passed for c in checks),
    }
