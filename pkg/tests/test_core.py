import math

import numpy as np
import pytest

from fraclab.core import (Domain, FracOrder, FunctionHandle, GridFunction,
                          Normalization, QuadratureSpec, gamma,
                          mean_value_deficit, normalization_constant)
from fraclab._quadrature import geometric_edges, panel_nodes

# anchors exactly derivable from Gamma(1/2) = sqrt(pi) and factorials
GAMMA_REFERENCE = {
    0.5: math.sqrt(math.pi),
    1.5: 0.5 * math.sqrt(math.pi),
    2.5: 0.75 * math.sqrt(math.pi),
    7.5: 6.5 * 5.5 * 4.5 * 3.5 * 2.5 * 1.5 * 0.5 * math.sqrt(math.pi),
    4.0: 6.0,
    9.0: 40320.0,
}


def test_gamma_reference_accuracy():
    for x, ref in GAMMA_REFERENCE.items():
        assert abs(gamma(x) - ref) / ref < 1e-13


def test_gamma_functional_equation():
    for x in np.linspace(0.2, 8.9, 30):
        assert abs(gamma(x + 1.0) - x * gamma(x)) <= 1e-13 * gamma(x + 1.0)


def test_gamma_reflection_identity():
    for x in np.linspace(0.05, 0.95, 19):
        lhs = gamma(x) * gamma(1.0 - x)
        rhs = math.pi / math.sin(math.pi * x)
        assert abs(lhs - rhs) <= 1e-12 * rhs


def test_frac_order_rejects_endpoints():
    for bad in (0.0, 1.0, -0.2, 1.7):
        with pytest.raises(ValueError):
            FracOrder(bad)
    assert float(FracOrder(0.5)) == 0.5


def test_normalization_half_is_one_over_pi():
    assert abs(normalization_constant(1, 0.5) - 1.0 / math.pi) < 1e-10
    assert Normalization(1, FracOrder(0.5)).constant == \
        normalization_constant(1, 0.5)


def test_normalization_positive_continuous():
    ss = np.linspace(0.02, 0.98, 97)
    vals = np.array([normalization_constant(1, s) for s in ss])
    assert np.all(vals > 0)
    assert np.max(np.abs(np.diff(vals))) < 0.05
    # increasing on the lower half of the range
    low = vals[ss <= 0.5]
    assert np.all(np.diff(low) > 0)


def test_normalization_order_one_limit_bounded():
    # Gamma(1-s) pole in the denominator: C(1,s) itself vanishes like
    # (1-s), the product (1-s)*C(1,s) stays bounded, and C(1,s)/(1-s)
    # converges to 4*Gamma(3/2)/sqrt(pi) = 2
    for s in (0.9, 0.99, 0.999, 0.9999):
        c = normalization_constant(1, s)
        assert (1.0 - s) * c < 10.0
    assert abs(normalization_constant(1, 0.9999) / 1e-4 - 2.0) < 1e-3


def test_normalization_rejects_dimension():
    with pytest.raises(ValueError):
        normalization_constant(3, 0.5)


def test_torus_multiplier_calibration_2d():
    # Fubini reduction: the planar kernel integral against cos(2 pi x1)
    # splits into a Beta factor times the 1-d oscillatory moment J1;
    # the normalized operator must act as the symbol (2 pi)^(2s).
    for s in (0.5, 0.3):
        body_edges = geometric_edges(1e-12, 16.0, 10)
        nodes, wts = panel_nodes(body_edges, 14)
        j1 = 2.0 * float(np.dot(
            wts, (1.0 - np.cos(2.0 * math.pi * nodes))
            * nodes ** (-1.0 - 2.0 * s)))
        j1 += 2.0 * 16.0 ** (-2.0 * s) / (2.0 * s)
        osc_edges = np.arange(16.0, 2000.0 + 0.25, 0.25)
        nodes, wts = panel_nodes(osc_edges, 8)
        j1 -= 2.0 * float(np.dot(
            wts, np.cos(2.0 * math.pi * nodes) * nodes ** (-1.0 - 2.0 * s)))
        beta_factor = math.sqrt(math.pi) * gamma(s + 0.5) / gamma(1.0 + s)
        lhs = normalization_constant(2, s) * beta_factor * j1
        assert abs(lhs - (2.0 * math.pi) ** (2.0 * s)) < 1e-5
    assert normalization_constant(2, 0.5) > 0


def test_domain_validation():
    with pytest.raises(ValueError):
        Domain.interval(1.0, 0.0)
    with pytest.raises(ValueError):
        Domain.torus(-2.0)
    assert Domain.interval(-1, 1).contains(0.3)
    assert not Domain.interval(-1, 1).contains(1.5)


def test_grid_function_round_trip():
    dom = Domain.interval(-2.0, 3.0)
    gf = GridFunction.sample(lambda x: np.sin(x) + x, dom, 41)
    assert np.allclose(gf.interp(gf.nodes), gf.values, rtol=0, atol=0)
    tor = Domain.torus(2.0)
    gt = GridFunction.sample(lambda x: np.cos(math.pi * x), tor, 64)
    assert np.allclose(gt.interp(gt.nodes), gt.values, rtol=0, atol=0)
    # wrap-around: one period later is the same value
    assert np.allclose(gt.interp(gt.nodes + 2.0), gt.values, atol=1e-12)


def test_grid_function_validation():
    dom = Domain.interval(0.0, 1.0)
    with pytest.raises(ValueError):
        GridFunction(dom, np.array([1.0]))
    with pytest.raises(ValueError):
        GridFunction(dom, np.array([1.0, np.inf]))
    with pytest.raises(ValueError):
        GridFunction(Domain.full_line(), np.ones(4))


def test_quadrature_spec_validation():
    with pytest.raises(ValueError):
        QuadratureSpec(panels_per_decade=2)
    with pytest.raises(ValueError):
        QuadratureSpec(abs_tol=0.0)
    with pytest.raises(ValueError):
        QuadratureSpec(inner_radius=2.0, outer_radius=1.0)


def test_function_handle_validation():
    with pytest.raises(ValueError):
        FunctionHandle(lambda x: x, smoothness="smooth-ish")
    with pytest.raises(ValueError):
        FunctionHandle(lambda x: x, singular_points=(0.0,),
                       singular_exponents=(-1.5,))


def test_mean_value_deficit_constant():
    u = FunctionHandle.constant(5.0)
    for r in (0.5, 0.01):
        assert abs(mean_value_deficit(u, 0.3, r)) < 1e-14


def test_mean_value_deficit_quadratic_exact():
    u = FunctionHandle(lambda x: x * x)
    for r in (0.4, 0.1, 0.025):
        assert abs(mean_value_deficit(u, 0.0, r) + r * r / 3.0) < 1e-15


def test_mean_value_deficit_ratio_limit():
    # Richardson over r, r/2 recovers -u''(x)/6 to 1e-4
    cases = [
        (lambda x: np.exp(-x * x), 0.7,
         math.exp(-0.49) * (4 * 0.49 - 2.0)),        # u'' of the Gaussian
        (lambda x: x ** 3 - 2.0 * x * x, 0.5, 6.0 * 0.5 - 4.0),
    ]
    for fn, x, upp in cases:
        u = FunctionHandle(fn)
        d1 = mean_value_deficit(u, x, 0.05) / 0.05 ** 2
        d2 = mean_value_deficit(u, x, 0.025) / 0.025 ** 2
        extrap = (4.0 * d2 - d1) / 3.0
        assert abs(extrap - (-upp / 6.0)) < 1e-4
