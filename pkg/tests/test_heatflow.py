import math

import numpy as np
import pytest

from fraclab.core import Domain, GridFunction, gamma
from fraclab.heatflow import (DiffusionReport, kernel_scaling_check,
                              kernel_tail_fit, regional_heat_solve,
                              truncated_msd)


def test_half_order_kernel_closed_form(kernel_tables):
    tab = kernel_tables[0.5]
    mask = np.abs(tab.x_grid) <= 20.0
    exact = (1.0 / math.pi) / (1.0 + tab.x_grid[mask] ** 2)
    assert np.max(np.abs(tab.values[mask] - exact)) < 1e-6


def test_kernel_center_value(kernel_tables):
    for s, tab in kernel_tables.items():
        i0 = int(np.argmin(np.abs(tab.x_grid)))
        assert abs(tab.values[i0] - gamma(1.0 + 1.0 / (2.0 * s)) / math.pi) < 1e-8


def test_kernel_positive_even_unit_mass(kernel_tables):
    for s, tab in kernel_tables.items():
        assert np.all(tab.values > 0.0)
        sym = tab.interp(np.abs(tab.x_grid)) - tab.interp(-np.abs(tab.x_grid))
        assert np.max(np.abs(sym)) == 0.0
        assert abs(tab.mass - 1.0) < 1e-3


def test_kernel_tail_exponents(kernel_tables):
    radii = {0.25: [40.0, 80.0, 160.0, 320.0],
             0.5: [10.0, 20.0, 40.0],
             0.75: [10.0, 20.0, 40.0]}
    for s, tab in kernel_tables.items():
        expo, const = kernel_tail_fit(tab, radii[s])
        assert abs(expo + (1.0 + 2.0 * s)) < 0.1
        assert const > 0.0


def test_kernel_tail_constant_half(kernel_tables):
    # exact tail of the half-order kernel: x^2 G -> 1/pi
    _, const = kernel_tail_fit(kernel_tables[0.5], [10.0, 20.0, 40.0])
    assert abs(const - 1.0 / math.pi) < 0.01


def test_kernel_tail_products_flatten_quarter(kernel_tables):
    tab = kernel_tables[0.25]
    radii = np.array([10.0, 20.0, 40.0])
    prods = radii ** 1.5 * tab.interp(radii)
    diffs = np.abs(np.diff(prods))
    assert np.all(np.diff(diffs) < 0)      # successive changes shrink


def test_kernel_tail_fit_rejects_core_radii(kernel_tables):
    with pytest.raises(ValueError):
        kernel_tail_fit(kernel_tables[0.5], [2.0, 10.0])


def test_scaling_identity_at_unit_time():
    assert kernel_scaling_check(0.5, 1.0) < 1e-3


def test_scaling_collapse_late_time():
    assert kernel_scaling_check(0.5, 4.0) < 1e-3
    assert kernel_scaling_check(0.75, 2.0) < 1e-3


def test_peak_height_halves_when_time_doubles():
    # scaling exponent n/(2s) = 1 at s = 1/2: peak ~ 1/t
    from fraclab.spectral import spectral_heat_evolve
    dom = Domain.torus(1024.0, origin=-512.0)
    n = 2 ** 14
    v = np.zeros(n)
    v[n // 2] = 1.0 / (1024.0 / n)
    u0 = GridFunction(dom, v)
    p1 = float(np.max(spectral_heat_evolve(u0, 0.5, 2.0).values))
    p2 = float(np.max(spectral_heat_evolve(u0, 0.5, 4.0).values))
    assert abs(p1 / p2 - 2.0) < 0.01


def test_truncated_msd_growth(kernel_tables):
    for s, expect in ((0.5, 2.0), (0.75, math.sqrt(2.0))):
        vals = truncated_msd(kernel_tables[s], [20.0, 40.0, 80.0])
        ratios = [vals[i + 1][1] / vals[i][1] for i in range(2)]
        for r in ratios:
            assert abs(r - expect) < 0.1


def test_truncated_msd_gaussian_control():
    # classical kernel at t = 1/2 has variance one: the window integral
    # saturates at 1 instead of growing
    x = np.linspace(-60.0, 60.0, 24001)
    g = np.exp(-x * x / 2.0) / math.sqrt(2.0 * math.pi)

    def window(R):
        m = np.abs(x) <= R
        return float(np.trapezoid(x[m] ** 2 * g[m], x[m]))

    assert abs(window(8.0) - 1.0) < 1e-6
    assert abs(window(16.0) - window(8.0)) < 1e-9


def test_diffusion_report_requires_decade():
    with pytest.raises(ValueError):
        DiffusionReport.fit([1.0, 2.0], [1.0, 2.0])
    rep = DiffusionReport.fit(np.geomspace(0.1, 1.0, 8),
                              2.0 * np.geomspace(0.1, 1.0, 8) ** 0.7)
    assert abs(rep.exponent - 0.7) < 1e-12
    assert abs(rep.constant - 2.0) < 1e-12


DOM = Domain.interval(-1.0, 1.0)
XS = np.linspace(-1.0, 1.0, 257)


def _bump():
    v = np.exp(-XS ** 2 / (2.0 * 0.1 ** 2))
    v /= np.trapezoid(v, XS)
    return GridFunction(DOM, v)


def test_regional_solver_constant_in_kernel():
    u0 = GridFunction(DOM, np.full(257, 2.0))
    out = regional_heat_solve(u0, 0.5, 0.5)
    assert np.max(np.abs(out.values - 2.0)) < 1e-12


def test_regional_solver_mass_conserved():
    u0 = _bump()
    snaps = regional_heat_solve(u0, 0.5, 0.5, snapshots=[0.1, 0.5])
    for g in snaps:
        assert abs(g.trapezoid() - u0.trapezoid()) < 1e-6


def test_regional_solver_maximum_principle():
    u0 = _bump()
    out = regional_heat_solve(u0, 0.5, 0.3)
    eps = 1e-8 * float(np.max(np.abs(u0.values)))
    assert out.values.min() >= u0.values.min() - eps
    assert out.values.max() <= u0.values.max() + eps


def test_regional_solver_bulk_matches_free_kernel(kernel_tables):
    u0 = _bump()
    t_short = 0.02
    out = regional_heat_solve(u0, 0.5, t_short)
    tab = kernel_tables[0.5]
    free = np.empty(XS.size)
    for i, xi in enumerate(XS):
        kern = tab.interp((xi - XS) / t_short) / t_short
        free[i] = np.trapezoid(kern * u0.values, XS)
    bulk = np.abs(XS) <= 0.3
    rel = np.max(np.abs(out.values[bulk] - free[bulk])) / np.max(free[bulk])
    assert rel < 0.02


def test_regional_solver_input_guards():
    with pytest.raises(ValueError):
        regional_heat_solve(GridFunction(Domain.torus(1.0), np.ones(64)),
                            0.5, 0.1)
    with pytest.raises(ValueError):
        regional_heat_solve(GridFunction(DOM, np.ones(32)), 0.5, 0.1)
