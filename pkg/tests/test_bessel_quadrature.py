"""Bessel J, Gauss rules, series acceleration, oscillatory integrals."""

import math

import mpmath
import numpy as np
import pytest
from scipy.special import jv as scipy_jv, roots_jacobi

from foxh.bessel import bessel_j, oscillatory_bessel_integral, phase_breakpoints
from foxh.quadrature import (
    gauss_jacobi,
    jacobi_unit_interval,
    panel_rule,
    trapezoid_line,
    wynn_epsilon,
)


def test_bessel_real_orders_vs_scipy():
    z = np.linspace(0.01, 60.0, 911)
    for eta in (0.0, 0.5, -0.5, 1.0, 2.3, -0.9):
        err = np.max(np.abs(bessel_j(eta, z) - scipy_jv(eta, z)))
        assert err < 5e-11


def test_bessel_seam_cross_validation():
    # series and asymptotic branches must agree through the switchover
    z = np.linspace(11.5, 12.5, 301)
    for eta in (0.0, 1.5, -0.7, 2.5):
        err = np.max(np.abs(bessel_j(eta, z) - scipy_jv(eta, z)))
        assert err < 1e-10


def test_bessel_complex_order_vs_mpmath():
    eta = 0.7 + 0.3j
    for z in (0.5, 3.0, 11.9, 12.1, 30.0, 200.0):
        ref = complex(mpmath.besselj(mpmath.mpc(eta), z))
        assert abs(complex(bessel_j(eta, z)[0]) - ref) < 2e-11


def test_phase_breakpoints_near_true_zeros():
    from scipy.special import jn_zeros

    ref = jn_zeros(1, 30)
    mine = phase_breakpoints(1.0, 30)
    assert np.max(np.abs(mine - ref)) < 5e-3


def test_gauss_jacobi_vs_scipy():
    for a, b in ((0.0, 0.0), (-0.5, 0.0), (1.3, -0.25), (0.7, 2.0)):
        x1, w1 = gauss_jacobi(24, a, b)
        x2, w2 = roots_jacobi(24, a, b)
        assert np.max(np.abs(np.sort(x1) - np.sort(x2))) < 1e-12
        assert np.max(np.abs(w1 - w2)) < 1e-12


def test_jacobi_unit_interval_beta_integral():
    # integral of u^{b}(1-u)^{a} du = B(b+1, a+1)
    a, b = 0.75, -0.3
    u, w = jacobi_unit_interval(40, a, b)
    val = float(np.sum(w))
    exact = math.gamma(b + 1) * math.gamma(a + 1) / math.gamma(a + b + 2)
    assert abs(val - exact) < 1e-13


def test_panel_rule_polynomial_exactness():
    nodes, weights = panel_rule(0.0, 3.0, 1.0, 6)
    val = float(np.sum(weights * nodes ** 7))
    assert abs(val - 3.0 ** 8 / 8.0) < 1e-10


def test_trapezoid_line_gaussian():
    val, err = trapezoid_line(lambda t: np.exp(-t * t), tol=1e-13)
    assert abs(val - math.sqrt(math.pi)) < 1e-12


def test_wynn_accelerates_log2():
    partial = np.cumsum([(-1.0) ** k / (k + 1.0) for k in range(30)])
    est, gap = wynn_epsilon(list(partial))
    assert abs(est - math.log(2.0)) < 1e-12


def test_wynn_handles_converged_input():
    est, gap = wynn_epsilon([1.0] * 20)
    assert est == 1.0 and gap == 0.0


def test_oscillatory_integral_exponential_weight():
    val = oscillatory_bessel_integral(lambda v: np.exp(-v), 0.0, 3.0, 45.0,
                                      tol=1e-12)
    assert abs(val - 1.0 / math.sqrt(10.0)) < 1e-11


def test_oscillatory_integral_weber():
    val = oscillatory_bessel_integral(lambda v: np.ones_like(v), 0.0, 1.0,
                                      1e9, tol=1e-10)
    assert abs(val - 1.0) < 1e-9


def test_oscillatory_integral_gaussian_pair():
    val = oscillatory_bessel_integral(lambda v: np.exp(-v * v / 2) * v * v,
                                      1.0, 5.0, 15.0, tol=1e-11)
    assert abs(val - 5.0 * math.exp(-12.5)) < 1e-12
