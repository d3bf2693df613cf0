"""Symbol algebra, magnitude envelope, auxiliary symbols, zero probing."""

import math

import numpy as np
import pytest

from foxh import (
    GammaSymbol,
    NumericalError,
    PoleOnLineError,
    asymptotic_log_derivative,
    asymptotic_magnitude,
    build_aux_symbol,
    derive_invariants,
    find_zeros_on_line,
    symbol_compose,
    symbol_from_params,
    transpose_params,
    validate_params,
)
from foxh.gammasym import AsymptoticEstimate

from conftest import canonical_params, gamma_abs_half_line, random_params


EXP = validate_params(1, 0, 0, 1, [], [(0.0, 1.0)])
BETA1 = validate_params(1, 1, 1, 1, [(0.0, 1.0)], [(0.0, 1.0)])


# -- construction and evaluation -------------------------------------------

def test_symbol_from_exp_kernel():
    sym = symbol_from_params(EXP)
    assert abs(sym.eval(2.0) - 1.0) < 1e-13          # Gamma(2) = 1
    assert abs(sym.eval(0.5) - math.sqrt(math.pi)) < 1e-12


def test_symbol_identical_factor_cancellation():
    p = validate_params(1, 0, 1, 1, [(1.0, 1.0)], [(1.0, 1.0)])
    sym = symbol_from_params(p)
    for s in (0.3, 1.1 + 0.7j, -0.2 + 2.0j):
        assert abs(sym.eval(s) - 1.0) < 1e-12


def test_symbol_beta_kernel():
    sym = symbol_from_params(BETA1)  # Gamma(s) Gamma(1presume-s) with a=1
    assert abs(sym.eval(0.5) - math.pi) < 1e-12


def test_symbol_counts_match_orders(rng):
    for _ in range(20):
        p = random_params(rng)
        sym = symbol_from_params(p)
        assert len(sym.num) == p.m + p.n
        assert len(sym.den) == (p.p - p.n) + (p.q - p.m)


def test_compose_multiply_and_reflect():
    g_s = GammaSymbol(num=((0j, 1.0),))           # Gamma(s)
    g_refl = symbol_compose("reflect", g_s)       # Gamma(1-s)
    assert abs(g_refl.eval(0.0) - 1.0) < 1e-13
    prod = symbol_compose("multiply", g_s, GammaSymbol(num=((1.0 + 0j, -1.0),)))
    assert abs(prod.eval(0.5) - math.pi) < 1e-12  # Gamma(1/2)^2


def test_compose_power_prefactor():
    g_s = GammaSymbol(num=((0j, 1.0),))
    comp = symbol_compose("power-prefactor", 2.0, 0.0, -1.0, g_s)
    assert abs(comp.eval(1.0) - 0.5) < 1e-13      # 2^-1 Gamma(1)


def test_compose_scale_argument():
    g_s = GammaSymbol(num=((0j, 1.0),))
    scaled = symbol_compose("scale-argument", g_s, 2.0)
    assert abs(scaled.eval(0.25) - math.sqrt(math.pi)) < 1e-12


def test_eval_log_continuity_along_contour():
    sym = symbol_from_params(BETA1)
    t = np.linspace(-30.0, 30.0, 4001)
    vals = sym.eval_log(0.5 + 1j * t)
    jumps = np.abs(np.diff(vals.imag))
    assert jumps.max() < 0.2  # no branch snapping


def test_symbol_json_roundtrip():
    sym = symbol_from_params(BETA1) * GammaSymbol.power(2.0, 0.5, -1.0)
    back = GammaSymbol.from_json(sym.to_json())
    s = 0.4 + 1.3j
    assert abs(back.eval(s) - sym.eval(s)) < 1e-13


# -- auxiliary symbols -------------------------------------------------------

def test_aux_case1_formal_prefactor_cancellation():
    # symbol 2^s with delta = 2: the scaled symbol is identically 1
    formal = GammaSymbol.power(2.0, 0.0, 1.0)
    aux = GammaSymbol.power(2.0, 0.0, -1.0) * formal
    for s in (0.3 + 1.7j, -1.0 + 0.2j, 2.0):
        assert abs(aux.eval(s) - 1.0) < 1e-14


def test_aux_case2_agrees_with_direct_product():
    p, nu, r = canonical_params(2)
    inv = derive_invariants(p)
    aux = build_aux_symbol(p, inv, 2, {"k": 1.0, "branch": "lower"})
    sym = symbol_from_params(p)
    from foxh import log_gamma

    for s in (0.6 + 0.9j, 1.4 - 0.3j):
        alpha = inv.alpha_low
        quot = np.exp(log_gamma(s - alpha - inv.mu) - log_gamma(s - alpha))
        direct = quot * sym.eval(s)
        assert abs(aux.eval(s) / direct - 1.0) < 1e-12


def test_aux_case8_matches_symbolic_expansion():
    from foxh import log_gamma

    p, nu, r = canonical_params(8)
    inv = derive_invariants(p)
    eta, zeta = 1.0, 0.0
    omega = inv.a_star * eta - inv.mu - 0.5
    aux = build_aux_symbol(p, inv, 8, {"eta": eta, "zeta": zeta, "omega": omega})
    sym = symbol_from_params(p)
    a, a2, dl = inv.a_star, inv.a2_star, inv.delta
    for s in (0.45 + 0.8j, 0.7 - 1.2j):
        expected = (
            a ** (a * (s + eta) - 1.0)
            * abs(a2) ** (-2.0 * a2 * s - omega)
            * np.exp(
                log_gamma(a2 * (s + zeta) + omega)
                - log_gamma(a * (s + eta))
                - log_gamma(a2 * (zeta - s))
            )
            * dl ** (-s)
            * sym.eval(s)
        )
        assert abs(aux.eval(s) / expected - 1.0) < 1e-12


def test_aux_mirror_cases_use_transposed_kernel():
    p, nu, r = canonical_params(4)
    inv = derive_invariants(p)
    aux = build_aux_symbol(p, inv, 4)
    tp = transpose_params(p)
    tinv = derive_invariants(tp)
    partner = build_aux_symbol(tp, tinv, 3)
    s = 0.37 + 0.9j
    assert abs(aux.eval(s) - partner.eval(s)) < 1e-12


# -- magnitude envelope and log derivative ----------------------------------

def test_envelope_exp_kernel_against_closed_form():
    inv = derive_invariants(EXP)
    t = 50.0
    est = asymptotic_magnitude(inv, 0.5, t)
    exact = gamma_abs_half_line(t)
    assert 0.99 < exact / est < 1.01


def test_envelope_randomized_ratio(rng):
    # ratio checked in log form so deep exponential decay cannot underflow
    checked = 0
    for _ in range(60):
        p = random_params(rng, w_lo=0.45)
        inv = derive_invariants(p)
        est = AsymptoticEstimate.from_invariants(inv)
        sym = symbol_from_params(p)
        for sigma in (-0.4, 0.3, 1.0):
            for t in (200.0, 1000.0):
                log_est = est.log_value(sigma, t)
                log_val = float(np.real(sym.eval_log(sigma + 1j * t)))
                tol = 0.02 if t == 200.0 else 0.005
                assert abs(math.exp(log_val - log_est) - 1.0) < tol
                checked += 1
    assert checked >= 300


def test_envelope_case1_t_independent():
    p, _, _ = canonical_params(1)
    inv = derive_invariants(p)
    est = AsymptoticEstimate.from_invariants(inv)
    vals = [est.value(0.4, t) for t in (10.0, 100.0, 1000.0)]
    assert max(vals) / min(vals) == pytest.approx(1.0, abs=1e-12)


def test_log_derivative_formula_vs_finite_difference():
    inv = derive_invariants(EXP)
    sym = symbol_from_params(EXP)
    for t in (100.0, 300.0, 1000.0):
        h = 1e-3
        fd = (sym.eval_log(0.5 + 1j * (t + h)) - sym.eval_log(0.5 + 1j * (t - h))) / (2j * h)
        formula = asymptotic_log_derivative(inv, 0.5, t)
        assert abs(fd - formula) <= 10.0 / t**2


def test_log_derivative_case1_reduces_to_remainder():
    p, _, _ = canonical_params(1)
    inv = derive_invariants(p)
    v100 = asymptotic_log_derivative(inv, 0.4, 100.0) - math.log(inv.delta)
    assert abs(v100) < 0.05 / 100.0 * 5  # only the O(1/t) term survives


def test_log_derivative_constant_prefactor_case():
    # delta = 2, a1* = a2* = 0: the expansion is log 2 plus O(1/t)
    sym_inv = derive_invariants(canonical_params(1)[0])
    est = asymptotic_log_derivative(sym_inv, 0.0, 1e6)
    assert est == pytest.approx(math.log(sym_inv.delta), abs=1e-5)


def test_class_a_derivative_decay_for_aux_symbols(rng):
    # |d/ds log aux| = O(1/t) makes |aux'| = O(|aux|/t); checked on substrips
    for case in range(1, 10):
        p, nu, r = canonical_params(case)
        from foxh import plan_factorization

        plan = plan_factorization(p, nu, r)
        aux = plan.aux_symbol
        sigma = 1.0 - nu if case not in (3, 4) else nu
        ratios = []
        for t in (40.0, 80.0, 160.0, 320.0):
            ld = complex(aux.log_derivative(sigma + 1j * t))
            drift = abs(ld - complex(aux.log_derivative(sigma + 2j * t)))
            ratios.append(abs(drift) * t)
        assert max(ratios) < 50.0  # bounded t * |variation| means O(1/t) decay


# -- zero probing ------------------------------------------------------------

def test_zero_probe_ratio_symbol():
    # Gamma(1+s)/Gamma(s) = s: single zero at the origin
    p = validate_params(1, 0, 1, 1, [(0.0, 1.0)], [(1.0, 1.0)])
    sym = symbol_from_params(p)
    rep = find_zeros_on_line(sym, 1.0, 5.0, strip=(-1.0, math.inf))
    assert len(rep.zeros) == 1
    z, mult = rep.zeros[0]
    assert abs(z) < 1e-9
    assert mult == 1
    assert rep.in_exceptional_set


def test_zero_probe_gamma_has_none():
    sym = symbol_from_params(EXP)
    rep = find_zeros_on_line(sym, 0.5, 50.0, strip=(0.0, math.inf))
    assert rep.zeros == ()
    assert not rep.in_exceptional_set


def test_zero_probe_reflection_pair_has_none():
    sym = symbol_from_params(BETA1)  # pi / sin(pi s)
    rep = find_zeros_on_line(sym, 0.5, 50.0, strip=(0.0, 1.0))
    assert rep.zeros == ()
    assert not rep.in_exceptional_set


def test_zero_probe_counts_match_structure(rng):
    # argument-principle count equals the number of structural zeros
    p = validate_params(1, 0, 1, 1, [(-0.75, 0.5)], [(2.0, 1.0)])
    sym = symbol_from_params(p)
    # structural zeros: poles of Gamma(-0.75 + 0.5 s): s = (0.75 - k)/0.5...
    struct = sym.structural_zeros(6.0, (0.0, 3.0))
    rep = find_zeros_on_line(sym, 1.0 - 1.5, 6.0, strip=(-2.0, math.inf))
    on_line = [z for (z, m) in rep.zeros]
    assert len(on_line) == sum(
        1 for (z, m) in struct if abs(z.real - 1.5) <= 1e-9 and abs(z.imag) <= 6.0
    )


def test_zero_probe_pole_on_line_rejected():
    # Gamma(s - 1/2) has a pole at s = 1/2; probing that line must refuse
    sym = GammaSymbol(num=((-0.5 + 0j, 1.0),))
    with pytest.raises(PoleOnLineError):
        find_zeros_on_line(sym, 0.5, 5.0)


def test_zero_report_json():
    p = validate_params(1, 0, 1, 1, [(0.0, 1.0)], [(1.0, 1.0)])
    rep = find_zeros_on_line(symbol_from_params(p), 1.0, 5.0, strip=(-1.0, math.inf))
    blob = rep.to_json()
    assert blob["in_exceptional_set"] is True
    assert blob["zeros"][0]["mult"] == 1
    assert set(blob) == {"line", "window", "zeros", "in_exceptional_set"}
