import math

import numpy as np
import pytest

from sheafsums.config import RunConfig
from sheafsums.errors import AmbientMismatch, BudgetExceeded, Unstable
from sheafsums.expr import eval_trace, eval_trace_extension
from sheafsums.ffield import tower
from sheafsums.grammar import parse_expr
from sheafsums.sums import (
    additive_convolution,
    complete_sum,
    fit_l_polynomial,
    fourier_table,
    gowers_norm,
    inner_product,
    power_sums,
    trace_table,
)


def test_full_character_sum_is_zero():
    r = complete_sum(parse_expr("AS(psi, x)", 7))
    assert abs(r.value) < 1e-12
    assert r.npoints == 7


def test_gauss_sum_normalized():
    r = complete_sum(parse_expr("AS(psi, x^2)", 5), w=1)
    assert abs(r.value - 1.0) < 1e-12


def test_kloosterman_weil_modulus():
    # sum over G_m of psi(x + 1/x), 6 terms, |S| <= 2 sqrt(7)
    r = complete_sum(parse_expr("AS(psi, x + 1/x)", 7), w=1)
    assert abs(r.value) <= 2.0 + 1e-9
    raw = r.value * math.sqrt(7)
    direct = sum(
        np.exp(2j * np.pi * ((x + pow(x, 5, 7)) % 7) / 7) for x in range(1, 7)
    )
    assert abs(raw - direct) < 1e-9


def test_complete_sum_matches_pointwise_eval_on_extension():
    e = parse_expr("AS(psi, x^3 + 2*x + 1) (*) K(chi[2], x)", 5)
    K = tower(5).ext(2)
    direct = sum(eval_trace(e, K, (x,)) for x in K.elements())
    engine = complete_sum(e, m=2).value
    assert abs(direct - engine) < 1e-10


def test_fast_phase_path_matches_scalar_path():
    e = parse_expr("Shift(Twist(AS(psi, x^4 + x), 1/2), 1)", 11)
    K = tower(11).ext(2)
    direct = sum(eval_trace_extension(e, 2, (x,)) for x in K.elements())
    engine = complete_sum(e, m=2).value
    assert abs(direct - engine) < 1e-9


def test_budget_exceeded():
    cfg = RunConfig(max_evaluations=100)
    with pytest.raises(BudgetExceeded):
        complete_sum(parse_expr("AS(psi, x)", 101), m=2, config=cfg)
    with pytest.raises(BudgetExceeded):
        power_sums(parse_expr("AS(psi, x)", 7), M=5, config=cfg)


def test_determinism_across_thread_counts():
    e = parse_expr("AS(psi, x^3 + x) (*) K(chi[2], x^2 + 1)", 7)
    values = []
    for threads in (1, 2, 8):
        cfg = RunConfig(threads=threads)
        values.append(complete_sum(e, m=2, config=cfg).value)
    assert values[0] == values[1] == values[2]  # bit-exact
    fast = parse_expr("AS(psi, x^5 + 3*x^2)", 5)
    vals2 = [complete_sum(fast, m=5, config=RunConfig(threads=t)).value for t in (1, 2, 8)]
    assert vals2[0] == vals2[1] == vals2[2]


def test_triangle_bound_on_samples():
    for text, p in [("AS(psi, x^3)", 7), ("K(chi[2], x^2 + 1)", 5), ("AS(psi, 1/x)", 11)]:
        e = parse_expr(text, p)
        K = tower(p).ext(1)
        l1 = sum(abs(eval_trace(e, K, (x,))) for x in K.elements())
        r = complete_sum(e, w=0)
        assert abs(r.value) <= l1 + 1e-12


def test_power_sums_const_counts_points():
    S = power_sums(parse_expr("Const", 5), M=4)
    assert [round(s.real) for s in S] == [5, 25, 125, 625]


def test_power_sums_nontrivial_character_all_zero():
    S = power_sums(parse_expr("AS(psi, x)", 7), M=4)
    assert max(abs(s) for s in S) < 1e-9


def test_power_sums_weil_bound_x3():
    S = power_sums(parse_expr("AS(psi, x^3)", 7), M=4)
    for m, s in enumerate(S, start=1):
        assert abs(s) <= 2 * 7 ** (m / 2) + 1e-6


def test_fit_const_on_a1():
    est = fit_l_polynomial([5, 25, 125, 625, 3125])
    assert est.degree == 1
    assert est.chi_c == 1
    assert abs(est.recurrence[0] - 5) < 1e-9


@pytest.mark.parametrize("d,expected_deg", [(3, 2), (5, 4)])
def test_fit_as_xd(d, expected_deg):
    e = parse_expr(f"AS(psi, x^{d})", 7)
    S = power_sums(e, M=2 * expected_deg + 1)
    est = fit_l_polynomial(S)
    assert est.degree == expected_deg
    assert est.chi_c == -expected_deg


def test_fit_degree_invariant_under_appending():
    e = parse_expr("AS(psi, x^3)", 5)
    S = power_sums(e, M=9)
    d1 = fit_l_polynomial(S[:5]).degree
    d2 = fit_l_polynomial(S[:7]).degree
    d3 = fit_l_polynomial(S).degree
    assert d1 == d2 == d3 == 2


def test_fit_insufficient_terms_unstable():
    e = parse_expr("AS(psi, x^4)", 7)  # degree 3 needs 7 certified terms
    S = power_sums(e, M=4)
    with pytest.raises(Unstable):
        fit_l_polynomial(S)


def test_fit_residual_satisfies_recurrence():
    S = power_sums(parse_expr("AS(psi, x^3)", 11), M=7)
    est = fit_l_polynomial(S)
    r = est.degree
    for m in range(r, len(S)):
        pred = sum(est.recurrence[j] * S[m - 1 - j] for j in range(r))
        assert abs(S[m] - pred) <= max(est.residual, 1e-9) + 1e-9


def test_inner_product_selfnorm_exactly_one():
    A = parse_expr("Shift(Twist(AS(psi, x^3 + 2*x), 1/2), 1)", 7)
    v = inner_product(A, A)
    assert abs(v - 1.0) < 1e-9


def test_inner_product_weil_for_cubic_difference():
    A = parse_expr("Shift(Twist(AS(psi, x^3 + x), 1/2), 1)", 7)
    B = parse_expr("Shift(Twist(AS(psi, x), 1/2), 1)", 7)
    v = inner_product(A, B)
    assert abs(v) <= 2 * 7 ** -0.5 + 1e-9


def test_inner_product_orthogonality_const_vs_character():
    A = parse_expr("Twist(Const, 1/2)", 7)
    B = parse_expr("Twist(AS(psi, x), 1/2)", 7)
    assert abs(inner_product(A, B)) < 1e-9


def test_inner_product_ambient_mismatch():
    with pytest.raises(AmbientMismatch):
        inner_product(parse_expr("Const(2)", 5), parse_expr("Const", 5))


def test_inner_product_generic_path_matches_phase_path():
    A = parse_expr("AS(psi, x^2 + x)", 7)
    B = parse_expr("AS(psi, x^2)", 7)
    fast = inner_product(A, B)
    K = tower(7).ext(1)
    slow = sum(
        eval_trace(A, K, (x,)) * eval_trace(B, K, (x,)).conjugate() for x in K.elements()
    )
    assert abs(fast - slow) < 1e-12


# Gowers ------------------------------------------------------------------


@pytest.mark.parametrize("p", [5, 7, 11, 13])
def test_gowers_linear_phase_full_norm(p):
    assert abs(gowers_norm(parse_expr("AS(psi, 3*x + 1)", p), 2) - 1.0) < 1e-8


@pytest.mark.parametrize("p", [5, 7, 11, 13])
def test_gowers_quadratic_phase(p):
    assert abs(gowers_norm(parse_expr("AS(psi, 2*x^2)", p), 2) - 1 / p) < 1e-8


def test_gowers_const_any_degree():
    for d in (1, 2, 3):
        assert abs(gowers_norm(parse_expr("Const", 5), d) - 1.0) < 1e-10


def test_gowers_matches_literal_bruteforce():
    # independent brute force of the U_2 correlation at p = 5
    p = 5
    e = parse_expr("AS(psi, x^2 + x)", p)
    K = tower(p).ext(1)
    t = [eval_trace(e, K, (K.element(x),)) for x in range(p)]
    total = 0j
    for x in range(p):
        for h1 in range(p):
            for h2 in range(p):
                total += (
                    t[x]
                    * np.conj(t[(x + h1) % p])
                    * np.conj(t[(x + h2) % p])
                    * t[(x + h1 + h2) % p]
                )
    ref = (total / p ** 3).real
    assert abs(gowers_norm(e, 2) - ref) < 1e-10


# Fourier ------------------------------------------------------------------


def test_fourier_delta_support():
    p = 11
    b = 3
    ft = fourier_table(parse_expr(f"AS(psi, {b}*x)", p))
    mods = np.abs(ft)
    peak = (-b) % p
    assert abs(mods[peak] - math.sqrt(p)) < 1e-9
    assert np.max(np.delete(mods, peak)) < 1e-9


def test_fourier_of_const_is_delta_at_zero():
    ft = fourier_table(parse_expr("Const", 11))
    assert abs(ft[0] - math.sqrt(11)) < 1e-9
    assert np.max(np.abs(ft[1:])) < 1e-9


def test_fourier_plancherel():
    e = parse_expr("AS(psi, x^3 + x)", 11)
    t = trace_table(e).ravel()
    ft = fourier_table(e)
    assert abs(np.sum(np.abs(ft) ** 2) - np.sum(np.abs(t) ** 2)) < 1e-9


def test_additive_convolution_matches_definition():
    p = 7
    a = trace_table(parse_expr("AS(psi, x^2)", p)).ravel()
    b = trace_table(parse_expr("K(chi[3], x)", p)).ravel()
    conv = additive_convolution(a, b)
    for y in range(p):
        ref = sum(a[x] * b[(y - x) % p] for x in range(p))
        assert abs(conv[y] - ref) < 1e-10


def test_fp_error_bound_positive_and_small():
    r = complete_sum(parse_expr("AS(psi, x^2)", 101), w=1)
    assert 0 < r.fp_error_bound < 1e-10
