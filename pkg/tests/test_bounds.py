import random
from fractions import Fraction

import pytest

from sheafsums.bounds import (
    ComplexityBound,
    RULE_TABLE,
    apply_rule,
    katz_bound,
    morphism_bound,
    phase_leaf_bound,
    propagate,
    replay_trail,
    tensor_constant,
    tensor_constant_closed_form,
)
from sheafsums.errors import MissingData
from sheafsums.grammar import parse_expr
from sheafsums.sums import fit_l_polynomial, power_sums


def test_recursion_base_and_first_step():
    assert tensor_constant(0) == Fraction(65536, 81)
    assert tensor_constant(1) == Fraction(13 * 65536 + 4 ** 9 * 4, 81) == Fraction(1900544, 81)


def test_recursion_exact_up_to_twelve():
    for n in range(1, 13):
        lhs = tensor_constant(n)
        rhs = 13 * n * tensor_constant(n - 1) + Fraction(4 ** (8 + n) * (n + 1) ** 2, 81)
        assert lhs == rhs


def test_closed_form_majorant():
    for n in range(13):
        assert float(tensor_constant(n)) <= tensor_constant_closed_form(n)


def test_tensor_constant_range_guard():
    with pytest.raises(ValueError):
        tensor_constant(-1)
    with pytest.raises(ValueError):
        tensor_constant(21)


def test_katz_spot_values():
    assert katz_bound(1, 1, 3) == 432
    for d in (0, 1, 5, 100):
        assert katz_bound(0, 0, d) == 18
    assert katz_bound(2, 3, 2) == 6 * 8 * 9 ** 3 == 34992


def test_morphism_bound_identity_and_cubic():
    assert morphism_bound(1, 1, 0, 1) == 192
    assert morphism_bound(1, 1, 0, 3) == 432


def test_morphism_bound_powers_like_affine_phase_shape():
    # the explicit route grows like (4 + d1 + d2)^(n+2) up to an n-dependent factor
    for n in (1, 2, 3):
        for d1 in range(0, 9):
            for d2 in range(0, 9):
                k = katz_bound(n + 1, 2, max(d1, d2) + 1)
                assert k <= 24 * (2 * (4 + d1 + d2)) ** (n + 2)


def test_const_bound_is_one_validated_by_oracle():
    for n in (1, 2):
        b = propagate(parse_expr(f"Const({n})", 5))
        assert b.numeric == 1
        est = fit_l_polynomial(power_sums(parse_expr(f"Const({n})", 5), M=3))
        assert est.degree == 1  # total Betti number visible to the oracle


def test_tensor_rule_single_step_trail():
    b = propagate(parse_expr("AS(psi, x^3) (*) AS(psi, x^2)", 7))
    leaf_a = propagate(parse_expr("AS(psi, x^3)", 7)).numeric
    leaf_b = propagate(parse_expr("AS(psi, x^2)", 7)).numeric
    assert b.numeric == tensor_constant(1) * leaf_a * leaf_b
    assert b.trail["rule"] == "tensor"
    assert len(b.trail["children"]) == 2


def test_shift_twist_neutral():
    base = propagate(parse_expr("AS(psi, x^4)", 7)).numeric
    assert propagate(parse_expr("Shift(AS(psi, x^4), 3)", 7)).numeric == base
    assert propagate(parse_expr("Twist(AS(psi, x^4), 1/2)", 7)).numeric == base


def test_trail_replays_exactly():
    for text in [
        "AS(psi, x^3)",
        "Dual(AS(psi, x^2) (*) K(chi[2], x))",
        "FT(AS(psi, x^3))",
        "AS(psi, x1^2 + x2^3)",
        "AS(psi, x1*x2) |> push(x2)",
        "AS(psi, x^2) (x) K(chi[2], x)",
    ]:
        b = propagate(parse_expr(text, 7))
        assert replay_trail(b.trail) == b.numeric


def test_propagate_deterministic():
    e = parse_expr("FT(AS(psi, x^3) (*) K(chi[2], x))", 7)
    assert propagate(e).numeric == propagate(e).numeric
    assert propagate(e).trail == propagate(e).trail


def test_propagate_monotone_in_leaf_bounds():
    rng = random.Random(5)
    exprs = [
        parse_expr("AS(psi, x^3) (*) K(chi[2], x)", 7),
        parse_expr("FT(AS(psi, x^2))", 7),
        parse_expr("AS(psi, x1*x2 + x1^3) |> push(x2)", 5),
        parse_expr("Dual(AS(psi, x^5))", 11),
    ]
    for e in exprs:
        base = propagate(e).numeric
        for _ in range(5):
            factor = 1 + rng.randint(1, 10)

            def inflate(leaf, factor=factor):
                return propagate(leaf).numeric * factor

            assert propagate(e, leaf_override=inflate).numeric >= base


def test_bound_at_least_one_for_nonzero_expressions():
    for text, p in [
        ("AS(psi, x)", 7),
        ("K(chi[2], x^2)", 5),
        ("Const(2)", 5),
        ("AS(psi, 1/x) (*) Conj(AS(psi, 1/x))", 7),
    ]:
        assert propagate(parse_expr(text, p)).numeric >= 1


def test_soundness_vs_oracle_corpus():
    # numeric bound must dominate the oracle-visible Betti sum
    corpus = [
        ("AS(psi, x^3)", 7, 5),
        ("AS(psi, x^5)", 7, 9),
        ("AS(psi, x^2 + x)", 5, 3),
        ("K(chi[2], x)", 5, 3),
        ("K(chi[2], x^2 + 1)", 5, 5),
        ("AS(psi, x^3) (*) K(chi[2], x)", 5, 9),
        ("AS(psi, 1/x)", 7, 5),
        ("Const", 5, 3),
        ("AS(psi, x1*x2) |> push(x2)", 5, 5),
        ("FT(AS(psi, x^3))", 7, 3),
        ("Shift(Twist(AS(psi, x^4), 1/2), 1)", 7, 7),
    ]
    for text, p, M in corpus:
        e = parse_expr(text, p)
        bound = propagate(e).numeric
        S = power_sums(e, M=M)
        try:
            est = fit_l_polynomial(S)
        except Exception:
            continue
        assert bound >= est.degree, (text, bound, est.degree)


def test_fourier_bound_vs_transform_oracle():
    e = parse_expr("FT(AS(psi, x^3))", 7)
    b = propagate(e)
    est = fit_l_polynomial(power_sums(e, M=3))
    assert est.degree >= 1
    assert b.numeric >= est.degree
    assert not b.is_symbolic


def test_affine_phase_leaf_bound_multivariate():
    e = parse_expr("AS(psi, x1^3 + x2^3)", 7)
    b = propagate(e)
    assert b.numeric == phase_leaf_bound(2, 3, 0)


def test_rule_table_covers_every_node_kind():
    from sheafsums import expr as expr_mod

    node_kinds = [
        "AS",
        "Kummer",
        "Const",
        "Tensor",
        "Dual",
        "Conj",
        "Shift",
        "Twist",
        "ExternalProduct",
        "PushCompact",
        "Fourier",
    ]
    for kind in node_kinds:
        assert kind in RULE_TABLE
        assert hasattr(expr_mod, kind)


def test_symbolic_satellite_rules():
    a = propagate(parse_expr("AS(psi, x^2)", 5))
    b = propagate(parse_expr("K(chi[2], x)", 5))
    nearby = apply_rule("nearby_cycles", a)
    assert nearby.is_symbolic and "K_Psi" in nearby.symbols
    with pytest.raises(MissingData):
        _ = nearby.value
    with pytest.raises(MissingData):
        replay_trail(nearby.trail)
    van = apply_rule("vanishing_cycles", a, b)
    assert van.is_symbolic and "K_Phi" in van.symbols
    jh = apply_rule("jordan_holder", a)
    assert jh.is_symbolic
    tk = apply_rule("tannakian", a)
    assert "K_rho" in tk.symbols


def test_additive_rules():
    a = propagate(parse_expr("AS(psi, x^2)", 5))
    b = propagate(parse_expr("AS(psi, x^3)", 5))
    ds = apply_rule("direct_sum", a, b)
    assert ds.numeric == a.numeric + b.numeric
    assert replay_trail(ds.trail) == ds.numeric
    tri = apply_rule("triangle", a, b)
    assert tri.numeric == a.numeric + b.numeric


def test_rhom_rule():
    a = propagate(parse_expr("AS(psi, x^2)", 5))
    b = propagate(parse_expr("AS(psi, x^3)", 5))
    r = apply_rule("rhom", a, b, ambient=1)
    assert r.numeric == tensor_constant(1) ** 2 * a.numeric * b.numeric


def test_trail_json_round_trip():
    import json

    b = propagate(parse_expr("FT(AS(psi, x^2) (*) K(chi[2], x))", 5))
    parsed = json.loads(b.trail_json())
    assert replay_trail(parsed) == b.numeric
