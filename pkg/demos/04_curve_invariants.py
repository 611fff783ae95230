"""Ramification bookkeeping on the projective line: Swan conductors, the
Euler-characteristic formula, exact complexity, and the conductor
comparison, each cross-checked against the numeric recurrence oracle."""

from sheafsums import parse_expr
from sheafsums.curves import Curve, curve_complexity, fkm_conductor, gos_chi, invariants_for_expr, natural_curve
from sheafsums.sums import fit_l_polynomial, power_sums

CASES = [
    ("AS(psi, x)", 7, 3),
    ("AS(psi, x^3)", 7, 5),
    ("AS(psi, 1/x^2)", 7, 5),
    ("K(chi[3], x)", 7, 3),
    ("K(chi[3], x^2 + 6*x)", 7, 3),
    ("AS(psi, x^3) (*) K(chi[2], x)", 5, 7),
]

for text, p, M in CASES:
    expr = parse_expr(text, p)
    inv = invariants_for_expr(expr)
    chi = gos_chi(inv, Curve.A1())
    c = curve_complexity(inv, curve=natural_curve(inv)).value
    est = fit_l_polynomial(power_sums(expr, M=M))
    flag = "agrees" if est.chi_c == chi else "DISAGREES"
    print(f"{text}  over F_{p}")
    for d in inv.points:
        kind = "ramified" if d.ramified else "bookkeeping"
        print(f"  {d.point!r:18s} drop {d.drop}  swan {d.swan}  [{kind}]")
    print(f"  chi_c (local formula) = {chi}, oracle chi_c = {est.chi_c}  -> {flag}")
    print(f"  exact complexity = {c}, conductor comparison value = {fkm_conductor(inv)}")
    print()

print("wild reduction at work: the phase x^5 over F_5 is the phase x")
inv5 = invariants_for_expr(parse_expr("AS(psi, x^5)", 5))
print(f"  swan at infinity after reduction: {inv5.points[-1].swan} (pole order was 5)")
