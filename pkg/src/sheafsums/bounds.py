"""Effective complexity-bound propagation over sheaf expressions.

Constants come from two explicit sources: the tensor-product constant b_n on
projective n-space (a rational recursion) and the Betti-number bound
B(N, r, d) = 6 * 2^r * (3 + r*d)^(N+1) for polynomial maps on subvarieties.
Each six-functor rule composes these; dimension-1 phase leaves instead use
the exact curve formulas. All arithmetic is exact rational; every applied
rule is recorded in a trail that re-multiplies to the bound.

Rules whose constants the theory does not pin numerically (nearby/vanishing
cycles, Jordan-Hoelder decomposition, Tannakian images, middle extensions)
are available through apply_rule and produce symbolic bounds.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction

from .curves import (
    as_invariants,
    betti_sum_on,
    kummer_invariants,
    kummer_trivial_invariants,
    natural_curve,
    trivialized,
)
from .errors import MissingData
from .expr import AS, Conj, Const, Dual, ExternalProduct, Fourier, Kummer, PushCompact, Shift, SheafExpr, Tensor, Twist

_B_CACHE = [Fraction(4 ** 8, 81)]
_N_MAX = 20


def tensor_constant(n: int) -> Fraction:
    """b_n = 13 n b_{n-1} + 4^(8+n) (n+1)^2 / 81, b_0 = 4^8 / 81 (exact)."""
    if not (0 <= n <= _N_MAX):
        raise ValueError(f"tensor constant defined for 0 <= n <= {_N_MAX}")
    while len(_B_CACHE) <= n:
        m = len(_B_CACHE)
        _B_CACHE.append(13 * m * _B_CACHE[m - 1] + Fraction(4 ** (8 + m) * (m + 1) ** 2, 81))
    return _B_CACHE[n]


def tensor_constant_closed_form(n: int) -> float:
    """(2^16 / 3^4) e^(4/13) 13^n (n+2)!, the closed-form majorant of b_n."""
    return (2 ** 16 / 3 ** 4) * math.exp(4 / 13) * 13 ** n * math.factorial(n + 2)


def katz_bound(N: int, r: int, d: int) -> int:
    """6 * 2^r * (3 + r d)^(N+1)."""
    if min(N, r, d) < 0:
        raise ValueError("katz_bound needs nonnegative arguments")
    return 6 * 2 ** r * (3 + r * d) ** (N + 1)


def morphism_bound(n1: int, n2: int, r: int = 0, d: int = 1) -> int:
    """Bound for a polynomial map A^{n1} -> A^{n2} restricted to a subvariety
    cut by r equations, all degrees at most d: B(n1, n2 + r, d)."""
    return katz_bound(n1, n2 + r, d)


@dataclass(frozen=True)
class ComplexityBound:
    """Nonnegative bound: exact rational times an optional bag of named
    symbolic constants; `trail` re-multiplies to the value."""

    numeric: Fraction
    symbols: tuple
    trail: dict

    @property
    def is_symbolic(self) -> bool:
        return bool(self.symbols)

    @property
    def value(self) -> Fraction:
        if self.symbols:
            raise MissingData(f"bound is symbolic in {', '.join(self.symbols)}")
        return self.numeric

    def trail_json(self) -> str:
        return json.dumps(self.trail, indent=2, sort_keys=True)

    def __repr__(self):
        if self.symbols:
            return f"ComplexityBound({self.numeric} * {' * '.join(self.symbols)})"
        return f"ComplexityBound({self.numeric})"


def _step(rule, constant, note, children, op="mul", symbols=()):
    step = {
        "rule": rule,
        "constant": str(constant),
        "note": note,
        "op": op,
        "children": children,
    }
    if symbols:
        step["symbols"] = list(symbols)
    return step


def _mul(rule, constant, note, *children, extra_symbols=()):
    numeric = Fraction(constant)
    symbols = tuple(extra_symbols)
    for ch in children:
        numeric *= ch.numeric
        symbols += ch.symbols
    return ComplexityBound(
        numeric, symbols, _step(rule, constant, note, [c.trail for c in children], symbols=extra_symbols)
    )


def replay_trail(trail) -> Fraction:
    """Recompute the numeric value from a trail; raises on symbolic steps."""
    if trail.get("symbols"):
        raise MissingData(f"symbolic constants {trail['symbols']} in trail")
    c = trail["constant"]
    try:
        const = Fraction(c)
    except ValueError:
        raise MissingData(f"symbolic constant {c} in trail") from None
    parts = [replay_trail(ch) for ch in trail["children"]]
    if trail.get("op") == "add":
        return const * sum(parts, Fraction(0))
    out = const
    for part in parts:
        out *= part
    return out


# ---------------------------------------------------------------------------
# leaf bounds


def phase_leaf_bound(n: int, d1: int, d2: int) -> Fraction:
    """Additive-phase sheaf of f1/f2 on A^n (n >= 2) via the explicit route:
    the graph of the fraction in A^(n+1) is cut by one equation of degree
    d2 + 1; extension by zero and pullback each cost a tensor constant."""
    return (
        tensor_constant(n + 1)
        * tensor_constant(1)
        * katz_bound(n + 1, n + 1, d2 + 1)
        * katz_bound(n + 1, 2, max(d1, d2) + 1)
    )


def kummer_leaf_bound(n: int, d1: int, d2: int) -> Fraction:
    """Multiplicative-phase sheaf of g1/g2 on A^n (n >= 2); the graph kills
    zeros and poles at once (g1 g2 y = 1, degree d1 + d2 + 1)."""
    return (
        tensor_constant(n + 1)
        * tensor_constant(1)
        * katz_bound(n + 1, n + 1, d1 + d2 + 1)
        * katz_bound(n + 1, 2, max(2 * d1, d1 + d2) + 1)
    )


def _leaf_bound(expr, leaf_override):
    if leaf_override is not None:
        forced = leaf_override(expr)
        if forced is not None:
            return ComplexityBound(
                Fraction(forced), (), _step("leaf-override", Fraction(forced), "caller-supplied leaf bound", [])
            )
    if isinstance(expr, Const):
        return ComplexityBound(
            Fraction(1), (), _step("constant-sheaf", 1, "rank-one trivial sheaf on affine space", [])
        )
    if isinstance(expr, AS):
        if expr.ambient == 1:
            if expr.a % expr.p == 0:
                inv = trivialized(as_invariants(expr.f))
            else:
                inv = as_invariants(expr.f.scale_int(expr.a))
            c = max(inv.rank, betti_sum_on(inv, natural_curve(inv)))
            return ComplexityBound(
                Fraction(c),
                (),
                _step("curve-phase-leaf", Fraction(c), "exact curve complexity from rank/Swan data", []),
            )
        d1 = max(expr.f.num.total_degree(), 0)
        d2 = max(expr.f.den.total_degree(), 0)
        c = phase_leaf_bound(expr.ambient, d1, d2)
        return ComplexityBound(
            c, (), _step("affine-phase-leaf", c, "rational-phase sheaf on affine n-space, explicit route", [])
        )
    if isinstance(expr, Kummer):
        order = _char_order(expr)
        if expr.ambient == 1:
            if order == 1:
                inv = kummer_trivial_invariants(expr.g)
            else:
                inv = kummer_invariants(expr.g, order)
            c = max(inv.rank, betti_sum_on(inv, natural_curve(inv)))
            return ComplexityBound(
                Fraction(c),
                (),
                _step("curve-kummer-leaf", Fraction(c), "exact curve complexity, tame boundary data", []),
            )
        d1 = max(expr.g.num.total_degree(), 0)
        d2 = max(expr.g.den.total_degree(), 0)
        c = kummer_leaf_bound(expr.ambient, d1, d2)
        return ComplexityBound(
            c, (), _step("affine-kummer-leaf", c, "multiplicative phase on affine n-space, explicit route", [])
        )
    raise TypeError(f"no leaf bound for {type(expr).__name__}")


def _char_order(expr: Kummer):
    n1 = expr.p - 1
    if n1 == 0:
        return 1
    e = expr.e % n1
    if e == 0:
        return 1
    return n1 // math.gcd(e, n1)


# ---------------------------------------------------------------------------
# propagate


def propagate(expr: SheafExpr, leaf_override=None) -> ComplexityBound:
    """Complexity bound with provenance trail for an expression tree.

    `leaf_override(expr) -> value | None` replaces leaf bounds; the recipes
    are products of positive constants, so the result is monotone in every
    leaf bound.
    """
    if isinstance(expr, (AS, Kummer, Const)):
        return _leaf_bound(expr, leaf_override)
    if isinstance(expr, Tensor):
        n = expr.ambient
        bn = tensor_constant(n)
        return _mul(
            "tensor",
            bn,
            f"tensor product on affine {n}-space: b_{n} * c(A) * c(B)",
            propagate(expr.left, leaf_override),
            propagate(expr.right, leaf_override),
        )
    if isinstance(expr, (Dual, Conj)):
        n = expr.ambient
        bn = tensor_constant(n)
        rule = "dual" if isinstance(expr, Dual) else "conjugate"
        return _mul(
            rule,
            bn,
            f"duality on affine {n}-space: b_{n} * c(embedding) * c(A), embedding constant 1",
            propagate(expr.child, leaf_override),
        )
    if isinstance(expr, Shift):
        return _mul("shift", Fraction(1), "homological shift is complexity-neutral", propagate(expr.child, leaf_override))
    if isinstance(expr, Twist):
        return _mul("twist", Fraction(1), "geometrically trivial twist is complexity-neutral", propagate(expr.child, leaf_override))
    if isinstance(expr, ExternalProduct):
        n1, n2 = expr.left.ambient, expr.right.ambient
        n = n1 + n2
        const = (
            tensor_constant(n)
            * tensor_constant(n1)
            * Fraction(morphism_bound(n, n1))
            * tensor_constant(n2)
            * Fraction(morphism_bound(n, n2))
        )
        return _mul(
            "external-product",
            const,
            f"pull both factors to affine {n}-space along the projections and tensor",
            propagate(expr.left, leaf_override),
            propagate(expr.right, leaf_override),
        )
    if isinstance(expr, PushCompact):
        n = expr.child.ambient
        s = len(expr.coords)
        const = tensor_constant(n) * Fraction(morphism_bound(n, n - s))
        return _mul(
            "push-compact",
            const,
            f"compactly supported pushforward along a coordinate projection A^{n} -> A^{n - s}",
            propagate(expr.child, leaf_override),
        )
    if isinstance(expr, Fourier):
        n = expr.ambient
        kernel = phase_leaf_bound(2 * n, 2, 0)
        const = (
            tensor_constant(2 * n) ** 2
            * tensor_constant(n)
            * Fraction(morphism_bound(2 * n, n)) ** 2
            * kernel
        )
        return _mul(
            "fourier",
            const,
            "pull to the doubled space, tensor with the additive kernel, push back",
            propagate(expr.child, leaf_override),
        )
    raise TypeError(f"no propagation rule for {type(expr).__name__}")


# ---------------------------------------------------------------------------
# rule table (including symbolic satellites reachable via apply_rule)


@dataclass(frozen=True)
class RuleEntry:
    name: str
    numeric: bool
    note: str


RULE_TABLE = {
    "AS": RuleEntry("AS", True, "curve formulas in dimension 1, explicit affine route above"),
    "Kummer": RuleEntry("Kummer", True, "curve formulas in dimension 1, explicit affine route above"),
    "Const": RuleEntry("Const", True, "constant sheaf has complexity 1"),
    "Tensor": RuleEntry("Tensor", True, "b_n * c(A) * c(B)"),
    "Dual": RuleEntry("Dual", True, "b_n * c(A)"),
    "Conj": RuleEntry("Conj", True, "b_n * c(A); conjugate realized by a dual up to twist"),
    "Shift": RuleEntry("Shift", True, "complexity-neutral"),
    "Twist": RuleEntry("Twist", True, "complexity-neutral"),
    "ExternalProduct": RuleEntry("ExternalProduct", True, "pullback + pullback + tensor"),
    "PushCompact": RuleEntry("PushCompact", True, "b_n * B(n, n-s, 1) * c(A)"),
    "Fourier": RuleEntry("Fourier", True, "kernel transform, fully numeric"),
    "rhom": RuleEntry("rhom", True, "b_n^2 * c(A) * c(B)"),
    "direct_sum": RuleEntry("direct_sum", True, "additive: c(A) + c(B)"),
    "triangle": RuleEntry("triangle", True, "additive: c(A) + c(B) bounds the third vertex"),
    "nearby_cycles": RuleEntry("nearby_cycles", False, "K_Psi * c(A_eta); constant not pinned numerically"),
    "vanishing_cycles": RuleEntry("vanishing_cycles", False, "K_Phi * (c(A_eta) + c(A_sigma))"),
    "jordan_holder": RuleEntry("jordan_holder", False, "sum of factor complexities <= K_JH * c(A)"),
    "tannakian": RuleEntry("tannakian", False, "K_rho * c(F)^a, exponent depends on the representation"),
    "middle_extension": RuleEntry("middle_extension", False, "K_mid * c(A)"),
}


def apply_rule(name: str, *operands, ambient: int = 1) -> ComplexityBound:
    """Apply a rule-table entry to already-computed bounds.

    Numeric entries compose exact constants; non-numeric ones return a
    symbolic bound carrying the named constant.
    """
    entry = RULE_TABLE.get(name)
    if entry is None:
        raise KeyError(f"unknown rule {name!r}")
    bn = tensor_constant(ambient)
    if name == "rhom":
        a, b = operands
        return _mul("rhom", bn * bn, entry.note, a, b)
    if name in ("direct_sum", "triangle"):
        a, b = operands
        numeric = a.numeric + b.numeric
        sym = a.symbols + b.symbols
        return ComplexityBound(numeric, sym, _step(name, 1, entry.note, [a.trail, b.trail], op="add"))
    if name == "nearby_cycles":
        (a,) = operands
        return _mul("nearby_cycles", 1, entry.note, a, extra_symbols=("K_Psi",))
    if name == "vanishing_cycles":
        a, b = operands
        numeric = a.numeric + b.numeric
        sym = a.symbols + b.symbols + ("K_Phi",)
        return ComplexityBound(numeric, sym, _step(name, "K_Phi", entry.note, [a.trail, b.trail], op="add"))
    if name == "jordan_holder":
        (a,) = operands
        return _mul("jordan_holder", 1, entry.note, a, extra_symbols=("K_JH",))
    if name == "tannakian":
        (a,) = operands
        return _mul("tannakian", 1, entry.note, a, extra_symbols=("K_rho", "exponent_a"))
    if name == "middle_extension":
        (a,) = operands
        return _mul("middle_extension", 1, entry.note, a, extra_symbols=("K_mid",))
    raise KeyError(f"rule {name!r} is applied through propagate(), not apply_rule()")
