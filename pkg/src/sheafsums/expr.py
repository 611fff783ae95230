"""Sheaf-expression trees with pointwise trace-function semantics.

Every node denotes a constructible object on affine n-space over F_p with its
standard projective embedding; `trace` evaluates the associated function at a
point of F_{p^m}^n. The complexity-bound semantics of the same trees lives in
`bounds`; ramification invariants for curve leaves live in `curves`.

Conventions baked in here:
  * additive phases over an extension compose with the trace down to F_p;
  * multiplicative characters over an extension compose with the norm;
  * Twist(w) scales by p^(-m*w) over F_{p^m}, with w a half-integer realized
    by the positive real root;
  * Dual is numeric only on weight-0-pure trees, where it agrees with Conj.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass
from fractions import Fraction

from .characters import root_table
from .errors import AmbientMismatch, UnsupportedWeight, WeightError
from .ffield import tower
from .rational import MPoly, RationalMap


class SheafExpr:
    """Base class; concrete nodes are the frozen dataclasses below."""

    p: int
    ambient: int

    def canonical(self) -> str:
        raise NotImplementedError

    def canonical_hash(self) -> str:
        return hashlib.sha256(self.canonical().encode()).hexdigest()

    # numeric weight of the tree if it is pure, else None
    def pure_weight(self):
        raise NotImplementedError

    def __repr__(self):
        return self.canonical()

    def __eq__(self, other):
        return isinstance(other, SheafExpr) and other.canonical() == self.canonical()

    def __hash__(self):
        return hash(self.canonical())


@dataclass(frozen=True, eq=False, repr=False)
class AS(SheafExpr):
    """Additive-phase sheaf: trace psi_a(Tr f(x)), zero at poles of f."""

    a: int
    f: RationalMap

    @property
    def p(self):
        return self.f.p

    @property
    def ambient(self):
        return self.f.nvars

    def canonical(self):
        return f"AS[{self.a % self.p}]({self.f.canonical()})@{self.p}"

    def pure_weight(self):
        return Fraction(0)


@dataclass(frozen=True, eq=False, repr=False)
class Kummer(SheafExpr):
    """Multiplicative-phase sheaf: trace chi(g(x)), zero at zeros/poles of g.

    The character is chi_e on F_p^x with respect to the smallest primitive
    root; over F_{p^m} it is evaluated through the norm.
    """

    e: int
    g: RationalMap

    @property
    def p(self):
        return self.g.p

    @property
    def ambient(self):
        return self.g.nvars

    def canonical(self):
        return f"K[{self.e % (self.p - 1) if self.p > 2 else 0}]({self.g.canonical()})@{self.p}"

    def pure_weight(self):
        return Fraction(0)


@dataclass(frozen=True, eq=False, repr=False)
class Const(SheafExpr):
    """Rank-one trivial sheaf on affine n-space: trace identically 1."""

    p_: int
    n: int = 1

    @property
    def p(self):
        return self.p_

    @property
    def ambient(self):
        return self.n

    def canonical(self):
        return f"Const({self.n})@{self.p_}"

    def pure_weight(self):
        return Fraction(0)


@dataclass(frozen=True, eq=False, repr=False)
class Tensor(SheafExpr):
    left: SheafExpr
    right: SheafExpr

    def __post_init__(self):
        if self.left.p != self.right.p:
            raise AmbientMismatch("tensor factors over different primes")
        if self.left.ambient != self.right.ambient:
            raise AmbientMismatch(
                f"tensor factors on A^{self.left.ambient} and A^{self.right.ambient}"
            )

    @property
    def p(self):
        return self.left.p

    @property
    def ambient(self):
        return self.left.ambient

    def canonical(self):
        parts = sorted([self.left.canonical(), self.right.canonical()])
        return f"Tensor({parts[0]},{parts[1]})"

    def pure_weight(self):
        a, b = self.left.pure_weight(), self.right.pure_weight()
        if a is None or b is None:
            return None
        return a + b


@dataclass(frozen=True, eq=False, repr=False)
class Dual(SheafExpr):
    child: SheafExpr

    @property
    def p(self):
        return self.child.p

    @property
    def ambient(self):
        return self.child.ambient

    def canonical(self):
        return f"Dual({self.child.canonical()})"

    def pure_weight(self):
        w = self.child.pure_weight()
        return None if w is None else -w


@dataclass(frozen=True, eq=False, repr=False)
class Conj(SheafExpr):
    child: SheafExpr

    @property
    def p(self):
        return self.child.p

    @property
    def ambient(self):
        return self.child.ambient

    def canonical(self):
        return f"Conj({self.child.canonical()})"

    def pure_weight(self):
        w = self.child.pure_weight()
        return None if w is None else w


@dataclass(frozen=True, eq=False, repr=False)
class Shift(SheafExpr):
    child: SheafExpr
    h: int

    @property
    def p(self):
        return self.child.p

    @property
    def ambient(self):
        return self.child.ambient

    def canonical(self):
        return f"Shift({self.child.canonical()},{self.h})"

    def pure_weight(self):
        return self.child.pure_weight()


@dataclass(frozen=True, eq=False, repr=False)
class Twist(SheafExpr):
    child: SheafExpr
    w: Fraction

    def __post_init__(self):
        object.__setattr__(self, "w", Fraction(self.w))

    @property
    def p(self):
        return self.child.p

    @property
    def ambient(self):
        return self.child.ambient

    def canonical(self):
        return f"Twist({self.child.canonical()},{self.w})"

    def pure_weight(self):
        w = self.child.pure_weight()
        return None if w is None else w - 2 * self.w


@dataclass(frozen=True, eq=False, repr=False)
class ExternalProduct(SheafExpr):
    left: SheafExpr
    right: SheafExpr

    def __post_init__(self):
        if self.left.p != self.right.p:
            raise AmbientMismatch("external product factors over different primes")

    @property
    def p(self):
        return self.left.p

    @property
    def ambient(self):
        return self.left.ambient + self.right.ambient

    def canonical(self):
        return f"ExtProd({self.left.canonical()},{self.right.canonical()})"

    def pure_weight(self):
        a, b = self.left.pure_weight(), self.right.pure_weight()
        if a is None or b is None:
            return None
        return a + b


@dataclass(frozen=True, eq=False, repr=False)
class PushCompact(SheafExpr):
    """Compactly supported pushforward along the projection that forgets
    the listed coordinates; trace is the literal fiber sum."""

    child: SheafExpr
    coords: tuple

    def __post_init__(self):
        coords = tuple(sorted(set(self.coords)))
        object.__setattr__(self, "coords", coords)
        if not coords:
            raise ValueError("push needs at least one coordinate")
        if any(c < 0 or c >= self.child.ambient for c in coords):
            raise AmbientMismatch("push coordinate outside the child ambient")
        if len(coords) >= self.child.ambient:
            raise AmbientMismatch("pushing away every coordinate is not supported")

    @property
    def p(self):
        return self.child.p

    @property
    def ambient(self):
        return self.child.ambient - len(self.coords)

    def canonical(self):
        return f"Push({self.child.canonical()},{','.join(map(str, self.coords))})"

    def pure_weight(self):
        return None


@dataclass(frozen=True, eq=False, repr=False)
class Fourier(SheafExpr):
    """Additive-phase transform with kernel psi_a(x.t), unitary normalization
    q^(-n/2) so that Plancherel holds on the nose."""

    child: SheafExpr
    a: int = 1

    @property
    def p(self):
        return self.child.p

    @property
    def ambient(self):
        return self.child.ambient

    def canonical(self):
        return f"FT[{self.a % self.p}]({self.child.canonical()})"

    def pure_weight(self):
        return None


# ---------------------------------------------------------------------------
# trace-function evaluation


def twist_factor(p, m, w: Fraction) -> float:
    """p^(-m*w) for half-integer w, via the positive real root."""
    t = -m * Fraction(w)
    if t.denominator == 1:
        return float(p) ** int(t)
    if t.denominator == 2:
        return math.sqrt(float(p) ** int(2 * t) if t > 0 else 1.0 / float(p) ** int(-2 * t))
    raise UnsupportedWeight(f"twist weight {w} is not a half-integer")


def eval_trace_extension(expr: SheafExpr, m: int, point, field=None) -> complex:
    """Trace of `expr` at a point of F_{p^m}^n (point: tuple of FieldElements)."""
    K = field if field is not None else tower(expr.p).ext(m)
    return _eval(expr, K, m, tuple(point))


def eval_trace(expr: SheafExpr, K, point) -> complex:
    """Trace at a point of K^n for an already-built extension K of F_p."""
    return _eval(expr, K, K.k, tuple(point))


def _eval(expr, K, m, point) -> complex:
    p = expr.p
    if isinstance(expr, AS):
        v = expr.f.eval(K, point)
        if v is None:
            return 0j
        t = (expr.a * v.trace()) % p
        return complex(root_table(p)[t])
    if isinstance(expr, Kummer):
        v = expr.g.eval(K, point)
        if v is None or v.is_zero():
            return 0j
        n0 = v.norm()
        if n0 == 0:
            return 0j
        base = K.base if hasattr(K, "base") else K
        j = base.dlog(n0)
        if p == 2:
            return 1 + 0j
        return complex(root_table(p - 1)[(j * expr.e) % (p - 1)])
    if isinstance(expr, Const):
        return 1 + 0j
    if isinstance(expr, Tensor):
        a = _eval(expr.left, K, m, point)
        if a == 0:
            return 0j
        return a * _eval(expr.right, K, m, point)
    if isinstance(expr, Conj):
        return _eval(expr.child, K, m, point).conjugate()
    if isinstance(expr, Dual):
        w = expr.child.pure_weight()
        if w is None or w != 0:
            raise WeightError(
                "numeric Dual requires a weight-0 pure tree; wrap with Twist "
                "to weight zero or use Conj for the plain conjugate"
            )
        return _eval(expr.child, K, m, point).conjugate()
    if isinstance(expr, Shift):
        s = -1.0 if expr.h % 2 else 1.0
        return s * _eval(expr.child, K, m, point)
    if isinstance(expr, Twist):
        return twist_factor(p, m, expr.w) * _eval(expr.child, K, m, point)
    if isinstance(expr, ExternalProduct):
        n1 = expr.left.ambient
        a = _eval(expr.left, K, m, point[:n1])
        if a == 0:
            return 0j
        return a * _eval(expr.right, K, m, point[n1:])
    if isinstance(expr, PushCompact):
        return _eval_push(expr, K, m, point)
    if isinstance(expr, Fourier):
        return _eval_fourier(expr, K, m, point)
    raise TypeError(f"unknown node {type(expr).__name__}")


def _eval_push(expr, K, m, point):
    child = expr.child
    n_child = child.ambient
    fixed = {}
    it = iter(point)
    for i in range(n_child):
        if i not in expr.coords:
            fixed[i] = next(it)
    total = 0j
    # literal fiber sum, cost q^{|coords|}
    coords = list(expr.coords)

    def rec(depth, partial):
        nonlocal total
        if depth == len(coords):
            full = tuple(fixed[i] if i in fixed else partial[i] for i in range(n_child))
            total += _eval(child, K, m, full)
            return
        c = coords[depth]
        for idx in range(K.q):
            partial[c] = K.element_from_index(idx)
            rec(depth + 1, partial)

    rec(0, [None] * n_child)
    return total


def _eval_fourier(expr, K, m, point):
    p = expr.p
    n = expr.ambient
    table = root_table(p)
    norm = K.q ** (-n / 2.0)
    total = 0j
    a = expr.a % p

    def rec(depth, partial):
        nonlocal total
        if depth == n:
            t = tuple(partial)
            phase_arg = 0
            for x_i, t_i in zip(point, t):
                phase_arg = (phase_arg + (x_i * t_i).trace()) % p
            total += _eval(expr.child, K, m, t) * table[(a * phase_arg) % p]
            return
        for idx in range(K.q):
            partial.append(K.element_from_index(idx))
            rec(depth + 1, partial)
            partial.pop()

    rec(0, [])
    return norm * total


# ---------------------------------------------------------------------------
# helpers used by the engines


def as_phase_profile(expr):
    """Flatten a tree of AS/Const/Tensor/Shift/Twist/Conj/Dual nodes on A^1
    with polynomial maps to (sign, total twist weight, combined polynomial).

    Returns None when the tree has any other shape; the combined data means
    trace(x) = sign * p^(-m*w_total) * psi(Tr(poly(x))) over F_{p^m}.
    """
    if expr.ambient != 1:
        return None
    p = expr.p
    sign = 1
    w_total = Fraction(0)
    poly = MPoly.const(p, 1, 0)

    def walk(node, conj):
        nonlocal sign, w_total, poly
        if isinstance(node, AS):
            if not node.f.is_polynomial():
                raise _NotPhase
            contrib = node.f.num.scale(node.a)
            poly = poly - contrib if conj else poly + contrib
            return
        if isinstance(node, Const):
            return
        if isinstance(node, Tensor):
            walk(node.left, conj)
            walk(node.right, conj)
            return
        if isinstance(node, Conj):
            walk(node.child, not conj)
            return
        if isinstance(node, Dual):
            w = node.child.pure_weight()
            if w is None or w != 0:
                raise _NotPhase
            walk(node.child, not conj)
            return
        if isinstance(node, Shift):
            if node.h % 2:
                sign = -sign
            walk(node.child, conj)
            return
        if isinstance(node, Twist):
            w_total += node.w
            walk(node.child, conj)
            return
        raise _NotPhase

    try:
        walk(expr, False)
    except _NotPhase:
        return None
    return sign, w_total, poly.univariate_coeffs()


class _NotPhase(Exception):
    pass


def has_poles(expr) -> bool:
    """True when some leaf map has a nonconstant denominator."""
    if isinstance(expr, AS):
        return not expr.f.is_polynomial()
    if isinstance(expr, Kummer):
        return True  # zero locus behaves like a pole for the trace
    if isinstance(expr, (Tensor, ExternalProduct)):
        return has_poles(expr.left) or has_poles(expr.right)
    if isinstance(expr, (Dual, Conj, Shift, Twist, PushCompact, Fourier)):
        return has_poles(expr.child)
    return False
