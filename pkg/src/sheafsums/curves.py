"""Rank, drop and Swan data for rank-one sheaves on open subsets of P^1,
the Euler-characteristic formula, the exact curve complexity, and the
conductor comparison.

Point bookkeeping follows the extension-by-zero convention: every boundary
point of the lisse locus appears in the invariant list with drop = rank, with
a `ramified` flag separating genuine ramification from bookkeeping entries.
Closed points in extensions are stored once per Frobenius orbit (their monic
minimal polynomial) with multiplicity = orbit size.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from . import polyfp
from .errors import BadOrder, MissingData, WrongAmbient
from .rational import RationalMap

INFINITY = "inf"


@dataclass(frozen=True)
class CurvePoint:
    """A closed point of P^1 over F_p: a monic irreducible, or infinity."""

    minpoly: tuple | str

    @property
    def degree(self):
        return 1 if self.minpoly == INFINITY else len(self.minpoly) - 1

    @property
    def is_infinity(self):
        return self.minpoly == INFINITY

    def __repr__(self):
        if self.is_infinity:
            return "Point(inf)"
        return f"Point({self.minpoly})"


POINT_AT_INFINITY = CurvePoint(INFINITY)


def point_zero():
    return CurvePoint((0, 1))


@dataclass(frozen=True)
class LocalData:
    point: CurvePoint
    drop: int
    swan: int
    jump: int = 0
    ramified: bool = True


@dataclass(frozen=True)
class CurveAmbient:
    genus: int = 0
    punctures: int = 1
    degree: int = 1


@dataclass(frozen=True)
class CurveSheafInvariants:
    rank: int
    points: tuple            # all boundary/singular LocalData, bookkeeping included
    ambient: CurveAmbient = CurveAmbient()
    trivial: bool = False    # geometrically constant on its lisse locus

    @property
    def singular_points(self):
        """Points where the sheaf is genuinely ramified."""
        return tuple(d for d in self.points if d.ramified)

    def point_data(self, pt: CurvePoint):
        for d in self.points:
            if d.point == pt:
                return d
        return None


@dataclass(frozen=True)
class Curve:
    """A^1, G_m, or P^1 minus an explicit list of closed points."""

    punctures: tuple

    @classmethod
    def A1(cls):
        return cls((POINT_AT_INFINITY,))

    @classmethod
    def Gm(cls):
        return cls((point_zero(), POINT_AT_INFINITY))

    @classmethod
    def P1(cls):
        return cls(())

    @classmethod
    def P1_minus(cls, points):
        return cls(tuple(points))

    def chi_c(self, genus=0):
        return 2 - 2 * genus - sum(pt.degree for pt in self.punctures)


@dataclass(frozen=True)
class ComplexityValue:
    """Exact complexity, or a lower/upper pair when only local data is known."""

    lower: Fraction
    upper: Fraction
    exact: bool

    @classmethod
    def of(cls, v):
        v = Fraction(v)
        return cls(v, v, True)

    @classmethod
    def pair(cls, lo, hi):
        lo, hi = Fraction(lo), Fraction(hi)
        if lo > hi:
            raise ValueError("lower bound exceeds upper bound")
        return cls(lo, hi, False)

    @property
    def value(self):
        if not self.exact:
            raise MissingData("complexity is only known as a (lower, upper) pair")
        return self.lower


# ---------------------------------------------------------------------------
# univariate fractions with exact pole bookkeeping


class _Frac:
    """num/den over F_p[x], reduced; helper for the additive-phase reduction."""

    __slots__ = ("p", "num", "den")

    def __init__(self, p, num, den=(1,)):
        if not den:
            raise ZeroDivisionError
        g = polyfp.gcd(num, den, p) if num else ()
        if g and polyfp.deg(g) > 0:
            num = polyfp.divmod_(num, g, p)[0]
            den = polyfp.divmod_(den, g, p)[0]
        if not num:
            den = (1,)
        lead_inv = pow(den[-1], p - 2, p)
        self.p = p
        self.num = polyfp.scale(num, lead_inv, p)
        self.den = polyfp.scale(den, lead_inv, p)

    def sub(self, other):
        p = self.p
        num = polyfp.sub(polyfp.mul(self.num, other.den, p), polyfp.mul(other.num, self.den, p), p)
        return _Frac(p, num, polyfp.mul(self.den, other.den, p))

    def valuation(self, pi):
        """pi-adic valuation (negative at poles)."""
        v = 0
        num, den = self.num, self.den
        if not num:
            return None
        while True:
            q, r = polyfp.divmod_(num, pi, self.p)
            if r:
                break
            num = q
            v += 1
        while True:
            q, r = polyfp.divmod_(den, pi, self.p)
            if r:
                break
            den = q
            v -= 1
        return v

    def infinity_order(self):
        """Pole order at infinity: deg num - deg den (positive means a pole)."""
        if not self.num:
            return None
        return polyfp.deg(self.num) - polyfp.deg(self.den)


def _reduce_infinity(f: _Frac) -> _Frac:
    """Kill p | (pole order at infinity) by subtracting h^p - h terms."""
    p = f.p
    while True:
        ordinf = f.infinity_order()
        if ordinf is None or ordinf <= 0 or ordinf % p != 0:
            return f
        lead = (f.num[-1] * pow(f.den[-1], p - 2, p)) % p
        m = ordinf // p
        # lead^(1/p) = lead in F_p
        h = polyfp.scale((0,) * m + (1,), lead, p)
        correction = _Frac(p, polyfp.sub(polyfp.pow_(h, p, p), h, p))
        f = f.sub(correction)


def _reduce_finite(f: _Frac, pi) -> _Frac:
    """Kill p | (pole order at pi) by subtracting h^p - h with h = u/pi^(m/p)."""
    p = f.p
    k = polyfp.deg(pi)
    while True:
        v = f.valuation(pi)
        if v is None or v >= 0 or (-v) % p != 0:
            return f
        m = -v
        # den = pi^m * den_hat with pi coprime to num and den_hat
        den_hat = f.den
        for _ in range(m):
            den_hat, rem = polyfp.divmod_(den_hat, pi, p)
            assert not rem, "valuation bookkeeping out of sync"
        pim = polyfp.pow_(pi, m, p)
        # leading pi-adic coefficient: (f * pi^m) mod pi = num/den_hat mod pi
        den_inv = _poly_invmod(den_hat, pi, p)
        c = polyfp.mulmod(polyfp.mod(f.num, pi, p), den_inv, pi, p)
        # Frobenius inverse in the residue field: u = c^(p^(k-1))
        u = polyfp.powmod(c, p ** (k - 1), pi, p)
        mp = m // p
        pimp = polyfp.pow_(pi, mp, p)
        h_p = _Frac(p, polyfp.pow_(u, p, p), pim)
        h = _Frac(p, u, pimp)
        f = f.sub(h_p.sub(h))


def _poly_invmod(a, m, p):
    a = polyfp.mod(a, m, p)
    r0, r1 = m, a
    s0, s1 = (), (1,)
    while polyfp.deg(r1) > 0:
        q, r = polyfp.divmod_(r0, r1, p)
        r0, r1 = r1, r
        s0, s1 = s1, polyfp.sub(s0, polyfp.mul(q, s1, p), p)
    if not r1:
        raise ZeroDivisionError("not invertible")
    return polyfp.mod(polyfp.scale(s1, pow(r1[0], p - 2, p), p), m, p)


# ---------------------------------------------------------------------------
# invariants of the standard rank-one constructions


def as_invariants(f: RationalMap, p=None) -> CurveSheafInvariants:
    """Local data of the additive-phase sheaf attached to a 1-variable map.

    Swan at each pole is the pole order after killing p-divisible orders via
    f -> f - (h^p - h); every pole and the point at infinity carry drop = 1
    from the extension by zero.
    """
    if f.nvars != 1:
        raise WrongAmbient("as_invariants needs a one-variable map")
    if p is not None and p != f.p:
        raise WrongAmbient(f"map is over F_{f.p}, got p={p}")
    p = f.p
    num = f.num.univariate_coeffs()
    den = f.den.univariate_coeffs()
    frac = _Frac(p, num, den)
    entries = []
    # poles of the original (reduced) fraction define the lisse locus
    for pi, mult in sorted(polyfp.factor(den, p).items()) if polyfp.deg(den) > 0 else []:
        reduced = _reduce_finite(frac, pi)
        v = reduced.valuation(pi)
        swan = -v if (v is not None and v < 0) else 0
        entries.append(LocalData(CurvePoint(pi), drop=1, swan=swan, ramified=swan > 0))
    reduced_inf = _reduce_infinity(frac)
    ordinf = reduced_inf.infinity_order()
    swan_inf = ordinf if (ordinf is not None and ordinf > 0) else 0
    entries.append(LocalData(POINT_AT_INFINITY, drop=1, swan=swan_inf, ramified=swan_inf > 0))
    trivial = not any(e.ramified for e in entries)
    return CurveSheafInvariants(rank=1, points=tuple(entries), trivial=trivial)


def _zero_pole_multiplicities(g: RationalMap):
    """Multiplicities of zeros (positive) and poles (negative) of g on P^1."""
    p = g.p
    num = g.num.univariate_coeffs()
    den = g.den.univariate_coeffs()
    if not num:
        raise ValueError("the zero map has no multiplicative phase")
    mults = {}
    if polyfp.deg(num) > 0:
        for pi, m in polyfp.factor(num, p).items():
            if polyfp.deg(pi) > 0:
                mults[CurvePoint(pi)] = m
    if polyfp.deg(den) > 0:
        for pi, m in polyfp.factor(den, p).items():
            if polyfp.deg(pi) > 0:
                mults[CurvePoint(pi)] = mults.get(CurvePoint(pi), 0) - m
    inf_mult = polyfp.deg(den) - polyfp.deg(num)
    if inf_mult:
        mults[POINT_AT_INFINITY] = inf_mult
    return mults


def kummer_invariants(g: RationalMap, order: int, p=None) -> CurveSheafInvariants:
    """Local data of the multiplicative-phase sheaf chi(g) for chi of the
    given order: tame everywhere, ramified exactly at zeros/poles of g whose
    multiplicity is not divisible by the order."""
    if g.nvars != 1:
        raise WrongAmbient("kummer_invariants needs a one-variable map")
    if p is not None and p != g.p:
        raise WrongAmbient(f"map is over F_{g.p}, got p={p}")
    p = g.p
    if order <= 1 or (p - 1) % order != 0:
        raise BadOrder(f"character order {order} does not divide p - 1 = {p - 1}")
    mults = _zero_pole_multiplicities(g)
    entries = [
        LocalData(pt, drop=1, swan=0, ramified=(m % order != 0))
        for pt, m in sorted(mults.items(), key=lambda kv: repr(kv[0]))
    ]
    trivial = not any(e.ramified for e in entries)
    return CurveSheafInvariants(rank=1, points=tuple(entries), trivial=trivial)


def kummer_trivial_invariants(g: RationalMap) -> CurveSheafInvariants:
    """Boundary bookkeeping for a trivial character composed with g: the
    extension by zero still kills stalks at every zero and pole."""
    mults = _zero_pole_multiplicities(g)
    entries = [
        LocalData(pt, drop=1, swan=0, ramified=False)
        for pt, _ in sorted(mults.items(), key=lambda kv: repr(kv[0]))
    ]
    return CurveSheafInvariants(rank=1, points=tuple(entries), trivial=True)


def trivialized(inv: CurveSheafInvariants) -> CurveSheafInvariants:
    """Same boundary points, no ramification (trivial phase on the same
    lisse locus)."""
    pts = tuple(LocalData(d.point, d.drop, 0, 0, False) for d in inv.points)
    return CurveSheafInvariants(inv.rank, pts, inv.ambient, True)


def tensor_invariants(a: CurveSheafInvariants, b: CurveSheafInvariants) -> CurveSheafInvariants:
    """Rank-one tensor: boundary points merge, Swan conductors add (a tame
    factor leaves the wild part untouched)."""
    if a.rank != 1 or b.rank != 1:
        raise MissingData("tensor invariants implemented for rank-one factors only")
    merged = {}
    for d in a.points + b.points:
        cur = merged.get(d.point)
        if cur is None:
            merged[d.point] = d
        else:
            merged[d.point] = LocalData(
                d.point,
                drop=1,
                swan=cur.swan + d.swan,
                ramified=cur.ramified or d.ramified,
            )
    pts = tuple(merged[k] for k in sorted(merged, key=repr))
    return CurveSheafInvariants(rank=1, points=pts, trivial=a.trivial and b.trivial)


# ---------------------------------------------------------------------------
# formulas


def loc_on(inv: CurveSheafInvariants, curve: Curve) -> int:
    """Total local term on the curve: interior points contribute
    drop + jump + swan, punctures contribute swan only."""
    loc = 0
    punctures = set(curve.punctures)
    for d in inv.points:
        if d.point in punctures:
            loc += d.point.degree * d.swan
        else:
            loc += d.point.degree * (d.drop + d.jump + d.swan)
    return loc


def gos_chi(inv: CurveSheafInvariants, curve: Curve, genus: int = 0) -> int:
    """Euler characteristic with compact support on the given curve:
    chi_c = rank * chi_c(curve) - loc."""
    return inv.rank * curve.chi_c(genus) - loc_on(inv, curve)


def betti_sum_on(inv: CurveSheafInvariants, curve: Curve, genus: int = 0) -> int:
    """Total compact-support Betti number of the extension by zero on the
    curve; h^0_c = 0 on a non-complete curve and h^2_c = 1 only for a
    geometrically trivial phase."""
    chi = gos_chi(inv, curve, genus)
    h2 = inv.rank if inv.trivial else 0
    return -chi + 2 * h2


def curve_complexity(
    inv: CurveSheafInvariants, betti=None, curve: Curve | None = None, exact: bool = True
) -> ComplexityValue:
    """Complexity of the object on its curve inside P^1.

    With Betti numbers (a list of h^i_c, or a curve to compute them from the
    local data when exact=True) the value is exact:
    max(d * generic_rank, sum h^i_c). Otherwise returns the stated
    lower/upper pair
    max(d, 2g+n-2) * rank + loc <= c <= max(d, 2g+n+2) * rank + loc,
    taken literally, with loc computed relative to the curve.
    """
    d = inv.ambient.degree
    g = inv.ambient.genus
    if curve is None:
        curve = Curve.A1()
    if betti is None and exact:
        betti = [betti_sum_on(inv, curve, g)]
    if betti is not None:
        return ComplexityValue.of(max(d * inv.rank, sum(betti)))
    n = sum(pt.degree for pt in curve.punctures)
    loc = loc_on(inv, curve)
    lo = max(d, 2 * g + n - 2) * inv.rank + loc
    hi = max(d, 2 * g + n + 2) * inv.rank + loc
    return ComplexityValue.pair(lo, hi)


def fkm_conductor(inv: CurveSheafInvariants) -> int:
    """rank + (number of genuinely singular points in P^1) + total Swan."""
    if inv.ambient.genus != 0 or inv.ambient.degree != 1:
        raise WrongAmbient("the conductor comparison is for A^1 inside P^1")
    n_sing = sum(d.point.degree for d in inv.points if d.ramified)
    total_swan = sum(d.point.degree * d.swan for d in inv.points)
    return inv.rank + n_sing + total_swan


def natural_curve(inv: CurveSheafInvariants) -> Curve:
    """P^1 minus every boundary point of the lisse locus (always includes
    infinity, so it is a sub-curve of A^1)."""
    pts = [d.point for d in inv.points]
    if POINT_AT_INFINITY not in pts:
        pts.append(POINT_AT_INFINITY)
    return Curve.P1_minus(tuple(pts))


def invariants_for_expr(expr) -> CurveSheafInvariants:
    """Fold a one-variable expression built from additive/multiplicative
    phases (tensor products, shifts, twists, conjugates allowed) into curve
    invariants: additive phases combine by adding their maps, multiplicative
    ones by adding signed zero/pole multiplicities; cancelled boundary points
    stay as drop-only bookkeeping entries."""
    from .expr import AS, Conj, Const, Dual, Kummer, Shift, Tensor, Twist
    from .rational import MPoly, RationalMap

    if expr.ambient != 1:
        raise WrongAmbient("curve invariants need a one-variable expression")
    p = expr.p
    as_total = RationalMap(MPoly.const(p, 1, 0))
    as_boundary = set()
    kum_mults = {}
    kum_boundary = set()
    seen_kummer = False

    def walk(node, sign):
        nonlocal as_total, seen_kummer
        if isinstance(node, AS):
            as_total = as_total + node.f.scale_int(sign * node.a)
            den = node.f.den.univariate_coeffs()
            if polyfp.deg(den) > 0:
                for pi in polyfp.factor(den, p):
                    as_boundary.add(CurvePoint(pi))
            return
        if isinstance(node, Kummer):
            seen_kummer = True
            for pt, m in _zero_pole_multiplicities(node.g).items():
                kum_mults[pt] = kum_mults.get(pt, 0) + sign * node.e * m
                kum_boundary.add(pt)
            return
        if isinstance(node, Const):
            return
        if isinstance(node, Tensor):
            walk(node.left, sign)
            walk(node.right, sign)
            return
        if isinstance(node, (Conj, Dual)):
            walk(node.child, -sign)
            return
        if isinstance(node, (Shift, Twist)):
            walk(node.child, sign)
            return
        raise MissingData(
            f"{type(node).__name__} nodes have no curve invariants; use the bound calculus"
        )

    walk(expr, 1)

    inv_as = as_invariants(as_total) if not as_total.num.is_zero() else None
    entries = {}
    if inv_as is not None:
        for d in inv_as.points:
            entries[d.point] = d
    for pt in as_boundary | kum_boundary | {POINT_AT_INFINITY}:
        if pt not in entries:
            entries[pt] = LocalData(pt, drop=1, swan=0, ramified=False)
    if seen_kummer and p > 2:
        order_mod = p - 1
        for pt, m in kum_mults.items():
            cur = entries[pt]
            tame_ram = m % order_mod != 0
            entries[pt] = LocalData(pt, drop=1, swan=cur.swan, ramified=cur.ramified or tame_ram)
    pts = tuple(entries[k] for k in sorted(entries, key=repr))
    trivial = not any(d.ramified for d in pts)
    return CurveSheafInvariants(rank=1, points=pts, trivial=trivial)
