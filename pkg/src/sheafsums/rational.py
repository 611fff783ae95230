"""Multivariate rational maps with F_p coefficients.

A polynomial is a dict {exponent tuple: coefficient}; a RationalMap is a
numerator/denominator pair. Univariate maps are kept gcd-reduced with monic
denominator so that canonical hashing and pole bookkeeping are stable.
"""

from __future__ import annotations

from . import polyfp


class MPoly:
    """Multivariate polynomial over F_p, immutable."""

    __slots__ = ("p", "nvars", "terms")

    def __init__(self, p, nvars, terms):
        self.p = p
        self.nvars = nvars
        clean = {}
        for mono, c in terms.items():
            c %= p
            if c:
                if len(mono) != nvars:
                    raise ValueError("monomial arity mismatch")
                clean[tuple(mono)] = c
        self.terms = clean

    @classmethod
    def const(cls, p, nvars, c):
        return cls(p, nvars, {(0,) * nvars: c % p})

    @classmethod
    def var(cls, p, nvars, i):
        mono = tuple(1 if j == i else 0 for j in range(nvars))
        return cls(p, nvars, {mono: 1})

    @classmethod
    def from_univariate(cls, p, coeffs):
        return cls(p, 1, {(i,): c for i, c in enumerate(coeffs)})

    def is_zero(self):
        return not self.terms

    def is_constant(self):
        return all(not any(m) for m in self.terms)

    def constant_value(self):
        return self.terms.get((0,) * self.nvars, 0)

    def total_degree(self):
        if not self.terms:
            return -1
        return max(sum(m) for m in self.terms)

    def __add__(self, other):
        other = self._coerce(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = (out.get(m, 0) + c) % self.p
        return MPoly(self.p, self.nvars, out)

    def __sub__(self, other):
        other = self._coerce(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = (out.get(m, 0) - c) % self.p
        return MPoly(self.p, self.nvars, out)

    def __neg__(self):
        return MPoly(self.p, self.nvars, {m: -c for m, c in self.terms.items()})

    def __mul__(self, other):
        other = self._coerce(other)
        out = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = tuple(a + b for a, b in zip(m1, m2))
                out[m] = (out.get(m, 0) + c1 * c2) % self.p
        return MPoly(self.p, self.nvars, out)

    def __pow__(self, e):
        result = MPoly.const(self.p, self.nvars, 1)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def scale(self, c):
        return MPoly(self.p, self.nvars, {m: v * c for m, v in self.terms.items()})

    def _coerce(self, other):
        if isinstance(other, MPoly):
            if other.p != self.p or other.nvars != self.nvars:
                raise ValueError("polynomial domain mismatch")
            return other
        return MPoly.const(self.p, self.nvars, int(other))

    def widen(self, nvars):
        """Reinterpret on a larger ambient (extra variables unused)."""
        if nvars < self.nvars:
            raise ValueError("cannot shrink ambient")
        pad = (0,) * (nvars - self.nvars)
        return MPoly(self.p, nvars, {m + pad: c for m, c in self.terms.items()})

    def shift_vars(self, offset, nvars):
        """Place this polynomial's variables at [offset, offset + self.nvars)."""
        out = {}
        for m, c in self.terms.items():
            mono = (0,) * offset + m + (0,) * (nvars - offset - self.nvars)
            out[mono] = c
        return MPoly(self.p, nvars, out)

    def drop_vars(self, keep):
        """Restrict to the variables listed in keep (others must be absent)."""
        out = {}
        for m, c in self.terms.items():
            for i, e_ in enumerate(m):
                if e_ and i not in keep:
                    raise ValueError("variable in use cannot be dropped")
            out[tuple(m[i] for i in keep)] = c
        return MPoly(self.p, len(keep), out)

    def eval(self, field, point):
        """Evaluate at a point (tuple of FieldElements of `field`)."""
        if len(point) != self.nvars:
            raise ValueError("point arity mismatch")
        acc = field.zero()
        for m, c in self.terms.items():
            term = field.element(c)
            for x, e_ in zip(point, m):
                if e_:
                    term = term * (x ** e_)
            acc = acc + term
        return acc

    def univariate_coeffs(self):
        """Dense ascending coefficients; only valid for nvars == 1."""
        if self.nvars != 1:
            raise ValueError("not univariate")
        d = self.total_degree()
        out = [0] * (d + 1 if d >= 0 else 0)
        for (e_,), c in self.terms.items():
            out[e_] = c
        return polyfp.trim(out)

    def canonical(self):
        items = sorted(self.terms.items())
        return "+".join(f"{c}:" + ",".join(map(str, m)) for m, c in items) or "0"

    def __eq__(self, other):
        return (
            isinstance(other, MPoly)
            and other.p == self.p
            and other.nvars == self.nvars
            and other.terms == self.terms
        )

    def __hash__(self):
        return hash((self.p, self.nvars, tuple(sorted(self.terms.items()))))

    def __repr__(self):
        return f"MPoly({self.canonical()} mod {self.p})"


class RationalMap:
    """num/den with F_p coefficients; univariate maps stored gcd-reduced."""

    __slots__ = ("p", "nvars", "num", "den")

    def __init__(self, num: MPoly, den: MPoly | None = None):
        if den is None:
            den = MPoly.const(num.p, num.nvars, 1)
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        if num.p != den.p or num.nvars != den.nvars:
            raise ValueError("numerator/denominator domain mismatch")
        self.p = num.p
        self.nvars = num.nvars
        if self.nvars == 1:
            num, den = self._reduce1(num, den)
        elif den.is_constant():
            num = num.scale(pow(den.constant_value(), num.p - 2, num.p))
            den = MPoly.const(num.p, num.nvars, 1)
        self.num = num
        self.den = den

    @staticmethod
    def _reduce1(num, den):
        p = num.p
        nc, dc = num.univariate_coeffs(), den.univariate_coeffs()
        if not nc:
            dc = (1,)
        else:
            g = polyfp.gcd(nc, dc, p)
            if polyfp.deg(g) > 0:
                nc = polyfp.divmod_(nc, g, p)[0]
                dc = polyfp.divmod_(dc, g, p)[0]
        # normalize: monic denominator
        lead_inv = pow(dc[-1], p - 2, p)
        nc = polyfp.scale(nc, lead_inv, p)
        dc = polyfp.scale(dc, lead_inv, p)
        return MPoly.from_univariate(p, nc), MPoly.from_univariate(p, dc)

    @classmethod
    def from_univariate(cls, p, num_coeffs, den_coeffs=(1,)):
        return cls(MPoly.from_univariate(p, num_coeffs), MPoly.from_univariate(p, den_coeffs))

    def is_polynomial(self):
        return self.den.is_constant()

    def is_constant(self):
        return self.num.is_constant() and self.den.is_constant()

    def __add__(self, other):
        other = self._coerce(other)
        return RationalMap(self.num * other.den + other.num * self.den, self.den * other.den)

    def __sub__(self, other):
        other = self._coerce(other)
        return RationalMap(self.num * other.den - other.num * self.den, self.den * other.den)

    def __neg__(self):
        return RationalMap(-self.num, self.den)

    def __mul__(self, other):
        other = self._coerce(other)
        return RationalMap(self.num * other.num, self.den * other.den)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other.num.is_zero():
            raise ZeroDivisionError("division by the zero map")
        return RationalMap(self.num * other.den, self.den * other.num)

    def __pow__(self, e):
        if e < 0:
            return RationalMap(self.den, self.num) ** (-e)
        return RationalMap(self.num ** e, self.den ** e)

    def scale_int(self, c):
        return RationalMap(self.num.scale(c), self.den)

    def _coerce(self, other):
        if isinstance(other, RationalMap):
            if other.p != self.p or other.nvars != self.nvars:
                raise ValueError("rational map domain mismatch")
            return other
        return RationalMap(MPoly.const(self.p, self.nvars, int(other)))

    def widen(self, nvars):
        return RationalMap(self.num.widen(nvars), self.den.widen(nvars))

    def eval(self, field, point):
        """Value at the point, or None at a pole of the reduced fraction."""
        d = self.den.eval(field, point)
        if d.is_zero():
            return None
        n = self.num.eval(field, point)
        return n / d

    def canonical(self):
        return f"({self.num.canonical()})/({self.den.canonical()})"

    def __eq__(self, other):
        return (
            isinstance(other, RationalMap)
            and other.p == self.p
            and other.num == self.num
            and other.den == self.den
        )

    def __hash__(self):
        return hash((self.num, self.den))

    def __repr__(self):
        return f"RationalMap({self.canonical()} mod {self.p})"
