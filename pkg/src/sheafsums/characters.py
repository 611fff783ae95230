"""Complex-valued additive and multiplicative characters of finite fields.

Character values live in double-precision complex arithmetic; the N-term
floating accumulation error stays below a few N*eps, far inside every
tolerance used by the verification suites, which is why exact cyclotomic
arithmetic is not used here.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

from .ffield import ExtField, FieldElement


@lru_cache(maxsize=128)
def root_table(n):
    """exp(2*pi*i*j/n) for j in [0, n) as a complex array."""
    j = np.arange(n)
    return np.exp(2j * math.pi * j / n)


def e(z):
    """exp(2*pi*i*z)."""
    return complex(np.exp(2j * math.pi * z))


class AdditiveCharacter:
    """psi_a(x) = e(Tr(a*x)/p) on an extension field; nontrivial iff a != 0."""

    __slots__ = ("field", "a", "_table")

    def __init__(self, field: ExtField, a=1):
        self.field = field
        self.a = field.element(a)
        self._table = root_table(field.p)

    def is_trivial(self):
        return self.a.is_zero()

    def __call__(self, x) -> complex:
        x = self.field.element(x)
        return complex(self._table[(self.a * x).trace()])

    def at_trace(self, t: int) -> complex:
        """Value e(a_0*t/p) for a trace value t already in F_p (a scalar twist)."""
        return complex(self._table[(self.a.coeffs[0] * t) % self.field.p])

    def __repr__(self):
        return f"psi[{self.a.coeffs}] on {self.field!r}"


def eval_additive(psi: AdditiveCharacter, x) -> complex:
    return psi(x)


class MultiplicativeCharacter:
    """chi(g^j) = e(j*e/(q-1)) for the field's fixed generator g; chi(0) = 0."""

    __slots__ = ("field", "exponent", "_table")

    def __init__(self, field: ExtField, exponent: int):
        self.field = field
        self.exponent = exponent % (field.q - 1) if field.q > 2 else 0
        self._table = root_table(field.q - 1) if field.q > 2 else np.ones(1, dtype=complex)

    @property
    def order(self):
        n = self.field.q - 1
        if n == 0 or self.exponent == 0:
            return 1
        return n // math.gcd(self.exponent, n)

    def is_trivial(self):
        return self.exponent == 0

    def __call__(self, x) -> complex:
        x = self.field.element(x)
        if x.is_zero():
            return 0j
        j = self.field.dlog(x)
        n = self.field.q - 1
        return complex(self._table[(j * self.exponent) % n])

    def at_dlog(self, j: int) -> complex:
        n = self.field.q - 1
        return complex(self._table[(j * self.exponent) % n])

    def __repr__(self):
        return f"chi[{self.exponent}] on {self.field!r}"


def eval_multiplicative(chi: MultiplicativeCharacter, x) -> complex:
    return chi(x)
