"""Exact arithmetic in F_p and F_{p^k}.

Elements of F_{p^k} are coefficient vectors of length k over F_p (ascending
powers of the residue class x of the defining modulus). Everything is
immutable after construction; tables are built once, so instances can be
shared freely across threads.
"""

from __future__ import annotations

import itertools
import math
import random
import threading
from functools import lru_cache

import numpy as np

from . import polyfp
from .errors import NotPrime, ZeroArgument

DLOG_CAP_DEFAULT = 1 << 22


def make_prime_field(p):
    """Field handle for F_p; raises NotPrime for composite p."""
    return PrimeField(p)


class PrimeField:
    """F_p for a 64-bit prime p (2 <= p < 2^62)."""

    __slots__ = ("p", "_generator")

    def __init__(self, p):
        p = int(p)
        if not (2 <= p < 1 << 62):
            raise NotPrime(f"modulus {p} outside the supported range [2, 2^62)")
        if not polyfp.is_prime(p):
            raise NotPrime(f"{p} is not prime")
        self.p = p
        self._generator = None

    def add(self, a, b):
        return (a + b) % self.p

    def sub(self, a, b):
        return (a - b) % self.p

    def mul(self, a, b):
        return (a * b) % self.p

    def inv(self, a):
        if a % self.p == 0:
            raise ZeroDivisionError("inverse of zero")
        return pow(a, self.p - 2, self.p)

    def generator(self):
        """Smallest primitive root mod p (canonical across the package)."""
        if self._generator is None:
            if self.p == 2:
                self._generator = 1
            else:
                factors = polyfp.factorint(self.p - 1)
                for g in range(2, self.p):
                    if all(pow(g, (self.p - 1) // r, self.p) != 1 for r in factors):
                        self._generator = g
                        break
        return self._generator

    def dlog(self, a):
        """Index of a with respect to the canonical generator."""
        a %= self.p
        if a == 0:
            raise ZeroArgument("discrete log of zero")
        return _prime_dlog_table(self.p)[a]

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(("PrimeField", self.p))

    def __repr__(self):
        return f"F_{self.p}"


@lru_cache(maxsize=64)
def _prime_dlog_table(p):
    g = PrimeField(p).generator()
    table = {}
    acc = 1
    for j in range(p - 1):
        table[acc] = j
        acc = (acc * g) % p
    return table


class FieldElement:
    """Element of an ExtField, stored as a reduced coefficient tuple."""

    __slots__ = ("field", "coeffs")

    def __init__(self, field, coeffs):
        self.field = field
        self.coeffs = coeffs

    def __add__(self, other):
        return FieldElement(self.field, self.field.add_t(self.coeffs, self._c(other)))

    __radd__ = __add__

    def __sub__(self, other):
        return FieldElement(self.field, self.field.sub_t(self.coeffs, self._c(other)))

    def __neg__(self):
        return FieldElement(self.field, self.field.neg_t(self.coeffs))

    def __mul__(self, other):
        return FieldElement(self.field, self.field.mul_t(self.coeffs, self._c(other)))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return FieldElement(self.field, self.field.mul_t(self.coeffs, self.field.inv_t(self._c(other))))

    def __pow__(self, e):
        return FieldElement(self.field, self.field.pow_t(self.coeffs, e))

    def inverse(self):
        return FieldElement(self.field, self.field.inv_t(self.coeffs))

    def trace(self):
        """Tr_{F_q/F_p}, returned as an integer in [0, p)."""
        return self.field.trace_t(self.coeffs)

    def norm(self):
        """N_{F_q/F_p}, returned as an integer in [0, p)."""
        return self.field.norm_t(self.coeffs)

    def is_zero(self):
        return not any(self.coeffs)

    def _c(self, other):
        if isinstance(other, FieldElement):
            if other.field is not self.field and other.field != self.field:
                raise ValueError("elements of different fields")
            return other.coeffs
        return self.field.embed(int(other))

    def __eq__(self, other):
        if isinstance(other, FieldElement):
            return self.field == other.field and self.coeffs == other.coeffs
        if isinstance(other, int):
            return self.coeffs == self.field.embed(other)
        return NotImplemented

    def __hash__(self):
        return hash((self.field.p, self.field.k, self.coeffs))

    def __repr__(self):
        return f"FieldElement{self.coeffs}@F_{self.field.p}^{self.field.k}"


class ExtField:
    """F_{p^k} = F_p[x] / (modulus), with trace, norm and discrete logs.

    The modulus is found by seeded random search and verified irreducible;
    the generator is verified to have order q - 1 against every prime divisor.
    """

    def __init__(self, base, k, seed=0, dlog_cap=DLOG_CAP_DEFAULT):
        if k < 1:
            raise ValueError("extension degree must be >= 1")
        self.base = base
        self.p = base.p
        self.k = k
        self.q = base.p ** k
        self.seed = seed
        self.dlog_cap = dlog_cap
        self.modulus = polyfp.random_irreducible(self.p, k, seed)
        # x^k = -(low-order modulus coefficients)
        self._red_row = tuple((-c) % self.p for c in self.modulus[:k])
        self._trace_vec = self._trace_basis()
        self._order_factors = polyfp.factorint(self.q - 1) if self.q > 2 else {}
        self.generator = FieldElement(self, self._find_generator())
        self._dlog_table = None
        self._tpow = None
        self._flat = None
        self._table_lock = threading.Lock()  # once-only table initialization

    # tuple-level arithmetic -------------------------------------------------

    def add_t(self, a, b):
        p = self.p
        return tuple((x + y) % p for x, y in zip(a, b))

    def sub_t(self, a, b):
        p = self.p
        return tuple((x - y) % p for x, y in zip(a, b))

    def neg_t(self, a):
        p = self.p
        return tuple((-x) % p for x in a)

    def mul_t(self, a, b):
        prod = polyfp.mul(a, b, self.p)
        return self._reduce(prod)

    def inv_t(self, a):
        if not any(a):
            raise ZeroDivisionError("inverse of zero")
        # extended Euclid against the modulus
        r0, r1 = self.modulus, polyfp.trim(a)
        s0, s1 = (), (1,)
        p = self.p
        while polyfp.deg(r1) > 0:
            q, r = polyfp.divmod_(r0, r1, p)
            r0, r1 = r1, r
            s0, s1 = s1, polyfp.sub(s0, polyfp.mul(q, s1, p), p)
        inv_c = pow(r1[0], p - 2, p)
        out = polyfp.scale(s1, inv_c, p)
        return self._pad(out)

    def pow_t(self, a, e):
        if e < 0:
            return self.pow_t(self.inv_t(a), -e)
        result = self.embed(1)
        base = a
        while e:
            if e & 1:
                result = self.mul_t(result, base)
            base = self.mul_t(base, base)
            e >>= 1
        return result

    def frobenius_t(self, a):
        return self.pow_t(a, self.p)

    def trace_t(self, a):
        return sum(c * t for c, t in zip(a, self._trace_vec)) % self.p

    def norm_t(self, a):
        # N(a) = a^((q-1)/(p-1)) lands in F_p
        if not any(a):
            return 0
        e = (self.q - 1) // (self.p - 1)
        return self.pow_t(a, e)[0]

    def _reduce(self, prod):
        p, k = self.p, self.k
        c = list(prod) + [0] * max(0, k - len(prod))
        for i in range(len(c) - 1, k - 1, -1):
            top = c[i]
            if top:
                c[i] = 0
                for j, r in enumerate(self._red_row):
                    c[i - k + j] = (c[i - k + j] + top * r) % p
        return tuple(c[:k])

    def _pad(self, a):
        return tuple(a) + (0,) * (self.k - len(a))

    # elements ---------------------------------------------------------------

    def embed(self, c):
        """Embed an integer (an F_p scalar) into the field."""
        return (int(c) % self.p,) + (0,) * (self.k - 1)

    def element(self, coeffs):
        if isinstance(coeffs, FieldElement):
            return coeffs
        if isinstance(coeffs, int):
            return FieldElement(self, self.embed(coeffs))
        coeffs = tuple(int(c) % self.p for c in coeffs)
        if len(coeffs) != self.k:
            raise ValueError(f"expected {self.k} coefficients")
        return FieldElement(self, coeffs)

    def zero(self):
        return FieldElement(self, (0,) * self.k)

    def one(self):
        return FieldElement(self, self.embed(1))

    def elements(self):
        """All q elements, lexicographic in coefficient order."""
        for coeffs in itertools.product(range(self.p), repeat=self.k):
            yield FieldElement(self, coeffs[::-1])

    def element_from_index(self, idx):
        """Element whose coefficient vector is the base-p digits of idx."""
        coeffs = []
        for _ in range(self.k):
            coeffs.append(idx % self.p)
            idx //= self.p
        return FieldElement(self, tuple(coeffs))

    def elements_block(self, start, stop):
        """Coefficient rows for indices [start, stop) as an int64 (n, k) array."""
        idx = np.arange(start, stop, dtype=np.int64)
        cols = []
        scale = 1
        for _ in range(self.k):
            cols.append((idx // scale) % self.p)
            scale *= self.p
        return np.stack(cols, axis=1)

    def trace_form(self):
        """Tr(x^j) for j < k, as an int64 vector (trace is F_p-linear)."""
        return np.array(self._trace_vec, dtype=np.int64)

    def reduction_row(self):
        """Coefficients of x^k in the basis, as an int64 vector."""
        return np.array(self._red_row, dtype=np.int64)

    def _mult_matrix(self, h):
        """Matrix of multiplication by h on coefficient vectors (int64 k x k)."""
        cols = []
        e = tuple(h)
        for _ in range(self.k):
            cols.append(e)
            e = self._reduce((0,) + e)  # multiply by the residue class x
        return np.array(cols, dtype=np.int64).T

    def flat_tables(self):
        """Index-arithmetic tables for vectorized evaluation (q <= dlog_cap).

        Elements are identified with their base-p digit encoding ("flat"
        index). Returns (powers, dlog, trace):
          powers[j] = flat(generator^j)          (length q-1, int64)
          dlog[flat] = j with generator^j = flat  (dlog[0] = -1, int64)
          trace[flat] = Tr(element)               (int64, values in [0, p))
        Multiplication becomes dlog addition; addition works on digits.
        """
        if self._flat is not None:
            return self._flat
        if self.q > self.dlog_cap:
            raise ValueError(f"flat tables capped at q <= {self.dlog_cap}")
        with self._table_lock:
            if self._flat is not None:
                return self._flat
            return self._build_flat_tables()

    def _build_flat_tables(self):
        q, k, p = self.q, self.k, self.p
        weights = np.array([p ** i for i in range(k)], dtype=np.int64)
        block = min(1 << 14, max(q - 1, 1))
        mg = self._mult_matrix(self.generator.coeffs) % p
        powers_rows = np.empty((block, k), dtype=np.int64)
        v = np.zeros(k, dtype=np.int64)
        v[0] = 1
        for j in range(block):
            powers_rows[j] = v
            v = (mg @ v) % p
        g_block = self.pow_t(self.generator.coeffs, block)
        mgb = (self._mult_matrix(g_block) % p)
        powers = np.empty(max(q - 1, 1), dtype=np.int64)
        rows = powers_rows
        pos = 0
        while pos < q - 1:
            blk = min(block, q - 1 - pos)
            powers[pos : pos + blk] = rows[:blk] @ weights
            if pos + blk < q - 1:
                rows = (rows @ mgb.T) % p
            pos += blk
        dlog = np.full(q, -1, dtype=np.int64)
        dlog[powers[: q - 1]] = np.arange(q - 1, dtype=np.int64)
        trace = np.empty(q, dtype=np.int64)
        for a in range(0, q, 1 << 16):
            b = min(a + (1 << 16), q)
            trace[a:b] = (self.elements_block(a, b) @ self.trace_form()) % p
        self._flat = (powers, dlog, trace)
        return self._flat

    def trace_power_table(self):
        """Tr(generator^l) for l in [0, q-1), built blockwise.

        Since Tr is F_p-linear, Tr(f(g^j)) = sum_i c_i * T[(i*j) mod (q-1)]
        for any polynomial f with F_p coefficients; the phase-sum fast path
        rests on this table.
        """
        if self._tpow is not None:
            return self._tpow
        with self._table_lock:
            if self._tpow is not None:
                return self._tpow
            q, k, p = self.q, self.k, self.p
            block = min(1 << 14, q - 1) if q > 1 else 1
            mg = self._mult_matrix(self.generator.coeffs) % p
            powers = np.empty((block, k), dtype=np.int64)
            v = np.zeros(k, dtype=np.int64)
            v[0] = 1
            for j in range(block):
                powers[j] = v
                v = (mg @ v) % p
            g_block = self.pow_t(self.generator.coeffs, block)
            mgb_t = (self._mult_matrix(g_block) % p).T
            dtype = np.int16 if p < (1 << 14) else np.int64
            table = np.empty(max(q - 1, 1), dtype=dtype)
            w = self.trace_form() % p
            pos = 0
            while pos < q - 1:
                blk = min(block, q - 1 - pos)
                table[pos : pos + blk] = (powers[:blk] @ w) % p
                w = (mgb_t @ w) % p
                pos += blk
            self._tpow = table
        return self._tpow

    # multiplicative structure -------------------------------------------------

    def _trace_basis(self):
        vec = []
        for j in range(self.k):
            e = self._pad((0,) * j + (1,))
            acc = e
            total = e
            for _ in range(self.k - 1):
                acc = self.pow_t(acc, self.p)
                total = self.add_t(total, acc)
            # the trace of a basis element is a scalar
            assert not any(total[1:]), "trace left the prime field"
            vec.append(total[0])
        return tuple(vec)

    def _find_generator(self):
        if self.q == 2:
            return self.embed(1)
        rng = random.Random(polyfp.stable_seed(self.seed, self.p, self.k, "generator"))
        factors = list(self._order_factors)
        while True:
            cand = tuple(rng.randrange(self.p) for _ in range(self.k))
            if not any(cand):
                continue
            if all(self.pow_t(cand, (self.q - 1) // r) != self.embed(1) for r in factors):
                return cand

    def dlog(self, x):
        """Exponent j with generator^j = x; table lookup or baby-step giant-step."""
        coeffs = x.coeffs if isinstance(x, FieldElement) else tuple(x)
        if not any(coeffs):
            raise ZeroArgument("discrete log of zero")
        if self.q <= self.dlog_cap:
            if self._dlog_table is None:
                table = {}
                acc = self.embed(1)
                g = self.generator.coeffs
                for j in range(self.q - 1):
                    table[acc] = j
                    acc = self.mul_t(acc, g)
                self._dlog_table = table
            return self._dlog_table[coeffs]
        return self._dlog_bsgs(coeffs)

    def _dlog_bsgs(self, coeffs):
        n = self.q - 1
        s = math.isqrt(n) + 1
        g = self.generator.coeffs
        baby = {}
        acc = self.embed(1)
        for j in range(s):
            baby.setdefault(acc, j)
            acc = self.mul_t(acc, g)
        giant_step = self.inv_t(self.pow_t(g, s))
        acc = coeffs
        for i in range(s + 1):
            if acc in baby:
                return (i * s + baby[acc]) % n
            acc = self.mul_t(acc, giant_step)
        raise ArithmeticError("BSGS failed; generator order inconsistent")

    def __eq__(self, other):
        return (
            isinstance(other, ExtField)
            and other.p == self.p
            and other.k == self.k
            and other.modulus == self.modulus
        )

    def __hash__(self):
        return hash(("ExtField", self.p, self.k, self.modulus))

    def __repr__(self):
        return f"F_{self.p}^{self.k}(mod {self.modulus}, seed {self.seed})"


def make_extension(base, k, seed=0, dlog_cap=DLOG_CAP_DEFAULT):
    """F_{p^k} with a verified irreducible modulus; deterministic per seed."""
    return ExtField(base, k, seed=seed, dlog_cap=dlog_cap)


def trace_to_prime(x):
    """x + x^p + ... + x^(p^(k-1)) as an integer in [0, p)."""
    return x.trace()


def discrete_log(field, x):
    """Exponent of x with respect to the field's generator."""
    return field.dlog(x)


class FieldTower:
    """A prime field plus cached extensions, shared by the sum engines.

    Extensions are constructed deterministically from (seed, p, k), so trace
    functions over extensions are reproducible across runs and processes.
    """

    def __init__(self, p, seed=0, dlog_cap=DLOG_CAP_DEFAULT):
        self.prime = make_prime_field(p)
        self.p = self.prime.p
        self.seed = seed
        self.dlog_cap = dlog_cap
        self._levels = {}

    def ext(self, k):
        if k not in self._levels:
            self._levels[k] = make_extension(self.prime, k, seed=self.seed, dlog_cap=self.dlog_cap)
        return self._levels[k]


@lru_cache(maxsize=32)
def tower(p, seed=0):
    """Shared, memoized field tower (immutable fields only, so safe to share)."""
    return FieldTower(p, seed=seed)
