"""Dense univariate polynomial arithmetic over F_p.

Polynomials are tuples of ints in [0, p) in ascending degree order, with no
trailing zeros; () is the zero polynomial. These helpers back the extension
field construction, rational-map reduction and the ramification invariants.
"""

from __future__ import annotations

import hashlib
import math
import random


def stable_seed(*parts):
    """Deterministic 64-bit seed from reprs (process- and run-independent)."""
    data = ":".join(map(repr, parts)).encode()
    return int.from_bytes(hashlib.sha256(data).digest()[:8], "big")


def trim(c):
    c = list(c)
    while c and c[-1] == 0:
        c.pop()
    return tuple(c)


def deg(a):
    """Degree, with deg(0) = -1."""
    return len(a) - 1


def add(a, b, p):
    n = max(len(a), len(b))
    return trim([((a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0)) % p for i in range(n)])


def sub(a, b, p):
    n = max(len(a), len(b))
    return trim([((a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0)) % p for i in range(n)])


def neg(a, p):
    return tuple((-c) % p for c in a)


def mul(a, b, p):
    if not a or not b:
        return ()
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] = (out[i + j] + ai * bj) % p
    return trim(out)


def scale(a, c, p):
    c %= p
    return trim([(ai * c) % p for ai in a])


def divmod_(a, b, p):
    """Quotient and remainder; b must be nonzero."""
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    a = list(a)
    q = [0] * max(0, len(a) - len(b) + 1)
    inv_lead = pow(b[-1], p - 2, p)
    for i in range(len(a) - len(b), -1, -1):
        coeff = (a[i + len(b) - 1] * inv_lead) % p
        if coeff:
            q[i] = coeff
            for j, bj in enumerate(b):
                a[i + j] = (a[i + j] - coeff * bj) % p
    return trim(q), trim(a)


def mod(a, b, p):
    return divmod_(a, b, p)[1]


def gcd(a, b, p):
    """Monic gcd."""
    while b:
        a, b = b, mod(a, b, p)
    if a:
        a = scale(a, pow(a[-1], p - 2, p), p)
    return a


def monic(a, p):
    if not a:
        return a
    return scale(a, pow(a[-1], p - 2, p), p)


def mulmod(a, b, m, p):
    return mod(mul(a, b, p), m, p)


def powmod(a, e, m, p):
    result = (1,)
    a = mod(a, m, p)
    while e:
        if e & 1:
            result = mulmod(result, a, m, p)
        a = mulmod(a, a, m, p)
        e >>= 1
    return result


def pow_(a, e, p):
    result = (1,)
    while e:
        if e & 1:
            result = mul(result, a, p)
        a = mul(a, a, p)
        e >>= 1
    return result


def derivative(a, p):
    return trim([(i * a[i]) % p for i in range(1, len(a))])


def eval_at(a, x, p):
    acc = 0
    for c in reversed(a):
        acc = (acc * x + c) % p
    return acc


X = (0, 1)


def is_irreducible(f, p):
    """Rabin test: x^(p^k) = x mod f, and gcd(x^(p^(k/r)) - x, f) = 1 for prime r | k."""
    k = deg(f)
    if k <= 0:
        return False
    if k == 1:
        return True
    xp = powmod(X, p ** k, f, p)
    if xp != mod(X, f, p):
        return False
    for r in sorted(set(_prime_factors(k))):
        g = sub(powmod(X, p ** (k // r), f, p), mod(X, f, p), p)
        if deg(gcd(g, f, p)) != 0:
            return False
    return True


def random_irreducible(p, k, seed):
    """Monic irreducible of degree k, found by seeded random search."""
    rng = random.Random(stable_seed(seed, p, k))
    if k == 1:
        return (rng.randrange(p), 1)
    while True:
        cand = tuple(rng.randrange(p) for _ in range(k)) + (1,)
        if is_irreducible(cand, p):
            return cand


def squarefree(a, p):
    """True when a has no repeated roots over the algebraic closure."""
    if deg(a) <= 0:
        return bool(a)
    if deg(a) == 1:
        return True
    d = derivative(a, p)
    if not d:
        return False  # a is a p-th power
    return deg(gcd(a, d, p)) == 0


def factor(f, p, seed=0):
    """Factor a nonzero univariate polynomial into monic irreducibles.

    Returns a dict {irreducible tuple: multiplicity}. Deterministic for a
    fixed seed (Cantor-Zassenhaus splitting with a seeded RNG).
    """
    if not f:
        raise ZeroDivisionError("cannot factor the zero polynomial")
    rng = random.Random(stable_seed(seed, p, f))
    out = {}
    stack = [monic(f, p)]
    while stack:
        g = stack.pop()
        if deg(g) == 0:
            continue
        if deg(g) == 1 or is_irreducible(g, p):
            out[g] = out.get(g, 0) + 1
            continue
        d = derivative(g, p)
        if not d:
            # g = h(x^p) = h(x)^p in F_p[x]
            h = trim([g[i] for i in range(0, len(g), p)])
            stack.extend([h] * p)
            continue
        r = gcd(g, d, p)
        if deg(r) > 0:
            stack.append(r)
            stack.append(divmod_(g, r, p)[0])
            continue
        # g squarefree: split by distinct degree, then Cantor-Zassenhaus
        for piece, d_irr in _distinct_degree(g, p):
            stack_eq = [piece]
            while stack_eq:
                h = stack_eq.pop()
                if deg(h) == d_irr:
                    out[monic(h, p)] = out.get(monic(h, p), 0) + 1
                    continue
                split = _cz_split(h, d_irr, p, rng)
                stack_eq.extend(split)
    return out


def _distinct_degree(g, p):
    """Split squarefree monic g into products of irreducibles of equal degree."""
    pieces = []
    xq = mod(X, g, p)
    d = 0
    rest = g
    while deg(rest) > 0:
        d += 1
        if 2 * d > deg(rest):
            pieces.append((rest, deg(rest)))
            break
        xq = powmod(xq, p, rest, p)
        h = gcd(sub(xq, X, p), rest, p)
        if deg(h) > 0:
            pieces.append((h, d))
            rest = divmod_(rest, h, p)[0]
            xq = mod(xq, rest, p)
    return pieces


def _cz_split(h, d_irr, p, rng):
    """One Cantor-Zassenhaus splitting step for equal-degree h."""
    k = deg(h)
    while True:
        r = trim([rng.randrange(p) for _ in range(k)])
        if deg(r) < 1:
            continue
        if p == 2:
            t = ()
            acc = mod(r, h, p)
            for _ in range(d_irr):
                t = add(t, acc, p)
                acc = mulmod(acc, acc, h, p)
            g = gcd(t, h, p)
        else:
            e = (p ** d_irr - 1) // 2
            t = sub(powmod(r, e, h, p), (1,), p)
            g = gcd(t, h, p)
        if 0 < deg(g) < k:
            return [g, divmod_(h, g, p)[0]]


def _prime_factors(n):
    out = []
    d = 2
    while d * d <= n:
        while n % d == 0:
            out.append(d)
            n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def factorint(n, seed=1):
    """Prime factorization as a dict {prime: exponent}. Pollard rho for the tail."""
    out = {}
    for d in (2, 3, 5):
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
    d = 7
    wheel = (4, 2, 4, 2, 4, 6, 2, 6)
    i = 0
    while d * d <= n and d < 100000:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += wheel[i]
        i = (i + 1) % 8
    if n == 1:
        return out
    stack = [n]
    rng = random.Random(seed)
    while stack:
        m = stack.pop()
        if m == 1:
            continue
        if is_prime(m):
            out[m] = out.get(m, 0) + 1
            continue
        f = _pollard_rho(m, rng)
        stack.extend([f, m // f])
    return out


def _pollard_rho(n, rng):
    if n % 2 == 0:
        return 2
    while True:
        x = rng.randrange(2, n)
        y = x
        c = rng.randrange(1, n)
        d = 1
        while d == 1:
            x = (x * x + c) % n
            y = (y * y + c) % n
            y = (y * y + c) % n
            d = math.gcd(abs(x - y), n)
        if d != n:
            return d


_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n):
    """Deterministic Miller-Rabin, valid for n < 3.3e24 (covers 64-bit)."""
    if n < 2:
        return False
    for q in _MR_WITNESSES:
        if n == q:
            return True
        if n % q == 0:
            return False
    d = n - 1
    s = 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_WITNESSES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = (x * x) % n
            if x == n - 1:
                break
        else:
            return False
    return True
