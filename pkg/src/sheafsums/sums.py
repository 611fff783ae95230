"""Batched exponential sums, Gowers norms, power sums and L-recurrence fits.

Complete sums are evaluated in fixed-size chunks that are recombined in index
order, so results are bit-identical no matter how many worker threads run the
chunks. Trees of additive phases on A^1 take a vectorized path (Horner with
the companion matrix of the field modulus); everything else goes through the
pointwise evaluator.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import cache as cache_mod
from .characters import root_table
from .config import DEFAULT, RunConfig
from .errors import AmbientMismatch, BudgetExceeded, NegativityViolation, Unstable, WrongAmbient
from .expr import (
    AS,
    Conj,
    Const,
    Dual,
    ExternalProduct,
    Fourier,
    Kummer,
    PushCompact,
    SheafExpr,
    Shift,
    Tensor,
    Twist,
    as_phase_profile,
    eval_trace,
    twist_factor,
)
from .ffield import tower

_CHUNK = 1 << 14
_EPS = float(np.finfo(np.float64).eps)


@dataclass(frozen=True)
class SumResult:
    """A complete sum, already scaled by q^(-w/2)."""

    value: complex
    npoints: int
    normalization: Fraction
    fp_error_bound: float

    def unnormalized(self, p, m):
        return self.value / twist_factor(p, m, Fraction(self.normalization, 2))


@dataclass
class LPolynomialEstimate:
    """Fitted linear recurrence for a power-sum sequence.

    recurrence holds (c_1 .. c_r) with S_m = sum_j c_j S_{m-j}; degree is the
    certified minimal order; chi_c is the backward extrapolation S_0 of the
    recurrence (the Euler characteristic read off the L-function degree), or
    None when it does not land near an integer.
    """

    power_sums: list
    recurrence: np.ndarray
    degree: int
    residual: float
    chi_c: int | None


def _check_p(expr, p):
    if p is not None and p != expr.p:
        raise AmbientMismatch(f"expression is over F_{expr.p}, got p={p}")


def _chunk_ranges(total):
    return [(a, min(a + _CHUNK, total)) for a in range(0, total, _CHUNK)]


def _map_chunks(fn, ranges, threads):
    if threads <= 1 or len(ranges) <= 1:
        return [fn(a, b) for a, b in ranges]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        futures = [pool.submit(fn, a, b) for a, b in ranges]
        return [f.result() for f in futures]


def _combine(partials):
    vals = np.array([v for v, _ in partials], dtype=complex)
    l1 = float(np.sum(np.array([m for _, m in partials])))
    return complex(np.sum(vals)), l1


def _phase_chunk(K, coeffs, start, stop):
    """Sum of psi(Tr f(x)) over the elements with indices [start, stop).

    Index 0 is the zero element; index i >= 1 is generator^(i-1). For k = 1
    this is a plain vectorized Horner; for k >= 2 it reads Tr(f(g^j)) off the
    field's trace-power table using F_p-linearity of the trace.
    """
    p = K.p
    if K.k == 1:
        x = np.arange(start, stop, dtype=np.int64)
        acc = np.zeros_like(x)
        for c in reversed(coeffs if coeffs else (0,)):
            acc = (acc * x + c) % p
        vals = root_table(p)[acc]
        return complex(np.sum(vals)), float(len(x))
    n1 = K.q - 1
    table = K.trace_power_table()
    js = np.arange(max(start, 1) - 1, stop - 1, dtype=np.int64)
    t = np.zeros(len(js), dtype=np.int64)
    for i, c in enumerate(coeffs):
        if c:
            t = (t + c * table[(i * js) % n1].astype(np.int64)) % p
    vals = root_table(p)[t]
    total = complex(np.sum(vals))
    count = float(len(js))
    if start == 0:
        c0 = coeffs[0] if coeffs else 0
        total = complex(root_table(p)[(c0 * K.k) % p]) + total
        count += 1.0
    return total, count


def _scalar_chunk(expr, K, n, start, stop):
    q = K.q
    total = 0j
    l1 = 0.0
    for flat in range(start, stop):
        rem = flat
        pt = []
        for _ in range(n):
            pt.append(K.element_from_index(rem % q))
            rem //= q
        v = eval_trace(expr, K, tuple(pt))
        total += v
        l1 += abs(v)
    return total, l1


# ---------------------------------------------------------------------------
# table-driven vectorized evaluation (q <= dlog cap)


class _Tables:
    """Index-arithmetic view of an extension field: elements are their base-p
    digit encodings; multiplication is discrete-log addition."""

    def __init__(self, K):
        self.K = K
        self.p = K.p
        self.q = K.q
        self.k = K.k
        self.n1 = max(K.q - 1, 1)
        self.powers, self.dlog, self.trace = K.flat_tables()
        self._weights = np.array([K.p ** i for i in range(K.k)], dtype=np.int64)
        self._norm_dlog = None

    def norm_dlog(self):
        """Prime-field dlog of Norm(generator) (generates F_p^x)."""
        if self._norm_dlog is None:
            ng = self.K.norm_t(self.K.generator.coeffs)
            self._norm_dlog = self.K.base.dlog(ng) if self.p > 2 else 0
        return self._norm_dlog

    def mpoly_values(self, poly, coords):
        """Flat values of a multivariate polynomial at vectorized points."""
        n = len(coords[0])
        digits = np.zeros((n, self.k), dtype=np.int64)
        for mono, c in poly.terms.items():
            j = np.full(n, self.dlog[c % self.p], dtype=np.int64)
            dead = np.zeros(n, dtype=bool)
            for i, e in enumerate(mono):
                if e:
                    dj = self.dlog[coords[i]]
                    dead |= dj < 0
                    j += e * dj
            vals = self.powers[j % self.n1]
            vals[dead] = 0
            for i in range(self.k):
                digits[:, i] += (vals // self._weights[i]) % self.p
        digits %= self.p
        return digits @ self._weights

    def ratmap_values(self, f, coords):
        """(flat values, defined mask) of a rational map at vectorized points."""
        num = self.mpoly_values(f.num, coords)
        if f.den.is_constant() and f.den.constant_value() == 1:
            return num, np.ones(len(num), dtype=bool)
        den = self.mpoly_values(f.den, coords)
        ok = den != 0
        out = np.zeros_like(num)
        m = ok & (num != 0)
        j = (self.dlog[num[m]] - self.dlog[den[m]]) % self.n1
        out[m] = self.powers[j]
        return out, ok


def _vec_eval(expr, T: _Tables, coords):
    """Complex trace values of expr at points given by flat-index arrays."""
    p = expr.p
    if isinstance(expr, AS):
        vals, ok = T.ratmap_values(expr.f, coords)
        out = root_table(p)[(expr.a * T.trace[vals]) % p]
        if not ok.all():
            out[~ok] = 0
        return out
    if isinstance(expr, Kummer):
        vals, ok = T.ratmap_values(expr.g, coords)
        out = np.zeros(len(vals), dtype=complex)
        m = ok & (vals != 0)
        if p > 2:
            j = T.dlog[vals[m]]
            out[m] = root_table(p - 1)[(j * (T.norm_dlog() * expr.e)) % (p - 1)]
        else:
            out[m] = 1.0
        return out
    if isinstance(expr, Const):
        return np.ones(len(coords[0]), dtype=complex)
    if isinstance(expr, Tensor):
        return _vec_eval(expr.left, T, coords) * _vec_eval(expr.right, T, coords)
    if isinstance(expr, Conj):
        return np.conj(_vec_eval(expr.child, T, coords))
    if isinstance(expr, Dual):
        w = expr.child.pure_weight()
        if w is None or w != 0:
            from .errors import WeightError

            raise WeightError("numeric Dual requires a weight-0 pure tree")
        return np.conj(_vec_eval(expr.child, T, coords))
    if isinstance(expr, Shift):
        sign = -1.0 if expr.h % 2 else 1.0
        return sign * _vec_eval(expr.child, T, coords)
    if isinstance(expr, Twist):
        return twist_factor(p, T.k, expr.w) * _vec_eval(expr.child, T, coords)
    if isinstance(expr, ExternalProduct):
        n1 = expr.left.ambient
        return _vec_eval(expr.left, T, coords[:n1]) * _vec_eval(expr.right, T, coords[n1:])
    if isinstance(expr, PushCompact):
        child = expr.child
        npts = len(coords[0])
        total = np.zeros(npts, dtype=complex)
        fiber = list(expr.coords)
        base_iter = iter(coords)
        slots = [None] * child.ambient
        for i in range(child.ambient):
            if i not in expr.coords:
                slots[i] = next(base_iter)
        for assign in itertools.product(range(T.q), repeat=len(fiber)):
            full = list(slots)
            for c, v in zip(fiber, assign):
                full[c] = np.full(npts, v, dtype=np.int64)
            total += _vec_eval(child, T, tuple(full))
        return total
    if isinstance(expr, Fourier):
        n = expr.ambient
        npts = len(coords[0])
        a = expr.a % p
        # child values over the whole space, computed once per chunk
        qn = T.q ** n
        tidx = np.arange(qn, dtype=np.int64)
        tcoords = tuple((tidx // T.q ** i) % T.q for i in range(n))
        child_vals = _vec_eval(expr.child, T, tcoords)
        dxs = [T.dlog[xi] for xi in coords]
        total = np.zeros(npts, dtype=complex)
        table = root_table(p)
        slab = max(1, (1 << 22) // max(npts, 1))
        for lo in range(0, qn, slab):
            hi = min(lo + slab, qn)
            phase_arg = np.zeros((npts, hi - lo), dtype=np.int64)
            for i in range(n):
                ti = tcoords[i][lo:hi]
                dt = T.dlog[ti]
                prod = T.powers[(dxs[i][:, None] + dt[None, :]) % T.n1]
                # zero coordinate on either side kills the product
                dead = (dxs[i][:, None] < 0) | (dt[None, :] < 0)
                prod = np.where(dead, 0, prod)
                phase_arg += T.trace[prod]
            total += table[(a * phase_arg) % p] @ child_vals[lo:hi]
        return total * float(T.q) ** (-n / 2.0)
    raise TypeError(f"unknown node {type(expr).__name__}")


def _table_chunk(expr, T, n, start, stop):
    idx = np.arange(start, stop, dtype=np.int64)
    coords = tuple((idx // T.q ** i) % T.q for i in range(n))
    vals = _vec_eval(expr, T, coords)
    return complex(np.sum(vals)), float(np.sum(np.abs(vals)))


def _table_pair_chunk(ea, eb, T, n, start, stop):
    idx = np.arange(start, stop, dtype=np.int64)
    coords = tuple((idx // T.q ** i) % T.q for i in range(n))
    vals = _vec_eval(ea, T, coords) * np.conj(_vec_eval(eb, T, coords))
    return complex(np.sum(vals)), float(np.sum(np.abs(vals)))


def _pair_chunk(ea, eb, K, n, start, stop):
    q = K.q
    total = 0j
    l1 = 0.0
    for flat in range(start, stop):
        rem = flat
        pt = []
        for _ in range(n):
            pt.append(K.element_from_index(rem % q))
            rem //= q
        v = eval_trace(ea, K, tuple(pt)) * eval_trace(eb, K, tuple(pt)).conjugate()
        total += v
        l1 += abs(v)
    return total, l1


def _fp_bound(npoints, l1, scale):
    return _EPS * (math.log2(max(npoints, 2)) + 4.0) * l1 * scale


def complete_sum(expr: SheafExpr, p=None, m=1, w=0, config: RunConfig = DEFAULT) -> SumResult:
    """q^(-w/2) * sum of the trace of expr over F_{p^m}^n, q = p^m."""
    _check_p(expr, p)
    p = expr.p
    n = expr.ambient
    npoints = (p ** m) ** n
    if npoints > config.max_evaluations:
        raise BudgetExceeded(npoints, config.max_evaluations)
    K = tower(p).ext(m)
    scale = twist_factor(p, m, Fraction(w) / 2)
    profile = as_phase_profile(expr)
    if profile is not None:
        sign, wt, coeffs = profile
        factor = sign * twist_factor(p, m, wt)
        partials = _map_chunks(lambda a, b: _phase_chunk(K, coeffs, a, b), _chunk_ranges(npoints), config.threads)
        raw, l1 = _combine(partials)
        raw, l1 = raw * factor, l1 * abs(factor)
    elif K.q <= K.dlog_cap:
        T = _Tables(K)
        partials = _map_chunks(lambda a, b: _table_chunk(expr, T, n, a, b), _chunk_ranges(npoints), config.threads)
        raw, l1 = _combine(partials)
    else:
        partials = _map_chunks(lambda a, b: _scalar_chunk(expr, K, n, a, b), _chunk_ranges(npoints), config.threads)
        raw, l1 = _combine(partials)
    return SumResult(raw * scale, npoints, Fraction(w), _fp_bound(npoints, l1, scale))


def inner_product(a: SheafExpr, b: SheafExpr, p=None, m=1, config: RunConfig = DEFAULT) -> complex:
    """sum_x t_a(x) * conj(t_b(x)) over F_{p^m}^n."""
    _check_p(a, p)
    _check_p(b, p)
    if a.p != b.p or a.ambient != b.ambient:
        raise AmbientMismatch(
            f"inner product needs matching ambients, got A^{a.ambient}/F_{a.p} and A^{b.ambient}/F_{b.p}"
        )
    p = a.p
    n = a.ambient
    npoints = (p ** m) ** n
    if npoints > config.max_evaluations:
        raise BudgetExceeded(npoints, config.max_evaluations)
    K = tower(p).ext(m)
    pa, pb = as_phase_profile(a), as_phase_profile(b)
    if pa is not None and pb is not None:
        sa, wa, ca = pa
        sb, wb, cb = pb
        coeffs = _poly_sub(ca, cb, p)
        factor = sa * sb * twist_factor(p, m, wa + wb)
        partials = _map_chunks(lambda x, y: _phase_chunk(K, coeffs, x, y), _chunk_ranges(npoints), config.threads)
        raw, _ = _combine(partials)
        return raw * factor
    if K.q <= K.dlog_cap:
        T = _Tables(K)
        partials = _map_chunks(
            lambda x, y: _table_pair_chunk(a, b, T, n, x, y), _chunk_ranges(npoints), config.threads
        )
    else:
        partials = _map_chunks(lambda x, y: _pair_chunk(a, b, K, n, x, y), _chunk_ranges(npoints), config.threads)
    raw, _ = _combine(partials)
    return raw


def _poly_sub(a, b, p):
    n = max(len(a), len(b))
    out = [((a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0)) % p for i in range(n)]
    while out and out[-1] == 0:
        out.pop()
    return tuple(out)


def power_sums(expr: SheafExpr, p=None, M=6, config: RunConfig = DEFAULT):
    """Unnormalized sums S_m over F_{p^m}^n for m = 1..M (budget-guarded)."""
    _check_p(expr, p)
    p = expr.p
    n = expr.ambient
    total = sum((p ** m) ** n for m in range(1, M + 1))
    if total > config.max_evaluations:
        raise BudgetExceeded(total, config.max_evaluations)
    out = []
    for m in range(1, M + 1):
        key = cache_mod.cache_key(expr, p, m) if config.cache_dir else None
        if key is not None:
            hit = cache_mod.get(config.cache_dir, key)
            if hit is not None:
                out.append(hit)
                continue
        val = complete_sum(expr, m=m, w=0, config=config).value
        if key is not None:
            cache_mod.put(config.cache_dir, key, val)
        out.append(val)
    return out


def fit_l_polynomial(power_sums_seq, tolerance=None, config: RunConfig = DEFAULT) -> LPolynomialEstimate:
    """Minimal linear recurrence via Hankel singular values + least squares.

    The order is certified by a singular-value gap of at least 10^3 at the
    candidate rank; Unstable is raised when no such gap exists (ambiguous) or
    when the Hankel matrix has full rank so minimality cannot be certified
    (remedy: supply more power sums; 2*degree + 1 terms always suffice).
    """
    S = np.asarray(list(power_sums_seq), dtype=complex)
    M = len(S)
    if M < 2:
        raise Unstable("need at least two power sums")
    scale = float(np.max(np.abs(S))) if M else 0.0
    tol = tolerance if tolerance is not None else config.fit_tolerance * max(scale, 1.0)
    if scale <= tol:
        return LPolynomialEstimate(list(S), np.zeros(0, dtype=complex), 0, 0.0, 0)
    K = M // 2
    rows = M - K
    H = np.empty((rows, K + 1), dtype=complex)
    for i in range(rows):
        H[i, :] = S[i : i + K + 1]
    sv = np.linalg.svd(H, compute_uv=False)
    r = int(np.sum(sv > tol))
    if r >= len(sv):
        raise Unstable(
            f"Hankel matrix has full rank {r}; cannot certify a minimal order "
            f"with {M} terms (supply at least {2 * r + 1})"
        )
    if sv[r] > 0 and sv[r - 1] / sv[r] < 1e3:
        raise Unstable(
            f"no 10^3 singular-value gap at order {r} "
            f"(sigma_{r} = {sv[r - 1]:.3e}, sigma_{r + 1} = {sv[r]:.3e})"
        )
    # S_m = sum_{j=1..r} c_j S_{m-j} for m > r (0-indexed: m >= r)
    A = np.empty((M - r, r), dtype=complex)
    for i in range(M - r):
        A[i, :] = S[i + r - 1 :: -1][:r]
    bvec = S[r:]
    sol, *_ = np.linalg.lstsq(A, bvec, rcond=None)
    residual = float(np.max(np.abs(A @ sol - bvec))) if len(bvec) else 0.0
    chi_c = _chi_from_recurrence(S, sol)
    return LPolynomialEstimate(list(S), sol, r, residual, chi_c)


def _chi_from_recurrence(S, c):
    """Backward extrapolation to S_0; equals -deg L = chi_c exactly."""
    r = len(c)
    if r == 0:
        return 0
    if abs(c[-1]) < 1e-9:
        return None
    acc = S[r - 1]
    for j in range(1, r):
        acc = acc - c[j - 1] * S[r - 1 - j]
    s0 = acc / c[-1]
    guess = int(round(s0.real))
    if abs(s0 - guess) > 0.05 * max(1.0, abs(guess)):
        return None
    return guess


def trace_table(expr: SheafExpr, config: RunConfig = DEFAULT) -> np.ndarray:
    """Trace values over F_p^n as an ndarray of shape (p,) * n."""
    p = expr.p
    n = expr.ambient
    npoints = p ** n
    if npoints > config.max_evaluations:
        raise BudgetExceeded(npoints, config.max_evaluations)
    K = tower(p).ext(1)
    elems = [K.element_from_index(i) for i in range(p)]
    flat = np.empty(npoints, dtype=complex)
    for idx, pt in enumerate(itertools.product(elems, repeat=n)):
        flat[idx] = eval_trace(expr, K, pt)
    return flat.reshape((p,) * n)


def gowers_norm(expr: SheafExpr, d: int, p=None, config: RunConfig = DEFAULT) -> float:
    """The 2^d-th power of the U_d norm of the trace over F_p^n.

    Literal correlation sum over (x, h_1..h_d), normalized by p^(n(d+1));
    factors with an odd number of difference directions are conjugated.
    """
    _check_p(expr, p)
    if d < 1:
        raise ValueError("Gowers degree must be >= 1")
    p = expr.p
    n = expr.ambient
    npoints = p ** (n * (d + 1))
    if npoints > config.max_evaluations:
        raise BudgetExceeded(npoints, config.max_evaluations)
    T = trace_table(expr, config=config)
    Tc = np.conj(T)
    total = 0j
    axes = tuple(range(n))
    for h_flat in itertools.product(range(p), repeat=d * n):
        hs = [h_flat[i * n : (i + 1) * n] for i in range(d)]
        prod = None
        for mask in range(1 << d):
            shift = [0] * n
            for i in range(d):
                if (mask >> i) & 1:
                    for c_ in range(n):
                        shift[c_] += hs[i][c_]
            src = Tc if bin(mask).count("1") % 2 else T
            arr = np.roll(src, tuple(-s % p for s in shift), axis=axes)
            prod = arr if prod is None else prod * arr
        total += np.sum(prod)
    value = total / npoints
    if abs(value.imag) > 1e-9:
        raise NegativityViolation(f"Gowers correlation has imaginary part {value.imag:.3e}")
    if value.real < -1e-9:
        raise NegativityViolation(f"Gowers correlation is negative: {value.real:.3e}")
    return max(float(value.real), 0.0)


def fourier_table(expr: SheafExpr, a: int = 1, p=None, config: RunConfig = DEFAULT) -> np.ndarray:
    """FT(y) = p^(-1/2) sum_x t(x) psi_a(x*y) for an A^1 expression."""
    _check_p(expr, p)
    if expr.ambient != 1:
        raise WrongAmbient("fourier_table needs an A^1 expression")
    p = expr.p
    T = trace_table(expr, config=config).ravel()
    xy = (np.outer(np.arange(p), np.arange(p)) * (a % p)) % p
    kernel = root_table(p)[xy]
    return (kernel @ T) / math.sqrt(p)


def additive_convolution(table_a: np.ndarray, table_b: np.ndarray) -> np.ndarray:
    """(t_a * t_b)(y) = sum_x t_a(x) t_b(y - x) on F_p (table-level helper)."""
    pn = len(table_a)
    out = np.zeros(pn, dtype=complex)
    for x in range(pn):
        out += table_a[x] * np.roll(table_b, x)
    return out
