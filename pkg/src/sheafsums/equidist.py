"""Families of normalized exponential sums and their random-matrix oracles.

A family descriptor picks the polynomials of degree d in n variables whose
top-degree part is smooth (leading coefficient nonzero for n = 1, squarefree
binary form for n = 2), optionally restricted to odd polynomials. Normalized
sums S(f) = p^(-n/2) sum_x e(f(x)/p) are compared against Monte Carlo trace
moments of Haar-random matrices in U(N), USp(N) or O(N), N = (d-1)^n.

All sampling is chunked with per-chunk seeds spawned from the master seed and
merged in a fixed order, so reports are reproducible and thread-independent.
"""

from __future__ import annotations

import csv
import itertools
import json
import math
from dataclasses import dataclass

import numpy as np

from . import polyfp
from .characters import root_table
from .config import DEFAULT, RunConfig
from .errors import BadParams, BudgetExceeded, UnsupportedDimension

_ORACLE_CHUNK = 1 << 12
_FAMILY_CHUNK = 1 << 13


@dataclass(frozen=True)
class FamilyDescriptor:
    n: int
    d: int
    p: int
    variant: str = "all"          # "all" | "odd"
    mode: tuple = ("exhaustive",)  # or ("sample", count, seed)

    def __post_init__(self):
        if self.n not in (1, 2):
            raise UnsupportedDimension(f"families implemented for n in {{1, 2}}, got {self.n}")
        if self.variant not in ("all", "odd"):
            raise BadParams(f"unknown variant {self.variant!r}")
        if self.variant == "odd" and self.d % 2 == 0:
            raise BadParams("odd families need odd degree")
        if self.d < 1:
            raise BadParams("degree must be >= 1")
        if self.p % self.d == 0 and self.d > 1:
            raise BadParams(f"p = {self.p} divides d = {self.d}; smoothness needs p coprime to d")
        if self.mode[0] not in ("exhaustive", "sample"):
            raise BadParams(f"unknown mode {self.mode[0]!r}")

    @property
    def matrix_size(self):
        return (self.d - 1) ** self.n

    @property
    def group(self):
        if self.variant == "all":
            return "U"
        return "USp" if self.n % 2 == 1 else "O"

    def monomials(self):
        """Exponent tuples in a fixed order; the last one is pure top degree."""
        if self.n == 1:
            degrees = range(self.d + 1) if self.variant == "all" else range(1, self.d + 1, 2)
            return [(i,) for i in degrees]
        monos = [
            (i, j)
            for i, j in itertools.product(range(self.d + 1), repeat=2)
            if i + j <= self.d and (self.variant == "all" or (i + j) % 2 == 1)
        ]
        monos.sort(key=lambda m: (sum(m), m))
        return monos


def is_deligne(desc: FamilyDescriptor, coeffs) -> bool:
    """Top-degree part cuts a smooth hypersurface in P^(n-1)."""
    monos = desc.monomials()
    p, d = desc.p, desc.d
    if desc.n == 1:
        lead = coeffs[monos.index((d,))]
        return lead % p != 0
    # binary form F = sum c_{i,j} x^i y^j over i + j = d; squarefree iff the
    # dehomogenization P(t) = F(t, 1) is squarefree and y^2 does not divide F
    dense = [0] * (d + 1)
    for (i, j), c in zip(monos, coeffs):
        if i + j == d:
            dense[i] = c % p
    P = polyfp.trim(dense)
    if not P:
        return False
    if d - polyfp.deg(P) > 1:
        return False
    if polyfp.deg(P) == 0:
        return d <= 1
    return polyfp.squarefree(P, p)


def family_size(desc: FamilyDescriptor) -> int:
    """Exact count of the family (Deligne condition included for n = 1)."""
    p = desc.p
    monos = desc.monomials()
    if desc.n == 1:
        return (p - 1) * p ** (len(monos) - 1)
    count = 0
    for coeffs in itertools.product(range(p), repeat=len(monos)):
        if is_deligne(desc, coeffs):
            count += 1
    return count


def enumerate_deligne(desc: FamilyDescriptor, config: RunConfig = DEFAULT):
    """Stream of coefficient tuples (aligned with desc.monomials())."""
    p = desc.p
    monos = desc.monomials()
    if desc.mode[0] == "exhaustive":
        if p ** len(monos) > config.max_family * p:
            raise BudgetExceeded(p ** len(monos), config.max_family * p)
        for coeffs in itertools.product(range(p), repeat=len(monos)):
            if is_deligne(desc, coeffs):
                yield coeffs
        return
    _, count, seed = desc.mode
    rng = np.random.default_rng(np.random.SeedSequence((seed, desc.p, desc.d)))
    produced = 0
    while produced < count:
        coeffs = tuple(int(c) for c in rng.integers(0, p, size=len(monos)))
        if is_deligne(desc, coeffs):
            produced += 1
            yield coeffs


def family_sums(desc: FamilyDescriptor, config: RunConfig = DEFAULT) -> np.ndarray:
    """Normalized sums S(f) = p^(-n/2) sum_x e(f(x)/p) for the whole family."""
    p = desc.p
    members = list(enumerate_deligne(desc, config))
    if len(members) * p ** desc.n > config.max_evaluations:
        raise BudgetExceeded(len(members) * p ** desc.n, config.max_evaluations)
    monos = desc.monomials()
    # value matrix: V[point, monomial] = x^mono mod p
    if desc.n == 1:
        xs = np.arange(p, dtype=np.int64)
        V = np.stack([pow_mod_vec(xs, m[0], p) for m in monos], axis=1)
    else:
        xs = np.arange(p, dtype=np.int64)
        gx, gy = np.meshgrid(xs, xs, indexing="ij")
        gx, gy = gx.ravel(), gy.ravel()
        V = np.stack(
            [pow_mod_vec(gx, m[0], p) * pow_mod_vec(gy, m[1], p) % p for m in monos], axis=1
        )
    table = root_table(p)
    norm = p ** (-desc.n / 2.0)
    out = np.empty(len(members), dtype=complex)
    rows = np.array(members, dtype=np.int64)
    for a in range(0, len(members), _FAMILY_CHUNK):
        b = min(a + _FAMILY_CHUNK, len(members))
        vals = (rows[a:b] @ V.T) % p
        out[a:b] = table[vals].sum(axis=1) * norm
    return out


def pow_mod_vec(xs, e, p):
    out = np.ones_like(xs)
    base = xs % p
    while e:
        if e & 1:
            out = (out * base) % p
        base = (base * base) % p
        e >>= 1
    return out


# ---------------------------------------------------------------------------
# Haar oracles


def _unitary_batch(rng, N, count):
    z = (rng.standard_normal((count, N, N)) + 1j * rng.standard_normal((count, N, N))) / math.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r, axis1=-2, axis2=-1)
    q = q * (d / np.abs(d))[:, None, :]
    return q

def _orthogonal_batch(rng, N, count):
    z = rng.standard_normal((count, N, N))
    q, r = np.linalg.qr(z)
    d = np.diagonal(r, axis1=-2, axis2=-1)
    q = q * np.sign(d)[:, None, :]
    return q


def _theta(v):
    """Quaternionic structure map on C^(2n): (x, y) -> (-conj(y), conj(x))."""
    n0 = v.shape[-1] // 2
    out = np.empty_like(v)
    out[..., :n0] = -np.conj(v[..., n0:])
    out[..., n0:] = np.conj(v[..., :n0])
    return out


def _symplectic_batch(rng, N, count):
    """Haar on USp(N) by Gram-Schmidt over quaternionic pairs (u, Theta u).

    Orthogonalizing Gaussian vectors against previous columns and their
    Theta-partners commutes with left multiplication by USp(N), which gives
    invariance, hence Haar.
    """
    if N % 2:
        raise BadParams("USp needs even matrix size")
    n0 = N // 2
    U = np.empty((count, N, N), dtype=complex)
    cols = []
    for k in range(n0):
        w = (rng.standard_normal((count, N)) + 1j * rng.standard_normal((count, N))) / math.sqrt(2)
        for _ in range(2):  # two passes for numerical orthogonality
            for u in cols:
                w = w - np.sum(np.conj(u) * w, axis=1, keepdims=True) * u
                tu = _theta(u)
                w = w - np.sum(np.conj(tu) * w, axis=1, keepdims=True) * tu
        w = w / np.linalg.norm(w, axis=1, keepdims=True)
        cols.append(w)
    for k in range(n0):
        U[:, :, k] = cols[k]
        U[:, :, n0 + k] = _theta(cols[k])
    return U


_SAMPLERS = {"U": _unitary_batch, "O": _orthogonal_batch, "USp": _symplectic_batch}


def haar_moments(group: str, N: int, samples: int, seed: int, pairs) -> dict:
    """Monte Carlo trace moments E[Tr^a conj(Tr)^b] with standard errors.

    Returns {(a, b): (mean, stderr)}; sampling is chunked with spawned
    per-chunk seeds and a deterministic merge order.
    """
    if group not in _SAMPLERS:
        raise BadParams(f"unknown group {group!r}; choose U, USp or O")
    if N < 1 or samples < 1:
        raise BadParams("need N >= 1 and samples >= 1")
    if group == "USp" and N % 2:
        raise BadParams("USp needs even N")
    sampler = _SAMPLERS[group]
    nchunks = (samples + _ORACLE_CHUNK - 1) // _ORACLE_CHUNK
    group_tag = {"U": 1, "USp": 2, "O": 3}[group]
    seeds = np.random.SeedSequence((seed, group_tag, N)).spawn(nchunks)
    pairs = list(pairs)
    sums = {ab: 0j for ab in pairs}
    sqsums = {ab: 0.0 for ab in pairs}
    done = 0
    for c in range(nchunks):
        cnt = min(_ORACLE_CHUNK, samples - done)
        rng = np.random.default_rng(seeds[c])
        tr = np.trace(sampler(rng, N, cnt), axis1=-2, axis2=-1)
        for (a, b) in pairs:
            vals = tr ** a * np.conj(tr) ** b
            sums[(a, b)] += complex(np.sum(vals))
            sqsums[(a, b)] += float(np.sum(np.abs(vals) ** 2))
        done += cnt
    out = {}
    for ab in pairs:
        mean = sums[ab] / samples
        var = max(sqsums[ab] / samples - abs(mean) ** 2, 0.0)
        out[ab] = (mean, math.sqrt(var / samples))
    return out


def empirical_moments(sums_arr: np.ndarray, pairs, sampled: bool) -> dict:
    out = {}
    n = len(sums_arr)
    for (a, b) in pairs:
        vals = sums_arr ** a * np.conj(sums_arr) ** b
        mean = complex(np.mean(vals))
        if sampled:
            var = max(float(np.mean(np.abs(vals) ** 2)) - abs(mean) ** 2, 0.0)
            se = math.sqrt(var / n)
        else:
            se = 0.0
        out[(a, b)] = (mean, se)
    return out


@dataclass
class MomentReport:
    descriptor: FamilyDescriptor
    group: str
    matrix_size: int
    family_count: int
    empirical: dict
    oracle: dict
    zscores: dict
    systematic: float
    threshold: float
    verdict: bool
    max_imag_violation: float

    def to_dict(self):
        def enc(d):
            return {
                f"{a},{b}": {"re": v[0].real, "im": v[0].imag, "stderr": v[1]}
                for (a, b), v in d.items()
            }

        return {
            "family": {
                "n": self.descriptor.n,
                "d": self.descriptor.d,
                "p": self.descriptor.p,
                "variant": self.descriptor.variant,
                "mode": list(self.descriptor.mode),
                "count": self.family_count,
            },
            "group": self.group,
            "matrix_size": self.matrix_size,
            "empirical": enc(self.empirical),
            "oracle": enc(self.oracle),
            "zscores": {f"{a},{b}": z for (a, b), z in self.zscores.items()},
            "systematic_allowance": self.systematic,
            "zscore_threshold": self.threshold,
            "verdict": "PASS" if self.verdict else "FAIL",
            "max_imag_violation": self.max_imag_violation,
        }

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def moment_pairs(desc: FamilyDescriptor, k_max: int):
    if desc.variant == "odd":
        return [(k, 0) for k in range(1, k_max + 1)]
    return [(a, b) for a in range(k_max + 1) for b in range(a + 1) if 0 < a + b <= k_max]


def compare(desc: FamilyDescriptor, k_max: int = 4, samples: int = 100_000, seed: int = 0,
            config: RunConfig = DEFAULT) -> MomentReport:
    """Empirical family moments against the Haar oracle.

    PASS iff every |z| <= config.zscore_threshold, where
    z = |emp - oracle| / (sqrt(se_emp^2 + se_orc^2) + c_sys / sqrt(p)).
    """
    pairs = moment_pairs(desc, k_max)
    sums_arr = family_sums(desc, config)
    sampled = desc.mode[0] == "sample"
    emp = empirical_moments(sums_arr, pairs, sampled)
    orc = haar_moments(desc.group, desc.matrix_size, samples, seed, pairs)
    systematic = config.systematic_coeff / math.sqrt(desc.p)
    zs = {}
    for ab in pairs:
        me, se_e = emp[ab]
        mo, se_o = orc[ab]
        zs[ab] = abs(me - mo) / (math.hypot(se_e, se_o) + systematic)
    verdict = all(z <= config.zscore_threshold for z in zs.values())
    max_imag = 0.0
    if desc.variant == "odd":
        for ab in pairs:
            me, se_e = emp[ab]
            allowance = 5 * se_e if sampled else 1e-6 * max(1.0, abs(me))
            if abs(me.imag) > allowance:
                max_imag = max(max_imag, abs(me.imag))
    return MomentReport(
        descriptor=desc,
        group=desc.group,
        matrix_size=desc.matrix_size,
        family_count=len(sums_arr),
        empirical=emp,
        oracle=orc,
        zscores=zs,
        systematic=systematic,
        threshold=config.zscore_threshold,
        verdict=verdict and max_imag == 0.0,
        max_imag_violation=max_imag,
    )


def export_sums_csv(desc: FamilyDescriptor, path: str, config: RunConfig = DEFAULT):
    """Per-family sums as CSV: index, coefficients, Re S, Im S."""
    members = list(enumerate_deligne(desc, config))
    sums_arr = family_sums(desc, config)
    monos = desc.monomials()
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["index"] + [f"c{'_'.join(map(str, m))}" for m in monos] + ["re_s", "im_s"])
        for i, (coeffs, s) in enumerate(zip(members, sums_arr)):
            writer.writerow([i, *coeffs, s.real, s.imag])


def export_histogram_csv(desc: FamilyDescriptor, path: str, bins: int = 40, config: RunConfig = DEFAULT):
    """Histogram of Re S over the family as CSV: bin_left, bin_right, count."""
    sums_arr = family_sums(desc, config)
    n_max = desc.matrix_size
    counts, edges = np.histogram(sums_arr.real, bins=bins, range=(-n_max, n_max))
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["bin_left", "bin_right", "count"])
        for i, c in enumerate(counts):
            writer.writerow([edges[i], edges[i + 1], int(c)])
