"""Command-line surface: sum, lfun, complexity, bound, equidist, selftest.

Every JSON output embeds the package version, the seed and a hash of the
effective run configuration. Parse errors print a caret diagnostic and exit
with status 2; budget and math errors exit with status 1.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

import numpy as np

from . import __version__, bounds, equidist, sums
from .config import load_config
from .curves import Curve, betti_sum_on, curve_complexity, fkm_conductor, gos_chi, invariants_for_expr, natural_curve
from .errors import ParseError, SheafsumsError
from .grammar import parse_expr


def _base_payload(cfg):
    return {"version": __version__, "seed": cfg.seed, "config_hash": cfg.hash()}


def _emit(payload, cfg):
    if cfg.output == "text":
        for k, v in payload.items():
            print(f"{k}: {v}")
    else:
        print(json.dumps(payload, indent=2, sort_keys=True, default=str))


def _add_common(sp):
    sp.add_argument("--config", help="flat key=value config file")
    sp.add_argument("--threads", type=int, default=None)
    sp.add_argument("--cache-dir", default=None)
    sp.add_argument("--seed", type=int, default=None)
    sp.add_argument("--output", choices=["json", "csv", "text"], default=None)
    sp.add_argument("--max-evaluations", type=int, default=None)


def _config_from(args):
    return load_config(
        args.config,
        threads=args.threads,
        cache_dir=args.cache_dir,
        seed=args.seed,
        output=args.output,
        max_evaluations=args.max_evaluations,
    )


def cmd_sum(args):
    cfg = _config_from(args)
    expr = parse_expr(args.expr, args.p)
    res = sums.complete_sum(expr, m=args.m, w=args.w, config=cfg)
    payload = _base_payload(cfg)
    payload.update(
        {
            "expression": args.expr,
            "p": args.p,
            "m": args.m,
            "weight": args.w,
            "value": {"re": res.value.real, "im": res.value.imag},
            "npoints": res.npoints,
            "fp_error_bound": res.fp_error_bound,
        }
    )
    _emit(payload, cfg)
    return 0


def cmd_lfun(args):
    cfg = _config_from(args)
    expr = parse_expr(args.expr, args.p)
    S = sums.power_sums(expr, M=args.M, config=cfg)
    est = sums.fit_l_polynomial(S, config=cfg)
    payload = _base_payload(cfg)
    payload.update(
        {
            "expression": args.expr,
            "p": args.p,
            "M": args.M,
            "power_sums": [{"re": s.real, "im": s.imag} for s in S],
            "recurrence": [{"re": c.real, "im": c.imag} for c in est.recurrence],
            "degree": est.degree,
            "chi_c": est.chi_c,
            "residual": est.residual,
        }
    )
    _emit(payload, cfg)
    return 0


def cmd_complexity(args):
    cfg = _config_from(args)
    expr = parse_expr(args.expr, args.p)
    inv = invariants_for_expr(expr)
    curve = natural_curve(inv)
    chi = gos_chi(inv, Curve.A1())
    betti = betti_sum_on(inv, curve)
    exact = curve_complexity(inv, betti=[betti])
    pair = curve_complexity(inv, exact=False)
    payload = _base_payload(cfg)
    payload.update(
        {
            "expression": args.expr,
            "p": args.p,
            "rank": inv.rank,
            "points": [
                {
                    "point": repr(d.point),
                    "degree": d.point.degree,
                    "drop": d.drop,
                    "swan": d.swan,
                    "jump": d.jump,
                    "ramified": d.ramified,
                }
                for d in inv.points
            ],
            "chi_c_A1": chi,
            "betti_sum": betti,
            "complexity": str(exact.value),
            "pair_lower": str(pair.lower),
            "pair_upper": str(pair.upper),
            "fkm_conductor": fkm_conductor(inv),
        }
    )
    _emit(payload, cfg)
    return 0


def cmd_bound(args):
    cfg = _config_from(args)
    expr = parse_expr(args.expr, args.p)
    b = bounds.propagate(expr)
    payload = _base_payload(cfg)
    payload.update(
        {
            "expression": args.expr,
            "p": args.p,
            "numeric": str(b.numeric),
            "numeric_float": float(b.numeric),
            "symbolic": list(b.symbols),
            "trail": b.trail,
        }
    )
    _emit(payload, cfg)
    return 0


def cmd_equidist(args):
    cfg = _config_from(args)
    mode = ("exhaustive",) if args.sample is None else ("sample", args.sample, cfg.seed)
    desc = equidist.FamilyDescriptor(args.n, args.d, args.p, variant=args.variant, mode=mode)
    report = equidist.compare(desc, k_max=args.kmax, samples=args.oracle_samples, seed=cfg.seed, config=cfg)
    if args.csv:
        equidist.export_sums_csv(desc, args.csv, config=cfg)
    if args.hist:
        equidist.export_histogram_csv(desc, args.hist, config=cfg)
    payload = _base_payload(cfg)
    payload.update(report.to_dict())
    _emit(payload, cfg)
    return 0 if report.verdict else 1


def cmd_selftest(args):
    cfg = _config_from(args)
    t_all = time.time()
    failures = 0
    for name, fn in _SELFTESTS:
        t0 = time.time()
        try:
            fn(cfg)
            status = "PASS"
        except Exception as exc:  # noqa: BLE001 - report and continue
            status = f"FAIL ({exc})"
            failures += 1
        print(f"{name:40s} {status}  [{time.time() - t0:.2f}s]")
    print(f"selftest {'PASS' if failures == 0 else 'FAIL'} in {time.time() - t_all:.1f}s")
    return 0 if failures == 0 else 1


def _st_constants(cfg):
    from fractions import Fraction

    assert bounds.tensor_constant(0) == Fraction(65536, 81)
    assert bounds.tensor_constant(1) == Fraction(1900544, 81)
    for n in range(13):
        assert float(bounds.tensor_constant(n)) <= bounds.tensor_constant_closed_form(n)
    assert bounds.katz_bound(1, 1, 3) == 432
    assert bounds.katz_bound(0, 0, 7) == 18
    assert bounds.katz_bound(2, 3, 2) == 34992


def _st_gauss(cfg):
    expr = parse_expr("AS(psi, x^2)", 5)
    v = sums.complete_sum(expr, w=1, config=cfg).value
    assert abs(v - 1.0) < 1e-9, v


def _st_lfun(cfg):
    expr = parse_expr("AS(psi, x^3)", 7)
    est = sums.fit_l_polynomial(sums.power_sums(expr, M=5, config=cfg), config=cfg)
    assert est.degree == 2 and est.chi_c == -2


def _st_gos(cfg):
    expr = parse_expr("AS(psi, x^5)", 7)
    inv = invariants_for_expr(expr)
    assert gos_chi(inv, Curve.A1()) == -4
    assert curve_complexity(inv, curve=Curve.A1()).value == 4


def _st_quadratic(cfg):
    desc = equidist.FamilyDescriptor(1, 2, 31)
    S = equidist.family_sums(desc, config=cfg)
    assert float(np.max(np.abs(np.abs(S) - 1.0))) < 1e-8


def _st_gowers(cfg):
    assert abs(sums.gowers_norm(parse_expr("AS(psi, 2*x + 1)", 7), 2, config=cfg) - 1.0) < 1e-8
    assert abs(sums.gowers_norm(parse_expr("AS(psi, 3*x^2)", 7), 2, config=cfg) - 1 / 7) < 1e-8


def _st_fourier(cfg):
    ft = sums.fourier_table(parse_expr("AS(psi, 3*x)", 11), config=cfg)
    mods = np.abs(ft)
    assert abs(mods[(11 - 3) % 11] - np.sqrt(11)) < 1e-9
    assert np.max(np.delete(mods, (11 - 3) % 11)) < 1e-9
    b = bounds.propagate(parse_expr("FT(AS(psi, x^3))", 7))
    assert b.numeric >= 2


def _st_haar(cfg):
    m = equidist.haar_moments("U", 1, 4000, cfg.seed, [(1, 1)])
    mean, se = m[(1, 1)]
    assert abs(mean - 1.0) < 1e-12


_SELFTESTS = [
    ("effective-constants", _st_constants),
    ("gauss-sum-normalization", _st_gauss),
    ("l-function-fit", _st_lfun),
    ("euler-characteristic-vs-complexity", _st_gos),
    ("quadratic-family-modulus", _st_quadratic),
    ("gowers-norms", _st_gowers),
    ("fourier-support-and-bound", _st_fourier),
    ("haar-sampler", _st_haar),
]


def build_parser():
    ap = argparse.ArgumentParser(
        prog="sheafsums",
        description="Exponential sums, L-recurrences, curve invariants, "
        "complexity bounds and equidistribution checks over finite fields.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("sum", help="complete normalized sum of an expression")
    sp.add_argument("expr")
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--m", type=int, default=1, help="extension degree")
    sp.add_argument("--w", type=int, default=0, help="normalization weight: scales by q^(-w/2)")
    _add_common(sp)
    sp.set_defaults(fn=cmd_sum)

    sp = sub.add_parser("lfun", help="power sums and fitted L-recurrence")
    sp.add_argument("expr")
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--M", type=int, default=6, help="number of power sums")
    _add_common(sp)
    sp.set_defaults(fn=cmd_lfun)

    sp = sub.add_parser("complexity", help="curve invariants and exact complexity")
    sp.add_argument("expr")
    sp.add_argument("--p", type=int, required=True)
    _add_common(sp)
    sp.set_defaults(fn=cmd_complexity)

    sp = sub.add_parser("bound", help="propagated complexity bound with trail")
    sp.add_argument("expr")
    sp.add_argument("--p", type=int, required=True)
    _add_common(sp)
    sp.set_defaults(fn=cmd_bound)

    sp = sub.add_parser("equidist", help="family moments against the Haar oracle")
    sp.add_argument("--n", type=int, default=1)
    sp.add_argument("--d", type=int, required=True)
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--variant", choices=["all", "odd"], default="all")
    sp.add_argument("--sample", type=int, default=None, help="sample size (default exhaustive)")
    sp.add_argument("--kmax", type=int, default=4)
    sp.add_argument("--oracle-samples", type=int, default=100_000)
    sp.add_argument("--csv", default=None, help="export per-family sums as CSV")
    sp.add_argument("--hist", default=None, help="export a Re S histogram as CSV")
    _add_common(sp)
    sp.set_defaults(fn=cmd_equidist)

    sp = sub.add_parser("selftest", help="fast acceptance subset; nonzero exit on failure")
    _add_common(sp)
    sp.set_defaults(fn=cmd_selftest)

    return ap


def main(argv=None):
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.fn(args)
    except ParseError as exc:
        print(exc.caret_diagnostic(), file=sys.stderr)
        return 2
    except SheafsumsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
