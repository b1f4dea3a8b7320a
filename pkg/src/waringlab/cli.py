"""Command line entry point ``wlab``.

Exit codes: 0 success, 1 usage or value error, 2 integrity failure,
3 capacity exceeded.
"""
from __future__ import annotations

import argparse
import csv
import sys

from .errors import CapacityError, IntegrityError, WlabError


def _csv(rows, out=None):
    w = csv.writer(out or sys.stdout, lineterminator="\n")
    for row in rows:
        w.writerow(row)


def _g(x: float) -> str:
    return repr(float(x))


def cmd_gauss(ns):
    from .arith import gauss_sum_direct, gauss_sum_s2_closed

    rows = [("re", "im", "method")]
    vals = {}
    methods = ["direct", "closed"] if ns.method == "both" else [ns.method]
    for m in methods:
        if m == "closed":
            if ns.k != 2:
                raise ValueError("closed form is only available for k = 2")
            v = gauss_sum_s2_closed(ns.q, ns.a).value
        else:
            v = gauss_sum_direct(ns.k, ns.q, ns.a).value
        vals[m] = v
        rows.append((_g(v.real), _g(v.imag), m))
    if ns.method == "both":
        d = vals["direct"] - vals["closed"]
        rows.append((_g(abs(d.real)), _g(abs(d.imag)), "difference"))
    _csv(rows)


def cmd_sieve(ns):
    from .repcount import DENSE_LIMIT, sieve_blocks, sieve_representations, write_rep_blocks, write_rep_table

    strategy = ns.strategy
    if strategy == "stream" or (strategy == "auto" and ns.xmax > DENSE_LIMIT):
        write_rep_blocks(ns.s, ns.xmax, sieve_blocks(ns.s, ns.xmax), ns.out)
    else:
        write_rep_table(sieve_representations(ns.s, ns.xmax, strategy), ns.out)
    print(f"wrote R_{ns.s}(n), n <= {ns.xmax}, to {ns.out}")


def cmd_count(ns):
    from .repcount import brute_force_count

    print(brute_force_count(ns.s, ns.n))


def cmd_singular(ns):
    from .singular import singular_series_euler, singular_series_qsum

    rows = [("n", "method", "value", "tail", "params")]
    methods = ["qsum", "euler"] if ns.method == "both" else [ns.method]
    for m in methods:
        if m == "qsum":
            r = singular_series_qsum(ns.s, ns.n, ns.qmax)
        else:
            r = singular_series_euler(ns.s, ns.n, ns.pmax, ns.hmax)
        rows.append((ns.n, m, _g(r.value), _g(r.tail_estimate), r.param_string()))
    _csv(rows)


def cmd_main_term(ns):
    from .singular import main_term, singular_series_qsum

    r = main_term(ns.s, ns.n, singular_series_qsum(ns.s, ns.n, ns.qmax))
    _csv([("n", "singular", "main_term"), (ns.n, _g(r.singular_series.value), _g(r.main_term))])


def cmd_arcs(ns):
    from .circle import DissectionParams, classify_arc
    from .scan import PsiSpec

    psi = PsiSpec.parse(ns.psi)
    params = DissectionParams(ns.x, ns.nu, ns.tau, float(psi(ns.x)))
    print(f"alpha={ns.alpha!r} {classify_arc(ns.alpha, params)}")


def cmd_moments(ns):
    from .circle import moment_count

    rows = [("P", "count")]
    for P in range(1, ns.pmax + 1):
        rows.append((P, moment_count(ns.k, ns.m, P)))
    _csv(rows)


def cmd_verify_orth(ns):
    from .circle import verify_orthogonality

    r = verify_orthogonality(ns.s, ns.x)
    status = "PASS" if r.passed else "FAIL"
    print(f"{status} s={r.s} X={r.X} grid={r.grid} max_deviation={r.max_deviation:.3e}")
    if not r.passed:
        raise IntegrityError("orthogonality deviation above 1e-6")


def cmd_weyl(ns):
    from .circle import approximating_fraction, f_star, weyl_sum

    f = weyl_sum(ns.k, ns.x, ns.alpha)
    header = ["alpha", "f_re", "f_im"]
    row = [_g(ns.alpha), _g(f.real), _g(f.imag)]
    if ns.star:
        header += ["q", "a", "fstar_re", "fstar_im", "difference", "bound_ratio"]
        found = approximating_fraction(ns.alpha, ns.x)
        if found is None:
            row += ["", "", "", "", "", ""]
        else:
            frac = found[0]
            fs = f_star(ns.k, ns.x, frac, ns.alpha)
            beta = ns.alpha - frac.a / frac.q
            diff = abs(f - fs)
            ratio = diff / (frac.q**0.5 * (1 + ns.x * abs(beta)) ** 0.5)
            row += [frac.q, frac.a, _g(fs.real), _g(fs.imag), _g(diff), _g(ratio)]
    _csv([header, row])


def cmd_scan(ns):
    from .scan import THEOREM_EXPONENTS, PsiSpec, export_report, fit_exponent, report_to_csv, scan
    from .errors import InsufficientDataError

    report = scan(ns.s, ns.xmin, ns.xmax, PsiSpec.parse(ns.psi), ns.qmax, ns.threads)
    if ns.out:
        export_report(report, ns.out, ns.format)
    else:
        sys.stdout.write(report_to_csv(report))
    w = csv.writer(sys.stderr, lineterminator="\n")
    w.writerow(("X", "count", "exceptional", "cumulative", "borderline", "median_rel", "near_zero", "psi_X"))
    for b in report.ranges:
        w.writerow((b.X, b.count, b.exceptional, b.cumulative, b.borderline, f"{b.median_rel:.6g}",
                    len(b.near_zero), f"{b.psi_at_X:.6g}"))
    try:
        fit = fit_exponent(report)
    except InsufficientDataError as exc:
        fit = f"insufficient data ({exc})"
    print(f"# fitted exponent: {fit}; theorem exponent for s={ns.s}: {THEOREM_EXPONENTS[ns.s]}", file=sys.stderr)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="wlab", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    s34 = dict(type=int, choices=(3, 4), required=True)

    g = sub.add_parser("gauss", help="Gauss sum S_k(q, a)")
    g.add_argument("--k", type=int, choices=(2, 4), required=True)
    g.add_argument("--q", type=int, required=True)
    g.add_argument("--a", type=int, required=True)
    g.add_argument("--method", choices=("direct", "closed", "both"), default="direct")
    g.set_defaults(func=cmd_gauss)

    g = sub.add_parser("sieve", help="write the RepTable of R_s(n), n <= xmax")
    g.add_argument("--s", **s34)
    g.add_argument("--xmax", type=int, required=True)
    g.add_argument("--out", required=True)
    g.add_argument("--strategy", choices=("auto", "direct", "ntt", "stream"), default="auto")
    g.set_defaults(func=cmd_sieve)

    g = sub.add_parser("count", help="brute-force R_s(n)")
    g.add_argument("--s", **s34)
    g.add_argument("--n", type=int, required=True)
    g.set_defaults(func=cmd_count)

    g = sub.add_parser("singular", help="singular series by q-sum and/or Euler product")
    g.add_argument("--s", **s34)
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--method", choices=("qsum", "euler", "both"), default="both")
    g.add_argument("--qmax", type=int, default=10_000)
    g.add_argument("--pmax", type=int, default=1000)
    g.add_argument("--hmax", type=int, default=None)
    g.set_defaults(func=cmd_singular)

    g = sub.add_parser("main-term", help="predicted main term for R_s(n)")
    g.add_argument("--s", **s34)
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--qmax", type=int, default=10_000)
    g.set_defaults(func=cmd_main_term)

    g = sub.add_parser("arcs", help="classify alpha in the arc dissection")
    g.add_argument("--x", type=float, required=True)
    g.add_argument("--nu", type=float, default=0.05)
    g.add_argument("--tau", type=float, default=0.01)
    g.add_argument("--psi", default="const:1")
    g.add_argument("--alpha", type=float, required=True)
    g.set_defaults(func=cmd_arcs)

    g = sub.add_parser("moments", help="exact even moments of Weyl sums, P = 1..pmax")
    g.add_argument("--k", type=int, choices=(2, 4), required=True)
    g.add_argument("--m", type=int, choices=(1, 2, 3, 4), required=True)
    g.add_argument("--pmax", type=int, required=True)
    g.set_defaults(func=cmd_moments)

    g = sub.add_parser("verify-orth", help="recover R_s(n) from sampled Weyl sums")
    g.add_argument("--s", **s34)
    g.add_argument("--x", type=int, required=True)
    g.set_defaults(func=cmd_verify_orth)

    g = sub.add_parser("weyl", help="Weyl sum f_k(alpha) and optionally f_k*(alpha)")
    g.add_argument("--k", type=int, choices=(2, 4), required=True)
    g.add_argument("--x", type=int, required=True)
    g.add_argument("--alpha", type=float, required=True)
    g.add_argument("--star", action="store_true")
    g.set_defaults(func=cmd_weyl)

    g = sub.add_parser("scan", help="exceptional-set scan over (xmin, xmax]")
    g.add_argument("--s", **s34)
    g.add_argument("--xmin", type=int, default=0)
    g.add_argument("--xmax", type=int, required=True)
    g.add_argument("--psi", required=True)
    g.add_argument("--qmax", type=int, default=2048)
    g.add_argument("--out")
    g.add_argument("--format", choices=("csv", "json"), default="csv")
    g.add_argument("--threads", type=int, default=1)
    g.set_defaults(func=cmd_scan)
    return p


def main(argv=None) -> int:
    ns = build_parser().parse_args(argv)
    try:
        ns.func(ns)
    except IntegrityError as exc:
        print(f"integrity error: {exc}", file=sys.stderr)
        return exc.exit_code
    except CapacityError as exc:
        print(f"capacity error: {exc}", file=sys.stderr)
        return exc.exit_code
    except (ValueError, WlabError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
