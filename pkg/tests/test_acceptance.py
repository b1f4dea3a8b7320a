"""Acceptance criteria 1-8, one PASS/FAIL line each.

Run under pytest (lines are printed past the capture) or directly with
``python tests/test_acceptance.py``.
"""
import math
import sys
import time
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

import oracles  # noqa: E402
from waringlab import kernels  # noqa: E402
from waringlab.arith import gauss_sum_direct, gauss_sum_s2_closed  # noqa: E402
from waringlab.circle import (  # noqa: E402
    APPROX_CALIBRATION,
    ENVELOPE_CALIBRATION,
    DissectionParams,
    Level,
    approximation_diagnostic,
    classify_arc,
    fit_loglog_slope,
    major_levels,
    moment_count,
    verify_orthogonality,
)
from waringlab.repcount import brute_force_count, sieve_representations  # noqa: E402
from waringlab.scan import THEOREM_EXPONENTS, PsiSpec, fit_exponent, report_to_csv, scan  # noqa: E402
from waringlab.errors import InsufficientDataError  # noqa: E402
from waringlab.singular import a_term_table, euler_many, qsum_many, singular_series_qsum  # noqa: E402
from fractions import Fraction  # noqa: E402

RESULTS = []


def emit(num, name, ok, detail, out=None):
    line = f"ACCEPTANCE {num} {'PASS' if ok else 'FAIL'} | {name} | {detail}"
    RESULTS.append(line)
    if out is not None:
        with out.disabled():
            print("\n" + line)
    else:
        print(line)
    return ok


@pytest.fixture
def out(capsys):
    return capsys


def criterion_1(out=None):
    t0 = time.perf_counter()
    worst = 0.0
    pairs = 0
    for q in range(1, 1001):
        for a in range(1, q + 1):
            if math.gcd(a, q) != 1:
                continue
            d = gauss_sum_direct(2, q, a).value - gauss_sum_s2_closed(q, a).value
            worst = max(worst, abs(d.real), abs(d.imag))
            pairs += 1
    dt = time.perf_counter() - t0
    ok = worst < 1e-9 and dt < 30
    return emit(1, "Gauss-sum equivalence q <= 1000", ok,
                f"{pairs} pairs, max componentwise gap {worst:.2e} (tol 1e-9), {dt:.1f} s (limit 30 s, backend {kernels.BACKEND})", out)


def criterion_2(out=None):
    mism = 0
    for s in (3, 4):
        t = sieve_representations(s, 5000)
        mism += sum(int(t[n]) != brute_force_count(s, n) for n in range(1, 5001))
    t3, t4 = sieve_representations(3, 20), sieve_representations(4, 20)
    spots = (int(t3[5]), int(t3[8]), int(t4[6]), int(t4[20]))
    ok = mism == 0 and spots == (1, 2, 1, 0)
    return emit(2, "sieve == brute force, n <= 5000, s = 3, 4", ok,
                f"{mism} mismatches; R3(5), R3(8), R4(6), R4(20) = {spots} (expect (1, 2, 1, 0))", out)


def criterion_3(out=None):
    t0 = time.perf_counter()
    reps = [verify_orthogonality(3, 128), verify_orthogonality(4, 64)]
    dt = time.perf_counter() - t0
    dev = max(r.max_deviation for r in reps)
    resid = max(r.max_integer_residual for r in reps)
    ok = all(r.passed for r in reps) and dev < 1e-6 and resid < 1e-6 and dt < 10
    return emit(3, "orthogonality (s=3, X=128), (s=4, X=64)", ok,
                f"max deviation {dev:.2e}, max distance to integer {resid:.2e} (tol 1e-6), {dt:.2f} s (limit 10 s)", out)


def criterion_4(out=None):
    rng = np.random.default_rng(2024)
    ns = np.sort(rng.integers(10**3, 10**5 + 1, 20))
    worst = 0.0
    q1 = all(a_term_table(s, 1)[0] == 1.0 and singular_series_qsum(s, int(ns[0]), 1).value == 1.0 for s in (3, 4))
    for s in (3, 4):
        qs, _ = qsum_many(s, ns, 10**4)
        eu = euler_many(s, ns.tolist(), 1000)
        for q, e in zip(qs, eu):
            worst = max(worst, abs(q - e.value) / e.value)
    ok = worst <= 0.01 and q1
    return emit(4, "singular series q-sum (q_max=1e4) vs Euler (p_max=1e3)", ok,
                f"20 n per s, max relative gap {worst:.2e} (tol 1e-2); q=1 partial sum exactly 1: {q1}", out)


def criterion_5(out=None):
    m10 = moment_count(4, 2, 10)
    slow_ok = all(moment_count(4, 2, P) == oracles.moment_enumeration(4, 2, P) for P in range(1, 13))
    Ps = [10, 15, 20, 25, 30, 35, 40]
    slope = fit_loglog_slope(Ps, [moment_count(4, 3, P) for P in Ps])
    ok = m10 == 190 and slow_ok and slope <= 3.6
    return emit(5, "moment identity and sixth-moment growth", ok,
                f"moment_count(4,2,10) = {m10} (expect 190); equals O(P^4) enumeration for P <= 12: {slow_ok}; "
                f"fitted exponent over P in [10,40] = {slope:.4f} (limit 3.6)", out)


def _stratum_from_levels(levels):
    preds = {
        "M(R)": Level.R in levels,
        "m4": Level.P4 in levels and Level.R not in levels,
        "m3": Level.Y in levels and Level.P4 not in levels,
        "m2": Level.HALF_SQRT_X in levels and Level.Y not in levels,
        "m1": not levels,
    }
    return [k for k, v in preds.items() if v]


def criterion_6(out=None):
    X = 2**24
    p = DissectionParams(X)
    chain = p.R <= p.P4 <= p.Y <= p.half_sqrt_x
    try:
        DissectionParams(X, psi_at_X=8.0)
        rejected = False
    except ValueError:
        rejected = True
    rng = np.random.default_rng(6)
    alphas = p.R / X + (1.0 - rng.random(10**5))
    bad = 0
    counts = {}
    order = [Level.R, Level.P4, Level.Y, Level.HALF_SQRT_X]
    for a in alphas.tolist():
        label = classify_arc(a, p).region
        levels = major_levels(a, p)
        strata = _stratum_from_levels(levels)
        nested = all(order[i + 1] in levels for i in range(3) if order[i] in levels)
        if strata != [label] or not nested:
            bad += 1
        counts[label] = counts.get(label, 0) + 1
    probes = {
        Fraction(1, 1): "M(R)", Fraction(5, 37): "m4", Fraction(5, 101): "m3", Fraction(5, 1009): "m2",
        Fraction(1, 3) + Fraction(100, 3 * X): "m3", Fraction(1, 2) + Fraction(1, 2 * X): "m4",
    }
    probe_ok = all(classify_arc(a, p).region == want for a, want in probes.items())
    sqrt2 = classify_arc(math.sqrt(2) - 1, DissectionParams(2**16)).region == "m1"
    ok = bad == 0 and chain and rejected and probe_ok and sqrt2
    dist = ", ".join(f"{k}={counts.get(k, 0)}" for k in ("M(R)", "m4", "m3", "m2", "m1"))
    return emit(6, "dissection totality over 1e5 alpha", ok,
                f"{bad} points without exactly one stratum or with broken nesting; {dist}; "
                f"chain R<=P4<=Y<=X^(1/2)/2 holds: {chain}, violating config rejected: {rejected}; "
                f"rational probes in predicted strata: {probe_ok and sqrt2}", out)


def criterion_7(out=None):
    reps = [approximation_diagnostic(k, 65536, 1000, seed=0) for k in (2, 4)]
    worst = max(r.max_difference_ratio for r in reps)
    env = max(r.max_envelope_ratio for r in reps)
    ok = worst < APPROX_CALIBRATION and env < ENVELOPE_CALIBRATION
    per_k = ", ".join(f"k={r.k}: {r.max_difference_ratio:.4f}" for r in reps)
    return emit(7, "approximation bound at X = 65536, 1000 major-arc points", ok,
                f"max |f-f*|/(q^(1/2)(1+X|beta|)^(1/2)) {per_k} (frozen {APPROX_CALIBRATION}); "
                f"f* envelope constant {env:.4f} (frozen {ENVELOPE_CALIBRATION})", out)


def _fit_text(rep):
    try:
        fit = fit_exponent(rep)
    except InsufficientDataError:
        return "insufficient data"
    return fit if isinstance(fit, str) else f"{fit:.4f}"


def criterion_8(out=None):
    psi = PsiSpec.parse("pow:0.02")
    t0 = time.perf_counter()
    full = scan(4, 0, 2**18, psi, threads=1)
    dt = time.perf_counter() - t0
    med = {b.X: b.median_rel for b in full.ranges if 2**14 <= b.X <= 2**18}
    xs = sorted(med)
    trend = all(med[b] <= 1.10 * med[a] for a, b in zip(xs, xs[1:]))
    again = scan(4, 0, 2**18, psi, threads=4)
    det4 = report_to_csv(full) == report_to_csv(again)
    r1 = scan(3, 2**12, 2**13, psi, threads=1)
    r2 = scan(3, 2**12, 2**13, psi, threads=3)
    det3 = report_to_csv(r1) == report_to_csv(r2)
    fits = []
    for s, x_max in ((3, 2**16), (4, 2**18)):
        for spec in ("pow:0.02", "pow:0.25"):
            rep = full if (s, spec) == (4, "pow:0.02") else scan(s, 0, x_max, PsiSpec.parse(spec))
            fits.append(f"s={s} psi={spec}: {_fit_text(rep)} vs {THEOREM_EXPONENTS[s]}")
    ok = trend and det4 and det3 and dt < 600
    meds = ", ".join(f"2^{int(math.log2(x))}: {med[x]:.4f}" for x in xs)
    return emit(8, "empirical substitute for the exceptional-set bounds", ok,
                f"(a) dyadic medians {meds} non-increasing within 10%: {trend}; "
                f"(b) byte-identical CSV across thread counts: s=4 {det4}, s=3 {det3}; "
                f"(c) fitted exponents (reported only) {'; '.join(fits)}; "
                f"full s=4 scan to 2^18 in {dt:.1f} s on 1 core (limit 600 s)", out)


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6, criterion_7, criterion_8]


@pytest.mark.parametrize("criterion", CRITERIA, ids=[f"criterion_{i}" for i in range(1, 9)])
def test_acceptance(criterion, out):
    assert criterion(out)


if __name__ == "__main__":
    results = [c() for c in CRITERIA]
    sys.exit(0 if all(results) else 1)
