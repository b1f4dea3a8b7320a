"""Time the compiled kernels against the numpy fallback.

    python benchmarks/bench_kernels.py [--repeat 3]

Each row reports the best wall time of ``--repeat`` runs per backend, the
speedup, and the largest disagreement between the two outputs.
"""
import argparse
import time

import numpy as np

from waringlab.kernels import available_backends


def _best(fn, repeat):
    best, out = float("inf"), None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def _gap(a, b):
    a, b = np.asarray(a), np.asarray(b)
    if np.issubdtype(a.dtype, np.integer):
        return int(np.abs(a.astype(np.int64) - b.astype(np.int64)).max(initial=0))
    return float(np.abs(a - b).max(initial=0.0))


def cases():
    rng = np.random.default_rng(0)
    alphas = rng.random(200)
    a = rng.integers(0, 50, 1 << 18)
    b = rng.integers(0, 50, 1 << 18)
    x_max = 2_000_000
    return [
        ("weyl_sum_many k=4 P=2^10, 200 alphas", lambda m: m.weyl_sum_many(4, 1024, alphas)),
        ("weyl_sum k=2 P=10^5", lambda m: m.weyl_sum(2, 10**5, 0.6180339887498949)),
        ("gauss_sum_direct k=4 q<=400", lambda m: [m.gauss_sum_direct(4, q, 1) for q in range(1, 401)]),
        ("two_square_counts 2e6", lambda m: m.two_square_counts(x_max)),
        ("biquadrate_counts s=4 2e6", lambda m: m.biquadrate_counts(4, x_max)),
        ("accumulate_shifted 2e5", lambda m: m.accumulate_shifted(
            m.two_square_counts(200_000), m.biquadrate_counts(3, 200_000), 200_000)),
        ("ntt_convolve 2^18 x 2^18", lambda m: m.ntt_convolve(a, b, 1 << 19)),
    ]


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    backends = available_backends()
    if "cython" not in backends:
        print("compiled extension not built; timing the python backend only")
    print(f"{'kernel':40s} {'python s':>10s} {'cython s':>10s} {'speedup':>8s} {'max gap':>10s}")
    for name, fn in cases():
        tp, op = _best(lambda: fn(backends["python"]), args.repeat)
        if "cython" in backends:
            tc, oc = _best(lambda: fn(backends["cython"]), args.repeat)
            print(f"{name:40s} {tp:10.4f} {tc:10.4f} {tp / tc:8.1f} {_gap(op, oc):10.3g}")
        else:
            print(f"{name:40s} {tp:10.4f} {'-':>10s}")


if __name__ == "__main__":
    main()
