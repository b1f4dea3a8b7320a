import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracles
from waringlab import kernels
from waringlab.kernels import available_backends


def test_backend_selected():
    assert kernels.BACKEND in ("cython", "python")
    assert "python" in available_backends()


def test_frac_phase_large_products(backend):
    # alpha * x^k far beyond 2^53: compare against exact rational reduction
    rng = np.random.default_rng(1)
    alphas = rng.random(200)
    xk = (rng.integers(10**4, 31622, 200).astype(np.float64)) ** 2 * 1e6 // 1
    got = np.asarray(backend.frac_phase(alphas, xk))
    for a, x, g in zip(alphas, xk, got):
        exact = Fraction(float(a)) * int(x)
        gap = float(exact - Fraction(float(g)))
        assert abs(gap - round(gap)) < 1e-12


@pytest.mark.parametrize("k,P,alpha", [(2, 100, 0.6180339887498949), (4, 31, 0.123456789), (2, 1000, 1e-7), (4, 177, 0.5)])
def test_weyl_sum_matches_mpmath(backend, k, P, alpha):
    ref = oracles.weyl_sum(k, P, alpha)
    assert abs(backend.weyl_sum(k, P, alpha) - ref) < 1e-9 * P


def test_weyl_sum_many_matches_scalar(backend):
    alphas = np.linspace(0.01, 0.99, 37)
    many = backend.weyl_sum_many(4, 20, alphas)
    for a, v in zip(alphas, many):
        assert abs(v - backend.weyl_sum(4, 20, a)) < 1e-12


@pytest.mark.parametrize("k,q,a", [(2, 5, 1), (2, 12, 7), (4, 16, 3), (4, 45, 2), (2, 97, 13)])
def test_gauss_direct_matches_mpmath(backend, k, q, a):
    assert abs(backend.gauss_sum_direct(k, q, a) - oracles.gauss_sum(k, q, a)) < 1e-10


@pytest.mark.parametrize("q", [1, 2, 16, 81, 100, 97])
def test_power_residue_histogram(backend, q):
    for k in (2, 4):
        h = backend.power_residue_histogram(q, k)
        ref = np.bincount([pow(r, k, q) for r in range(q)], minlength=q)
        assert np.array_equal(h, ref)


def test_count_tables_agree_between_backends():
    be = available_backends()
    if "cython" not in be:
        pytest.skip("compiled extension not built")
    py, cy = be["python"], be["cython"]
    assert np.array_equal(py.two_square_counts(5000), cy.two_square_counts(5000))
    for s in (3, 4):
        assert np.array_equal(py.biquadrate_counts(s, 5000), cy.biquadrate_counts(s, 5000))


def test_two_square_counts_small(backend):
    c = backend.two_square_counts(100)
    for m in range(101):
        ref = sum(1 for x in range(1, 11) for y in range(1, 11) if x * x + y * y == m)
        assert c[m] == ref


@given(st.lists(st.integers(0, 2**20), min_size=1, max_size=60), st.lists(st.integers(0, 2**20), min_size=1, max_size=60))
@settings(max_examples=60, deadline=None)
def test_ntt_convolution_exact(a, b):
    for be in available_backends().values():
        got = be.ntt_convolve(np.array(a), np.array(b), len(a) + len(b) - 1)
        ref = np.convolve(np.array(a, dtype=object), np.array(b, dtype=object))
        assert [int(v) for v in got] == [int(v) for v in ref]


def test_ntt_large_values_need_all_three_primes(backend):
    # outputs near 2^62 exceed the product of any two of the primes
    a = np.full(64, 2**27, dtype=np.int64)
    b = np.full(64, 2**29, dtype=np.int64)
    got = backend.ntt_convolve(a, b, 127)
    ref = [min(i + 1, 127 - i) * 2**56 for i in range(127)]
    assert [int(v) for v in got] == ref
    assert max(ref) > max(p for p, _ in kernels.NTT_PRIMES) ** 2


def test_ntt_truncated_output(backend):
    a = np.arange(1, 1001)
    got = backend.ntt_convolve(a, a, 500)
    assert np.array_equal(got, np.convolve(a, a)[:500])


def test_accumulate_shifted_matches_convolution(backend):
    two = backend.two_square_counts(3000)
    bq = backend.biquadrate_counts(3, 3000)
    got = backend.accumulate_shifted(two, bq, 3000)
    ref = np.convolve(two.astype(np.int64), bq.astype(np.int64))[:3001]
    assert np.array_equal(got, ref)


def test_backends_agree_weyl():
    be = available_backends()
    if "cython" not in be:
        pytest.skip("compiled extension not built")
    alphas = np.random.default_rng(5).random(50)
    a = be["python"].weyl_sum_many(2, 300, alphas)
    b = be["cython"].weyl_sum_many(2, 300, alphas)
    assert np.max(np.abs(a - b)) < 1e-10
    assert math.isclose(abs(be["python"].gauss_sum_direct(2, 7, 3)), math.sqrt(7))
