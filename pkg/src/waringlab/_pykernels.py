"""Numpy implementations of the hot kernels.

This module is the fallback used when the compiled ``_ckernels`` extension is
unavailable (or when ``WLAB_PURE_PYTHON=1``).  Every function here has a twin
of the same name and signature in ``_ckernels.pyx``; the two are required to
agree exactly on integer outputs and to ~1e-12 on floating outputs.
"""
from __future__ import annotations

import numpy as np

TWO_PI = 2.0 * np.pi

# NTT-friendly primes p = c*2^e + 1 (all < 2^31 so products fit in uint64)
# with a primitive root g; the smallest supports transforms up to 2^25.
NTT_PRIMES = ((167772161, 3), (469762049, 3), (2113929217, 5))
NTT_MAX_LOG2 = 25

_SPLITTER = 134217729.0  # 2^27 + 1, Veltkamp split constant for binary64


def _two_prod(a, b):
    """Return (p, e) with p = fl(a*b) and p + e == a*b exactly (Dekker)."""
    p = a * b
    t = _SPLITTER * a
    ahi = t - (t - a)
    alo = a - ahi
    t = _SPLITTER * b
    bhi = t - (t - b)
    blo = b - bhi
    e = ((ahi * bhi - p) + ahi * blo + alo * bhi) + alo * blo
    return p, e


def frac_phase(alpha, xk):
    """alpha * xk mod 1, near [-1/2, 1/2], with the product error compensated."""
    p, e = _two_prod(np.asarray(alpha, dtype=np.float64), np.asarray(xk, dtype=np.float64))
    return (p - np.rint(p)) + e


def weyl_sum(k: int, P: int, alpha: float) -> complex:
    if P <= 0:
        return 0j
    xk = np.arange(1, P + 1, dtype=np.float64) ** k
    ph = TWO_PI * frac_phase(alpha, xk)
    return complex(np.cos(ph).sum(), np.sin(ph).sum())


def weyl_sum_many(k: int, P: int, alphas) -> np.ndarray:
    alphas = np.ascontiguousarray(alphas, dtype=np.float64)
    out = np.zeros(alphas.shape[0], dtype=np.complex128)
    if P <= 0:
        return out
    xk = np.arange(1, P + 1, dtype=np.float64) ** k
    step = max(1, 2_000_000 // P)
    for lo in range(0, alphas.shape[0], step):
        ph = TWO_PI * frac_phase(alphas[lo:lo + step, None], xk[None, :])
        out[lo:lo + step] = np.cos(ph).sum(axis=1) + 1j * np.sin(ph).sum(axis=1)
    return out


def gauss_sum_direct(k: int, q: int, a: int) -> complex:
    r = np.arange(1, q + 1, dtype=np.int64) % q
    c = (r * r) % q
    if k == 4:
        c = (c * c) % q
    c = ((a % q) * c) % q
    ph = TWO_PI * c / q
    return complex(np.cos(ph).sum(), np.sin(ph).sum())


def power_residue_histogram(q: int, k: int) -> np.ndarray:
    """counts[c] = #{0 <= r < q : r^k = c mod q}."""
    r = np.arange(q, dtype=np.int64)
    c = (r * r) % q
    if k == 4:
        c = (c * c) % q
    return np.bincount(c, minlength=q).astype(np.int64)


def two_square_counts(x_max: int) -> np.ndarray:
    out = np.zeros(x_max + 1, dtype=np.uint32)
    x = 1
    while x * x + 1 <= x_max:
        y = np.arange(1, int(np.sqrt(x_max - x * x)) + 2, dtype=np.int64)
        m = x * x + y * y
        m = m[m <= x_max]
        out[m] += 1
        x += 1
    return out


def biquadrate_counts(s: int, x_max: int) -> np.ndarray:
    out = np.zeros(x_max + 1, dtype=np.int64)
    fourth = [y ** 4 for y in range(1, x_max + 1) if y ** 4 <= x_max]
    for f in fourth:
        out[f] = 1
    for _ in range(s - 1):
        nxt = np.zeros_like(out)
        for f in fourth:
            nxt[f:] += out[: x_max + 1 - f]
        out = nxt
    return out.astype(np.uint32)


def accumulate_shifted(two_sq, bq, x_max: int) -> np.ndarray:
    two_sq = np.asarray(two_sq, dtype=np.int64)
    out = np.zeros(x_max + 1, dtype=np.int64)
    for t in np.flatnonzero(np.asarray(bq)):
        t = int(t)
        out[t:] += int(bq[t]) * two_sq[: x_max + 1 - t]
    return out


def _bit_reverse_perm(n: int) -> np.ndarray:
    bits = n.bit_length() - 1
    idx = np.arange(n, dtype=np.int64)
    rev = np.zeros(n, dtype=np.int64)
    for b in range(bits):
        rev |= ((idx >> b) & 1) << (bits - 1 - b)
    return rev


def _ntt(a: np.ndarray, mod: int, g: int, invert: bool) -> np.ndarray:
    n = a.shape[0]
    a = a[_bit_reverse_perm(n)].astype(np.uint64)
    m = np.uint64(mod)
    length = 2
    while length <= n:
        w = pow(g, (mod - 1) // length, mod)
        if invert:
            w = pow(w, mod - 2, mod)
        half = length // 2
        tw = np.ones(half, dtype=np.uint64)
        filled = 1
        while filled < half:
            step = min(filled, half - filled)
            tw[filled:filled + step] = (tw[:step] * np.uint64(pow(w, filled, mod))) % m
            filled += step
        blk = a.reshape(-1, length)
        u = blk[:, :half].copy()
        v = (blk[:, half:] * tw) % m
        blk[:, :half] = (u + v) % m
        blk[:, half:] = (u + m - v) % m
        length <<= 1
    if invert:
        a = (a * np.uint64(pow(n, mod - 2, mod))) % m
    return a


def _crt3(r0, r1, r2) -> np.ndarray:
    """Garner reconstruction; the value is returned modulo 2^64 (wrapping)."""
    (p0, _), (p1, _), (p2, _) = NTT_PRIMES
    inv01 = np.uint64(pow(p0, -1, p1))
    inv012 = np.uint64(pow(p0 * p1 % p2, -1, p2))
    P0, P1, P2 = np.uint64(p0), np.uint64(p1), np.uint64(p2)
    t1 = ((r1 + P1 - r0 % P1) % P1 * inv01) % P1
    x01_mod_p2 = (r0 % P2 + (P0 % P2) * t1 % P2) % P2
    t2 = ((r2 + P2 - x01_mod_p2) % P2 * inv012) % P2
    with np.errstate(over="ignore"):
        return r0 + P0 * t1 + (P0 * P1) * t2


def ntt_convolve(a, b, n_out: int) -> np.ndarray:
    """Exact linear convolution of nonnegative integer sequences, first n_out terms.

    Each output term must be < 2^63; the caller guarantees that bound.
    """
    a = np.asarray(a, dtype=np.int64)[:n_out]
    b = np.asarray(b, dtype=np.int64)[:n_out]
    need = a.shape[0] + b.shape[0] - 1
    size = 1 << max(1, (need - 1).bit_length())
    if size > (1 << NTT_MAX_LOG2):
        raise ValueError("convolution length exceeds NTT capacity")
    residues = []
    for mod, g in NTT_PRIMES:
        fa = np.zeros(size, dtype=np.uint64)
        fb = np.zeros(size, dtype=np.uint64)
        fa[: a.shape[0]] = a % mod
        fb[: b.shape[0]] = b % mod
        fa = _ntt(fa, mod, g, False)
        fb = _ntt(fb, mod, g, False)
        residues.append(_ntt((fa * fb) % np.uint64(mod), mod, g, True)[:n_out])
    return _crt3(*residues).astype(np.int64)
