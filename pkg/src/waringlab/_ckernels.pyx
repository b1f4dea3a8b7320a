# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot kernels.  Mirrors ``_pykernels`` name for name."""
import numpy as np
cimport numpy as cnp
from libc.math cimport cos, sin, rint, fma
from libc.stdint cimport int64_t, uint64_t, uint32_t

cnp.import_array()

cdef double TWO_PI = 6.283185307179586

NTT_PRIMES = ((167772161, 3), (469762049, 3), (2113929217, 5))
NTT_MAX_LOG2 = 25


cdef inline double _frac_phase(double alpha, double xk) noexcept nogil:
    cdef double p = alpha * xk
    cdef double e = fma(alpha, xk, -p)
    return (p - rint(p)) + e


def frac_phase(alpha, xk):
    a = np.broadcast_arrays(np.asarray(alpha, dtype=np.float64), np.asarray(xk, dtype=np.float64))
    cdef double[::1] av = np.ascontiguousarray(a[0]).ravel()
    cdef double[::1] xv = np.ascontiguousarray(a[1]).ravel()
    out = np.empty(av.shape[0], dtype=np.float64)
    cdef double[::1] ov = out
    cdef Py_ssize_t i
    for i in range(av.shape[0]):
        ov[i] = _frac_phase(av[i], xv[i])
    return out.reshape(a[0].shape)


cdef void _weyl(int k, long P, double alpha, double *re, double *im) noexcept nogil:
    cdef long x
    cdef double xk, ph, sr = 0.0, si = 0.0
    for x in range(1, P + 1):
        xk = <double>x * <double>x
        if k == 4:
            xk = xk * xk
        ph = TWO_PI * _frac_phase(alpha, xk)
        sr += cos(ph)
        si += sin(ph)
    re[0] = sr
    im[0] = si


def weyl_sum(int k, long P, double alpha):
    cdef double re = 0.0, im = 0.0
    if P <= 0:
        return 0j
    _weyl(k, P, alpha, &re, &im)
    return complex(re, im)


def weyl_sum_many(int k, long P, alphas):
    cdef double[::1] av = np.ascontiguousarray(alphas, dtype=np.float64)
    out = np.zeros(av.shape[0], dtype=np.complex128)
    cdef double complex[::1] ov = out
    cdef Py_ssize_t i
    cdef double re, im
    if P <= 0:
        return out
    with nogil:
        for i in range(av.shape[0]):
            _weyl(k, P, av[i], &re, &im)
            ov[i] = re + 1j * im
    return out


def gauss_sum_direct(int k, int64_t q, int64_t a):
    cdef int64_t am = ((a % q) + q) % q
    cdef int64_t r, c
    cdef double sr = 0.0, si = 0.0, ph
    with nogil:
        for r in range(1, q + 1):
            c = (r % q) * (r % q) % q
            if k == 4:
                c = c * c % q
            c = am * c % q
            ph = TWO_PI * <double>c / <double>q
            sr += cos(ph)
            si += sin(ph)
    return complex(sr, si)


def power_residue_histogram(int64_t q, int k):
    out = np.zeros(q, dtype=np.int64)
    cdef int64_t[::1] ov = out
    cdef int64_t r, c
    with nogil:
        for r in range(q):
            c = r * r % q
            if k == 4:
                c = c * c % q
            ov[c] += 1
    return out


def two_square_counts(int64_t x_max):
    out = np.zeros(x_max + 1, dtype=np.uint32)
    cdef uint32_t[::1] ov = out
    cdef int64_t x1, x2, m
    with nogil:
        x1 = 1
        while x1 * x1 + 1 <= x_max:
            x2 = 1
            m = x1 * x1 + 1
            while m <= x_max:
                ov[m] += 1
                x2 += 1
                m = x1 * x1 + x2 * x2
            x1 += 1
    return out


cdef inline int64_t _q4(int64_t y) noexcept nogil:
    return y * y * y * y


def biquadrate_counts(int s, int64_t x_max):
    out = np.zeros(x_max + 1, dtype=np.uint32)
    cdef uint32_t[::1] ov = out
    cdef int64_t y1, y2, y3, y4, t1, t2, t3
    with nogil:
        y1 = 1
        while _q4(y1) <= x_max:
            t1 = _q4(y1)
            y2 = 1
            while t1 + _q4(y2) <= x_max:
                t2 = t1 + _q4(y2)
                y3 = 1
                while t2 + _q4(y3) <= x_max:
                    t3 = t2 + _q4(y3)
                    if s == 3:
                        ov[t3] += 1
                    else:
                        y4 = 1
                        while t3 + _q4(y4) <= x_max:
                            ov[t3 + _q4(y4)] += 1
                            y4 += 1
                    y3 += 1
                y2 += 1
            y1 += 1
    return out


def accumulate_shifted(two_sq, bq, int64_t x_max):
    cdef uint32_t[::1] ts = np.ascontiguousarray(two_sq, dtype=np.uint32)
    cdef uint32_t[::1] bv = np.ascontiguousarray(bq, dtype=np.uint32)
    nz = np.flatnonzero(np.asarray(ts)[: x_max + 1]).astype(np.int64)
    cdef int64_t[::1] nzv = nz
    out = np.zeros(x_max + 1, dtype=np.int64)
    cdef int64_t[::1] ov = out
    cdef int64_t t, j, m, c
    cdef Py_ssize_t nnz = nzv.shape[0]
    with nogil:
        for t in range(x_max + 1):
            c = bv[t]
            if c == 0:
                continue
            for j in range(nnz):
                m = nzv[j]
                if t + m > x_max:
                    break
                ov[t + m] += c * ts[m]
    return out


cdef uint64_t _powmod(uint64_t b, uint64_t e, uint64_t m) noexcept nogil:
    cdef uint64_t r = 1
    b %= m
    while e:
        if e & 1:
            r = r * b % m
        b = b * b % m
        e >>= 1
    return r


cdef inline uint64_t _mont_ninv(uint64_t mod) noexcept nogil:
    # -mod^{-1} mod 2^32 by Newton iteration
    cdef uint32_t inv = <uint32_t>mod
    cdef int it
    for it in range(5):
        inv = inv * (2 - <uint32_t>mod * inv)
    return <uint32_t>(0 - inv)


cdef inline uint64_t _redc(uint64_t t, uint64_t mod, uint64_t ninv) noexcept nogil:
    # t < mod * 2^32 with mod < 2^31; returns t * 2^-32 mod p
    cdef uint32_t m = <uint32_t>t * <uint32_t>ninv
    cdef uint64_t r = (t + <uint64_t>m * mod) >> 32
    return r - mod if r >= mod else r


cdef void _ntt(uint64_t *a, Py_ssize_t n, uint64_t mod, uint64_t g, bint invert,
               uint64_t *tw) noexcept nogil:
    # tw must hold n/2 slots; filled with powers of the primitive n-th root
    cdef Py_ssize_t i, j = 0, bit, length, half, s, stride
    cdef uint64_t w, u, v, tmp
    for i in range(1, n):
        bit = n >> 1
        while j & bit:
            j ^= bit
            bit >>= 1
        j ^= bit
        if i < j:
            tmp = a[i]
            a[i] = a[j]
            a[j] = tmp
    cdef uint64_t ninv = _mont_ninv(mod), r_mod = (<uint64_t>1 << 32) % mod
    w = _powmod(g, (mod - 1) // n, mod)
    if invert:
        w = _powmod(w, mod - 2, mod)
    # twiddles stored in Montgomery form (w^i * 2^32 mod p)
    tw[0] = r_mod
    for i in range(1, n >> 1):
        tw[i] = tw[i - 1] * w % mod
    length = 2
    while length <= n:
        half = length >> 1
        stride = n // length
        s = 0
        while s < n:
            for i in range(half):
                u = a[s + i]
                v = _redc(a[s + i + half] * tw[i * stride], mod, ninv)
                a[s + i] = u + v - mod if u + v >= mod else u + v
                a[s + i + half] = u - v if u >= v else u + mod - v
            s += length
        length <<= 1
    if invert:
        w = _powmod(n, mod - 2, mod)
        for i in range(n):
            a[i] = a[i] * w % mod


def ntt_convolve(a, b, Py_ssize_t n_out):
    a = np.asarray(a, dtype=np.int64)[:n_out]
    b = np.asarray(b, dtype=np.int64)[:n_out]
    cdef Py_ssize_t need = a.shape[0] + b.shape[0] - 1
    cdef Py_ssize_t size = 1 << max(1, (need - 1).bit_length())
    if size > (1 << NTT_MAX_LOG2):
        raise ValueError("convolution length exceeds NTT capacity")
    residues = []
    cdef uint64_t[::1] fa, fb, twv
    tw_arr = np.empty(max(1, size // 2), dtype=np.uint64)
    twv = tw_arr
    cdef uint64_t mod, g
    cdef Py_ssize_t i
    for pm, pg in NTT_PRIMES:
        mod = pm
        g = pg
        fa_arr = np.zeros(size, dtype=np.uint64)
        fb_arr = np.zeros(size, dtype=np.uint64)
        fa_arr[: a.shape[0]] = a % pm
        fb_arr[: b.shape[0]] = b % pm
        fa = fa_arr
        fb = fb_arr
        with nogil:
            _ntt(&fa[0], size, mod, g, False, &twv[0])
            _ntt(&fb[0], size, mod, g, False, &twv[0])
            for i in range(size):
                fa[i] = fa[i] * fb[i] % mod
            _ntt(&fa[0], size, mod, g, True, &twv[0])
        residues.append(fa_arr[:n_out])
    return _crt3(residues[0], residues[1], residues[2])


def _crt3(r0_, r1_, r2_):
    cdef uint64_t[::1] r0 = np.ascontiguousarray(r0_, dtype=np.uint64)
    cdef uint64_t[::1] r1 = np.ascontiguousarray(r1_, dtype=np.uint64)
    cdef uint64_t[::1] r2 = np.ascontiguousarray(r2_, dtype=np.uint64)
    cdef uint64_t p0 = NTT_PRIMES[0][0], p1 = NTT_PRIMES[1][0], p2 = NTT_PRIMES[2][0]
    cdef uint64_t inv01 = pow(int(p0), -1, int(p1))
    cdef uint64_t inv012 = pow(int(p0 * p1 % p2), -1, int(p2))
    out = np.empty(r0.shape[0], dtype=np.int64)
    cdef int64_t[::1] ov = out
    cdef uint64_t t1, t2, x01
    cdef Py_ssize_t i
    with nogil:
        for i in range(r0.shape[0]):
            t1 = (r1[i] + p1 - r0[i] % p1) % p1 * inv01 % p1
            x01 = (r0[i] % p2 + (p0 % p2) * t1 % p2) % p2
            t2 = (r2[i] + p2 - x01) % p2 * inv012 % p2
            ov[i] = <int64_t>(r0[i] + p0 * t1 + (p0 * p1) * t2)
    return out
