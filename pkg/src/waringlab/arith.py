"""Exact integer primitives and quadratic/quartic Gauss sums.

``S_k(q, a) = sum_{r=1}^{q} e(a r^k / q)`` is available two ways: by direct
summation (any k in {2, 4}) and, for k = 2, by the classical closed form
assembled from the prime-power pieces through the Chinese remainder theorem.
"""
from __future__ import annotations

import cmath
import math
import random
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache

import numpy as np

from . import kernels

__all__ = [
    "FactoredInteger",
    "GaussMethod",
    "GaussSumValue",
    "ReducedFraction",
    "e",
    "factorize",
    "gauss_sum_direct",
    "gauss_sum_s2_closed",
    "gauss_sum_s2_closed_table",
    "is_prime",
    "jacobi",
    "primes_upto",
    "valuation",
    "weight_w",
]

_TRIAL_LIMIT = 10**6
# Deterministic Miller-Rabin witnesses for n < 3.3e24 (covers all 64-bit n).
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)


def e(z: float) -> complex:
    """The additive character e(z) = exp(2 pi i z)."""
    return cmath.exp(2j * math.pi * z)


@dataclass(frozen=True)
class FactoredInteger:
    value: int
    factors: tuple[tuple[int, int], ...]

    def __post_init__(self):
        prod = 1
        last = 1
        for p, k in self.factors:
            if p <= last or k < 1:
                raise ValueError(f"bad factor list {self.factors!r}")
            last = p
            prod *= p**k
        if prod != self.value:
            raise ValueError(f"factors multiply to {prod}, not {self.value}")

    def odd_part(self) -> int:
        return self.value >> valuation(self.value, 2) if self.value else 0

    def __iter__(self):
        return iter(self.factors)


@dataclass(frozen=True)
class ReducedFraction:
    """a/q in lowest terms with 1 <= a <= q."""

    a: int
    q: int

    def __post_init__(self):
        if self.q < 1 or not 1 <= self.a <= self.q or math.gcd(self.a, self.q) != 1:
            raise ValueError(f"{self.a}/{self.q} is not a reduced fraction in (0, 1]")

    @property
    def value(self) -> float:
        return self.a / self.q


class GaussMethod(str, Enum):
    DIRECT = "direct"
    CLOSED_FORM = "closed"


@dataclass(frozen=True)
class GaussSumValue:
    k: int
    q: int
    a: int
    value: complex
    method: GaussMethod


def valuation(n: int, p: int) -> int:
    """Exponent of the prime p in n (n != 0)."""
    if n == 0:
        raise ValueError("valuation of 0 is undefined")
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d, r = n - 1, 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for b in _MR_BASES:
        x = pow(b, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _pollard_brent(n: int, rng: random.Random) -> int:
    if n % 2 == 0:
        return 2
    while True:
        y, c, m = rng.randrange(1, n), rng.randrange(1, n), 128
        g = r = q = 1
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = math.gcd(q, n)
                k += m
            r *= 2
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
        if g != n:
            return g


def _split_large(n: int, out: dict, rng: random.Random) -> None:
    if n == 1:
        return
    if is_prime(n):
        out[n] = out.get(n, 0) + 1
        return
    d = _pollard_brent(n, rng)
    _split_large(d, out, rng)
    _split_large(n // d, out, rng)


@lru_cache(maxsize=65536)
def factorize(n: int) -> FactoredInteger:
    """Prime factorization: trial division to 10^6, then Miller-Rabin + Pollard-Brent."""
    if n < 1:
        raise ValueError("factorize needs n >= 1")
    out: dict[int, int] = {}
    m = n
    for p in (2, 3):
        while m % p == 0:
            out[p] = out.get(p, 0) + 1
            m //= p
    p = 5
    while p <= _TRIAL_LIMIT and p * p <= m:
        for cand in (p, p + 2):
            while m % cand == 0:
                out[cand] = out.get(cand, 0) + 1
                m //= cand
        p += 6
    if m > 1:
        if m < _TRIAL_LIMIT**2 or is_prime(m):
            out[m] = out.get(m, 0) + 1
        else:
            _split_large(m, out, random.Random(m))
    return FactoredInteger(n, tuple(sorted(out.items())))


def primes_upto(n: int) -> np.ndarray:
    if n < 2:
        return np.zeros(0, dtype=np.int64)
    sieve = np.ones(n + 1, dtype=bool)
    sieve[:2] = False
    for p in range(2, math.isqrt(n) + 1):
        if sieve[p]:
            sieve[p * p :: p] = False
    return np.flatnonzero(sieve).astype(np.int64)


def jacobi(a: int, q: int) -> int:
    """Jacobi symbol (a/q) for odd q >= 1, by reciprocity."""
    if q < 1 or q % 2 == 0:
        raise ValueError("jacobi needs an odd positive modulus")
    a %= q
    sign = 1
    while a:
        while a % 2 == 0:
            a //= 2
            if q % 8 in (3, 5):
                sign = -sign
        a, q = q, a
        if a % 4 == 3 and q % 4 == 3:
            sign = -sign
        a %= q
    return sign if q == 1 else 0


def _check_coprime(q: int, a: int) -> None:
    if q < 1:
        raise ValueError("modulus must be positive")
    if math.gcd(a, q) != 1:
        raise ValueError(f"gcd({a}, {q}) != 1")


def gauss_sum_direct(k: int, q: int, a: int) -> GaussSumValue:
    """S_k(q, a) by summing q terms; r^k is reduced mod q before the exponential."""
    if k not in (2, 4):
        raise ValueError("k must be 2 or 4")
    _check_coprime(q, a)
    return GaussSumValue(k, q, a, kernels.gauss_sum_direct(k, q, a), GaussMethod.DIRECT)


_E8 = tuple(cmath.exp(2j * math.pi * j / 8) for j in range(8))
_I_POW = (1, 1j, -1, -1j)


def _s2_two_power(m: int, a: int) -> complex:
    # a odd
    if m == 0:
        return 1.0
    if m == 1:
        return 0.0
    if m % 2 == 0:
        return 2 ** (m // 2) * (1 + _I_POW[a % 4])
    return 2 ** ((m + 1) // 2) * _E8[a % 8]


def _s2_odd_unit(q: int) -> complex:
    # S_2(q, 1) for odd q
    root = math.sqrt(q)
    return root if q % 4 == 1 else 1j * root


def gauss_sum_s2_closed(q: int, a: int) -> GaussSumValue:
    """S_2(q, a) without summation.

    q = 2^m * u with u odd; a is split as a = a1*u + a2*2^m (mod q) so that
    S_2(q, a) = S_2(2^m, a1) * S_2(u, a2), and each factor has an explicit value.
    """
    _check_coprime(q, a)
    m = valuation(q, 2)
    two = 1 << m
    u = q >> m
    a1 = a * pow(u, -1, two) % two if two > 1 else 1
    a2 = a * pow(two, -1, u) % u if u > 1 else 1
    a1 = a1 or two
    a2 = a2 or u
    odd = jacobi(a2, u) * _s2_odd_unit(u) if u > 1 else 1.0
    val = complex(_s2_two_power(m, a1) * odd)
    return GaussSumValue(2, q, a, val, GaussMethod.CLOSED_FORM)


@lru_cache(maxsize=4096)
def _legendre_table(p: int) -> np.ndarray:
    chi = -np.ones(p, dtype=np.int8)
    r = np.arange(1, p, dtype=np.int64)
    chi[(r * r) % p] = 1
    chi[0] = 0
    return chi


def gauss_sum_s2_closed_table(q: int) -> np.ndarray:
    """Closed-form S_2(q, a) for every residue a mod q; zero where gcd(a, q) > 1."""
    a = np.arange(q, dtype=np.int64)
    out = np.zeros(q, dtype=np.complex128)
    coprime = np.gcd(a, q) == 1
    if q == 1:
        out[0] = 1.0
        return out
    m = valuation(q, 2)
    two = 1 << m
    u = q >> m
    ac = a[coprime]
    if two > 1:
        a1 = ac * pow(u, -1, two) % two
        if m == 1:
            two_val = np.zeros(ac.shape, dtype=np.complex128)
        elif m % 2 == 0:
            two_val = 2 ** (m // 2) * (1 + np.array(_I_POW)[a1 % 4])
        else:
            two_val = 2 ** ((m + 1) // 2) * np.array(_E8)[a1 % 8]
    else:
        two_val = np.ones(ac.shape, dtype=np.complex128)
    if u > 1:
        a2 = ac * pow(two, -1, u) % u
        sym = np.ones(ac.shape, dtype=np.int64)
        for p, k in factorize(u):
            if k % 2:
                sym *= _legendre_table(p)[a2 % p]
        odd_val = sym * _s2_odd_unit(u)
    else:
        odd_val = 1.0
    out[coprime] = two_val * odd_val
    return out


def weight_w(k: int, q: int) -> float:
    """Multiplicative weight w_k(q); on p^(uk+v), 1 <= v <= k, it is k p^(-u-1/2) if v == 1 else p^(-u-1)."""
    if k not in (2, 4):
        raise ValueError("k must be 2 or 4")
    if q < 1:
        raise ValueError("q must be positive")
    w = 1.0
    for p, ex in factorize(q):
        u, v = divmod(ex - 1, k)
        v += 1
        w *= k * p ** (-u - 0.5) if v == 1 else p ** (-u - 1.0)
    return w
