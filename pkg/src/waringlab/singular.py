"""The singular series for two squares and s biquadrates, by two routes.

``qsum`` truncates the double sum over moduli q and residues a directly.
``euler`` multiplies p-adic solution densities, each obtained by counting
solutions of x1^2 + x2^2 + y1^4 + ... + ys^4 = n modulo p^h.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path

import numpy as np
from scipy.integrate import quad

from .arith import e, gauss_sum_direct, gauss_sum_s2_closed, gauss_sum_s2_closed_table, primes_upto, valuation
from .errors import IntegrityError, NonStabilizationError
from . import kernels

C_CONSTANTS = {3: 2.0 / 3.0 * math.sqrt(2.0), 4: math.pi / 4.0}
GAMMA54_POW4 = 0.67496978931117301  # Gamma(5/4)^4

IMAG_TOL = 1e-8
STABLE_RTOL = 1e-6
DEFAULT_QMAX = 10_000
SCAN_QMAX = 2048
# moduli above MODULUS_CAP are never enumerated; above CONFIRM_CAP a level
# certified by Hensel lifting is not re-checked against the next level.
MODULUS_CAP = 1 << 22
CONFIRM_CAP = 1 << 16
CROSSCHECK_PMAX = 50


def check_gamma_constant(tol: float = 1e-12) -> float:
    """Compare GAMMA54_POW4 with a quadrature of the Euler integral; returns the gap."""
    # Gamma(5/4) = int_0^inf t^(1/4) e^-t dt = int_0^inf 4 u^4 e^(-u^4) du
    val, _ = quad(lambda u: 4.0 * u**4 * math.exp(-(u**4)), 0.0, 8.0, epsabs=1e-15, epsrel=1e-13, limit=200)
    gap = abs(val**4 - GAMMA54_POW4)
    if gap > tol:
        raise IntegrityError(f"Gamma(5/4)^4 constant off by {gap:.3e}")
    return gap


def _check_s(s: int) -> None:
    if s not in (3, 4):
        raise ValueError("s must be 3 or 4")


@dataclass(frozen=True)
class LocalFactor:
    p: int
    sigma_p: float
    h_used: int
    stabilized: bool
    levels: tuple[float, ...] = ()
    certified_level: int = 0
    partial_sum: float | None = None


@dataclass(frozen=True)
class SingularSeriesResult:
    s: int
    n: int
    value: float
    method: str  # "qsum" | "euler"
    params: dict
    tail_estimate: float
    local_factors: tuple[LocalFactor, ...] | None = None

    def param_string(self) -> str:
        return ";".join(f"{k}={v}" for k, v in self.params.items())


@dataclass(frozen=True)
class MainTermResult:
    s: int
    n: int
    singular_series: SingularSeriesResult
    main_term: float
    constant_c: float
    gamma54_pow4: float = GAMMA54_POW4


# ---------------------------------------------------------------- Gauss tables


def _cache_dir() -> Path | None:
    d = os.environ.get("WLAB_CACHE_DIR")
    if not d:
        return None
    path = Path(d)
    path.mkdir(parents=True, exist_ok=True)
    return path


TABLE_CACHE_QMAX = 4096


def s4_table(q: int) -> np.ndarray:
    """S_4(q, a) for a = 0..q-1, summed over residues grouped by the value of r^4 mod q."""
    return _s4_cached(q) if q <= TABLE_CACHE_QMAX else _s4_compute(q)


@lru_cache(maxsize=None)
def _s4_cached(q: int) -> np.ndarray:
    return _s4_compute(q)


def _s4_compute(q: int) -> np.ndarray:
    cache = _cache_dir()
    if cache is not None:
        f = cache / f"s4_{q}.npy"
        if f.exists():
            return np.load(f)
    hist = kernels.power_residue_histogram(q, 4).astype(np.float64)
    table = np.fft.ifft(hist) * q
    if cache is not None:
        tmp = cache / f"s4_{q}.{os.getpid()}.tmp.npy"
        np.save(tmp, table)
        os.replace(tmp, cache / f"s4_{q}.npy")
    return table


def a_term_table(s: int, q: int) -> np.ndarray:
    """A(q, r) for every residue r mod q, as a read-only real array."""
    _check_s(s)
    return _a_cached(s, q) if q <= TABLE_CACHE_QMAX else _a_compute(s, q)


@lru_cache(maxsize=None)
def _a_cached(s: int, q: int) -> np.ndarray:
    return _a_compute(s, q)


def _a_compute(s: int, q: int) -> np.ndarray:
    s2 = gauss_sum_s2_closed_table(q)
    g = s2 * s2 * s4_table(q) ** s  # zero off the reduced residues through s2
    vals = np.fft.fft(g) / float(q) ** (2 + s)
    worst = float(np.abs(vals.imag).max())
    if worst > IMAG_TOL:
        raise IntegrityError(f"A({q}, .) has imaginary part {worst:.3e}")
    out = np.ascontiguousarray(vals.real)
    out.setflags(write=False)
    return out


def a_term(s: int, n: int, q: int) -> float:
    """A(q, n) = sum over reduced a mod q of q^(-2-s) S_2(q,a)^2 S_4(q,a)^s e(-na/q).

    Evaluated term by term: closed-form S_2, directly summed S_4.
    """
    _check_s(s)
    if q < 1:
        raise ValueError("q must be positive")
    total = 0j
    for a in range(1, q + 1):
        if math.gcd(a, q) != 1:
            continue
        s2 = gauss_sum_s2_closed(q, a).value
        s4 = gauss_sum_direct(4, q, a).value
        total += s2 * s2 * s4**s * e(-(n * a % q) / q)
    total /= float(q) ** (2 + s)
    if abs(total.imag) > IMAG_TOL:
        raise IntegrityError(f"A({q}, {n}) has imaginary part {total.imag:.3e}")
    return total.real


# ---------------------------------------------------------------- q-sum route


def qsum_many(s: int, ns, q_max: int = SCAN_QMAX, threads: int = 1):
    """Truncated q-sums and tail estimates for many n at once.

    Returns (values, tails).  Each n is summed over q in increasing order and
    threads only split the n axis, so results are identical for any ``threads``.
    """
    _check_s(s)
    if q_max < 1:
        raise ValueError("q_max must be >= 1")
    ns = np.asarray(ns, dtype=np.int64)
    total = np.zeros(ns.shape[0])
    env = np.zeros(ns.shape[0])
    bounds = np.linspace(0, ns.shape[0], max(1, threads) + 1).astype(int)
    spans = [slice(a, b) for a, b in zip(bounds[:-1], bounds[1:]) if b > a]

    def gather(span, table, weight, q):
        vals = table[ns[span] % q]
        total[span] += vals
        np.maximum(env[span], np.abs(vals) * weight, out=env[span])

    pool = ThreadPoolExecutor(max_workers=threads) if threads > 1 and len(spans) > 1 else None
    try:
        for q in range(1, q_max + 1):
            table = a_term_table(s, q)
            weight = float(q) ** (1 + s / 4)
            if pool is None:
                for span in spans:
                    gather(span, table, weight, q)
            else:
                list(pool.map(lambda sp: gather(sp, table, weight, q), spans))
    finally:
        if pool is not None:
            pool.shutdown()
    return total, env * float(q_max) ** (-s / 4)


def singular_series_qsum(s: int, n: int, q_max: int = DEFAULT_QMAX) -> SingularSeriesResult:
    vals, tails = qsum_many(s, [n], q_max)
    return SingularSeriesResult(s, n, float(vals[0]), "qsum", {"q_max": q_max}, float(tails[0]))


# ---------------------------------------------------------------- Euler route


def density_level(s: int, m: int) -> np.ndarray:
    """m^(-(s+1)) * #{solutions mod m} for every right-hand side residue mod m."""
    p2 = np.fft.fft(kernels.power_residue_histogram(m, 2) / m)
    p4 = np.fft.fft(kernels.power_residue_histogram(m, 4) / m)
    dist = np.fft.ifft(p2 * p2 * p4**s)
    return dist.real * m


def certified_level(p: int, n: int) -> int:
    """Hensel level from which the density mod p^h no longer changes.

    Odd p: a solution with a p-unit among the variables lifts uniquely, and
    all-divisible solutions force p^2 | n and descend, so h = v_p(n) + 1.
    p = 2: the quartic derivative 4y^3 costs two extra levels, plus the
    descent; h = v_2(n) + 5 (observed worst case v_2(n) + 4).
    """
    v = valuation(n, p)
    return v + 5 if p == 2 else v + 1


def _default_hcap(p: int, cert: int) -> int:
    return max(8 if p == 2 else 4, cert + 1)


class _LevelCache:
    """Per-prime density arrays, computed on demand."""

    def __init__(self, s: int, p: int):
        self.s, self.p = s, p
        self._levels: dict[int, np.ndarray] = {}

    def affordable(self, h: int) -> bool:
        return self.p**h <= MODULUS_CAP

    def __call__(self, h: int) -> np.ndarray:
        if h not in self._levels:
            self._levels[h] = density_level(self.s, self.p**h)
        return self._levels[h]


def _close(x: float, y: float) -> bool:
    return abs(x - y) <= STABLE_RTOL * max(abs(x), abs(y), 1e-12)


def _local_from_cache(cache: _LevelCache, n: int, h_max: int | None, crosscheck: bool) -> LocalFactor:
    p = cache.p
    cert = certified_level(p, n)
    cap = _default_hcap(p, cert) if h_max is None else h_max
    levels: list[float] = []
    agree = False
    for h in range(1, cap + 1):
        if not cache.affordable(h):
            break
        levels.append(float(cache(h)[n % p**h]))
        agree = len(levels) >= 2 and _close(levels[-1], levels[-2])
        if h >= cert and (agree or p ** (h + 1) > CONFIRM_CAP):
            break
    if not levels:
        raise NonStabilizationError(f"modulus {p} exceeds the enumeration cap")
    h_last = len(levels)
    h_used = h_last
    while h_used > 1 and _close(levels[h_used - 2], levels[-1]):
        h_used -= 1
    stabilized = h_last >= cert and (agree or p ** (h_last + 1) > CONFIRM_CAP)
    partial = None
    if crosscheck:
        partial = float(sum(a_term_table(cache.s, p**j)[n % p**j] for j in range(h_last + 1)))
        if abs(partial - levels[-1]) > STABLE_RTOL * max(1.0, abs(levels[-1])):
            raise IntegrityError(
                f"sigma_{p}({n}): partial sum {partial!r} disagrees with count {levels[-1]!r}"
            )
    return LocalFactor(p, levels[-1], h_used, stabilized, tuple(levels), cert, partial)


def local_density(s: int, n: int, p: int, h_max: int | None = None) -> LocalFactor:
    """sigma_p(n) from solution counts mod p^h, cross-checked against sum_h A(p^h, n).

    ``h_max`` caps the lifting level; None uses max(8, v_2(n)+6) for p = 2 and
    max(4, v_p(n)+2) for odd p.
    """
    _check_s(s)
    if n < 1:
        raise ValueError("n must be positive")
    return _local_from_cache(_LevelCache(s, p), n, h_max, crosscheck=True)


def euler_many(s: int, ns, p_max: int, h_max: int | None = None, crosscheck_pmax: int = CROSSCHECK_PMAX):
    """Euler products for several n sharing the per-prime density tables."""
    _check_s(s)
    if p_max < 2:
        raise ValueError("p_max must be at least 2")
    ns = [int(n) for n in ns]
    if any(n < 1 for n in ns):
        raise ValueError("n must be positive")
    factors: list[list[LocalFactor]] = [[] for _ in ns]
    for p in primes_upto(p_max).tolist():
        cache = _LevelCache(s, p)
        for i, n in enumerate(ns):
            lf = _local_from_cache(cache, n, h_max, crosscheck=p <= crosscheck_pmax)
            if not lf.stabilized:
                raise NonStabilizationError(
                    f"sigma_{p}({n}) did not stabilize (levels {lf.levels})"
                )
            factors[i].append(lf)
    results = []
    for n, lfs in zip(ns, factors):
        value = float(np.prod([lf.sigma_p for lf in lfs]))
        results.append(
            SingularSeriesResult(
                s, n, value, "euler",
                {"p_max": p_max, "h_max": "auto" if h_max is None else h_max},
                _euler_tail(s, n, p_max, lfs, value),
                tuple(lfs),
            )
        )
    return results


def _euler_tail(s: int, n: int, p_max: int, lfs, value: float) -> float:
    expo = 1 + s / 4
    upper = [lf for lf in lfs if lf.p > p_max // 2 and (2 * n) % lf.p]
    if not upper:
        upper = [lf for lf in lfs if (2 * n) % lf.p] or lfs
    c = max(abs(lf.sigma_p - 1) * lf.p**expo for lf in upper)
    # sum_{p > P} p^(-expo) ~ P^(1-expo) / ((expo-1) log P)
    envelope = c * p_max ** (1 - expo) / ((expo - 1) * math.log(max(p_max, 3)))
    return abs(value) * envelope


def singular_series_euler(s: int, n: int, p_max: int = 1000, h_max: int | None = None) -> SingularSeriesResult:
    return euler_many(s, [n], p_max, h_max)[0]


# ---------------------------------------------------------------- main term


def main_term(s: int, n: int, ss: SingularSeriesResult) -> MainTermResult:
    _check_s(s)
    if (ss.s, ss.n) != (s, n):
        raise ValueError("singular series was computed for a different (s, n)")
    c = C_CONSTANTS[s]
    return MainTermResult(s, n, ss, c * GAMMA54_POW4 * ss.value * n ** (s / 4), c)


def main_term_array(s: int, ns, singular) -> np.ndarray:
    ns = np.asarray(ns, dtype=np.float64)
    return C_CONSTANTS[s] * GAMMA54_POW4 * np.asarray(singular) * ns ** (s / 4)
