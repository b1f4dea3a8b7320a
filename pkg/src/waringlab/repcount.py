"""Exact representation counts R_s(n) = #{n = x1^2 + x2^2 + y1^4 + ... + ys^4}.

All variables are positive integers and representations are ordered.  For
n <= X every solution already has x_i <= X^(1/2) and y_j <= X^(1/4), so the
count of n does not depend on the table size it was sieved with.
"""
from __future__ import annotations

import math
import struct
import zlib
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import kernels
from .errors import CapacityError, IntegrityError

MAGIC = b"WLAB"
FORMAT_VERSION = 1
_HEADER = struct.Struct("<4sHHQ")
_CRC = struct.Struct("<I")

UINT32_MAX = 2**32 - 1
DENSE_LIMIT = 10**7
TABLE_LIMIT = 10**8
STREAM_BLOCK = 1 << 22


def _check_s(s: int) -> None:
    if s not in (3, 4):
        raise ValueError("s must be 3 or 4")


def _check_xmax(x_max: int, limit: int) -> None:
    if x_max < 1:
        raise ValueError("x_max must be positive")
    if x_max > limit:
        raise CapacityError(f"x_max={x_max} exceeds the supported limit {limit}")


@dataclass(frozen=True)
class TwoSquareTable:
    x_max: int
    counts: np.ndarray  # uint32, index m = 0..x_max


@dataclass(frozen=True)
class BiquadrateSumTable:
    s: int
    x_max: int
    counts: np.ndarray  # uint32, index t = 0..x_max


@dataclass(frozen=True, eq=False)
class RepTable:
    """R_s(n) for n = 0..x_max (entry 0 is always zero)."""

    s: int
    x_max: int
    counts: np.ndarray  # int64

    def __getitem__(self, n):
        return self.counts[n]

    def __len__(self):
        return self.x_max

    def __eq__(self, other):
        if not isinstance(other, RepTable):
            return NotImplemented
        return (self.s, self.x_max) == (other.s, other.x_max) and np.array_equal(
            self.counts, other.counts
        )

    def values(self) -> np.ndarray:
        """Counts for n = 1..x_max."""
        return self.counts[1:]

    def save(self, path) -> None:
        write_rep_table(self, path)


def build_two_square_table(x_max: int) -> TwoSquareTable:
    _check_xmax(x_max, TABLE_LIMIT)
    return TwoSquareTable(x_max, kernels.two_square_counts(x_max))


def build_biquadrate_table(s: int, x_max: int) -> BiquadrateSumTable:
    _check_s(s)
    _check_xmax(x_max, TABLE_LIMIT)
    return BiquadrateSumTable(s, x_max, kernels.biquadrate_counts(s, x_max))


def _mass_bound(two: np.ndarray, bq: np.ndarray) -> int:
    return int(two.sum(dtype=np.int64)) * int(bq.sum(dtype=np.int64))


def sieve_representations(s: int, x_max: int, strategy: str = "auto") -> RepTable:
    """R_s(n) for every n <= x_max.

    strategy: "direct" adds a scaled, shifted copy of the two-square table for
    every biquadrate-sum value; "ntt" convolves the two tables exactly with a
    three-prime number-theoretic transform; "stream" runs the NTT blockwise;
    "auto" picks direct up to 2^20, ntt up to 10^7, stream above.
    """
    _check_s(s)
    if strategy == "auto":
        strategy = "direct" if x_max <= 1 << 20 else ("ntt" if x_max <= DENSE_LIMIT else "stream")
    if strategy == "stream":
        _check_xmax(x_max, TABLE_LIMIT)
        counts = np.zeros(x_max + 1, dtype=np.int64)
        for lo, block in sieve_blocks(s, x_max):
            counts[lo : lo + block.shape[0]] = block
        return RepTable(s, x_max, counts)
    _check_xmax(x_max, DENSE_LIMIT)
    two = kernels.two_square_counts(x_max)
    bq = kernels.biquadrate_counts(s, x_max)
    if _mass_bound(two, bq) >= 2**63:
        raise CapacityError("representation counts could overflow 64-bit accumulators")
    if strategy == "direct":
        counts = kernels.accumulate_shifted(two, bq, x_max)
    elif strategy == "ntt":
        counts = kernels.ntt_convolve(two, bq, x_max + 1)
    else:
        raise ValueError(f"unknown strategy {strategy!r}")
    counts = np.asarray(counts, dtype=np.int64)
    if counts.min(initial=0) < 0:
        raise IntegrityError("negative representation count (overflow)")
    return RepTable(s, x_max, counts)


def sieve_blocks(s: int, x_max: int, block: int = STREAM_BLOCK):
    """Yield (start, counts) for consecutive n-blocks [start, start + block).

    Block J of the output is the sum over I <= J of the convolution of input
    blocks I (biquadrate sums) and J - I (two-square sums), so only a few
    block-sized buffers are live at a time besides the two input tables.
    """
    _check_s(s)
    _check_xmax(x_max, TABLE_LIMIT)
    two = kernels.two_square_counts(x_max)
    bq = kernels.biquadrate_counts(s, x_max)
    n_blocks = (x_max + block) // block
    for j in range(n_blocks):
        lo = j * block
        hi = min(lo + block, x_max + 1)
        acc = np.zeros(hi - lo, dtype=np.int64)
        for i in range(j + 1):
            b_lo = i * block
            t_part = bq[b_lo : min(b_lo + block, hi)]
            if not t_part.any():
                continue
            # contributions t + m in [lo, hi) with t in block i need m in (lo - b_lo - block, hi - b_lo)
            m_lo = max(0, lo - b_lo - block + 1)
            m_hi = hi - b_lo
            m_part = two[m_lo:m_hi]
            conv = kernels.ntt_convolve(t_part, m_part, t_part.shape[0] + m_part.shape[0] - 1)
            # conv index c corresponds to n = b_lo + m_lo + c
            off = b_lo + m_lo
            c_lo = lo - off
            piece = conv[c_lo : c_lo + (hi - lo)]
            acc[: piece.shape[0]] += piece
        yield lo, acc


def brute_force_count(s: int, n: int) -> int:
    """R_s(n) by plain enumeration; shares nothing with the sieve."""
    _check_s(s)
    if n < 1:
        return 0
    r2_cache: dict[int, int] = {}

    def r2(m: int) -> int:
        if m not in r2_cache:
            c = 0
            x = 1
            while x * x < m:
                rest = m - x * x
                y = math.isqrt(rest)
                if y * y == rest:
                    c += 1
                x += 1
            r2_cache[m] = c
        return r2_cache[m]

    def walk(depth: int, remaining: int) -> int:
        if depth == s:
            return r2(remaining)
        total = 0
        y = 1
        while y**4 <= remaining - 2 - (s - depth - 1):
            total += walk(depth + 1, remaining - y**4)
            y += 1
        return total

    return walk(0, n)


def write_rep_table(table: RepTable, path) -> None:
    vals = table.values()
    if vals.size and int(vals.max()) > UINT32_MAX:
        raise CapacityError("count exceeds the u32 cell width of the RepTable format")
    payload = vals.astype("<u4").tobytes()
    with open(Path(path), "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, FORMAT_VERSION, table.s, table.x_max))
        fh.write(payload)
        fh.write(_CRC.pack(zlib.crc32(payload) & 0xFFFFFFFF))


def write_rep_blocks(s: int, x_max: int, blocks, path) -> None:
    """Stream (start, counts) blocks to a RepTable file without holding the whole table."""
    crc = 0
    with open(Path(path), "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, FORMAT_VERSION, s, x_max))
        for lo, block in blocks:
            if lo == 0:
                block = block[1:]
            if block.size and int(block.max()) > UINT32_MAX:
                raise CapacityError("count exceeds the u32 cell width of the RepTable format")
            chunk = block.astype("<u4").tobytes()
            crc = zlib.crc32(chunk, crc)
            fh.write(chunk)
        fh.write(_CRC.pack(crc & 0xFFFFFFFF))


def read_rep_table(path) -> RepTable:
    data = Path(path).read_bytes()
    if len(data) < _HEADER.size + _CRC.size:
        raise IntegrityError("file too short for a RepTable")
    magic, version, s, x_max = _HEADER.unpack_from(data)
    if magic != MAGIC:
        raise IntegrityError(f"bad magic {magic!r}")
    if version != FORMAT_VERSION:
        raise IntegrityError(f"unsupported RepTable version {version}")
    payload = data[_HEADER.size : len(data) - _CRC.size]
    if len(payload) != 4 * x_max:
        raise IntegrityError("payload length does not match x_max")
    (crc,) = _CRC.unpack_from(data, len(data) - _CRC.size)
    if zlib.crc32(payload) & 0xFFFFFFFF != crc:
        raise IntegrityError("CRC32 mismatch")
    counts = np.zeros(x_max + 1, dtype=np.int64)
    counts[1:] = np.frombuffer(payload, dtype="<u4")
    return RepTable(s, x_max, counts)
