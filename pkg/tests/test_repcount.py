import struct
import zlib

import numpy as np
import pytest

import oracles
from waringlab.errors import CapacityError, IntegrityError
from waringlab.repcount import (
    MAGIC,
    RepTable,
    brute_force_count,
    build_biquadrate_table,
    build_two_square_table,
    read_rep_table,
    sieve_blocks,
    sieve_representations,
    write_rep_blocks,
    write_rep_table,
)


def test_two_square_examples():
    assert build_two_square_table(2).counts[2] == 1
    assert build_two_square_table(5).counts[5] == 2
    assert build_two_square_table(50).counts[50] == 3


def test_two_square_invariants():
    c = build_two_square_table(10**4).counts
    doubles = {2 * x * x for x in range(1, 100)}
    for m in range(1, 10**4 + 1):
        unordered_distinct = sum(1 for x in range(1, 100) for y in range(x + 1, 100) if x * x + y * y == m)
        assert c[m] == 2 * unordered_distinct + (1 if m in doubles else 0)


def test_biquadrate_examples():
    assert build_biquadrate_table(3, 3).counts[3] == 1
    assert build_biquadrate_table(3, 18).counts[18] == 3
    assert build_biquadrate_table(4, 4).counts[4] == 1
    c = build_biquadrate_table(4, 1000).counts
    assert not c[:4].any()
    # 1 + 1 + 16 + 81: multiset {1,1,2,3} has 4!/2! = 12 orderings
    assert c[99] == 12


def test_spot_values():
    t3 = sieve_representations(3, 100)
    t4 = sieve_representations(4, 100)
    assert (t3[4], t3[5], t3[8]) == (0, 1, 2)
    assert (t4[6], t4[20], t4[7]) == (1, 0, 0)


@pytest.mark.parametrize("s", [3, 4])
def test_brute_force_examples(s):
    assert brute_force_count(3, 5) == 1 and brute_force_count(3, 8) == 2 and brute_force_count(4, 7) == 0
    t = sieve_representations(s, 1500)
    assert all(t[n] == brute_force_count(s, n) for n in range(1, 1501))


@pytest.mark.parametrize("s", [3, 4])
def test_support_starts_at_s_plus_2(s):
    t = sieve_representations(s, 2000)
    first = int(np.flatnonzero(t.counts)[0])
    assert first == s + 2


@pytest.mark.parametrize("s", [3, 4])
def test_strategies_agree(s):
    d = sieve_representations(s, 10**5, "direct")
    n = sieve_representations(s, 10**5, "ntt")
    st = sieve_representations(s, 10**5, "stream")
    assert d == n == st


@pytest.mark.parametrize("s", [3, 4])
def test_blocks_with_small_block_size(s):
    full = sieve_representations(s, 20000, "direct").counts
    got = np.concatenate([b for _, b in sieve_blocks(s, 20000, block=1024)])
    assert np.array_equal(got, full)


@pytest.mark.parametrize("s", [3, 4])
def test_mass_identity(s):
    t = sieve_representations(s, 10**4)
    assert int(t.counts.sum()) == oracles.representation_mass(s, 10**4)


def test_counts_intrinsic_to_n():
    small = sieve_representations(4, 3000)
    big = sieve_representations(4, 50000)
    assert np.array_equal(small.counts, big.counts[:3001])


def test_capacity_and_argument_errors():
    with pytest.raises(ValueError):
        sieve_representations(5, 100)
    with pytest.raises(CapacityError):
        sieve_representations(3, 10**7 + 1, "direct")
    with pytest.raises(CapacityError):
        sieve_representations(3, 10**8 + 1)
    with pytest.raises(ValueError):
        sieve_representations(3, 100, "fft")


def test_file_round_trip(tmp_path):
    t = sieve_representations(3, 5000)
    path = tmp_path / "r3.bin"
    write_rep_table(t, path)
    raw = path.read_bytes()
    assert raw[:4] == MAGIC
    assert struct.unpack_from("<HHQ", raw, 4) == (1, 3, 5000)
    assert len(raw) == 16 + 4 * 5000 + 4
    payload = raw[16:-4]
    assert struct.unpack("<I", raw[-4:])[0] == zlib.crc32(payload)
    assert np.array_equal(np.frombuffer(payload, "<u4"), t.values())
    assert read_rep_table(path) == t


def test_streamed_file_matches_dense(tmp_path):
    a, b = tmp_path / "a.bin", tmp_path / "b.bin"
    write_rep_table(sieve_representations(4, 30000), a)
    write_rep_blocks(4, 30000, sieve_blocks(4, 30000, block=4096), b)
    assert a.read_bytes() == b.read_bytes()


def test_corruption_detected(tmp_path):
    path = tmp_path / "t.bin"
    sieve_representations(4, 1000).save(path)
    raw = bytearray(path.read_bytes())
    raw[100] ^= 1
    path.write_bytes(bytes(raw))
    with pytest.raises(IntegrityError, match="CRC"):
        read_rep_table(path)
    path.write_bytes(b"XXXX" + bytes(raw[4:]))
    with pytest.raises(IntegrityError, match="magic"):
        read_rep_table(path)
    path.write_bytes(bytes(raw[:50]))
    with pytest.raises(IntegrityError):
        read_rep_table(path)


def test_u32_cell_overflow(tmp_path):
    counts = np.zeros(11, dtype=np.int64)
    counts[5] = 2**32
    with pytest.raises(CapacityError):
        write_rep_table(RepTable(3, 10, counts), tmp_path / "x.bin")
