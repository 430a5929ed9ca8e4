"""Bit-packed kernels against plain-integer and plain-array references."""
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qcadc import ca, packed, rng
from oracles import rotate_int


def _random_rows(trials, n, seed):
    gen = np.random.default_rng(seed)
    return gen.integers(0, 2, size=(trials, n), dtype=np.uint8)


def test_pack_unpack_roundtrip():
    for n in (1, 7, 63, 64, 65, 130, 513):
        rows = _random_rows(5, n, n)
        assert np.array_equal(packed.unpack_bits(packed.pack_bits(rows), n), rows)


def test_popcount_matches_sum():
    rows = _random_rows(20, 300, 3)
    assert np.array_equal(packed.popcount(packed.pack_bits(rows)),
                          rows.sum(axis=1, dtype=np.int64))


@settings(max_examples=200, deadline=None)
@given(n=st.integers(1, 200), k=st.integers(-3, 300), seed=st.integers(0, 10**6))
def test_rotate_matches_integer_rotation(n, k, seed):
    gen = np.random.default_rng(seed)
    bits = gen.integers(0, 2, size=(1, n), dtype=np.uint8)
    value = sum(int(b) << i for i, b in enumerate(bits[0]))
    rotated = packed.rotate(packed.pack_bits(bits), k, n)
    expected = rotate_int(value, k, n)
    got = sum(int(b) << i for i, b in enumerate(packed.unpack_bits(rotated, n)[0]))
    assert got == expected


@pytest.mark.parametrize("code", [232, 184, 30, 110, 0, 255])
@pytest.mark.parametrize("n", [3, 12, 64, 65, 129])
def test_packed_elementary_step_matches_reference(code, n):
    rule = ca.rule_from_wolfram(code)
    rows = _random_rows(8, n, code * 1000 + n)
    stepped = packed.step_elementary(packed.pack_bits(rows), n,
                                     np.array(rule.outputs, dtype=np.uint8))
    got = packed.unpack_bits(stepped, n)
    for row, out in zip(rows, got):
        expect = ca.step_elementary(ca.BitConfig(row), rule)
        assert np.array_equal(out, expect.cells)


@pytest.mark.parametrize("m", [3, 6, 32, 64, 70])
def test_packed_tlv_step_matches_reference(m):
    uppers = _random_rows(6, m, m)
    lowers = _random_rows(6, m, m + 1)
    new_u, new_l = packed.step_tlv(packed.pack_bits(uppers), packed.pack_bits(lowers), m)
    got_u = packed.unpack_bits(new_u, m)
    got_l = packed.unpack_bits(new_l, m)
    for i in range(uppers.shape[0]):
        cfg = ca.TlvConfig(ca.BitConfig(uppers[i]), ca.BitConfig(lowers[i]))
        nxt = ca.step_tlv(cfg)
        assert np.array_equal(got_u[i], nxt.upper.cells)
        assert np.array_equal(got_l[i], nxt.lower.cells)


def test_bernoulli_matrix_deterministic_and_batch_independent():
    trials = np.arange(10)
    full = rng.bernoulli_matrix(42, trials, 7, 33, 0.3)
    again = rng.bernoulli_matrix(42, trials, 7, 33, 0.3)
    assert np.array_equal(full, again)
    subset = rng.bernoulli_matrix(42, trials[3:6], 7, 33, 0.3)
    assert np.array_equal(subset, full[3:6])
    other_step = rng.bernoulli_matrix(42, trials, 8, 33, 0.3)
    assert not np.array_equal(full, other_step)


def test_bernoulli_matrix_edge_probabilities():
    trials = np.arange(4)
    assert not rng.bernoulli_matrix(1, trials, 0, 50, 0.0).any()
    assert rng.bernoulli_matrix(1, trials, 0, 50, 1.0).all()


def test_bernoulli_count_within_binomial_bounds():
    # one step on 12000 cells at p = 1/6: count within 5 sigma of 2000
    flips = rng.bernoulli_matrix(9, np.array([0]), 1, 12000, 1 / 6)
    count = int(flips.sum())
    sigma = np.sqrt(12000 * (1 / 6) * (5 / 6))
    assert abs(count - 2000) < 5 * sigma
