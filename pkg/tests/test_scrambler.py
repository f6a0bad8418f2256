import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from wimaxsim.scrambler import (
    PERIOD,
    ScramblerState,
    bits_to_bytes,
    bytes_to_bits,
    descramble,
    prbs,
    scramble,
)

# Register of stages 1..15 all set to one, output stage14 ^ stage15, clocked by hand.
ALL_ONES_FIRST_40 = "0000000000000010000000000000110000000000"


def lfsr_oracle(seed, n):
    stages = [(seed >> i) & 1 for i in range(15)]
    out = []
    for _ in range(n):
        b = stages[13] ^ stages[14]
        out.append(b)
        stages = [b] + stages[:14]
    return np.array(out, dtype=np.uint8)


def test_first_bits_from_all_ones():
    assert "".join(map(str, prbs(40))) == ALL_ONES_FIRST_40


@given(st.integers(1, PERIOD), st.integers(0, 300))
def test_matches_register_oracle(seed, n):
    assert np.array_equal(prbs(n, seed), lfsr_oracle(seed, n))


def test_state_step_agrees_with_prbs():
    state = ScramblerState.from_seed(0b101010101010101)
    bits = []
    for _ in range(50):
        b, state = state.step()
        bits.append(b)
    assert np.array_equal(bits, prbs(50, 0b101010101010101))


def test_maximal_period():
    seq = prbs(PERIOD + 100)
    assert np.array_equal(seq[PERIOD:], seq[:100])
    # a maximal-length sequence has 2^14 ones and no shorter period
    assert int(seq[:PERIOD].sum()) == 2**14
    for d in (3, 7, 31, 151, 4681):
        assert not np.array_equal(seq[d:d + 500], seq[:500])


def test_zero_seed_rejected():
    with pytest.raises(ValueError):
        prbs(10, 0)
    with pytest.raises(ValueError):
        prbs(10, 1 << 15)


@given(st.lists(st.integers(0, 1), max_size=400), st.integers(1, PERIOD))
def test_descramble_inverts(bits, seed):
    bits = np.array(bits, dtype=np.uint8)
    assert np.array_equal(descramble(scramble(bits, seed), seed), bits)


def test_rows_share_one_sequence():
    bits = np.zeros((3, 40), dtype=np.uint8)
    assert np.array_equal(scramble(bits).ravel(), prbs(120))


def test_byte_packing_msb_first():
    assert np.array_equal(bytes_to_bits([0x80, 0x01]), [1, 0, 0, 0, 0, 0, 0, 0,
                                                       0, 0, 0, 0, 0, 0, 0, 1])
    data = np.arange(256, dtype=np.uint8)
    assert np.array_equal(bits_to_bytes(bytes_to_bits(data)), data)
