import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wimaxsim.modem import (
    N_DATA,
    PILOT_BINS,
    assemble_frame,
    constellation,
    demap_soft,
    extract_data,
    map_bits,
    ofdm_demodulate,
    ofdm_modulate,
    subcarrier_layout,
)
from wimaxsim.params import GUARD_RATIOS, Modulation, PrimitiveParams, derive_params

SQUARE = [Modulation.QPSK, Modulation.QAM16, Modulation.QAM64]


@pytest.mark.parametrize("mod", list(Modulation))
def test_unit_average_power(mod):
    c = constellation(mod)
    assert np.mean(np.abs(c.points) ** 2) == pytest.approx(1.0, abs=1e-12)
    assert len(set(np.round(c.points, 12))) == c.points.size


@pytest.mark.parametrize("mod", list(Modulation))
def test_gray_neighbours_differ_in_one_bit(mod):
    c = constellation(mod)
    step = 2 * c.normalization
    pairs = 0
    for a, b in itertools.combinations(range(c.points.size), 2):
        if abs(abs(c.points[a] - c.points[b]) - step) < 1e-9:
            pairs += 1
            assert bin(a ^ b).count("1") == 1
    side = int(np.sqrt(c.points.size)) if mod is not Modulation.BPSK else 2
    expected = 1 if mod is Modulation.BPSK else 2 * side * (side - 1)
    assert pairs == expected


def test_known_points():
    assert constellation(Modulation.BPSK).points.tolist() == [-1, 1]
    q = constellation(Modulation.QPSK).points * np.sqrt(2)
    assert np.allclose(q, [-1 - 1j, -1 + 1j, 1 - 1j, 1 + 1j])
    c16 = constellation(Modulation.QAM16).points * np.sqrt(10)
    # bits 0000 -> -3-3j, 1011 -> 3+1j
    assert c16[0b0000] == -3 - 3j
    assert c16[0b1011] == 3 + 1j


def brute_force_llr(y, cmap, nv):
    labels = cmap.labels_bits
    d = np.abs(y[:, None] - cmap.points[None]) ** 2
    out = []
    for b in range(cmap.bits_per_symbol):
        one = labels[:, b] == 1
        out.append((d[:, ~one].min(1) - d[:, one].min(1)) / nv)
    return np.stack(out, axis=1).ravel()


@settings(deadline=None)
@given(st.sampled_from(list(Modulation)), st.integers(0, 2**32 - 1),
       st.floats(0.01, 3.0))
def test_demapper_matches_brute_force(mod, seed, nv):
    cmap = constellation(mod)
    rng = np.random.default_rng(seed)
    y = rng.normal(size=40) + 1j * rng.normal(size=40)
    assert np.allclose(demap_soft(y, cmap, nv), brute_force_llr(y, cmap, nv), atol=1e-9)


@pytest.mark.parametrize("mod", list(Modulation))
def test_hard_decisions_recover_bits(mod):
    cmap = constellation(mod)
    bits = np.random.default_rng(1).integers(0, 2, 60 * cmap.bits_per_symbol)
    llr = demap_soft(map_bits(bits, cmap), cmap, 1.0)
    assert np.array_equal((llr > 0).astype(int), bits)


def test_demapper_rejects_bad_noise():
    with pytest.raises(ValueError):
        demap_soft(np.zeros(4), constellation(Modulation.QPSK), 0.0)


def test_subcarrier_layout():
    data, pilots = subcarrier_layout()
    assert data.size == N_DATA and pilots.size == 8
    offsets = np.concatenate([data, pilots]) - 128
    assert sorted(offsets) == [k for k in range(-100, 101) if k]
    assert tuple(pilots - 128) == PILOT_BINS


def test_frame_guards_and_dc_are_zero():
    frame = assemble_frame(np.ones(N_DATA))
    assert frame[128] == 0
    assert not frame[:28].any() and not frame[229:].any()
    assert np.count_nonzero(frame) == 200
    assert np.array_equal(extract_data(frame), np.ones(N_DATA))


def test_single_subcarrier_is_a_complex_exponential(params):
    frame = np.zeros(256, complex)
    frame[128 + 5] = 1
    useful = ofdm_modulate(frame, params)[params.cp_len:]
    n = np.arange(256)
    assert np.allclose(useful, np.exp(2j * np.pi * 5 * n / 256) / 16)


def test_parseval(params):
    rng = np.random.default_rng(2)
    frame = assemble_frame(rng.normal(size=N_DATA) + 1j * rng.normal(size=N_DATA))
    useful = ofdm_modulate(frame, params)[params.cp_len:]
    assert np.sum(np.abs(useful) ** 2) == pytest.approx(np.sum(np.abs(frame) ** 2))


@pytest.mark.parametrize("g", GUARD_RATIOS)
def test_cyclic_prefix_and_round_trip(g):
    d = derive_params(PrimitiveParams(guard_ratio=Fraction(g)))
    rng = np.random.default_rng(3)
    frames = assemble_frame(rng.normal(size=(3, N_DATA)) + 1j * rng.normal(size=(3, N_DATA)))
    tx = ofdm_modulate(frames, d)
    assert tx.shape == (3, 256 + d.cp_len)
    assert np.array_equal(tx[:, :d.cp_len], tx[:, -d.cp_len:])
    assert np.allclose(ofdm_demodulate(tx, d), frames, atol=1e-12)


def test_bad_lengths(params):
    with pytest.raises(ValueError):
        assemble_frame(np.ones(191))
    with pytest.raises(ValueError):
        ofdm_demodulate(np.ones(256), params)
    with pytest.raises(ValueError):
        map_bits(np.ones(5), constellation(Modulation.QPSK))
