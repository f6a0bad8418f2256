"""Fast property checks that run from the command line without pytest."""

from __future__ import annotations

import itertools
from typing import Callable

import numpy as np

from ..channel import doppler_psd, ricean_split, shaping_filter
from ..fec import GF256, PUNCTURE_RATES, MOTHER_CODE, cc_encode, puncture, rs_decode, rs_encode
from ..fec.convolutional import pad_to_period
from ..interleaver import build_spec, deinterleave, interleave
from ..modem import assemble_frame, constellation, ofdm_demodulate, ofdm_modulate
from ..params import GUARD_RATIOS, Modulation, PrimitiveParams, derive_params, profile_table
from ..scrambler import PERIOD, prbs, scramble
from .chain import Link

CHECKS: list[tuple[str, Callable[[], None]]] = []


def check(name):
    def register(fn):
        CHECKS.append((name, fn))
        return fn
    return register


@check("GF(256) inverses")
def _gf():
    assert all(GF256.mul(a, GF256.inverse(a)) == 1 for a in range(1, 256))
    assert len({GF256.pow(2, i) for i in range(255)}) == 255


@check("scrambler period and involution")
def _scrambler():
    seq = prbs(2 * PERIOD)
    assert np.array_equal(seq[:PERIOD], seq[PERIOD:])
    bits = np.random.default_rng(0).integers(0, 2, 999, dtype=np.uint8)
    assert np.array_equal(scramble(scramble(bits)), bits)


@check("RS(255,239) corrects 8 symbol errors")
def _rs():
    rng = np.random.default_rng(1)
    for _ in range(20):
        data = rng.integers(0, 256, MOTHER_CODE.k)
        word = rs_encode(data, MOTHER_CODE)
        pos = rng.choice(MOTHER_CODE.n, 8, replace=False)
        word[pos] ^= rng.integers(1, 256, 8).astype(np.uint8)
        decoded, fixed = rs_decode(word, MOTHER_CODE)
        assert np.array_equal(decoded, data) and fixed == 8


@check("punctured free distances 10/6/5/4")
def _dfree():
    msgs = np.array(list(itertools.product((0, 1), repeat=12))[1:], dtype=np.uint8)
    msgs = np.concatenate([msgs, np.zeros((msgs.shape[0], 6), np.uint8)], axis=1)
    for rate in PUNCTURE_RATES.values():
        x, y = cc_encode(pad_to_period(msgs, rate))
        assert puncture(x, y, rate).sum(axis=1).min() == rate.d_free, rate


@check("interleaver inverse")
def _interleaver():
    for n_cpc in (1, 2, 4, 6):
        spec = build_spec(192 * n_cpc, n_cpc)
        eye = np.eye(spec.n_cbps, dtype=np.uint8)
        assert np.array_equal(deinterleave(interleave(eye, spec), spec), eye)


@check("constellations: unit power and Gray adjacency")
def _constellations():
    for mod in Modulation:
        c = constellation(mod)
        assert abs(np.mean(np.abs(c.points) ** 2) - 1) < 1e-12
        step = 2 * c.normalization
        for a, b in itertools.combinations(range(c.points.size), 2):
            if abs(abs(c.points[a] - c.points[b]) - step) < 1e-9:
                assert bin(a ^ b).count("1") == 1


@check("OFDM transform round trip")
def _ofdm():
    rng = np.random.default_rng(2)
    for g in GUARD_RATIOS:
        d = derive_params(PrimitiveParams(guard_ratio=g))
        frame = assemble_frame(rng.standard_normal(192) + 1j * rng.standard_normal(192))
        assert np.allclose(ofdm_demodulate(ofdm_modulate(frame, d), d), frame, atol=1e-10)


@check("Ricean split and Doppler spectrum")
def _channel():
    assert ricean_split(1.0, 4.0) == (0.8, 0.2)
    assert abs(doppler_psd(1.0) - 0.065) < 1e-12
    assert abs(np.sum(shaping_filter() ** 2) - 1) < 1e-9


@check("noiseless chain, all profiles")
def _chain():
    d = derive_params()
    rng = np.random.default_rng(3)
    for prof in profile_table():
        link = Link(prof, d)
        payload = rng.integers(0, 2, (4, link.payload_bits), dtype=np.uint8)
        rx = link.receive(link.transmit(payload), np.ones((4, d.n_fft)), 1e-30)
        assert np.array_equal(rx, payload), prof.name


def run_selftest(echo=print) -> bool:
    ok = True
    for name, fn in CHECKS:
        try:
            fn()
        except Exception as exc:  # report every failing check, not just the first
            ok = False
            echo(f"FAIL  {name}: {exc!r}")
        else:
            echo(f"ok    {name}")
    return ok
