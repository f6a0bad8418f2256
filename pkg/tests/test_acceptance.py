"""Acceptance gate. Each test prints one PASS/FAIL line for its criterion."""

import itertools
import math
import time
from dataclasses import replace

import numpy as np
import pytest

from wimaxsim.channel import SuiTapSpec, doppler_psd, generate_tap, load_channels, ricean_split, \
    shaping_filter
from wimaxsim.channel.fading import scatter_process
from wimaxsim.fec import MOTHER_CODE, PUNCTURE_RATES, cc_encode, puncture, rs_decode_blocks, \
    rs_encode_blocks
from wimaxsim.fec.convolutional import pad_to_period
from wimaxsim.harness import REFERENCE_SNR_AT_1E3, SimConfig, profile_config, run_point, \
    snr_for_ebn0, sweep
from wimaxsim.harness.cli import TABLE5_MIN_FADES
from wimaxsim.harness.table5 import format_table, run_table5
from wimaxsim.interleaver import build_spec, deinterleave, interleave
from wimaxsim.params import profile_table


@pytest.fixture
def report(capsys, request):
    def emit(criterion, ok, detail):
        with capsys.disabled():
            print(f"\n[acceptance] criterion {criterion}: {'PASS' if ok else 'FAIL'} - {detail}")
        assert ok, detail
    return emit


def q_function(x):
    return 0.5 * math.erfc(x / math.sqrt(2))


def test_criterion_1_noiseless_integrity(report, params):
    started = time.perf_counter()
    channels = ["identity"] + [name for name, spec in load_channels().items()
                               if spec.delays_s.max() < float(params.cp_time_s)]
    bad = []
    for prof, channel in itertools.product(profile_table(), channels):
        cfg = SimConfig(profile=prof, channel=channel, max_bits=1_000_000, target_errors=1,
                        batch_symbols=256)
        p = run_point(cfg, 300.0)
        if p.bit_errors or p.bits < 1_000_000:
            bad.append(f"{prof.name}/{channel}: {p.bit_errors} errors in {p.bits}")
    elapsed = time.perf_counter() - started
    ok = not bad and elapsed < 60
    report(1, ok, f"{7 * len(channels)} combinations, {len(channels)} channels, "
                  f"{elapsed:.1f}s" + ("; " + "; ".join(bad) if bad else ""))


def test_criterion_2_awgn_calibration(report):
    started = time.perf_counter()
    cfg = profile_config("bpsk-1/2", uncoded=True, target_errors=1000, batch_symbols=256)
    link = cfg.link()
    rows = []
    ok = True
    for ebn0 in (4, 6, 8):
        p = run_point(cfg, snr_for_ebn0(ebn0, link))
        ref = q_function(math.sqrt(2 * 10 ** (ebn0 / 10)))
        rel = abs(p.ber - ref) / ref
        ok &= rel <= 0.15 and p.bit_errors >= 100
        rows.append(f"{ebn0} dB {p.ber:.3e} vs {ref:.3e} ({rel:.1%})")
    elapsed = time.perf_counter() - started
    report(2, ok and elapsed < 120, "; ".join(rows) + f"; {elapsed:.1f}s")


def test_criterion_3_codec_properties(report):
    started = time.perf_counter()
    rng = np.random.default_rng(2024)
    trials = 1000
    data = rng.integers(0, 256, (trials, MOTHER_CODE.k)).astype(np.uint8)
    words = rs_encode_blocks(data, MOTHER_CODE)
    n_err = rng.integers(0, 9, trials)
    for row, n in zip(words, n_err):
        pos = rng.choice(MOTHER_CODE.n, n, replace=False)
        row[pos] ^= rng.integers(1, 256, n).astype(np.uint8)
    decoded, fixed = rs_decode_blocks(words, MOTHER_CODE)
    rs_ok = np.array_equal(decoded, data) and np.array_equal(fixed, n_err)

    msgs = np.array(list(itertools.product((0, 1), repeat=12))[1:], np.uint8)
    msgs = np.concatenate([msgs, np.zeros((len(msgs), 6), np.uint8)], axis=1)
    dfree = {}
    for rate, spec in PUNCTURE_RATES.items():
        x, y = cc_encode(pad_to_period(msgs, spec))
        dfree[str(rate)] = int(puncture(x, y, spec).sum(axis=1).min())
    cc_ok = list(dfree.values()) == [10, 6, 5, 4]
    elapsed = time.perf_counter() - started
    report(3, rs_ok and cc_ok and elapsed < 120,
           f"RS failures {int(np.count_nonzero(fixed < 0))}/{trials}, d_free {dfree}, {elapsed:.1f}s")


def test_criterion_4_interleaver_identity(report):
    started = time.perf_counter()
    results = {}
    for n_cbps, n_cpc in ((192, 1), (384, 2), (768, 4), (1152, 6)):
        spec = build_spec(n_cbps, n_cpc)
        eye = np.eye(n_cbps, dtype=np.uint8)
        results[n_cbps] = np.array_equal(deinterleave(interleave(eye, spec), spec), eye)
    report(4, all(results.values()), f"{results}, {time.perf_counter() - started:.2f}s")


def test_criterion_5_channel_statistics(report):
    started = time.perf_counter()
    parts = {}
    parts["a"] = (ricean_split(1.0, 4.0) == (0.8, 0.2) and ricean_split(2.0, 0.0) == (0.0, 2.0)
                  and ricean_split(1.0, 1.0) == (0.5, 0.5))

    c = generate_tap(SuiTapSpec(0.0, 0.25, 2.0, 0.4), 100_000, seed=5).coefficients
    power_err = abs(np.mean(np.abs(c) ** 2) / 0.25 - 1)
    parts["b"] = power_err <= 0.03

    seg, worst, leak = 128, 0.0, 0.0
    for oversample in (1, 2, 4):
        x = scatter_process(seg * 4000, shaping_filter(257, 1.0, oversample),
                            np.random.default_rng(oversample))
        w = np.hanning(seg)
        P = np.mean(np.abs(np.fft.fft(x.reshape(-1, seg) * w, axis=1)) ** 2, axis=0) / np.sum(w**2)
        f = np.fft.fftfreq(seg, d=1 / (2 * oversample))
        S = doppler_psd(f)
        S = S / S.mean()
        inband = np.abs(f) <= 0.9
        worst = max(worst, float(np.max(np.abs(P[inband] - S[inband]) / S[inband])))
        if oversample > 1:
            leak = max(leak, float(P[np.abs(f) > 1].sum() / P.sum()))
    parts["c"] = worst < 0.10 and leak < 0.01

    r = np.abs(generate_tap(SuiTapSpec(0.0, 1.0, 0.0, 0.5), 100_000, seed=6).coefficients)
    ratio = np.mean(r) ** 2 / np.mean(r**2)
    parts["d"] = abs(ratio / (math.pi / 4) - 1) <= 0.03
    elapsed = time.perf_counter() - started
    report(5, all(parts.values()) and elapsed < 120,
           f"parts {parts}; power error {power_err:.2%}, periodogram worst {worst:.1%}, "
           f"leakage {leak:.2%}, moment ratio {ratio:.4f}, {elapsed:.1f}s")


def test_criterion_6_table5_trends(report, capsys):
    started = time.perf_counter()
    profiles = profile_table()
    channels = ["sui-1", "sui-2", "sui-3"]
    base = SimConfig(profile=profiles[0], snr_start=0.0, snr_stop=0.0, snr_step=1.0,
                     min_fades=TABLE5_MIN_FADES)
    res = run_table5(base, channels, profiles)
    with capsys.disabled():
        print("\n" + format_table(res))
    rows = {ch: res.row(ch) for ch in channels}
    complete = not res.failures and all(not math.isnan(v) for r in rows.values() for v in r)
    monotone = all(all(a < b for a, b in zip(r, r[1:])) for r in rows.values())
    ordered = all(rows["sui-1"][i] < rows["sui-2"][i] < rows["sui-3"][i]
                  for i in range(len(profiles)))
    deltas = [s - p for ch in channels for s, p in zip(rows[ch], REFERENCE_SNR_AT_1E3[ch])]
    worst = max(abs(d) for d in deltas)
    close = worst <= 2.5
    elapsed = time.perf_counter() - started
    report(6, complete and monotone and ordered and close,
           f"(i) profile ordering {'ok' if monotone else 'violated'}, "
           f"(ii) channel ordering {'ok' if ordered else 'violated'}, "
           f"(iii) worst |delta| {worst:.1f} dB (limit 2.5), "
           f"within 2.5 dB: {sum(abs(d) <= 2.5 for d in deltas)}/{len(deltas)}, "
           f"{elapsed / 60:.1f} min")


def test_criterion_7_determinism(report, tmp_path):
    cases = {
        "awgn-uncoded": profile_config("bpsk-1/2", uncoded=True, snr_start=4, snr_stop=8,
                                       snr_step=2, target_errors=200, master_seed=7),
        "sui-3-coded": profile_config("16qam-1/2", channel="sui-3", snr_start=16, snr_stop=22,
                                      snr_step=3, target_errors=100, min_fades=2000,
                                      master_seed=7),
    }
    same = {}
    for name, cfg in cases.items():
        blobs = []
        for attempt in range(2):
            path = tmp_path / f"{name}-{attempt}.csv"
            sweep(replace(cfg, output_path=str(path)))
            blobs.append(path.read_bytes())
        same[name] = blobs[0] == blobs[1]
    report(7, all(same.values()), f"byte-identical CSV: {same}")
