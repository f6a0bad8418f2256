import math
from dataclasses import replace
from fractions import Fraction

import numpy as np
import pytest

from wimaxsim.channel import load_channels
from wimaxsim.harness import (
    BerPoint,
    FadingTaps,
    Link,
    NoCrossingError,
    SimConfig,
    StopReason,
    SweepResult,
    ebn0_db,
    emit_csv,
    profile_config,
    read_csv,
    run_point,
    snr_at_ber,
    snr_for_ebn0,
    sweep,
)
from wimaxsim.harness.chain import RxStats


def q_function(x):
    return 0.5 * math.erfc(x / math.sqrt(2))


def pts(*pairs):
    return [BerPoint(s, 10**6, int(round(b * 10**6)), b, StopReason.TARGET_ERRORS)
            for s, b in pairs]


# ---- chain

@pytest.mark.parametrize("name", ["bpsk-1/2", "qpsk-1/2", "qpsk-3/4", "16qam-1/2",
                                  "16qam-3/4", "64qam-2/3", "64qam-3/4"])
def test_noiseless_chain(name, params):
    cfg = profile_config(name)
    link = cfg.link()
    rng = np.random.default_rng(0)
    payload = rng.integers(0, 2, (8, link.payload_bits), dtype=np.uint8)
    coded = link.encode(payload)
    assert coded.shape == (8, link.profile.n_cbps)
    rx = link.receive(link.transmit(payload), np.ones((8, 256)), 1e-20)
    assert np.array_equal(rx, payload)


def test_payload_bits(profiles, params):
    sizes = [Link(p, params).payload_bits for p in profiles]
    assert sizes == [88, 184, 280, 376, 568, 760, 856]


def test_rs_corrects_channel_errors(params):
    link = profile_config("16qam-1/2").link()
    payload = np.zeros((1, link.payload_bits), np.uint8)
    llr = link.encode(payload).astype(float) * 2 - 1
    # flip a burst of coded bits; the inner decoder leaves a few byte errors for RS
    llr[0, 100:112] *= -1
    stats = RxStats()
    assert np.array_equal(link.decode(llr, stats), payload)
    assert stats.rs_failures == 0


# ---- SNR bookkeeping

def test_ebn0_offsets(params):
    bpsk = profile_config("bpsk-1/2").link()
    # Es/N0 = SNR + 10 log10(256/200); BPSK-1/2 carries 88/192 payload bits per subcarrier
    assert ebn0_db(0.0, bpsk) == pytest.approx(10 * math.log10(1.28) - 10 * math.log10(88 / 192))
    unc = replace(profile_config("bpsk-1/2"), uncoded=True).link()
    assert ebn0_db(3.0, unc) == pytest.approx(3.0 + 10 * math.log10(1.28))
    assert ebn0_db(snr_for_ebn0(8.0, unc), unc) == pytest.approx(8.0)


def test_uncoded_bpsk_matches_q_function():
    cfg = profile_config("bpsk-1/2", uncoded=True, target_errors=400)
    snr = snr_for_ebn0(6.0, cfg.link())
    p = run_point(cfg, snr)
    assert p.ber == pytest.approx(q_function(math.sqrt(2 * 10**0.6)), rel=0.15)


# ---- run_point and sweep

def test_noiseless_point_is_error_free():
    p = run_point(profile_config("64qam-3/4", max_bits=50_000), 300.0)
    assert p.bit_errors == 0 and p.stop_reason is StopReason.MAX_BITS
    assert p.bits >= 50_000


def test_sui_noiseless_point_is_error_free():
    p = run_point(profile_config("qpsk-3/4", channel="sui-3", max_bits=30_000), 300.0)
    assert p.bit_errors == 0


def test_point_is_deterministic():
    cfg = profile_config("qpsk-1/2", channel="sui-2", target_errors=50, master_seed=11)
    assert run_point(cfg, 12.0) == run_point(cfg, 12.0)
    other = run_point(replace(cfg, master_seed=12), 12.0)
    assert other != run_point(cfg, 12.0)


def test_tiny_budget_stops_on_max_bits():
    cfg = profile_config("qpsk-1/2", snr_start=20, snr_stop=24, snr_step=2, max_bits=1000)
    result = sweep(cfg)
    assert [p.snr_db for p in result.points] == [20, 22, 24]
    assert all(p.stop_reason is StopReason.MAX_BITS for p in result.points)


def test_single_point_sweep_equals_run_point():
    cfg = profile_config("bpsk-1/2", snr_start=3, snr_stop=3, target_errors=20)
    assert sweep(cfg).points == [run_point(cfg, 3.0)]


def test_parallel_sweep_matches_serial():
    cfg = profile_config("qpsk-1/2", channel="sui-1", snr_start=4, snr_stop=8, snr_step=2,
                         target_errors=30, max_bits=200_000)
    assert sweep(cfg, workers=2).points == sweep(cfg).points


def test_ber_decreases_with_snr():
    cfg = profile_config("qpsk-1/2", snr_start=-1, snr_stop=3, snr_step=2, target_errors=200)
    points = sweep(cfg).points
    for lo, hi in zip(points, points[1:]):
        assert lo.bit_errors >= 100 and hi.bit_errors >= 100
        assert lo.ber >= hi.ber


def test_config_validation():
    for kw in (dict(snr_start=5, snr_stop=1), dict(snr_step=0), dict(target_errors=0),
               dict(guard_ratio=Fraction(1, 5)), dict(master_seed=-1)):
        with pytest.raises(ValueError):
            profile_config("qpsk-1/2", **kw)
    with pytest.raises(ValueError):
        run_point(profile_config("qpsk-1/2", channel="sui-9"), 10.0)


def test_delay_beyond_cp_is_reported():
    warnings = []
    cfg = profile_config("qpsk-1/2", channel="sui-6", guard_ratio=Fraction(1, 32),
                         max_bits=2000)
    run_point(cfg, 30.0, warnings)
    assert any("cyclic prefix" in w for w in warnings)


def test_fading_stream_is_independent_of_batching(params):
    spec = load_channels()["sui-3"]
    a = FadingTaps(spec, params, np.random.default_rng(1)).next_gains(5000)
    taps = FadingTaps(spec, params, np.random.default_rng(1))
    b = np.concatenate([taps.next_gains(n) for n in (1, 999, 2047, 1953)])
    assert np.array_equal(a, b)
    assert np.mean(np.abs(a) ** 2, axis=0) == pytest.approx([t.power for t in spec.taps],
                                                            rel=0.1)


def test_physical_time_fading(params):
    spec = load_channels()["sui-1"]
    g = FadingTaps(spec, params, np.random.default_rng(1), hop=0).next_gains(300)
    # 0.4 Hz Doppler over 48 ms: nearly constant
    assert np.max(np.abs(np.diff(g[:, 0]))) < 1e-3


# ---- crossing interpolation

def test_snr_at_ber_log_midpoint():
    assert snr_at_ber(pts((4, 1e-2), (6, 1e-4))) == pytest.approx(5.0)


def test_snr_at_ber_exact_grid_value():
    assert snr_at_ber(pts((2, 1e-1), (4, 1e-3), (6, 1e-5))) == 4


def test_snr_at_ber_not_bracketed():
    with pytest.raises(NoCrossingError):
        snr_at_ber(pts((4, 1e-1), (6, 1e-2)))
    with pytest.raises(NoCrossingError):
        snr_at_ber(pts((4, 1e-2), (6, 0.0)))


# ---- CSV

def test_csv_two_lines(tmp_path):
    cfg = profile_config("qpsk-1/2")
    res = SweepResult(cfg, [BerPoint(4.0, 10000, 10, 1e-3, StopReason.TARGET_ERRORS)])
    path = emit_csv(res, tmp_path / "one.csv")
    assert path.read_text() == ("snr_db,bits,bit_errors,ber,stop_reason\n"
                                "4.0,10000,10,0.001,target_errors_reached\n")


def test_csv_round_trip(tmp_path):
    cfg = profile_config("qpsk-1/2")
    points = [BerPoint(1.5, 3 * 10**6, 7, 7 / (3 * 10**6), StopReason.MAX_BITS),
              BerPoint(-0.25, 300, 101, 101 / 300, StopReason.TARGET_ERRORS)]
    res = SweepResult(cfg, points)
    assert [p.snr_db for p in res.points] == [-0.25, 1.5]
    assert read_csv(emit_csv(res, tmp_path / "r.csv")) == res.points


def test_csv_errors(tmp_path):
    cfg = profile_config("qpsk-1/2")
    with pytest.raises(ValueError):
        emit_csv(SweepResult(cfg, []), tmp_path / "empty.csv")
    assert not (tmp_path / "empty.csv").exists()
    res = SweepResult(cfg, pts((1, 0.5)))
    with pytest.raises(OSError, match="missing"):
        emit_csv(res, tmp_path / "missing" / "x.csv")
    assert list(tmp_path.iterdir()) == []


def test_ber_point_invariants():
    with pytest.raises(ValueError):
        BerPoint(0.0, 0, 0, 0.0, StopReason.MAX_BITS)
    with pytest.raises(ValueError):
        BerPoint(0.0, 10, 11, 1.1, StopReason.MAX_BITS)
