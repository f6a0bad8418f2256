"""Monte Carlo BER estimation over SNR grids."""

from __future__ import annotations

import csv
import logging
import math
import os
import tempfile
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from pathlib import Path

import numpy as np

from ..channel import SuiChannelSpec, frequency_response, load_channels, quantize_delays
from ..channel.fading import generate_tap, interpolate_to_symbols
from ..channel.propagation import add_awgn, apply_channel
from ..params import CodingProfile, DerivedParams, PrimitiveParams, derive_params, find_profile
from ..scrambler import DEFAULT_SEED
from .chain import Link, RxStats

log = logging.getLogger(__name__)

FLAT_CHANNELS = ("awgn", "identity")
CSV_HEADER = ("snr_db", "bits", "bit_errors", "ber", "stop_reason")

# SNR (dB) at BER 1e-3 reported for SUI-1..3, profiles in profile_table() order
REFERENCE_SNR_AT_1E3 = {
    "sui-1": (4.1, 6.4, 10.0, 12.4, 15.5, 19.3, 20.9),
    "sui-2": (7.4, 10.4, 14.1, 16.2, 19.5, 23.2, 25.5),
    "sui-3": (12.7, 17.1, 22.7, 22.7, 28.2, 30.0, 32.6),
}


class StopReason(str, Enum):
    TARGET_ERRORS = "target_errors_reached"
    MAX_BITS = "max_bits_reached"


class NoCrossingError(ValueError):
    """The BER curve does not cross the requested level between grid points."""


@dataclass(frozen=True)
class SimConfig:
    profile: CodingProfile
    channel: str = "awgn"
    guard_ratio: Fraction = Fraction(1, 4)
    snr_start: float = 0.0
    snr_stop: float = 10.0
    snr_step: float = 1.0
    max_bits: int = 20_000_000
    target_errors: int = 100
    master_seed: int = 0
    output_path: str | None = None
    channel_config: str | None = None
    primitive: PrimitiveParams = field(default_factory=PrimitiveParams)
    scrambler_seed: int = DEFAULT_SEED
    batch_symbols: int = 64
    uncoded: bool = False
    fading_hop: int = 2
    min_fades: int = 0
    csi_llr: bool = False

    def __post_init__(self):
        object.__setattr__(self, "guard_ratio", Fraction(self.guard_ratio))
        if self.snr_start > self.snr_stop:
            raise ValueError("snr_start must not exceed snr_stop")
        if not self.snr_step > 0:
            raise ValueError("snr_step must be positive")
        if self.target_errors < 1:
            raise ValueError("target_errors must be at least 1")
        if self.max_bits < 1:
            raise ValueError("max_bits must be at least 1")
        if self.batch_symbols < 1:
            raise ValueError("batch_symbols must be at least 1")
        if self.fading_hop < 0 or self.min_fades < 0:
            raise ValueError("fading_hop and min_fades must be non-negative")
        if not 0 <= self.master_seed < 2**64:
            raise ValueError("master_seed must be a 64-bit unsigned integer")
        # validates the guard ratio
        replace(self.primitive, guard_ratio=self.guard_ratio)

    @property
    def derived(self) -> DerivedParams:
        return derive_params(replace(self.primitive, guard_ratio=self.guard_ratio))

    def snr_grid(self) -> list[float]:
        return snr_grid(self.snr_start, self.snr_step, self.snr_stop)

    def link(self) -> Link:
        return Link(self.profile, self.derived, self.scrambler_seed, self.uncoded, self.csi_llr)


def snr_grid(start: float, step: float, stop: float) -> list[float]:
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    return [round(start + i * step, 10) for i in range(count)]


@dataclass(frozen=True)
class BerPoint:
    snr_db: float
    bits: int
    bit_errors: int
    ber: float
    stop_reason: StopReason

    def __post_init__(self):
        if self.bits <= 0:
            raise ValueError("a BER point needs at least one bit")
        if not 0 <= self.bit_errors <= self.bits:
            raise ValueError("bit errors out of range")


@dataclass
class SweepResult:
    config: SimConfig
    points: list[BerPoint]
    elapsed_s: float = 0.0
    warnings: list[str] = field(default_factory=list)

    def __post_init__(self):
        self.points = sorted(self.points, key=lambda p: p.snr_db)


@lru_cache(maxsize=8)
def _channel_table(path: str | None) -> dict[str, SuiChannelSpec]:
    return load_channels(path)


def resolve_channel(config: SimConfig) -> SuiChannelSpec | None:
    """The fading spec for the configured channel, or None for a flat channel."""
    name = config.channel.strip().lower()
    if name in FLAT_CHANNELS:
        return None
    table = _channel_table(config.channel_config)
    try:
        return table[name]
    except KeyError:
        raise ValueError(
            f"unknown channel {config.channel!r}; available: "
            + ", ".join([*FLAT_CHANNELS, *sorted(table)])
        ) from None


def ebn0_db(snr_db: float, link: Link) -> float:
    """Eb/N0 equivalent of a time-domain SNR, counting payload bits only.

    Used subcarriers carry unit power while the IFFT spreads it over all
    ``n_fft`` samples, so the per-subcarrier Es/N0 sits ``n_fft / n_used``
    above the time-domain SNR.
    """
    params = link.params
    es_n0 = snr_db + 10 * math.log10(params.n_fft / params.n_used)
    bits_per_subcarrier = link.payload_bits / link.profile.n_cbps * link.profile.bits_per_subcarrier
    return es_n0 - 10 * math.log10(bits_per_subcarrier)


def snr_for_ebn0(ebn0: float, link: Link) -> float:
    return ebn0 - (ebn0_db(0.0, link))


class FadingTaps:
    """Per-tap coefficient streams sampled once per OFDM symbol.

    With ``hop > 0`` each symbol advances the fading clock by ``hop``
    coefficient intervals, so consecutive symbols see effectively independent
    realizations (the shaping filter's autocorrelation is below 0.04 beyond
    lag 1). ``hop = 0`` follows physical time at the OFDM symbol rate, in
    which case a whole run sees a nearly frozen channel.
    """

    chunk = 4096

    def __init__(self, spec: SuiChannelSpec, params: DerivedParams, rng: np.random.Generator,
                 hop: int = 2):
        self.spec = spec
        self.rng = rng
        self.hop = hop
        self.symbol_rate = params.symbol_rate_hz
        self.delays, self.warnings = quantize_delays(spec.delays_s, params)
        self._procs = None
        self._time = 0.0
        self._index = 0

    def _refill(self):
        self._procs = [generate_tap(tap, self.chunk, self.rng) for tap in self.spec.taps]
        self._time = 0.0
        self._index = 0

    def next_gains(self, n_symbols: int) -> np.ndarray:
        """Complex gains, shape ``(n_symbols, taps)``."""
        out = np.empty((n_symbols, len(self.spec.taps)), dtype=complex)
        done = 0
        while done < n_symbols:
            if self._procs is None:
                self._refill()
            if self.hop:
                room = (self.chunk - 1 - self._index) // self.hop + 1
            else:
                span = min((self.chunk - 1) / p.sample_rate_hz for p in self._procs) - self._time
                room = int(span * self.symbol_rate) + 1
            take = min(room, n_symbols - done)
            if take <= 0:
                self._procs = None
                continue
            for i, proc in enumerate(self._procs):
                if self.hop:
                    stop = self._index + self.hop * take
                    out[done:done + take, i] = proc.coefficients[self._index:stop:self.hop]
                else:
                    out[done:done + take, i] = interpolate_to_symbols(
                        proc, self.symbol_rate, take, start=self._time)
            self._index += self.hop * take
            self._time += take / self.symbol_rate
            done += take
            if take == room:
                self._procs = None
        return out


def _point_seed(master_seed: int, snr_db: float) -> np.random.SeedSequence:
    key = int(round(snr_db * 1000))
    # zigzag so negative SNRs get distinct non-negative spawn keys
    key = 2 * key if key >= 0 else -2 * key - 1
    return np.random.SeedSequence(master_seed, spawn_key=(key,))


def run_point(config: SimConfig, snr_db: float, warnings: list[str] | None = None) -> BerPoint:
    """Simulate one SNR value until enough errors or bits have accumulated."""
    link = config.link()
    spec = resolve_channel(config)
    payload_seq, fading_seq, noise_seq = _point_seed(config.master_seed, snr_db).spawn(3)
    payload_rng = np.random.default_rng(payload_seq)
    noise_rng = np.random.default_rng(noise_seq)
    fading = None
    if spec is not None:
        fading = FadingTaps(spec, link.params, np.random.default_rng(fading_seq),
                            hop=config.fading_hop)
        if warnings is not None:
            warnings.extend(w for w in fading.warnings if w not in warnings)
    stats = RxStats()
    min_symbols = config.min_fades if fading is not None else 0
    bits = errors = symbols = 0
    while (errors < config.target_errors or symbols < min_symbols) and bits < config.max_bits:
        n_sym = min(config.batch_symbols, -(-(config.max_bits - bits) // link.payload_bits))
        payload = payload_rng.integers(0, 2, size=(n_sym, link.payload_bits), dtype=np.uint8)
        tx = link.transmit(payload)
        ref_power = float(np.mean(np.abs(tx) ** 2))
        if fading is None:
            rx, response = tx, np.ones((n_sym, link.params.n_fft), dtype=complex)
        else:
            gains = fading.next_gains(n_sym)
            rx = apply_channel(tx, gains, fading.delays)
            response = frequency_response(gains, fading.delays, link.params.n_fft)
        rx, noise_var = add_awgn(rx, snr_db, ref_power, noise_rng)
        decoded = link.receive(rx, response, noise_var, stats)
        errors += int(np.count_nonzero(decoded != payload))
        bits += payload.size
        symbols += n_sym
    reason = StopReason.TARGET_ERRORS if errors >= config.target_errors else StopReason.MAX_BITS
    if warnings is not None and stats.dead_bins:
        warnings.append(f"{snr_db:g} dB: {stats.dead_bins} subcarriers with |H| < 1e-12 zeroed")
    log.debug("%s %s %.2f dB: %d/%d errors, %d RS failures", config.profile.name,
              config.channel, snr_db, errors, bits, stats.rs_failures)
    return BerPoint(snr_db, bits, errors, errors / bits, reason)


def _run_point_task(args):
    config, snr = args
    warnings: list[str] = []
    return run_point(config, snr, warnings), warnings


def sweep(config: SimConfig, workers: int = 1) -> SweepResult:
    """Run every grid point and write the CSV when ``output_path`` is set."""
    started = time.perf_counter()
    grid = config.snr_grid()
    tasks = [(config, snr) for snr in grid]
    if workers > 1 and len(grid) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(_run_point_task, tasks))
    else:
        outcomes = [_run_point_task(t) for t in tasks]
    warnings: list[str] = []
    for _, ws in outcomes:
        warnings.extend(w for w in ws if w not in warnings)
    result = SweepResult(config, [p for p, _ in outcomes], time.perf_counter() - started, warnings)
    if config.output_path:
        emit_csv(result, config.output_path)
    return result


def snr_at_ber(result: SweepResult | list[BerPoint], target_ber: float = 1e-3) -> float:
    """SNR where the curve crosses ``target_ber``, interpolating dB against log10(BER)."""
    points = sorted(result.points if isinstance(result, SweepResult) else result,
                    key=lambda p: p.snr_db)
    if not 0 < target_ber < 1:
        raise ValueError("target BER must lie in (0, 1)")
    for p in points:
        if p.ber == target_ber:
            return p.snr_db
    for lo, hi in zip(points, points[1:]):
        if lo.ber > target_ber > hi.ber:
            if hi.ber == 0:
                raise NoCrossingError(
                    f"BER drops from {lo.ber:g} to 0 between {lo.snr_db} and {hi.snr_db} dB; "
                    "cannot interpolate in log scale"
                )
            frac = (math.log10(lo.ber) - math.log10(target_ber)) / (
                math.log10(lo.ber) - math.log10(hi.ber))
            return lo.snr_db + frac * (hi.snr_db - lo.snr_db)
    raise NoCrossingError(f"no pair of grid points brackets BER {target_ber:g}")


def find_crossing(config: SimConfig, target_ber: float = 1e-3,
                  max_points: int = 80) -> tuple[float, SweepResult]:
    """Step the SNR from ``config.snr_start`` until the curve crosses ``target_ber``.

    Steps down first if the starting point is already below the target.
    """
    started = time.perf_counter()
    warnings: list[str] = []
    step = config.snr_step
    points = {}

    def at(snr):
        snr = round(snr, 10)
        if snr not in points:
            points[snr] = run_point(config, snr, warnings)
        return points[snr]

    snr = config.snr_start
    direction = -1 if at(snr).ber < target_ber else 1
    for _ in range(max_points):
        nxt = snr + direction * step
        cur, new = at(snr), at(nxt)
        if (direction > 0 and new.ber <= target_ber) or (direction < 0 and new.ber >= target_ber):
            if new.ber == 0:
                raise NoCrossingError(
                    f"{config.profile.name}/{config.channel}: no errors in {new.bits} bits at "
                    f"{new.snr_db} dB; lower snr_step or raise max_bits"
                )
            break
        snr = nxt
    else:
        raise NoCrossingError(f"no crossing of {target_ber:g} within {max_points} steps")
    result = SweepResult(config, list(points.values()), time.perf_counter() - started, warnings)
    return snr_at_ber(result, target_ber), result


def format_float(x: float) -> str:
    return repr(float(x))


def emit_csv(result: SweepResult, path) -> Path:
    """Write ``snr_db,bits,bit_errors,ber,stop_reason`` rows; the file appears atomically."""
    if not result.points:
        raise ValueError("refusing to write an empty sweep result")
    path = Path(path)
    lines = [",".join(CSV_HEADER)]
    for p in result.points:
        lines.append(",".join([format_float(p.snr_db), str(p.bits), str(p.bit_errors),
                               format_float(p.ber), p.stop_reason.value]))
    text = "\n".join(lines) + "\n"
    tmp = None
    try:
        fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except OSError as exc:
        if tmp is not None and os.path.exists(tmp):
            os.unlink(tmp)
        raise OSError(f"cannot write CSV to {path}: {exc.strerror or exc}") from exc
    return path


def read_csv(path) -> list[BerPoint]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != CSV_HEADER:
            raise ValueError(f"{path}: unexpected header {reader.fieldnames}")
        return [
            BerPoint(float(r["snr_db"]), int(r["bits"]), int(r["bit_errors"]), float(r["ber"]),
                     StopReason(r["stop_reason"]))
            for r in reader
        ]


def profile_config(name: str, **kwargs) -> SimConfig:
    return SimConfig(profile=find_profile(name), **kwargs)


__all__ = [
    "BerPoint",
    "NoCrossingError",
    "REFERENCE_SNR_AT_1E3",
    "SimConfig",
    "StopReason",
    "SweepResult",
    "ebn0_db",
    "emit_csv",
    "find_crossing",
    "profile_config",
    "read_csv",
    "resolve_channel",
    "run_point",
    "snr_at_ber",
    "snr_for_ebn0",
    "sweep",
]
