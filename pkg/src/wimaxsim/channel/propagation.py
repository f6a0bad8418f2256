"""Multipath convolution, AWGN and the perfect-CSI equalizer."""

from __future__ import annotations

import numpy as np

from ..params import DerivedParams

NEAR_ZERO = 1e-12


def quantize_delays(delays_s, params: DerivedParams) -> tuple[np.ndarray, list[str]]:
    """Round tap delays to whole samples; report delays that reach the CP."""
    delays_s = np.asarray(delays_s, dtype=float)
    ts = float(params.sample_time_s)
    samples = np.rint(delays_s / ts).astype(np.int64)
    warnings = []
    quant_err = np.abs(samples * ts - delays_s)
    if np.any(quant_err > 1e-12):
        warnings.append(
            "tap delays rounded to the sample grid: "
            + ", ".join(f"{d * 1e6:g}us->{s}" for d, s in zip(delays_s, samples))
        )
    if delays_s.size and delays_s.max() >= float(params.cp_time_s):
        warnings.append(
            f"max tap delay {delays_s.max() * 1e6:g}us >= cyclic prefix "
            f"{float(params.cp_time_s) * 1e6:g}us: inter-symbol interference expected"
        )
    return samples, warnings


def apply_channel(tx_samples, gains, delay_samples) -> np.ndarray:
    """Tapped delay line with one gain per tap per OFDM symbol.

    ``tx_samples`` has shape ``(symbols, symbol_len)`` and is treated as one
    contiguous stream; ``gains`` has shape ``(symbols, taps)``. An output
    sample uses the gains of the symbol it falls in, and the stream before
    the first sample is silent.
    """
    tx = np.asarray(tx_samples, dtype=complex)
    gains = np.asarray(gains, dtype=complex)
    delays = np.asarray(delay_samples, dtype=np.int64)
    if tx.ndim != 2:
        raise ValueError("tx_samples must have shape (symbols, symbol_len)")
    if gains.shape != (tx.shape[0], delays.size):
        raise ValueError(f"gains must have shape {(tx.shape[0], delays.size)}, got {gains.shape}")
    n_sym, sym_len = tx.shape
    flat = tx.reshape(-1)
    rx = np.zeros_like(tx)
    for tap, d in enumerate(delays):
        shifted = np.zeros_like(flat)
        if d < flat.size:
            shifted[d:] = flat[: flat.size - d]
        rx += gains[:, tap, None] * shifted.reshape(n_sym, sym_len)
    return rx


def frequency_response(gains, delay_samples, n_fft: int) -> np.ndarray:
    """Per-symbol response on centred subcarriers, shape ``(symbols, n_fft)``."""
    gains = np.atleast_2d(np.asarray(gains, dtype=complex))
    k = np.arange(n_fft) - n_fft // 2
    phase = np.exp(-2j * np.pi * np.outer(np.asarray(delay_samples), k) / n_fft)
    return gains @ phase


def add_awgn(samples, snr_db: float, signal_power_ref: float | None = None,
             rng=None) -> tuple[np.ndarray, float]:
    """Add complex white Gaussian noise at ``snr_db`` below ``signal_power_ref``.

    The reference defaults to the mean power of ``samples``. Returns the noisy
    samples and the complex noise variance used.
    """
    samples = np.asarray(samples, dtype=complex)
    rng = np.random.default_rng(rng)
    if signal_power_ref is None:
        signal_power_ref = float(np.mean(np.abs(samples) ** 2))
    noise_var = signal_power_ref / 10 ** (snr_db / 10)
    noise = rng.standard_normal(samples.shape) + 1j * rng.standard_normal(samples.shape)
    return samples + noise * np.sqrt(noise_var / 2), noise_var


def ideal_equalize(freq_frame, channel_response) -> tuple[np.ndarray, int]:
    """Zero-forcing with the true response. Near-zero bins are zeroed and counted."""
    y = np.asarray(freq_frame, dtype=complex)
    h = np.asarray(channel_response, dtype=complex)
    dead = np.abs(h) < NEAR_ZERO
    safe = np.where(dead, 1.0, h)
    out = np.where(dead, 0.0, y / safe)
    return out, int(np.count_nonzero(np.broadcast_to(dead, out.shape)))
