"""Constellation mapping, subcarrier framing and the OFDM transform.

Frequency frames are stored centred: array index ``i`` holds subcarrier
``i - n_fft // 2``. All functions accept a leading batch axis.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .params import DerivedParams, Modulation

N_FFT = 256
N_DATA = 192
PILOT_BINS = (-88, -63, -38, -13, 13, 38, 63, 88)
USED_HALF_WIDTH = 100

# Per-axis Gray levels indexed by the axis bits read MSB first.
_GRAY_AXIS = {
    1: (-1, 1),
    2: (-3, -1, 3, 1),
    3: (-7, -5, -1, -3, 7, 5, 1, 3),
}
_NORMALIZATION = {
    Modulation.BPSK: 1.0,
    Modulation.QPSK: 1 / np.sqrt(2),
    Modulation.QAM16: 1 / np.sqrt(10),
    Modulation.QAM64: 1 / np.sqrt(42),
}


@dataclass(frozen=True, eq=False)
class ConstellationMap:
    """Gray-labelled constellation; ``points[label]`` is already scaled."""

    modulation: Modulation
    points: np.ndarray
    normalization: float
    axis_levels: np.ndarray

    @property
    def axis_bits(self) -> int:
        """Label bits carried by each of the I and Q axes (BPSK: I only)."""
        return max(self.bits_per_symbol // 2, 1)

    @property
    def bits_per_symbol(self) -> int:
        return self.modulation.bits_per_symbol

    @property
    def labels_bits(self) -> np.ndarray:
        """``(M, bits_per_symbol)`` bit matrix of every label, MSB first."""
        m = self.bits_per_symbol
        return (np.arange(1 << m)[:, None] >> np.arange(m - 1, -1, -1)) & 1


@lru_cache(maxsize=None)
def constellation(modulation: Modulation) -> ConstellationMap:
    m = modulation.bits_per_symbol
    scale = _NORMALIZATION[modulation]
    labels = np.arange(1 << m)
    half = max(m // 2, 1)
    axis = np.asarray(_GRAY_AXIS[half], dtype=float) * scale
    if modulation is Modulation.BPSK:
        points = axis[labels].astype(complex)
    else:
        points = axis[labels >> half] + 1j * axis[labels & ((1 << half) - 1)]
    points.setflags(write=False)
    axis.setflags(write=False)
    return ConstellationMap(modulation, points, scale, axis)


def map_bits(bits, cmap: ConstellationMap) -> np.ndarray:
    """Map bits along the last axis, ``bits_per_symbol`` at a time, MSB first."""
    bits = np.asarray(bits, dtype=np.int64)
    m = cmap.bits_per_symbol
    if bits.shape[-1] % m:
        raise ValueError(f"{bits.shape[-1]} bits do not split into {m}-bit symbols")
    groups = bits.reshape(*bits.shape[:-1], -1, m)
    labels = groups @ (1 << np.arange(m - 1, -1, -1))
    return cmap.points[labels]


def _axis_llr(y: np.ndarray, levels: np.ndarray, nbits: int) -> np.ndarray:
    dist = (y[..., None] - levels) ** 2
    labels = np.arange(levels.size)
    out = np.empty(y.shape + (nbits,))
    for b in range(nbits):
        one = (labels >> (nbits - 1 - b)) & 1 == 1
        out[..., b] = dist[..., ~one].min(axis=-1) - dist[..., one].min(axis=-1)
    return out


def demap_soft(symbols, cmap: ConstellationMap, noise_var) -> np.ndarray:
    """Max-log bit metrics; positive values favour bit 1.

    Square Gray constellations factor into independent I and Q axes, so the
    minimum distances are taken per axis. ``noise_var`` may be a scalar or
    broadcast against ``symbols`` (for instance the per-subcarrier noise
    left after equalization).
    """
    y = np.asarray(symbols, dtype=complex)
    nv = np.asarray(noise_var, dtype=float)
    if np.any(nv <= 0):
        raise ValueError("noise variance must be positive")
    k = cmap.axis_bits
    llr = _axis_llr(y.real, cmap.axis_levels, k)
    if cmap.modulation is not Modulation.BPSK:
        llr = np.concatenate([llr, _axis_llr(y.imag, cmap.axis_levels, k)], axis=-1)
    llr /= np.broadcast_to(nv, y.shape)[..., None]
    return llr.reshape(*y.shape[:-1], -1)


@lru_cache(maxsize=None)
def subcarrier_layout(n_fft: int = N_FFT) -> tuple[np.ndarray, np.ndarray]:
    """Centred array indices of the data and pilot subcarriers."""
    centre = n_fft // 2
    used = [k for k in range(-USED_HALF_WIDTH, USED_HALF_WIDTH + 1) if k != 0]
    data = [k for k in used if k not in PILOT_BINS]
    data_idx = np.asarray(data) + centre
    pilot_idx = np.asarray(PILOT_BINS) + centre
    data_idx.setflags(write=False)
    pilot_idx.setflags(write=False)
    return data_idx, pilot_idx


def assemble_frame(data_symbols, pilot_values=None) -> np.ndarray:
    """Place 192 data symbols and 8 pilots into a centred 256-bin frame."""
    data_symbols = np.asarray(data_symbols, dtype=complex)
    if data_symbols.shape[-1] != N_DATA:
        raise ValueError(f"expected {N_DATA} data symbols, got {data_symbols.shape[-1]}")
    if pilot_values is None:
        pilot_values = np.ones(len(PILOT_BINS), dtype=complex)
    pilot_values = np.asarray(pilot_values, dtype=complex)
    if pilot_values.shape[-1] != len(PILOT_BINS):
        raise ValueError(f"expected {len(PILOT_BINS)} pilot values, got {pilot_values.shape[-1]}")
    data_idx, pilot_idx = subcarrier_layout()
    frame = np.zeros(data_symbols.shape[:-1] + (N_FFT,), dtype=complex)
    frame[..., data_idx] = data_symbols
    frame[..., pilot_idx] = pilot_values
    return frame


def extract_data(frame) -> np.ndarray:
    data_idx, _ = subcarrier_layout()
    return np.asarray(frame)[..., data_idx]


def ofdm_modulate(frame, params: DerivedParams) -> np.ndarray:
    """Unitary IFFT of each centred frame followed by cyclic prefix insertion."""
    frame = np.asarray(frame, dtype=complex)
    if frame.shape[-1] != params.n_fft:
        raise ValueError(f"frame has {frame.shape[-1]} bins, expected {params.n_fft}")
    useful = np.fft.ifft(np.fft.ifftshift(frame, axes=-1), norm="ortho", axis=-1)
    cp = params.cp_len
    return np.concatenate([useful[..., params.n_fft - cp:], useful], axis=-1)


def ofdm_demodulate(samples, params: DerivedParams) -> np.ndarray:
    samples = np.asarray(samples, dtype=complex)
    if samples.shape[-1] != params.symbol_len:
        raise ValueError(
            f"symbol has {samples.shape[-1]} samples, expected {params.symbol_len} "
            f"({params.n_fft} + {params.cp_len} cyclic prefix)"
        )
    useful = samples[..., params.cp_len:]
    return np.fft.fftshift(np.fft.fft(useful, norm="ortho", axis=-1), axes=-1)
