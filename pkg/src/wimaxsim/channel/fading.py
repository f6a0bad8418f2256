"""Ricean tap coefficients by the filtered-noise method.

Each tap is a constant line-of-sight part plus complex Gaussian scatter whose
time variation follows the SUI Doppler spectrum
``S(f0) = 1 - 1.72 f0^2 + 0.785 f0^4`` for ``|f0| <= 1``. White noise at
``2 * f_m`` samples per second is shaped by a unit-power zero-phase FIR with
``|H| = sqrt(S)``, applied by frequency-domain overlap-add.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

DEFAULT_FILTER_TAPS = 257
DEFAULT_BLOCK = 4096
MIN_FILTER_TAPS = 63
_DESIGN_GRID = 8192


@dataclass(frozen=True)
class SuiTapSpec:
    delay_s: float
    power: float
    k_factor: float
    doppler_hz: float

    def __post_init__(self):
        if self.delay_s < 0:
            raise ValueError(f"tap delay must be non-negative, got {self.delay_s}")
        if not self.power > 0:
            raise ValueError(f"tap power must be positive, got {self.power}")
        if self.k_factor < 0:
            raise ValueError(f"K-factor must be non-negative, got {self.k_factor}")
        if not self.doppler_hz > 0:
            raise ValueError(f"Doppler frequency must be positive, got {self.doppler_hz}")


@dataclass(frozen=True, eq=False)
class TapProcess:
    coefficients: np.ndarray
    sample_rate_hz: float
    spec: SuiTapSpec


def ricean_split(p: float, k: float) -> tuple[float, float]:
    """Split total tap power into ``(|m|^2, sigma^2)`` for K-factor ``k``."""
    if not p > 0:
        raise ValueError(f"tap power must be positive, got {p}")
    if k < 0:
        raise ValueError(f"K-factor must be non-negative, got {k}")
    scatter = p / (k + 1)
    return p - scatter, scatter


def doppler_psd(f0):
    """SUI Doppler spectrum at normalised frequency ``f0 = f / f_m``."""
    f0 = np.abs(np.asarray(f0, dtype=float))
    s = 1 - 1.72 * f0**2 + 0.785 * f0**4
    out = np.where(f0 <= 1, s, 0.0)
    return out.item() if out.ndim == 0 else out


def shaping_filter(num_taps: int = DEFAULT_FILTER_TAPS, f_m: float = 1.0,
                   oversample: int = 1) -> np.ndarray:
    """Zero-phase FIR whose magnitude follows ``sqrt(S(f / f_m))``.

    The response is designed for a sample rate of ``2 * f_m * oversample`` by
    frequency sampling on a dense grid, truncated to ``num_taps`` around the
    centre and scaled to unit energy. With ``oversample == 1`` (the default)
    the Doppler band fills the whole Nyquist range.
    """
    if num_taps < MIN_FILTER_TAPS or num_taps % 2 == 0:
        raise ValueError(f"filter length must be odd and >= {MIN_FILTER_TAPS}, got {num_taps}")
    if not f_m > 0:
        raise ValueError(f"maximum Doppler must be positive, got {f_m}")
    if oversample < 1:
        raise ValueError("oversample must be >= 1")
    grid = max(_DESIGN_GRID, 4 * num_taps)
    f0 = np.fft.fftfreq(grid, d=1 / (2 * oversample))
    h = np.fft.ifft(np.sqrt(doppler_psd(f0))).real
    half = (num_taps - 1) // 2
    h = np.concatenate([h[-half:], h[: half + 1]])
    return h / np.sqrt(np.sum(h**2))


def overlap_add(x, h, block: int = DEFAULT_BLOCK) -> np.ndarray:
    """Full linear convolution of ``x`` with ``h`` via FFT overlap-add."""
    x = np.asarray(x)
    h = np.asarray(h)
    n_out = x.size + h.size - 1
    nfft = 1 << int(np.ceil(np.log2(block + h.size - 1)))
    H = np.fft.fft(h, nfft)
    y = np.zeros(n_out, dtype=np.result_type(x, h, complex))
    for start in range(0, x.size, block):
        seg = x[start:start + block]
        out = np.fft.ifft(np.fft.fft(seg, nfft) * H)
        stop = min(start + nfft, n_out)
        y[start:stop] += out[: stop - start]
    if not (np.iscomplexobj(x) or np.iscomplexobj(h)):
        return y.real
    return y


def scatter_process(num_coeffs: int, h: np.ndarray, rng: np.random.Generator,
                    block: int = DEFAULT_BLOCK) -> np.ndarray:
    """Unit-power coloured complex Gaussian sequence, free of filter transients."""
    n_in = num_coeffs + h.size - 1
    w = (rng.standard_normal(n_in) + 1j * rng.standard_normal(n_in)) * np.sqrt(0.5)
    return overlap_add(w, h, block)[h.size - 1: h.size - 1 + num_coeffs]


def generate_tap(spec: SuiTapSpec, num_coeffs: int, seed=None, *,
                 num_taps: int = DEFAULT_FILTER_TAPS, oversample: int = 1,
                 block: int = DEFAULT_BLOCK) -> TapProcess:
    """Draw ``num_coeffs`` Ricean coefficients for one tap.

    ``seed`` is anything :func:`numpy.random.default_rng` accepts.
    """
    if num_coeffs <= num_taps:
        raise ValueError(f"need more than {num_taps} coefficients, got {num_coeffs}")
    rng = np.random.default_rng(seed)
    mean_power, scatter_var = ricean_split(spec.power, spec.k_factor)
    h = shaping_filter(num_taps, spec.doppler_hz, oversample)
    coeffs = np.full(num_coeffs, np.sqrt(mean_power), dtype=complex)
    if scatter_var > 0:
        coeffs += np.sqrt(scatter_var) * scatter_process(num_coeffs, h, rng, block)
    return TapProcess(coeffs, 2 * spec.doppler_hz * oversample, spec)


def interpolate_to_symbols(tap: TapProcess, symbol_rate: float, n_symbols: int,
                           start: float = 0.0) -> np.ndarray:
    """One gain per OFDM symbol, linearly interpolated from the tap grid.

    Symbol ``i`` sits at time ``start + i / symbol_rate`` seconds, measured
    from the first coefficient.
    """
    if symbol_rate < tap.sample_rate_hz:
        raise ValueError("symbol rate must not be below the tap sample rate")
    t = (start + np.arange(n_symbols) / symbol_rate) * tap.sample_rate_hz
    if n_symbols and t[-1] > tap.coefficients.size - 1:
        raise ValueError("requested symbols run past the end of the tap process")
    grid = np.arange(tap.coefficients.size)
    c = tap.coefficients
    return np.interp(t, grid, c.real) + 1j * np.interp(t, grid, c.imag)
