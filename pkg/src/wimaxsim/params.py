"""OFDM symbol parameters and the mandatory coding profiles.

Primitive parameters (bandwidth, used subcarriers, sampling factor, guard
ratio) fix every derived timing quantity. Rationals are kept as
:class:`fractions.Fraction` so derived times are exact.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from importlib import resources
from typing import Iterable

GUARD_RATIOS = (Fraction(1, 4), Fraction(1, 8), Fraction(1, 16), Fraction(1, 32))

# data subcarriers per OFDM symbol with all 16 subchannels allocated
N_DATA_SUBCARRIERS = 192


def _as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, str):
        return Fraction(value.strip())
    return Fraction(value)


@dataclass(frozen=True)
class PrimitiveParams:
    bandwidth_hz: float = 1.75e6
    n_used: int = 200
    sampling_factor: Fraction = Fraction(8, 7)
    guard_ratio: Fraction = Fraction(1, 4)

    def __post_init__(self):
        object.__setattr__(self, "sampling_factor", _as_fraction(self.sampling_factor))
        object.__setattr__(self, "guard_ratio", _as_fraction(self.guard_ratio))
        if not self.bandwidth_hz > 0:
            raise ValueError(f"bandwidth must be positive, got {self.bandwidth_hz}")
        if self.n_used <= 0:
            raise ValueError(f"n_used must be positive, got {self.n_used}")
        if self.sampling_factor <= 0:
            raise ValueError(f"sampling factor must be positive, got {self.sampling_factor}")
        if self.guard_ratio not in GUARD_RATIOS:
            raise ValueError(
                f"guard ratio {self.guard_ratio} not in {[str(g) for g in GUARD_RATIOS]}"
            )


@dataclass(frozen=True)
class DerivedParams:
    """Derived symbol timing. Time and frequency fields are exact rationals."""

    n_fft: int
    sampling_freq_hz: int
    subcarrier_spacing_hz: Fraction
    useful_symbol_time_s: Fraction
    cp_time_s: Fraction
    symbol_time_s: Fraction
    sample_time_s: Fraction
    guard_ratio: Fraction
    n_used: int

    @property
    def cp_len(self) -> int:
        """Cyclic prefix length in samples."""
        return int(self.guard_ratio * self.n_fft)

    @property
    def symbol_len(self) -> int:
        return self.n_fft + self.cp_len

    @property
    def symbol_rate_hz(self) -> float:
        return float(1 / self.symbol_time_s)


def derive_params(p: PrimitiveParams | None = None) -> DerivedParams:
    """Compute the derived OFDM quantities from the primitive ones.

    >>> d = derive_params(PrimitiveParams())
    >>> d.n_fft, d.sampling_freq_hz, float(d.subcarrier_spacing_hz)
    (256, 2000000, 7812.5)
    """
    if p is None:
        p = PrimitiveParams()
    n_fft = 1
    while n_fft <= p.n_used:
        n_fft *= 2
    bw = _as_fraction(p.bandwidth_hz)
    fs = int((p.sampling_factor * bw / 8000) // 1) * 8000
    if fs <= 0:
        raise ValueError(f"bandwidth {p.bandwidth_hz} Hz too small: sampling frequency rounds to 0")
    spacing = Fraction(fs, n_fft)
    tb = 1 / spacing
    tg = p.guard_ratio * tb
    return DerivedParams(
        n_fft=n_fft,
        sampling_freq_hz=fs,
        subcarrier_spacing_hz=spacing,
        useful_symbol_time_s=tb,
        cp_time_s=tg,
        symbol_time_s=tb + tg,
        sample_time_s=tb / n_fft,
        guard_ratio=p.guard_ratio,
        n_used=p.n_used,
    )


class Modulation(Enum):
    BPSK = 1
    QPSK = 2
    QAM16 = 4
    QAM64 = 6

    @property
    def bits_per_symbol(self) -> int:
        return self.value

    @classmethod
    def parse(cls, text: str) -> "Modulation":
        key = text.strip().upper().replace("-", "")
        aliases = {"BPSK": cls.BPSK, "QPSK": cls.QPSK, "16QAM": cls.QAM16,
                   "QAM16": cls.QAM16, "64QAM": cls.QAM64, "QAM64": cls.QAM64}
        try:
            return aliases[key]
        except KeyError:
            raise ValueError(f"unknown modulation {text!r}") from None

    @property
    def label(self) -> str:
        return {1: "bpsk", 2: "qpsk", 4: "16qam", 6: "64qam"}[self.value]


CC_RATES = (Fraction(1, 2), Fraction(2, 3), Fraction(3, 4), Fraction(5, 6))


@dataclass(frozen=True)
class CodingProfile:
    modulation: Modulation
    overall_rate: Fraction
    rs_n: int
    rs_k: int
    rs_t: int
    cc_rate: Fraction
    bits_per_subcarrier: int = field(init=False)
    n_cbps: int = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "overall_rate", _as_fraction(self.overall_rate))
        object.__setattr__(self, "cc_rate", _as_fraction(self.cc_rate))
        object.__setattr__(self, "bits_per_subcarrier", self.modulation.bits_per_symbol)
        object.__setattr__(self, "n_cbps", N_DATA_SUBCARRIERS * self.modulation.bits_per_symbol)
        if not 0 < self.rs_k <= self.rs_n <= 255:
            raise ValueError(f"invalid RS({self.rs_n},{self.rs_k})")
        if 2 * self.rs_t != self.rs_n - self.rs_k:
            raise ValueError(f"RS({self.rs_n},{self.rs_k}) cannot have t={self.rs_t}")
        if self.cc_rate not in CC_RATES:
            raise ValueError(f"unsupported convolutional rate {self.cc_rate}")
        coded_bits = Fraction(8 * self.rs_n) / self.cc_rate
        if coded_bits != self.n_cbps:
            raise ValueError(
                f"{self.name}: RS block of {self.rs_n} bytes at rate {self.cc_rate} "
                f"gives {coded_bits} coded bits, expected {self.n_cbps}"
            )

    @property
    def name(self) -> str:
        return f"{self.modulation.label}-{self.overall_rate}"

    @property
    def uses_rs(self) -> bool:
        return self.rs_t > 0


_PROFILE_FILE = "profiles.csv"


def load_profiles(text: str | None = None) -> list[CodingProfile]:
    """Parse a profile table (CSV with a header row).

    Columns: ``modulation,overall_rate,rs_n,rs_k,rs_t,cc_rate``. Lines that
    start with ``#`` are ignored. Without ``text`` the bundled table is used.
    """
    if text is None:
        text = resources.files("wimaxsim").joinpath(_PROFILE_FILE).read_text()
    lines = [ln for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    rows = csv.DictReader(io.StringIO("\n".join(lines)))
    return [
        CodingProfile(
            modulation=Modulation.parse(row["modulation"]),
            overall_rate=Fraction(row["overall_rate"]),
            rs_n=int(row["rs_n"]),
            rs_k=int(row["rs_k"]),
            rs_t=int(row["rs_t"]),
            cc_rate=Fraction(row["cc_rate"]),
        )
        for row in rows
    ]


def profile_table() -> list[CodingProfile]:
    """The seven mandatory modulation/coding profiles, most robust first."""
    return load_profiles()


def find_profile(name: str, profiles: Iterable[CodingProfile] | None = None) -> CodingProfile:
    """Look up a profile by name such as ``"qpsk-3/4"`` or ``"16QAM-1/2"``."""
    mod_text, _, rate_text = name.strip().rpartition("-")
    if not mod_text:
        raise ValueError(f"profile name {name!r} must look like 'qpsk-1/2'")
    modulation = Modulation.parse(mod_text)
    rate = Fraction(rate_text)
    for prof in profiles if profiles is not None else profile_table():
        if prof.modulation is modulation and prof.overall_rate == rate:
            return prof
    raise ValueError(f"no coding profile named {name!r}")
