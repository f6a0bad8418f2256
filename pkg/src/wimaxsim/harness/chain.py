"""Transmit and receive chains for one coding profile.

Every OFDM symbol carries one FEC block. The last byte fed to the
convolutional encoder is a 0x00 tail byte that returns the encoder to the
zero state, so the outer code protects ``rs_n - 1`` bytes of which
``rs_k - 1`` are payload.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..channel.propagation import NEAR_ZERO, ideal_equalize
from ..fec import RsCode, cc_encode, depuncture, puncture, puncture_rate, rs_decode_blocks, \
    rs_encode_blocks, viterbi_decode_blocks
from ..interleaver import InterleaverSpec, build_spec, deinterleave, interleave
from ..modem import (
    ConstellationMap,
    assemble_frame,
    constellation,
    demap_soft,
    extract_data,
    map_bits,
    ofdm_demodulate,
    ofdm_modulate,
)
from ..params import CodingProfile, DerivedParams
from ..scrambler import DEFAULT_SEED, bits_to_bytes, bytes_to_bits, descramble, scramble

TAIL_BYTES = 1


@dataclass
class RxStats:
    rs_failures: int = 0
    rs_corrections: int = 0
    dead_bins: int = 0


@dataclass
class Link:
    """A configured transmitter/receiver pair.

    With ``uncoded=True`` randomized payload bits go straight to the mapper,
    which is only useful as a calibration path. ``csi_llr`` scales each
    subcarrier's bit metrics by its post-equalizer noise ``noise_var / |H|^2``
    instead of the common channel noise variance.
    """

    profile: CodingProfile
    params: DerivedParams
    scrambler_seed: int = DEFAULT_SEED
    uncoded: bool = False
    csi_llr: bool = False
    cmap: ConstellationMap = field(init=False)
    interleaver: InterleaverSpec = field(init=False)
    rs_code: RsCode | None = field(init=False)

    def __post_init__(self):
        self.cmap = constellation(self.profile.modulation)
        self.interleaver = build_spec(self.profile.n_cbps, self.profile.bits_per_subcarrier)
        self.rate = puncture_rate(self.profile.cc_rate)
        self.rs_code = (
            RsCode(self.profile.rs_n - TAIL_BYTES, self.profile.rs_k - TAIL_BYTES)
            if self.profile.uses_rs else None
        )

    @property
    def payload_bits(self) -> int:
        """Payload bits carried by one OFDM symbol."""
        if self.uncoded:
            return self.profile.n_cbps
        return 8 * (self.profile.rs_k - TAIL_BYTES)

    def encode(self, payload: np.ndarray) -> np.ndarray:
        """Payload bits ``(symbols, payload_bits)`` to coded bits ``(symbols, n_cbps)``."""
        bits = scramble(payload, self.scrambler_seed)
        if self.uncoded:
            return bits
        data = bits_to_bytes(bits)
        if self.rs_code is not None:
            data = rs_encode_blocks(data, self.rs_code)
        tail = np.zeros((data.shape[0], TAIL_BYTES), dtype=np.uint8)
        x, y = cc_encode(bytes_to_bits(np.concatenate([data, tail], axis=1)))
        return interleave(puncture(x, y, self.rate), self.interleaver)

    def transmit(self, payload: np.ndarray) -> np.ndarray:
        """Payload bits to time-domain samples ``(symbols, symbol_len)``."""
        symbols = map_bits(self.encode(payload), self.cmap)
        return ofdm_modulate(assemble_frame(symbols), self.params)

    def decode(self, llr: np.ndarray, stats: RxStats | None = None) -> np.ndarray:
        """Soft coded bits ``(symbols, n_cbps)`` back to payload bits."""
        if self.uncoded:
            return descramble((llr > 0).astype(np.uint8), self.scrambler_seed)
        x, y = depuncture(deinterleave(llr, self.interleaver), self.rate)
        bits = viterbi_decode_blocks(x, y)
        data = bits_to_bytes(bits)[:, : self.profile.rs_n - TAIL_BYTES]
        if self.rs_code is not None:
            data, corrections = rs_decode_blocks(data, self.rs_code)
            if stats is not None:
                stats.rs_failures += int(np.count_nonzero(corrections < 0))
                stats.rs_corrections += int(corrections[corrections > 0].sum())
        return descramble(bytes_to_bits(data), self.scrambler_seed)

    def receive(self, samples: np.ndarray, response: np.ndarray, noise_var: float,
                stats: RxStats | None = None) -> np.ndarray:
        """Equalize with the true response, demap and decode.

        ``response`` is the channel on centred subcarriers, one row per symbol.
        """
        h = extract_data(response)
        eq, n_dead = ideal_equalize(extract_data(ofdm_demodulate(samples, self.params)), h)
        if stats is not None:
            stats.dead_bins += n_dead
        if self.csi_llr:
            # noise seen by each bin after division by h; zeroed bins carry no information
            power = np.abs(h) ** 2
            bin_noise = np.divide(noise_var, power, out=np.full(power.shape, np.inf),
                                  where=np.abs(h) >= NEAR_ZERO)
        else:
            bin_noise = noise_var
        llr = demap_soft(eq, self.cmap, bin_noise)
        return self.decode(llr, stats)
