"""Two-permutation block interleaver over one OFDM symbol of coded bits.

The first permutation spreads adjacent coded bits across subcarriers twelve
columns apart; the second alternates them between more and less reliable
constellation bit positions. The receiver's two permutations are computed
from their own closed forms and checked against the transmitter's at
construction time.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

VALID_NCPC = (1, 2, 4, 6)


def first_permutation(n_cbps: int) -> np.ndarray:
    k = np.arange(n_cbps)
    return (n_cbps // 12) * (k % 12) + k // 12


def second_permutation(first: np.ndarray, n_cbps: int, s: int) -> np.ndarray:
    m = first
    return s * (m // s) + (m + n_cbps - (12 * m) // n_cbps) % s


def receiver_permutations(n_cbps: int, s: int) -> tuple[np.ndarray, np.ndarray]:
    j = np.arange(n_cbps)
    f = s * (j // s) + (j + (12 * j) // n_cbps) % s
    return f, 12 * f - (n_cbps - 1) * ((12 * f) // n_cbps)


@dataclass(frozen=True, eq=False)
class InterleaverSpec:
    n_cbps: int
    s: int
    first_perm: np.ndarray
    second_perm: np.ndarray
    rx_first_perm: np.ndarray
    rx_second_perm: np.ndarray

    @property
    def tx_index(self) -> np.ndarray:
        """Output position of each input bit: ``out[tx_index[k]] = in[k]``."""
        return self.second_perm

    @property
    def rx_index(self) -> np.ndarray:
        """Output position of each received bit: ``out[rx_index[j]] = in[j]``."""
        return self.rx_second_perm


def _is_permutation(p: np.ndarray, n: int) -> bool:
    return p.shape == (n,) and np.array_equal(np.sort(p), np.arange(n))


def build_spec(n_cbps: int, n_cpc: int) -> InterleaverSpec:
    if n_cpc not in VALID_NCPC:
        raise ValueError(f"bits per subcarrier must be one of {VALID_NCPC}, got {n_cpc}")
    if n_cbps <= 0 or n_cbps % 12 or n_cbps % n_cpc:
        raise ValueError(f"n_cbps={n_cbps} is not a valid block size for {n_cpc} bits/subcarrier")
    s = -(-n_cpc // 2)
    first = first_permutation(n_cbps)
    second = second_permutation(first, n_cbps, s)
    rx_first, rx_second = receiver_permutations(n_cbps, s)
    for name, p in (("first", first), ("second", second),
                    ("receiver first", rx_first), ("receiver second", rx_second)):
        if not _is_permutation(p, n_cbps):
            raise ValueError(f"{name} interleaver permutation is not a bijection for n_cbps={n_cbps}")
    # receiver index j = second[k] must land back on k
    if not np.array_equal(rx_second[second], np.arange(n_cbps)):
        raise ValueError(f"receiver permutations do not invert the transmitter for n_cbps={n_cbps}")
    for arr in (first, second, rx_first, rx_second):
        arr.setflags(write=False)
    return InterleaverSpec(n_cbps, s, first, second, rx_first, rx_second)


def interleave(bits, spec: InterleaverSpec) -> np.ndarray:
    """Permute the last axis, which must hold ``n_cbps`` values."""
    bits = np.asarray(bits)
    if bits.shape[-1] != spec.n_cbps:
        raise ValueError(f"expected blocks of {spec.n_cbps} bits, got {bits.shape[-1]}")
    out = np.empty_like(bits)
    out[..., spec.tx_index] = bits
    return out


def deinterleave(bits, spec: InterleaverSpec) -> np.ndarray:
    bits = np.asarray(bits)
    if bits.shape[-1] != spec.n_cbps:
        raise ValueError(f"expected blocks of {spec.n_cbps} values, got {bits.shape[-1]}")
    out = np.empty_like(bits)
    out[..., spec.rx_index] = bits
    return out
