"""PRBS data randomizer with generator polynomial 1 + x^14 + x^15.

Bytes enter MSB first, so bit streams here are the ``np.unpackbits`` order of
the payload bytes. The randomizer is an additive stream cipher, which makes
:func:`descramble` the same operation as :func:`scramble`.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

REGISTER_BITS = 15
PERIOD = (1 << REGISTER_BITS) - 1
DEFAULT_SEED = PERIOD  # all ones


@dataclass(frozen=True)
class ScramblerState:
    """Shift register contents; bit ``i`` of ``register`` is stage ``i + 1``."""

    register: int
    seed: int

    @classmethod
    def from_seed(cls, seed: int = DEFAULT_SEED) -> "ScramblerState":
        _check_seed(seed)
        return cls(register=seed, seed=seed)

    def step(self) -> tuple[int, "ScramblerState"]:
        """Clock the register once. Returns the output bit and the new state."""
        reg = self.register
        out = ((reg >> 13) ^ (reg >> 14)) & 1
        reg = ((reg << 1) | out) & PERIOD
        return out, ScramblerState(register=reg, seed=self.seed)


def _check_seed(seed: int) -> None:
    if not 0 < seed <= PERIOD:
        raise ValueError(f"scrambler seed must be a non-zero 15-bit value, got {seed!r}")


@lru_cache(maxsize=8)
def _period(seed: int) -> np.ndarray:
    out = np.empty(PERIOD, dtype=np.uint8)
    reg = seed
    for i in range(PERIOD):
        b = ((reg >> 13) ^ (reg >> 14)) & 1
        out[i] = b
        reg = ((reg << 1) | b) & PERIOD
    out.setflags(write=False)
    return out


def prbs(length: int, seed: int = DEFAULT_SEED) -> np.ndarray:
    """First ``length`` output bits of the randomizer started from ``seed``."""
    _check_seed(seed)
    period = _period(seed)
    reps = -(-length // PERIOD)
    return np.tile(period, reps)[:length] if reps > 1 else period[:length].copy()


def scramble(bits, seed: int = DEFAULT_SEED) -> np.ndarray:
    bits = np.asarray(bits, dtype=np.uint8)
    return bits ^ prbs(bits.size, seed).reshape(bits.shape) if bits.size else bits.copy()


def descramble(bits, seed: int = DEFAULT_SEED) -> np.ndarray:
    return scramble(bits, seed)


def bytes_to_bits(data) -> np.ndarray:
    return np.unpackbits(np.asarray(data, dtype=np.uint8), axis=-1)


def bits_to_bytes(bits) -> np.ndarray:
    return np.packbits(np.asarray(bits, dtype=np.uint8), axis=-1)
