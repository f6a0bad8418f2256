"""Rate-1/2, constraint length 7 convolutional code with puncturing.

Generators are 171 (X) and 133 (Y) in octal; the most significant generator
bit taps the current input. Blocks start in the all-zero state and are
expected to end with at least six zero bits, so the decoder terminates in
state zero.

Soft values follow the demapper's convention: positive means bit 1, zero is
an erasure.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numba
import numpy as np

CONSTRAINT_LENGTH = 7
N_STATES = 1 << (CONSTRAINT_LENGTH - 1)
G_X = 0o171
G_Y = 0o133


def _taps(gen: int) -> tuple[int, ...]:
    # delay d multiplies u[t - d]; generator bit (K-1-d) selects it
    return tuple(d for d in range(CONSTRAINT_LENGTH) if gen >> (CONSTRAINT_LENGTH - 1 - d) & 1)


@dataclass(frozen=True)
class PunctureRate:
    rate: Fraction
    x_mask: tuple[int, ...]
    y_mask: tuple[int, ...]
    d_free: int

    @property
    def period(self) -> int:
        return len(self.x_mask)

    @property
    def kept_per_period(self) -> int:
        return sum(self.x_mask) + sum(self.y_mask)

    def order(self) -> np.ndarray:
        """Positions kept from the interleaved ``X1 Y1 X2 Y2 ...`` stream."""
        idx = []
        for i, (x, y) in enumerate(zip(self.x_mask, self.y_mask)):
            if x:
                idx.append(2 * i)
            if y:
                idx.append(2 * i + 1)
        return np.asarray(idx, dtype=np.int64)


PUNCTURE_RATES = {
    Fraction(1, 2): PunctureRate(Fraction(1, 2), (1,), (1,), 10),
    Fraction(2, 3): PunctureRate(Fraction(2, 3), (1, 0), (1, 1), 6),
    Fraction(3, 4): PunctureRate(Fraction(3, 4), (1, 0, 1), (1, 1, 0), 5),
    Fraction(5, 6): PunctureRate(Fraction(5, 6), (1, 0, 1, 0, 1), (1, 1, 0, 1, 0), 4),
}


def puncture_rate(rate) -> PunctureRate:
    try:
        return PUNCTURE_RATES[Fraction(rate)]
    except KeyError:
        raise ValueError(f"unsupported puncture rate {rate}") from None


def cc_encode(bits) -> tuple[np.ndarray, np.ndarray]:
    """Encode bits along the last axis. Returns the X and Y streams."""
    u = np.asarray(bits, dtype=np.uint8)
    x = np.zeros_like(u)
    y = np.zeros_like(u)
    for stream, gen in ((x, G_X), (y, G_Y)):
        for d in _taps(gen):
            if d == 0:
                stream ^= u
            else:
                stream[..., d:] ^= u[..., :-d]
    return x, y


def pad_to_period(bits, rate: PunctureRate) -> np.ndarray:
    """Append zeros so the last axis is a whole number of puncture periods."""
    bits = np.asarray(bits, dtype=np.uint8)
    extra = -bits.shape[-1] % rate.period
    if not extra:
        return bits
    pad = [(0, 0)] * (bits.ndim - 1) + [(0, extra)]
    return np.pad(bits, pad)


def puncture(x_stream, y_stream, rate) -> np.ndarray:
    rate = puncture_rate(rate) if not isinstance(rate, PunctureRate) else rate
    x = np.asarray(x_stream)
    y = np.asarray(y_stream)
    if x.shape != y.shape:
        raise ValueError("X and Y streams differ in length")
    if x.shape[-1] % rate.period:
        raise ValueError(
            f"stream length {x.shape[-1]} is not a multiple of the puncture period {rate.period}"
        )
    lead = x.shape[:-1]
    pairs = np.stack([x, y], axis=-1).reshape(*lead, -1, 2 * rate.period)
    return pairs[..., rate.order()].reshape(*lead, -1)


def depuncture(soft, rate) -> tuple[np.ndarray, np.ndarray]:
    """Expand punctured soft values back to X/Y streams, erasures set to 0."""
    rate = puncture_rate(rate) if not isinstance(rate, PunctureRate) else rate
    soft = np.asarray(soft, dtype=np.float64)
    kept = rate.kept_per_period
    if soft.shape[-1] % kept:
        raise ValueError(
            f"{soft.shape[-1]} soft values do not fill whole puncture periods of {kept}"
        )
    lead = soft.shape[:-1]
    n_periods = soft.shape[-1] // kept
    full = np.zeros((*lead, n_periods, 2 * rate.period))
    full[..., rate.order()] = soft.reshape(*lead, n_periods, kept)
    full = full.reshape(*lead, n_periods * rate.period, 2)
    return full[..., 0], full[..., 1]


def _branch_tables() -> tuple[np.ndarray, np.ndarray]:
    # For next state ns and predecessor choice e: outputs of that transition.
    out_x = np.zeros((N_STATES, 2), dtype=np.float64)
    out_y = np.zeros((N_STATES, 2), dtype=np.float64)
    for ns in range(N_STATES):
        u = ns >> 5
        for e in range(2):
            prev = ((ns & 31) << 1) | e
            reg = (u << 6) | prev
            out_x[ns, e] = 2.0 * (bin(reg & G_X).count("1") & 1) - 1.0
            out_y[ns, e] = 2.0 * (bin(reg & G_Y).count("1") & 1) - 1.0
    return out_x, out_y


_OUT_X, _OUT_Y = _branch_tables()


@numba.njit(cache=True)
def _viterbi_kernel(llr_x, llr_y, out_x, out_y):
    n_blocks, n_steps = llr_x.shape
    decoded = np.zeros((n_blocks, n_steps), dtype=np.uint8)
    decisions = np.zeros((n_steps, 64), dtype=np.uint8)
    metric = np.empty(64)
    new_metric = np.empty(64)
    for b in range(n_blocks):
        metric[:] = -1e300
        metric[0] = 0.0
        for t in range(n_steps):
            lx = llr_x[b, t]
            ly = llr_y[b, t]
            for ns in range(64):
                p0 = (ns & 31) << 1
                m0 = metric[p0] + lx * out_x[ns, 0] + ly * out_y[ns, 0]
                m1 = metric[p0 | 1] + lx * out_x[ns, 1] + ly * out_y[ns, 1]
                if m1 > m0:
                    new_metric[ns] = m1
                    decisions[t, ns] = 1
                else:
                    new_metric[ns] = m0
                    decisions[t, ns] = 0
            metric[:] = new_metric
        state = 0
        for t in range(n_steps - 1, -1, -1):
            decoded[b, t] = state >> 5
            state = ((state & 31) << 1) | decisions[t, state]
    return decoded


def viterbi_decode_blocks(llr_x, llr_y) -> np.ndarray:
    """Maximum-likelihood decoding of ``(blocks, steps)`` soft X/Y values."""
    llr_x = np.ascontiguousarray(np.atleast_2d(llr_x), dtype=np.float64)
    llr_y = np.ascontiguousarray(np.atleast_2d(llr_y), dtype=np.float64)
    if llr_x.shape != llr_y.shape:
        raise ValueError("X and Y soft streams differ in shape")
    return _viterbi_kernel(llr_x, llr_y, _OUT_X, _OUT_Y)


def viterbi_decode(soft_values) -> np.ndarray:
    """Decode one block of interleaved ``X1 Y1 X2 Y2 ...`` soft values."""
    soft = np.asarray(soft_values, dtype=np.float64)
    if soft.ndim != 1 or soft.size % 2:
        raise ValueError("expected an even-length 1-D sequence of soft values")
    pairs = soft.reshape(-1, 2)
    return viterbi_decode_blocks(pairs[:, 0], pairs[:, 1])[0]
