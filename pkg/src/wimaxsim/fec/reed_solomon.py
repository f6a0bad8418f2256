"""Systematic Reed-Solomon codes over GF(256).

A code RS(n, k) with t = (n - k) / 2 uses the generator
``(x + a^0)(x + a^1)...(x + a^(2t-1))`` with ``a = 0x02``. Shortened codes
are the (255, 255 - 2t) mother code with ``255 - n`` leading zero data
symbols; those zeros leave the division register untouched, so encoding and
decoding just work on the n transmitted symbols as a polynomial of degree
n - 1.

Decoding follows the usual path: syndromes, Berlekamp-Massey for the error
locator, Chien search for its roots and Forney's formula for the values.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .gf import GF256, ORDER


class ReedSolomonError(Exception):
    """Raised when a received word has more errors than the code can locate."""


def _generator(t: int) -> tuple[int, ...]:
    g = [1]
    for j in range(2 * t):
        g = GF256.poly_mul(g, [1, GF256.pow(0x02, j)])
    return tuple(g)


@dataclass(frozen=True)
class RsCode:
    n: int
    k: int
    t: int = field(init=False)
    generator: tuple[int, ...] = field(init=False, repr=False)

    def __post_init__(self):
        if not 0 < self.k <= self.n <= ORDER:
            raise ValueError(f"invalid RS({self.n},{self.k})")
        if (self.n - self.k) % 2:
            raise ValueError(f"RS({self.n},{self.k}) needs an even number of parity symbols")
        object.__setattr__(self, "t", (self.n - self.k) // 2)
        object.__setattr__(self, "generator", _generator(self.t))

    @property
    def n_parity(self) -> int:
        return self.n - self.k


MOTHER_CODE = RsCode(255, 239)


def rs_encode_blocks(data, code: RsCode) -> np.ndarray:
    """Encode a ``(blocks, k)`` array of symbols into ``(blocks, n)`` codewords."""
    data = np.asarray(data, dtype=np.int64)
    if data.ndim != 2 or data.shape[1] != code.k:
        raise ValueError(f"expected data of shape (blocks, {code.k}), got {data.shape}")
    if code.t == 0:
        return data.astype(np.uint8)
    g = np.asarray(code.generator[1:], dtype=np.int64)
    reg = np.zeros((data.shape[0], code.n_parity), dtype=np.int64)
    for i in range(code.k):
        fb = data[:, i] ^ reg[:, 0]
        reg[:, :-1] = reg[:, 1:]
        reg[:, -1] = 0
        reg ^= GF256.mul_array(fb[:, None], g[None, :])
    return np.concatenate([data, reg], axis=1).astype(np.uint8)


def rs_encode(data, code: RsCode) -> np.ndarray:
    data = np.asarray(data, dtype=np.int64)
    if data.shape != (code.k,):
        raise ValueError(f"expected {code.k} data symbols, got {data.size}")
    return rs_encode_blocks(data[None, :], code)[0]


def _syndrome_matrix(code: RsCode) -> np.ndarray:
    # entry [j, i] = a^(j * (n - 1 - i))
    j = np.arange(2 * code.t)[:, None]
    deg = (code.n - 1 - np.arange(code.n))[None, :]
    return GF256.exp[(j * deg) % ORDER]


def syndromes(codewords, code: RsCode) -> np.ndarray:
    """Syndromes ``S_j = c(a^j)``, shape ``(blocks, 2t)``."""
    c = np.asarray(codewords, dtype=np.int64)
    prod = GF256.mul_array(c[:, None, :], _syndrome_matrix(code)[None, :, :])
    return np.bitwise_xor.reduce(prod, axis=2)


def _berlekamp_massey(synd) -> list[int]:
    """Error locator, lowest degree first."""
    gf = GF256
    C = [1]
    B = [1]
    L = 0
    m = 1
    b = 1
    for r in range(len(synd)):
        d = synd[r]
        for i in range(1, L + 1):
            if i < len(C):
                d ^= gf.mul(C[i], synd[r - i])
        if d == 0:
            m += 1
            continue
        coef = gf.div(d, b)
        shifted = [0] * m + [gf.mul(coef, x) for x in B]
        T = list(C)
        if len(shifted) > len(C):
            C = C + [0] * (len(shifted) - len(C))
        for i, x in enumerate(shifted):
            C[i] ^= x
        if 2 * L <= r:
            L = r + 1 - L
            B = T
            b = d
            m = 1
        else:
            m += 1
    while len(C) > 1 and C[-1] == 0:
        C.pop()
    if len(C) - 1 != L:
        raise ReedSolomonError("error locator degree inconsistent with register length")
    return C


def _correct(codeword: np.ndarray, synd, code: RsCode) -> int:
    """Correct ``codeword`` in place and return the number of symbols fixed."""
    gf = GF256
    locator = _berlekamp_massey(list(int(s) for s in synd))
    n_err = len(locator) - 1
    if n_err == 0 or n_err > code.t:
        raise ReedSolomonError(f"cannot correct: locator degree {n_err}")

    # Chien search over the transmitted degrees 0..n-1
    deg = np.arange(code.n)
    acc = np.zeros(code.n, dtype=np.int64)
    for i, coef in enumerate(locator):
        if coef:
            acc ^= gf.exp[(gf.log[coef] - deg * i) % ORDER]
    roots = np.flatnonzero(acc == 0)
    if roots.size != n_err:
        raise ReedSolomonError(f"found {roots.size} locator roots, expected {n_err}")

    # Forney, first consecutive root a^0
    two_t = 2 * code.t
    omega = [0] * two_t
    for i, s in enumerate(synd):
        for j, lam in enumerate(locator):
            if i + j < two_t:
                omega[i + j] ^= gf.mul(int(s), lam)
    for p in roots:
        x = gf.pow(0x02, int(p))
        x_inv = gf.inverse(x)
        num = 0
        for c in reversed(omega):
            num = gf.mul(num, x_inv) ^ c
        den = 0
        for i in range(1, len(locator), 2):
            den ^= gf.mul(locator[i], gf.pow(x_inv, i - 1))
        if den == 0:
            raise ReedSolomonError("zero derivative in Forney evaluation")
        codeword[code.n - 1 - p] ^= gf.mul(x, gf.div(num, den))
    return n_err


def rs_decode_blocks(codewords, code: RsCode) -> tuple[np.ndarray, np.ndarray]:
    """Decode ``(blocks, n)`` received words.

    Returns ``(data, corrections)``. ``corrections[b]`` is the number of symbols
    fixed in block ``b``, or -1 if decoding failed; failed blocks come back
    with their received data symbols unchanged.
    """
    cw = np.asarray(codewords, dtype=np.uint8)
    if cw.ndim != 2 or cw.shape[1] != code.n:
        raise ValueError(f"expected codewords of shape (blocks, {code.n}), got {cw.shape}")
    corrections = np.zeros(cw.shape[0], dtype=np.int64)
    if code.t == 0:
        return cw[:, : code.k].copy(), corrections
    synd = syndromes(cw, code)
    bad = np.flatnonzero(synd.any(axis=1))
    out = cw.copy()
    for b in bad:
        word = out[b].astype(np.int64)
        try:
            fixed = _correct(word, synd[b], code)
        except ReedSolomonError:
            corrections[b] = -1
            continue
        if syndromes(word[None, :], code).any():
            corrections[b] = -1
            continue
        out[b] = word
        corrections[b] = fixed
    return out[:, : code.k], corrections


def rs_decode(codeword, code: RsCode) -> tuple[np.ndarray, int]:
    """Decode one received word; raises :class:`ReedSolomonError` on failure."""
    cw = np.asarray(codeword, dtype=np.uint8)
    if cw.shape != (code.n,):
        raise ValueError(f"expected {code.n} symbols, got {cw.size}")
    data, corr = rs_decode_blocks(cw[None, :], code)
    if corr[0] < 0:
        raise ReedSolomonError("too many symbol errors to correct")
    return data[0], int(corr[0])
