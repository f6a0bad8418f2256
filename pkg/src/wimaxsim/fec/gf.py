"""Arithmetic in GF(2^8) with field polynomial x^8 + x^4 + x^3 + x^2 + 1."""

from __future__ import annotations

import numpy as np

FIELD_POLY = 0x11D
PRIMITIVE = 0x02
ORDER = 255


class GaloisField256:
    """Log/antilog tables for GF(256).

    ``exp`` has 510 entries so that ``exp[log[a] + log[b]]`` needs no modulo.
    ``log[0]`` is a sentinel and must not be used.
    """

    def __init__(self, poly: int = FIELD_POLY):
        self.poly = poly
        exp = np.zeros(2 * ORDER, dtype=np.int64)
        log = np.zeros(256, dtype=np.int64)
        x = 1
        for i in range(ORDER):
            exp[i] = x
            log[x] = i
            x <<= 1
            if x & 0x100:
                x ^= poly
        if len(set(exp[:ORDER].tolist())) != ORDER:
            raise ValueError(f"polynomial {poly:#x} is not primitive")
        exp[ORDER:] = exp[:ORDER]
        exp.setflags(write=False)
        log.setflags(write=False)
        self.exp = exp
        self.log = log

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        return int(self.exp[self.log[a] + self.log[b]])

    def div(self, a: int, b: int) -> int:
        if b == 0:
            raise ZeroDivisionError("division by zero in GF(256)")
        if a == 0:
            return 0
        return int(self.exp[(self.log[a] - self.log[b]) % ORDER])

    def inverse(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("zero has no inverse in GF(256)")
        return int(self.exp[ORDER - self.log[a]])

    def pow(self, a: int, e: int) -> int:
        if a == 0:
            return 0 if e else 1
        return int(self.exp[(self.log[a] * e) % ORDER])

    def mul_array(self, a, b) -> np.ndarray:
        """Elementwise product of two broadcastable integer arrays."""
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        out = self.exp[(self.log[a] + self.log[b]) % ORDER]
        return np.where((a == 0) | (b == 0), 0, out)

    # Polynomials are lists of coefficients, highest degree first.

    def poly_mul(self, p, q) -> list[int]:
        out = [0] * (len(p) + len(q) - 1)
        for i, a in enumerate(p):
            if a == 0:
                continue
            for j, b in enumerate(q):
                out[i + j] ^= self.mul(a, b)
        return out

    def poly_eval(self, p, x: int) -> int:
        y = 0
        for c in p:
            y = self.mul(y, x) ^ c
        return y


GF256 = GaloisField256()
