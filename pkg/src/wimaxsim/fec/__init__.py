from .convolutional import (
    PUNCTURE_RATES,
    PunctureRate,
    cc_encode,
    depuncture,
    puncture,
    puncture_rate,
    viterbi_decode,
    viterbi_decode_blocks,
)
from .gf import GF256, GaloisField256
from .reed_solomon import (
    MOTHER_CODE,
    ReedSolomonError,
    RsCode,
    rs_decode,
    rs_decode_blocks,
    rs_encode,
    rs_encode_blocks,
)

__all__ = [
    "GF256",
    "MOTHER_CODE",
    "PUNCTURE_RATES",
    "GaloisField256",
    "PunctureRate",
    "ReedSolomonError",
    "RsCode",
    "cc_encode",
    "depuncture",
    "puncture",
    "puncture_rate",
    "rs_decode",
    "rs_decode_blocks",
    "rs_encode",
    "rs_encode_blocks",
    "viterbi_decode",
    "viterbi_decode_blocks",
]
