"""Reproducible random streams.

Every random quantity in the package comes from a counter-based Philox
stream keyed by a 64-bit seed. Uniforms are built from the top 53 bits
of each raw 64-bit word as ``(k + 0.5) / 2**53``, which lies strictly
inside (0, 1). Standard normals are the inverse normal CDF (``ndtri``) of
those uniforms, so the i-th variate depends only on (seed, i) and never
on how many variates were drawn before or by whom.

Seeds for individual replicates are derived from the study's master seed
and the replicate's coordinates with ``numpy.random.SeedSequence``, a
documented hash-based mixer, truncated to one 64-bit word.
"""
import struct
import zlib

import numpy as np
from scipy.special import ndtri

_MASK64 = (1 << 64) - 1
_SCALE = 2.0 ** -53


def label_code(label):
    """Stable 32-bit integer for a string label (CRC-32 of UTF-8)."""
    return zlib.crc32(str(label).encode("utf-8"))


def alpha_code(alpha):
    """Bit pattern of a float as an unsigned 64-bit integer."""
    return struct.unpack("<Q", struct.pack("<d", float(alpha)))[0]


def derive_seed(master_seed, replicate, label="", alpha=None, stream=0):
    """Mix a master seed and replicate coordinates into a 64-bit seed.

    ``stream`` separates independent uses of one coordinate tuple (for
    example the noise and the Bernoulli draw of the same replicate).
    """
    entropy = [int(master_seed) & _MASK64, int(replicate), label_code(label), int(stream)]
    if alpha is not None:
        entropy.append(alpha_code(alpha))
    ss = np.random.SeedSequence(entropy)
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def uniforms(seed, n):
    """The first ``n`` uniforms in (0, 1) of the stream keyed by ``seed``."""
    bg = np.random.Philox(key=int(seed) & _MASK64)
    raw = bg.random_raw(int(n))
    return ((raw >> np.uint64(11)).astype(np.float64) + 0.5) * _SCALE


def standard_normals(seed, n):
    """``n`` i.i.d. standard normals by inverse-CDF transform of ``uniforms``."""
    return ndtri(uniforms(seed, n))


def bernoulli(seed, prob):
    """Single Bernoulli(prob) outcome as 0/1 from the first uniform of the stream."""
    if prob <= 0.0:
        return 0
    if prob >= 1.0:
        return 1
    return int(uniforms(seed, 1)[0] < prob)
