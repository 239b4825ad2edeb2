"""Differential BPSK mapping and the XOR network-coding reference.

Bit to phase mapping: a coded bit of 0 flips the phase (delta phi = pi) and a
coded bit of 1 keeps it (delta phi = 0). This is the reverse of the usual
DPSK convention and is kept on purpose; every other module relies on it.

A frame of N coded bits becomes N + 1 symbols. Symbol 0 is the reference
(+1 by default at both sources) and coded bit ``c[k]`` drives the transition
from symbol ``k`` to symbol ``k + 1``.
"""

import numpy as np

REFERENCE_SYMBOL = 1


def _as_bits(bits, name="bits"):
    arr = np.asarray(bits)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional")
    if arr.size and not np.isin(arr, (0, 1)).all():
        raise ValueError(f"{name} must only contain 0 and 1")
    return arr.astype(np.int8)


def differential_encode(coded, u0=REFERENCE_SYMBOL, Es=1.0):
    """Map N coded bits to N + 1 differentially encoded BPSK symbols.

    ``u(k+1) = u(k) * (2 c(k) - 1)`` with ``u(0) = u0``; the returned
    symbols are scaled by ``sqrt(Es)``.
    """
    c = _as_bits(coded, "coded")
    if c.size == 0:
        raise ValueError("coded sequence is empty")
    if u0 not in (1, -1):
        raise ValueError(f"reference symbol must be +1 or -1, got {u0!r}")
    if Es <= 0:
        raise ValueError("Es must be positive")
    factors = np.concatenate(([u0], 2 * c.astype(np.int64) - 1))
    u = np.cumprod(factors)
    return np.sqrt(Es) * u.astype(np.float64)


def differential_decode_hard(symbols, Es=None):
    """Invert :func:`differential_encode` on noiseless antipodal symbols."""
    s = np.asarray(symbols)
    if s.ndim != 1 or s.size < 2:
        raise ValueError("need at least two symbols (reference plus payload)")
    if np.iscomplexobj(s):
        if np.any(np.abs(s.imag) > 1e-9 * np.max(np.abs(s))):
            raise ValueError("symbols are not antipodal real values")
        s = s.real
    amp = np.sqrt(Es) if Es is not None else np.abs(s[0])
    if amp == 0 or not np.allclose(np.abs(s), amp, rtol=1e-9, atol=0):
        raise ValueError("symbols are not antipodal with a common amplitude")
    u = np.sign(s).astype(np.int64)
    return ((u[1:] * u[:-1] + 1) // 2).astype(np.int8)


def xor_reference(c1, c2):
    """Network-coded word ``c1 XOR c2``."""
    a = _as_bits(c1, "c1")
    b = _as_bits(c2, "c2")
    if a.shape != b.shape:
        raise ValueError(f"length mismatch: {a.size} vs {b.size}")
    return np.bitwise_xor(a, b)
