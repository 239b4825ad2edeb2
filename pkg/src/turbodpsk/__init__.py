"""Iterative DPSK demodulation and JCNC decoding at a two-way relay."""

from turbodpsk.channel import ChannelParams, ChannelRealization
from turbodpsk.signal import differential_decode_hard, differential_encode, xor_reference

__version__ = "0.1.0"

__all__ = [
    "ChannelParams",
    "ChannelRealization",
    "differential_encode",
    "differential_decode_hard",
    "xor_reference",
]
