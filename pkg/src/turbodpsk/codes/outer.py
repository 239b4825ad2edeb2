"""Uniform SISO interface over the two outer codes used at the relay."""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from turbodpsk.codes.conv import ConvCode, conv_bcjr_siso, conv_encode
from turbodpsk.codes.interleaver import Interleaver
from turbodpsk.codes.ldpc import ldpc_build, ldpc_encode, ldpc_spa_decode


@dataclass
class OuterDecision:
    extrinsic: np.ndarray  # coded-bit extrinsic LLRs
    codeword: np.ndarray  # hard decision on the coded word
    converged: bool


class LdpcOuter:
    name = "ldpc"

    def __init__(self, code=None, max_iter=20, interleaver=None):
        self.code = code if code is not None else ldpc_build()
        self.max_iter = max_iter
        self.interleaver = interleaver if interleaver is not None else Interleaver.shipped(self.n)

    @property
    def n(self):
        return self.code.n

    @property
    def k(self):
        return self.code.k

    @property
    def rate(self):
        return self.code.rate

    def encode(self, info):
        return ldpc_encode(info, self.code)

    def is_codeword(self, c):
        return self.code.is_codeword(c)

    def decode(self, channel_llr):
        res = ldpc_spa_decode(channel_llr, self.code, self.max_iter)
        return OuterDecision(res.extrinsic, res.hard, res.converged)


class ConvOuter:
    name = "conv"

    def __init__(self, code=None, interleaver=None):
        self.code = code if code is not None else ConvCode()
        self.interleaver = interleaver if interleaver is not None else Interleaver.shipped(self.n)

    @property
    def n(self):
        return self.code.n

    @property
    def k(self):
        return self.code.k

    @property
    def rate(self):
        return self.code.rate

    def encode(self, info):
        return conv_encode(info, self.code)

    def is_codeword(self, c):
        return self.code.is_codeword(c)

    def decode(self, channel_llr):
        res = conv_bcjr_siso(channel_llr, self.code)
        codeword = conv_encode(res.hard_info, self.code)
        # agreement between coded-bit MAP decisions and the re-encoded path
        converged = bool(np.array_equal((res.posterior > 0).astype(np.int8), codeword))
        return OuterDecision(res.extrinsic, codeword, converged)


@lru_cache(maxsize=None)
def make_outer(name):
    """Shared, immutable outer-code instance for ``"ldpc"`` or ``"conv"``."""
    if name == "ldpc":
        return LdpcOuter()
    if name == "conv":
        return ConvOuter()
    raise ValueError(f"unknown outer code {name!r}; expected 'ldpc' or 'conv'")
