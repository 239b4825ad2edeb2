"""Rate-1/2 feedforward convolutional code (23, 35)_8 with a BCJR SISO decoder.

Generator taps are read MSB first: the leading octal bit multiplies the
current input. ``23 = 10011`` and ``35 = 11101`` (memory 4, 16 states).
Frames are zero-terminated with 4 tail bits, so 504 info bits give 1016
coded bits ordered ``(v1(0), v2(0), v1(1), v2(1), ...)``.
"""

from dataclasses import dataclass

import numba
import numpy as np


@dataclass(frozen=True)
class ConvCode:
    generators: tuple = (0o23, 0o35)
    memory: int = 4
    info_length: int = 504

    @property
    def n_states(self):
        return 1 << self.memory

    @property
    def n(self):
        return 2 * (self.info_length + self.memory)

    @property
    def k(self):
        return self.info_length

    @property
    def rate(self):
        return self.k / self.n

    def tables(self):
        """(next_state, outputs) indexed by [state, input]; outputs has shape (S, 2, 2)."""
        S = self.n_states
        nxt = np.empty((S, 2), dtype=np.int64)
        out = np.empty((S, 2, 2), dtype=np.int64)
        for s in range(S):
            for u in (0, 1):
                reg = (u << self.memory) | s
                nxt[s, u] = reg >> 1
                for j, g in enumerate(self.generators):
                    out[s, u, j] = bin(reg & g).count("1") & 1
        return nxt, out

    def is_codeword(self, c):
        """Membership: re-encoding the decoded info bits reproduces ``c`` and the tail is zero."""
        c = np.asarray(c, dtype=np.int8)
        if c.shape != (self.n,):
            return False
        nxt, out = self.tables()
        s = 0
        v = c.reshape(-1, 2)
        for t in range(v.shape[0]):
            # for a feedforward code with g1 tap on the current input, v1 fixes u given s
            u = (v[t, 0] ^ out[s, 0, 0]) & 1
            if t >= self.info_length and u:
                return False
            if out[s, u, 0] != v[t, 0] or out[s, u, 1] != v[t, 1]:
                return False
            s = nxt[s, u]
        return s == 0


def conv_encode(info, code=ConvCode()):
    info = np.asarray(info, dtype=np.int64)
    if info.shape != (code.info_length,):
        raise ValueError(f"expected {code.info_length} info bits, got {info.shape}")
    nxt, out = code.tables()
    u_all = np.concatenate([info, np.zeros(code.memory, dtype=np.int64)])
    coded = np.empty((u_all.size, 2), dtype=np.int8)
    s = 0
    for t, u in enumerate(u_all):
        coded[t] = out[s, u]
        s = nxt[s, u]
    return coded.reshape(-1)


@numba.njit(cache=True)
def _lse(a, b):
    if a == -np.inf:
        return b
    if b == -np.inf:
        return a
    if a > b:
        return a + np.log1p(np.exp(b - a))
    return b + np.log1p(np.exp(a - b))


@numba.njit(cache=True)
def _bcjr(lch, la, nxt, out, n_info):
    T = lch.shape[0] // 2
    S = nxt.shape[0]
    NEG = -np.inf
    alpha = np.full((T + 1, S), NEG)
    beta = np.full((T + 1, S), NEG)
    alpha[0, 0] = 0.0
    beta[T, 0] = 0.0
    gam = np.full((T, S, 2), NEG)
    for t in range(T):
        umax = 2 if t < n_info else 1
        for s in range(S):
            for u in range(umax):
                g = out[s, u, 0] * lch[2 * t] + out[s, u, 1] * lch[2 * t + 1]
                if t < n_info:
                    g += u * la[t]
                gam[t, s, u] = g
    for t in range(T):
        for s in range(S):
            a = alpha[t, s]
            if a == NEG:
                continue
            for u in range(2):
                g = gam[t, s, u]
                if g == NEG:
                    continue
                ns = nxt[s, u]
                alpha[t + 1, ns] = _lse(alpha[t + 1, ns], a + g)
        m = alpha[t + 1].max()
        alpha[t + 1] -= m
    for t in range(T - 1, -1, -1):
        for s in range(S):
            acc = NEG
            for u in range(2):
                g = gam[t, s, u]
                if g == NEG:
                    continue
                acc = _lse(acc, g + beta[t + 1, nxt[s, u]])
            beta[t, s] = acc
        m = beta[t].max()
        beta[t] -= m
    post_u = np.zeros(n_info)
    post_c = np.zeros(2 * T)
    for t in range(T):
        num_u = NEG
        den_u = NEG
        num = np.full(2, NEG)
        den = np.full(2, NEG)
        for s in range(S):
            a = alpha[t, s]
            if a == NEG:
                continue
            for u in range(2):
                g = gam[t, s, u]
                if g == NEG:
                    continue
                v = a + g + beta[t + 1, nxt[s, u]]
                if u == 1:
                    num_u = _lse(num_u, v)
                else:
                    den_u = _lse(den_u, v)
                for j in range(2):
                    if out[s, u, j] == 1:
                        num[j] = _lse(num[j], v)
                    else:
                        den[j] = _lse(den[j], v)
        if t < n_info:
            post_u[t] = num_u - den_u
        for j in range(2):
            post_c[2 * t + j] = num[j] - den[j]
    return post_u, post_c


@dataclass
class BcjrResult:
    posterior: np.ndarray  # coded bits
    extrinsic: np.ndarray  # coded bits, posterior minus channel
    info_posterior: np.ndarray
    hard_info: np.ndarray


def conv_bcjr_siso(channel_llr, code=ConvCode(), prior=None, l_max=None):
    """Exact symbol-wise MAP over the terminated trellis (log domain, exact max*).

    ``channel_llr`` covers the coded bits, ``prior`` the info bits; both are
    ``log P(1) / P(0)``. Start and end state are 0.
    """
    lch = np.asarray(channel_llr, dtype=np.float64)
    if lch.shape != (code.n,):
        raise ValueError(f"expected {code.n} channel LLRs, got {lch.shape}")
    la = np.zeros(code.k) if prior is None else np.asarray(prior, dtype=np.float64)
    if la.shape != (code.k,):
        raise ValueError(f"expected {code.k} prior LLRs, got {la.shape}")
    nxt, out = code.tables()
    post_u, post_c = _bcjr(lch, la, nxt, out, code.k)
    if l_max is not None:
        post_u = np.clip(post_u, -l_max, l_max)
        post_c = np.clip(post_c, -l_max, l_max)
    return BcjrResult(post_c, post_c - lch, post_u, (post_u > 0).astype(np.int8))
