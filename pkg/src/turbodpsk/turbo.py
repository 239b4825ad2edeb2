"""Iterative relay receiver: joint DPSK demodulator <-> outer SISO decoder.

The outer decoder works on the network-coded word ``c1 XOR c2``, which is a
codeword of the shared linear code. Its extrinsic LLRs on the XOR bits are
turned back into priors over the four bit pairs by splitting the mass
equally between the two pairs with the same XOR value.

By default the demodulator hands the decoder its extrinsic XOR LLRs (the
epoch's own prior left out); ``demod_output="posterior"`` passes the full
a-posteriori LLRs instead.
"""

from dataclasses import dataclass, field

import numpy as np

from turbodpsk.codes.outer import make_outer
from turbodpsk.trellis import L_MAX, demodulate_full


@dataclass(frozen=True)
class TurboConfig:
    mode: str = "coherent"
    code: str = "ldpc"
    num_iterations: int | None = None  # 3 coherent, 2 noncoherent
    l_max: float = L_MAX
    early_exit: bool = True
    demod_output: str = "extrinsic"

    def __post_init__(self):
        if self.num_iterations is None:
            object.__setattr__(self, "num_iterations", 3 if self.mode == "coherent" else 2)
        if self.num_iterations < 1:
            raise ValueError("num_iterations must be at least 1")
        if self.mode not in ("coherent", "noncoherent"):
            raise ValueError(f"unknown detection mode {self.mode!r}")
        if self.code not in ("ldpc", "conv"):
            raise ValueError(f"unknown outer code {self.code!r}")
        if self.demod_output not in ("posterior", "extrinsic"):
            raise ValueError(f"demod_output must be 'posterior' or 'extrinsic', got {self.demod_output!r}")


@dataclass
class IterationTrace:
    bit_errors: list = field(default_factory=list)  # None entries without a reference
    converged: list = field(default_factory=list)
    mean_abs_extrinsic: list = field(default_factory=list)
    decisions: list = field(default_factory=list, repr=False)

    def __len__(self):
        return len(self.converged)


def split_extrinsic(le):
    """Prior table over (c1, c2) from XOR extrinsic LLRs.

    P(0,0) = P(1,1) ~ exp(-Le/2) and P(0,1) = P(1,0) ~ exp(+Le/2), each
    row normalised to one. Columns follow the label order
    (0,0), (0,1), (1,0), (1,1).
    """
    le = np.asarray(le, dtype=float)
    # logistic form of e+/(2 e+ + 2 e-) stays finite for any |Le|
    p_diff = 0.5 * np.exp(-np.logaddexp(0.0, -le))
    p_same = 0.5 * np.exp(-np.logaddexp(0.0, le))
    return np.stack([p_same, p_diff, p_diff, p_same], axis=1)


def relay_receive(r, config, params, csi=None, reference=None, outer=None):
    """Decode the XOR codeword from one received frame.

    ``reference`` (the true ``c1 XOR c2`` in code order) only feeds the trace.
    Returns ``(codeword_decision, trace)``; the trace always has
    ``config.num_iterations`` entries, repeated after an early exit.
    """
    outer = outer if outer is not None else make_outer(config.code)
    r = np.asarray(r)
    if len(r) != outer.n + 1:
        raise ValueError(f"received frame has {len(r)} samples, expected {outer.n + 1}")
    if reference is not None and len(reference) != outer.n:
        raise ValueError("reference length does not match the code length")
    pi = outer.interleaver
    trace = IterationTrace()
    le_channel_order = np.zeros(outer.n)
    prev = None
    decision = None
    for it in range(config.num_iterations):
        prior = split_extrinsic(le_channel_order)
        demod = demodulate_full(r, config.mode, params, csi=csi, prior=prior, l_max=config.l_max)
        to_decoder = demod.llr if config.demod_output == "posterior" else demod.extrinsic_llr
        dec = outer.decode(pi.deinterleave(to_decoder))
        ext = np.clip(dec.extrinsic, -config.l_max, config.l_max)
        le_channel_order = pi.interleave(ext)
        decision = dec.codeword
        trace.converged.append(dec.converged)
        trace.mean_abs_extrinsic.append(float(np.mean(np.abs(ext))))
        trace.bit_errors.append(
            None if reference is None else int(np.count_nonzero(decision != reference))
        )
        trace.decisions.append(decision)
        if config.early_exit and dec.converged and prev is not None and np.array_equal(prev, decision):
            for _ in range(it + 1, config.num_iterations):
                trace.converged.append(trace.converged[-1])
                trace.mean_abs_extrinsic.append(trace.mean_abs_extrinsic[-1])
                trace.bit_errors.append(trace.bit_errors[-1])
                trace.decisions.append(decision)
            break
        prev = decision
    return decision, trace
