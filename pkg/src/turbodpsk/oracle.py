"""Brute-force references for the demodulator.

Nothing here reuses the forward/backward recursion: the joint MAP oracle
enumerates every label sequence, multiplies the scalar branch metrics
along its state path and marginalises directly.
"""

from dataclasses import dataclass
from itertools import product

import numpy as np

from turbodpsk.trellis import (
    LABELS,
    STATES,
    coherent_branch_metric,
    noncoherent_branch_metric,
)

MAX_ORACLE_EPOCHS = 8


@dataclass
class OracleResult:
    app: np.ndarray  # (N, 4) exact joint label posteriors
    log_evidence: float  # log of the summed (unnormalised) path metrics


def _next_state(state, label):
    (u1, u2), (c1, c2) = state, label
    return (u1 * (2 * c1 - 1), u2 * (2 * c2 - 1))


def exhaustive_joint_map(r, mode, params, csi=None, prior=None, initial_state=(1, 1)):
    """Exact joint APPs by enumerating all 4**N label sequences (N <= 8)."""
    r = np.asarray(r, dtype=complex)
    n = len(r) - 1
    if n < 1:
        raise ValueError("need at least one coded epoch")
    if n > MAX_ORACLE_EPOCHS:
        raise ValueError(f"oracle limited to N <= {MAX_ORACLE_EPOCHS} epochs, got {n}")
    if mode == "coherent" and csi is None:
        raise ValueError("coherent oracle needs csi")
    if prior is None:
        prior = np.full((n, 4), 0.25)

    # scalar metric for every (epoch, state, label)
    metric = {}
    for k in range(n):
        for state in STATES:
            for li, label in enumerate(LABELS):
                if mode == "coherent":
                    m = coherent_branch_metric(r[k + 1], csi.h1[k + 1], csi.h2[k + 1],
                                               state, label, prior[k, li], params)
                elif mode == "noncoherent":
                    m = noncoherent_branch_metric(r[k + 1], r[k], state, label, prior[k, li], params)
                else:
                    raise ValueError(f"unknown detection mode {mode!r}")
                metric[k, state, li] = m

    log_w = np.empty(4 ** n)
    seqs = np.array(list(product(range(4), repeat=n)), dtype=np.int64).reshape(-1, n)
    with np.errstate(divide="ignore"):
        for idx, seq in enumerate(seqs):
            state = tuple(initial_state)
            total = 0.0
            for k, li in enumerate(seq):
                total += np.log(metric[k, state, li])
                state = _next_state(state, LABELS[li])
            log_w[idx] = total
    peak = log_w.max()
    w = np.exp(log_w - peak)
    z = w.sum()
    app = np.zeros((n, 4))
    for k in range(n):
        app[k] = np.bincount(seqs[:, k], weights=w, minlength=4) / z
    return OracleResult(app, float(peak + np.log(z)))


@dataclass
class ConditionalStats:
    slope: complex
    residual_var: float


def mc_conditional_stats(state, label, params, num_samples=1_000_000, seed=0):
    """Regress r(k) on r(k-1) over Monte Carlo draws with fading frozen across both epochs.

    Returns the least-squares slope and residual variance, i.e. empirical
    counterparts of the conditional mean coefficient and variance.
    """
    rng = np.random.default_rng(seed)
    (u1, u2), (c1, c2) = state, label
    es = np.sqrt(params.Es)
    x1p, x2p = es * u1, es * u2
    x1, x2 = x1p * (2 * c1 - 1), x2p * (2 * c2 - 1)

    def cn(var_per_dim):
        return np.sqrt(var_per_dim) * (rng.standard_normal(num_samples) + 1j * rng.standard_normal(num_samples))

    h1 = cn(params.sigma1_sq)
    h2 = cn(params.sigma2_sq)
    r_prev = h1 * x1p + h2 * x2p + cn(params.delta_sq)
    r_cur = h1 * x1 + h2 * x2 + cn(params.delta_sq)
    slope = np.vdot(r_prev, r_cur) / np.vdot(r_prev, r_prev).real
    resid = r_cur - slope * r_prev
    return ConditionalStats(complex(slope), float(np.mean(np.abs(resid) ** 2)))
