"""Soft-in soft-out demodulation of two superimposed DPSK streams.

The trellis state at epoch k is the pair of previous symbols
``(u1(k-1), u2(k-1))`` and each branch carries the coded-bit pair
``(c1(k), c2(k))``. Index conventions used throughout:

* state index ``2 * b1 + b2`` where ``b = 0`` for u = +1 and ``b = 1`` for u = -1
* label index ``2 * c1 + c2``, i.e. the order (0,0), (0,1), (1,0), (1,1)

LLRs are ``log P(bit = 1) / P(bit = 0)``.
"""

from dataclasses import dataclass

import numba
import numpy as np

L_MAX = 50.0

STATES = ((1, 1), (1, -1), (-1, 1), (-1, -1))
LABELS = ((0, 0), (0, 1), (1, 0), (1, 1))


class DeadTrellisError(FloatingPointError):
    """Every branch metric at some epoch vanished."""


@dataclass(frozen=True)
class Trellis:
    states: tuple
    labels: tuple
    next_state: np.ndarray  # [state, label] -> state

    def step(self, state, label):
        s = self.states.index(tuple(state))
        lab = self.labels.index(tuple(label))
        return self.states[self.next_state[s, lab]]


def build_trellis():
    next_state = np.empty((4, 4), dtype=np.int64)
    for s, (u1, u2) in enumerate(STATES):
        for lab, (c1, c2) in enumerate(LABELS):
            next_state[s, lab] = STATES.index((u1 * (2 * c1 - 1), u2 * (2 * c2 - 1)))
    next_state.setflags(write=False)
    return Trellis(STATES, LABELS, next_state)


TRELLIS = build_trellis()
NEXT_STATE = TRELLIS.next_state

# symbol sign of user i on branch (state, label): u_i(k-1) * (2 c_i(k) - 1)
_SIGN1 = np.array([[u1 * (2 * c1 - 1) for (c1, _) in LABELS] for (u1, _) in STATES], dtype=float)
_SIGN2 = np.array([[u2 * (2 * c2 - 1) for (_, c2) in LABELS] for (_, u2) in STATES], dtype=float)
_D1 = np.array([2 * c1 - 1 for (c1, _) in LABELS], dtype=float)
_D2 = np.array([2 * c2 - 1 for (_, c2) in LABELS], dtype=float)


@dataclass(frozen=True)
class NoncoherentStats:
    sigma_r_sq: float
    mr_coeff: complex
    delta_r_sq: float


def coherent_branch_metric(r_k, h1_k, h2_k, state, label, prior, params):
    """Prior times the Gaussian likelihood of ``r_k`` given perfect CSI."""
    u1, u2 = state
    c1, c2 = label
    x1 = np.sqrt(params.Es) * u1 * (2 * c1 - 1)
    x2 = np.sqrt(params.Es) * u2 * (2 * c2 - 1)
    resid = r_k - h1_k * x1 - h2_k * x2
    return prior * np.exp(-abs(resid) ** 2 / (2 * params.delta_sq))


def noncoherent_stats(state, label, params):
    """Conditional statistics of r(k) given r(k-1) and the branch symbols.

    Uses Var[r(k) | r(k-1)] = Var[r(k)] - |Cov(r(k), r(k-1))|^2 / Var[r(k-1)]
    with the fading held constant over the two epochs.
    """
    u1, u2 = state
    c1, c2 = label
    Es = params.Es
    x1_prev, x2_prev = np.sqrt(Es) * u1, np.sqrt(Es) * u2
    x1 = x1_prev * (2 * c1 - 1)
    x2 = x2_prev * (2 * c2 - 1)
    sigma_r_sq = 2 * params.sigma1_sq * Es + 2 * params.sigma2_sq * Es + 2 * params.delta_sq
    cov = (
        2 * x1 * np.conj(x1_prev) * params.sigma1_sq
        + 2 * x2 * np.conj(x2_prev) * params.sigma2_sq
    )
    mr_coeff = complex(cov / sigma_r_sq)
    delta_r_sq = float(sigma_r_sq - abs(cov) ** 2 / sigma_r_sq)
    return NoncoherentStats(float(sigma_r_sq), mr_coeff, delta_r_sq)


def noncoherent_branch_metric(r_k, r_km1, state, label, prior, params):
    """Prior times the complex Gaussian density of r(k) given r(k-1).

    The factor p(r(k-1) | x(k-1)) is identical on every branch for
    constant-modulus symbols and is left out.
    """
    st = noncoherent_stats(state, label, params)
    resid = r_k - st.mr_coeff * r_km1
    return prior * np.exp(-abs(resid) ** 2 / st.delta_r_sq) / (np.pi * st.delta_r_sq)


def _log_prior(prior, n_epochs):
    if prior is None:
        return np.zeros((n_epochs, 4))
    prior = np.asarray(prior, dtype=float)
    if prior.shape != (n_epochs, 4):
        raise ValueError(f"prior must have shape ({n_epochs}, 4), got {prior.shape}")
    with np.errstate(divide="ignore"):
        return np.log(prior)


def likelihood_table(r, mode, params, csi=None):
    """Log branch likelihoods without the prior, shape ``(N, 4 states, 4 labels)``."""
    r = np.asarray(r, dtype=np.complex128)
    n = len(r) - 1
    if n < 1:
        raise ValueError("received sequence needs a reference plus at least one symbol")
    sqrt_es = np.sqrt(params.Es)
    if mode == "coherent":
        if csi is None:
            raise ValueError("coherent demodulation requires channel state information")
        if len(csi) != len(r):
            raise ValueError("csi and received sequence lengths differ")
        h1 = np.asarray(csi.h1)[1:, None, None]
        h2 = np.asarray(csi.h2)[1:, None, None]
        resid = r[1:, None, None] - sqrt_es * (h1 * _SIGN1 + h2 * _SIGN2)
        return -(resid.real ** 2 + resid.imag ** 2) / (2 * params.delta_sq)
    if mode == "noncoherent":
        sigma_r_sq = 2 * params.Es * (params.sigma1_sq + params.sigma2_sq) + 2 * params.delta_sq
        cov = 2 * params.Es * (params.sigma1_sq * _D1 + params.sigma2_sq * _D2)
        coeff = cov / sigma_r_sq
        delta_r_sq = sigma_r_sq - cov ** 2 / sigma_r_sq
        resid = r[1:, None] - coeff[None, :] * r[:-1, None]
        per_label = -(resid.real ** 2 + resid.imag ** 2) / delta_r_sq - np.log(np.pi * delta_r_sq)
        return np.broadcast_to(per_label[:, None, :], (n, 4, 4))
    raise ValueError(f"unknown detection mode {mode!r}")


def _scaled_exp(log_m):
    # per-epoch rescale so the largest entry is 1; cancels after normalisation
    peak = log_m.max(axis=(1, 2), keepdims=True)
    if not np.all(np.isfinite(peak)):
        raise DeadTrellisError("all branch metrics vanish at some epoch")
    return np.exp(log_m - peak)


def branch_metric_table(r, mode, params, csi=None, prior=None):
    """Vectorised branch metrics (prior times likelihood), shape ``(N, 4, 4)``.

    Each epoch is rescaled so that its largest entry is 1; the scale cancels
    in every normalised quantity downstream.
    """
    log_lik = likelihood_table(r, mode, params, csi)
    return _scaled_exp(log_lik + _log_prior(prior, log_lik.shape[0])[:, None, :])


@numba.njit(cache=True)
def _forward_backward(metrics, init, next_state):
    n = metrics.shape[0]
    alpha = np.zeros((n + 1, 4))
    beta = np.zeros((n + 1, 4))
    alpha[0] = init
    for k in range(n):
        acc = np.zeros(4)
        for s in range(4):
            a = alpha[k, s]
            if a == 0.0:
                continue
            for lab in range(4):
                acc[next_state[s, lab]] += a * metrics[k, s, lab]
        tot = acc.sum()
        if not tot > 0.0:
            return alpha, beta, k
        alpha[k + 1] = acc / tot
    beta[n] = 0.25
    for k in range(n - 1, -1, -1):
        acc = np.zeros(4)
        for s in range(4):
            v = 0.0
            for lab in range(4):
                v += metrics[k, s, lab] * beta[k + 1, next_state[s, lab]]
            acc[s] = v
        tot = acc.sum()
        if not tot > 0.0:
            return alpha, beta, k
        beta[k] = acc / tot
    return alpha, beta, -1


def forward_backward(metrics, init=None):
    """Normalised forward and backward recursions over the joint trellis.

    Returns ``alpha`` and ``beta`` of shape ``(N + 1, 4)``; each row sums to
    one. ``init`` defaults to certainty on the reference state (+1, +1) and
    the final ``beta`` is uniform (the differential trellis is unterminated).
    """
    metrics = np.ascontiguousarray(metrics, dtype=np.float64)
    if metrics.ndim != 3 or metrics.shape[1:] != (4, 4):
        raise ValueError("metrics must have shape (N, 4, 4)")
    if np.any(metrics < 0):
        raise ValueError("metrics must be non-negative")
    if init is None:
        init = np.array([1.0, 0.0, 0.0, 0.0])
    init = np.asarray(init, dtype=np.float64)
    if init.shape != (4,) or np.any(init < 0) or not np.isclose(init.sum(), 1.0):
        raise ValueError("init must be a distribution over the 4 states")
    alpha, beta, dead = _forward_backward(metrics, init, np.asarray(NEXT_STATE))
    if dead >= 0:
        raise DeadTrellisError(f"trellis died at epoch {dead}")
    return alpha, beta


def joint_app(alpha, beta, metrics):
    """Per-epoch posterior over the four (c1, c2) labels, rows sum to one."""
    alpha = np.asarray(alpha)
    beta = np.asarray(beta)
    metrics = np.asarray(metrics)
    n = metrics.shape[0]
    if alpha.shape != (n + 1, 4) or beta.shape != (n + 1, 4):
        raise ValueError("alpha/beta must have one more epoch than metrics")
    app = np.einsum("ks,ksl,ksl->kl", alpha[:-1], metrics, beta[1:][:, NEXT_STATE])
    z = app.sum(axis=1, keepdims=True)
    if np.any(z <= 0):
        raise DeadTrellisError("zero normaliser in joint APP")
    return app / z


def xor_llr(app, l_max=L_MAX):
    """LLR of ``c1 XOR c2`` from the joint APP table, clamped to +-l_max."""
    app = np.asarray(app, dtype=float)
    p1 = app[:, 1] + app[:, 2]
    p0 = app[:, 0] + app[:, 3]
    with np.errstate(divide="ignore", invalid="ignore"):
        llr = np.log(p1) - np.log(p0)
    llr = np.where(np.isnan(llr), 0.0, llr)
    return np.clip(llr, -l_max, l_max)


@dataclass
class DemodResult:
    llr: np.ndarray  # a-posteriori XOR LLRs
    app: np.ndarray  # joint label APPs, (N, 4)
    extrinsic_llr: np.ndarray  # XOR LLRs with each epoch's own prior removed


def demodulate_full(r, mode, params, csi=None, prior=None, l_max=L_MAX):
    """Joint BCJR returning posterior and extrinsic XOR information.

    The extrinsic APP at epoch k marginalises alpha * likelihood * beta,
    i.e. the branch prior of epoch k is left out rather than divided out.
    """
    log_lik = likelihood_table(r, mode, params, csi=csi if mode == "coherent" else None)
    n = log_lik.shape[0]
    metrics = _scaled_exp(log_lik + _log_prior(prior, n)[:, None, :])
    alpha, beta = forward_backward(metrics)
    app = joint_app(alpha, beta, metrics)
    ext_app = joint_app(alpha, beta, _scaled_exp(log_lik))
    return DemodResult(xor_llr(app, l_max), app, xor_llr(ext_app, l_max))


def demodulate(r, mode, params, csi=None, prior=None, l_max=L_MAX):
    """Run the joint BCJR over one received frame of N + 1 samples.

    Returns ``(llr, app)``: the XOR LLRs (length N) and the joint label APPs
    ``(N, 4)``. ``csi`` is required in coherent mode and ignored otherwise.
    """
    res = demodulate_full(r, mode, params, csi=csi, prior=prior, l_max=l_max)
    return res.llr, res.app
