"""Rayleigh fading and the two-user multiple-access channel seen by the relay."""

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class ChannelParams:
    """Link and noise parameters.

    All variances are per real dimension: the fading gain of source i has
    total variance ``2 * sigma_i_sq`` and the noise has ``2 * delta_sq``.
    """

    sigma1_sq: float = 0.5
    sigma2_sq: float = 0.5
    delta_sq: float = 0.5
    Es: float = 1.0
    fdTs: float = 0.03

    def __post_init__(self):
        for name in ("sigma1_sq", "sigma2_sq", "delta_sq", "Es"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)!r}")
        if not self.fdTs >= 0:
            raise ValueError(f"fdTs must be non-negative, got {self.fdTs!r}")


@dataclass(frozen=True)
class ChannelRealization:
    h1: np.ndarray
    h2: np.ndarray
    noise: np.ndarray

    def __post_init__(self):
        if not (len(self.h1) == len(self.h2) == len(self.noise)):
            raise ValueError("h1, h2 and noise must have equal lengths")

    def __len__(self):
        return len(self.h1)


def _rng(seed):
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def jakes_psd_bins(fft_size, fdTs):
    """Power of the Jakes Doppler spectrum integrated over each FFT bin.

    The classical spectrum has CDF ``arcsin(f / fd) / pi`` on ``[-fd, fd]``,
    so exact bin masses avoid the singularities at ``+-fd``. Bins follow
    ``np.fft.fftfreq`` ordering and sum to one.
    """
    f = np.fft.fftfreq(fft_size)
    lo = np.clip((f - 0.5 / fft_size) / fdTs, -1.0, 1.0)
    hi = np.clip((f + 0.5 / fft_size) / fdTs, -1.0, 1.0)
    p = (np.arcsin(hi) - np.arcsin(lo)) / np.pi
    return p / p.sum()


def jakes_fading(length, variance_2sigma_sq=1.0, fdTs=0.03, seed=None, min_doppler_bins=64):
    """Correlated Rayleigh gains with the Jakes (Clarke) autocorrelation.

    Complex white Gaussian noise is shaped in the frequency domain by the
    square root of the Doppler spectrum, which gives exact Gaussian marginals
    and autocorrelation ``variance * J0(2 pi fdTs m)`` up to spectral
    discretisation. ``seed`` may be an int or a ``numpy.random.Generator``.
    """
    if length < 1:
        raise ValueError("length must be at least 1")
    if not variance_2sigma_sq > 0:
        raise ValueError("variance must be positive")
    if fdTs < 0:
        raise ValueError(f"fdTs must be non-negative, got {fdTs}")
    rng = _rng(seed)
    scale = np.sqrt(variance_2sigma_sq / 2.0)
    if fdTs == 0:
        g = scale * (rng.standard_normal() + 1j * rng.standard_normal())
        return np.full(length, g, dtype=np.complex128)

    n_fft = 1 << int(np.ceil(np.log2(max(length, min_doppler_bins / min(fdTs, 0.5), 2))))
    amp = np.sqrt(jakes_psd_bins(n_fft, fdTs))
    white = rng.standard_normal(n_fft) + 1j * rng.standard_normal(n_fft)
    h = np.fft.ifft(amp * white) * n_fft
    return scale * h[:length]


def draw_realization(length, params, rng):
    """Independent Jakes gains for both links plus white noise."""
    rng = _rng(rng)
    h1 = jakes_fading(length, 2 * params.sigma1_sq, params.fdTs, rng)
    h2 = jakes_fading(length, 2 * params.sigma2_sq, params.fdTs, rng)
    noise = np.sqrt(params.delta_sq) * (rng.standard_normal(length) + 1j * rng.standard_normal(length))
    return ChannelRealization(h1, h2, noise)


def mac_transmit(x1, x2, realization):
    """Superimposed relay observation ``r = h1 x1 + h2 x2 + n``."""
    x1 = np.asarray(x1)
    x2 = np.asarray(x2)
    if not (len(x1) == len(x2) == len(realization)):
        raise ValueError(
            f"length mismatch: x1={len(x1)}, x2={len(x2)}, channel={len(realization)}"
        )
    return realization.h1 * x1 + realization.h2 * x2 + realization.noise


def ebn0_to_noise_var(ebn0_db, code_rate, Es=1.0, sigma1_sq=0.5, sigma2_sq=0.5):
    """Per-dimension noise variance for a given Eb/N0.

    Eb is the average received energy per information bit of one source,
    ``Es * 2 sigma^2 / rate`` with sigma^2 averaged over both links, and
    N0 = 2 delta^2.
    """
    if not 0 < code_rate <= 1:
        raise ValueError(f"code_rate must be in (0, 1], got {code_rate}")
    sigma_avg = 0.5 * (sigma1_sq + sigma2_sq)
    return Es * 2 * sigma_avg / (2 * code_rate * 10 ** (ebn0_db / 10))
