import numpy as np
import pytest
from scipy import special, stats

from turbodpsk.channel import (
    ChannelParams,
    ChannelRealization,
    draw_realization,
    ebn0_to_noise_var,
    jakes_fading,
    jakes_psd_bins,
    mac_transmit,
)


@pytest.fixture(scope="module")
def long_run():
    return jakes_fading(1_000_000, 1.0, 0.03, seed=11)


def test_zero_doppler_is_constant():
    h = jakes_fading(500, 1.0, 0.0, seed=1)
    assert np.all(h == h[0])


def test_negative_doppler_rejected():
    with pytest.raises(ValueError):
        jakes_fading(10, 1.0, -0.01, seed=0)


def test_params_reject_bad_values():
    with pytest.raises(ValueError, match="fdTs"):
        ChannelParams(fdTs=-1)
    with pytest.raises(ValueError, match="delta_sq"):
        ChannelParams(delta_sq=0)


def test_psd_bins_sum_to_one():
    p = jakes_psd_bins(4096, 0.03)
    assert p.sum() == pytest.approx(1.0)
    f = np.fft.fftfreq(4096)
    assert np.all(p[np.abs(f) > 0.03 + 1 / 4096] == 0)


def test_mean_power(long_run):
    assert np.mean(np.abs(long_run) ** 2) == pytest.approx(1.0, abs=0.01)


def test_lag1_autocorrelation_matches_bessel(long_run):
    h = long_run
    r1 = np.mean(h[1:] * np.conj(h[:-1])).real
    expected = special.j0(2 * np.pi * 0.03)  # times 2 sigma^2 = 1
    assert expected == pytest.approx(0.9911, abs=1e-4)
    assert r1 == pytest.approx(expected, rel=0.01)


@pytest.mark.parametrize("lag", [5, 10, 20])
def test_autocorrelation_at_larger_lags(long_run, lag):
    h = long_run
    rm = np.mean(h[lag:] * np.conj(h[:-lag])).real
    assert rm == pytest.approx(special.j0(2 * np.pi * 0.03 * lag), abs=0.02)


def test_marginals_are_gaussian(long_run):
    # thin to roughly independent samples before the KS test
    thinned = long_run[::100] / np.sqrt(0.5)
    for part in (thinned.real, thinned.imag):
        assert stats.kstest(part, "norm").pvalue > 0.01
    for part in (long_run.real, long_run.imag):
        assert stats.kurtosis(part, fisher=False) == pytest.approx(3.0, abs=0.1)
        assert np.mean(part) == pytest.approx(0.0, abs=0.02)


def test_slow_fading_premise(long_run):
    h = long_run
    ratio = np.mean(np.abs(np.diff(h)) ** 2) / np.mean(np.abs(h) ** 2)
    assert ratio < 0.05


def test_reproducible_given_seed():
    a = jakes_fading(2000, 1.0, 0.03, seed=5)
    b = jakes_fading(2000, 1.0, 0.03, seed=5)
    assert np.array_equal(a, b)
    p = ChannelParams()
    ra = draw_realization(100, p, np.random.default_rng(9))
    rb = draw_realization(100, p, np.random.default_rng(9))
    assert all(np.array_equal(getattr(ra, f), getattr(rb, f)) for f in ("h1", "h2", "noise"))


def test_links_are_independent():
    p = ChannelParams()
    acc = []
    for seed in range(200):
        ch = draw_realization(64, p, np.random.default_rng(seed))
        acc.append(np.mean(ch.h1 * np.conj(ch.h2)))
    assert abs(np.mean(acc)) < 0.1


def test_mac_noiseless_unit_gains():
    n = 8
    ch = ChannelRealization(np.ones(n, complex), np.ones(n, complex), np.zeros(n, complex))
    np.testing.assert_array_equal(mac_transmit(np.ones(n), np.ones(n), ch), 2 * np.ones(n))


def test_mac_zero_symbols_gives_noise():
    rng = np.random.default_rng(0)
    ch = draw_realization(16, ChannelParams(), rng)
    np.testing.assert_array_equal(mac_transmit(np.zeros(16), np.zeros(16), ch), ch.noise)


def test_mac_is_superposition():
    rng = np.random.default_rng(1)
    ch = draw_realization(32, ChannelParams(), rng)
    x1 = rng.choice([-1.0, 1.0], 32)
    x2 = rng.choice([-1.0, 1.0], 32)
    zero = np.zeros(32, complex)
    single1 = mac_transmit(x1, np.zeros(32), ChannelRealization(ch.h1, ch.h2, zero))
    single2 = mac_transmit(np.zeros(32), x2, ChannelRealization(ch.h1, ch.h2, zero))
    np.testing.assert_allclose(mac_transmit(x1, x2, ch), single1 + single2 + ch.noise)


def test_mac_length_mismatch():
    ch = draw_realization(4, ChannelParams(), np.random.default_rng(0))
    with pytest.raises(ValueError, match="length mismatch"):
        mac_transmit(np.ones(3), np.ones(4), ch)


def test_ebn0_examples():
    assert ebn0_to_noise_var(0.0, 1.0, 1.0, 0.5, 0.5) == pytest.approx(0.5)
    assert ebn0_to_noise_var(200.0, 0.5) < 1e-19
    assert ebn0_to_noise_var(13.01, 0.5) == pytest.approx(ebn0_to_noise_var(10.0, 0.5) / 2, rel=1e-3)


def test_ebn0_rejects_bad_rate():
    with pytest.raises(ValueError):
        ebn0_to_noise_var(3.0, 0.0)
