import pytest

from turbodpsk.channel import ChannelParams, draw_realization, mac_transmit
from turbodpsk.signal import differential_encode


@pytest.fixture
def params():
    return ChannelParams(sigma1_sq=0.5, sigma2_sq=0.5, delta_sq=0.25, Es=1.0, fdTs=0.03)


def random_frame(rng, n, params):
    """Two random coded streams through the MAC; returns (c1, c2, realization, r)."""
    c1 = rng.integers(0, 2, n)
    c2 = rng.integers(0, 2, n)
    ch = draw_realization(n + 1, params, rng)
    r = mac_transmit(differential_encode(c1, Es=params.Es), differential_encode(c2, Es=params.Es), ch)
    return c1, c2, ch, r


ACCEPTANCE_LINES = {}


def record_criterion(number, passed, detail):
    line = f"criterion {number:>2}: {'PASS' if passed else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES[number] = line
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[n])
