import matplotlib
import pytest

from turbodpsk.plot import CENSORED_MARKER, emit_plot, plot_floor
from turbodpsk.sim import BerRecord


def _rec(ebn0, ber, it):
    return BerRecord("coherent", "conv", 0.03, ebn0, it, 100, int(ber * 1e5), ber, 1, 0.0)


RECORDS = [
    _rec(8.0, 1e-2, 3), _rec(9.0, 0.0, 3),
    _rec(8.0, 2e-2, 1), _rec(9.0, 3e-3, 1),
    _rec(8.0, 1.5e-2, 2), _rec(9.0, 1e-4, 2),
]


def test_empty_input():
    with pytest.raises(ValueError):
        emit_plot([])


def test_single_record():
    fig = emit_plot([_rec(5.0, 0.1, 1)])
    (line,) = fig.axes[0].get_lines()
    assert list(line.get_xdata()) == [5.0]


def test_legend_sorted_by_iteration():
    fig = emit_plot(RECORDS)
    labels = [t.get_text() for t in fig.axes[0].get_legend().get_texts()]
    assert labels == ["1 iteration", "2 iterations", "3 iterations"]
    assert fig.axes[0].get_yscale() == "log"


def test_zero_ber_drawn_as_censored_marker():
    fig = emit_plot(RECORDS)
    floor = plot_floor(RECORDS)
    assert floor == pytest.approx(1e-5)
    censored = [ln for ln in fig.axes[0].get_lines() if ln.get_gid() == "censored-3"]
    assert len(censored) == 1
    ln = censored[0]
    assert list(ln.get_xdata()) == [9.0] and list(ln.get_ydata()) == [floor]
    assert ln.get_marker() == CENSORED_MARKER
    assert ln.get_markerfacecolor() == "none"
    assert fig.axes[0].get_ylim()[0] < floor


def test_floor_without_errors():
    assert plot_floor([_rec(1.0, 0.0, 1)]) == 1e-6


def test_svg_is_self_contained_and_stable(tmp_path):
    a = tmp_path / "a.svg"
    b = tmp_path / "b.svg"
    with matplotlib.rc_context({"svg.hashsalt": "fixed"}):
        emit_plot(RECORDS, a)
        emit_plot(RECORDS, b)
    text = a.read_text()
    assert text.startswith("<?xml") and "censored-3" in text
    assert "xlink:href=\"http" not in text
    assert text == b.read_text()
