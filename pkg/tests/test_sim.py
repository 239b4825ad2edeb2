from dataclasses import replace

import numpy as np
import pytest

from turbodpsk.sim import (
    CSV_HEADER,
    BerRecord,
    ConfigError,
    ExperimentConfig,
    channel_params,
    format_config,
    read_csv,
    records_to_csv,
    relative_std_error,
    required_ebn0,
    run_point,
    run_sweep,
    simulate_frame,
    validate_config,
    write_csv,
)


class TestValidateConfig:
    def test_empty_gives_defaults(self):
        cfg = validate_config("")
        assert cfg.mode == "coherent" and cfg.code == "ldpc" and cfg.fdTs == 0.03
        assert cfg.min_errors == 100

    def test_sweep_range(self):
        cfg = validate_config("ebn0_db = 0:2:10")
        assert cfg.ebn0_db == (0.0, 2.0, 4.0, 6.0, 8.0, 10.0)

    def test_fractional_range_and_list(self):
        assert validate_config("ebn0_db = 8:0.5:9.5").ebn0_db == (8.0, 8.5, 9.0, 9.5)
        assert validate_config("ebn0_db = 3, 7.5").ebn0_db == (3.0, 7.5)

    def test_comments_and_whitespace(self):
        cfg = validate_config("# header\n  mode = noncoherent   # trailing\n\ncode=conv\n")
        assert (cfg.mode, cfg.code) == ("noncoherent", "conv")

    @pytest.mark.parametrize("text, key", [
        ("fdTs = -1", "fdTs"),
        ("max_frames = 0", "max_frames"),
        ("min_errors = 0", "min_errors"),
        ("mode = psk", "mode"),
        ("iterations = 0,2", "iterations"),
        ("ebn0_db = 5:-1:0", "ebn0_db"),
        ("workers = many", "workers"),
        ("colour = red", "colour"),
    ])
    def test_errors_name_the_key(self, text, key):
        with pytest.raises(ConfigError, match=key):
            validate_config(text)

    def test_missing_equals(self):
        with pytest.raises(ConfigError, match="line 2"):
            validate_config("mode = coherent\nnonsense\n")

    def test_overrides_win(self):
        cfg = validate_config("seed = 3\nworkers = 2", seed=9, workers=None)
        assert cfg.seed == 9 and cfg.workers == 2

    def test_format_round_trip(self):
        cfg = validate_config("mode = noncoherent\nebn0_db = 1:0.5:3\niterations = 5,1\nrecord_time = false")
        assert validate_config(format_config(cfg)) == cfg


def test_frames_are_seeded_by_index():
    cfg = ExperimentConfig(mode="coherent", code="conv", iterations=(1, 2))
    p = channel_params(cfg, 6.0)
    a = simulate_frame(cfg, p, 4)
    b = simulate_frame(cfg, p, 4)
    np.testing.assert_array_equal(a, b)


def test_high_snr_coherent_point_is_error_free():
    cfg = ExperimentConfig(mode="coherent", code="ldpc", iterations=(1,), max_frames=40, batch_frames=10)
    frames, be, _, fe, _ = run_point(cfg, 25.0)
    assert frames == 40 and be[0] == 0 and fe[0] == 0


def test_workers_do_not_change_counts():
    cfg = ExperimentConfig(mode="coherent", code="conv", ebn0_db=(9.0,), iterations=(1, 2),
                           max_frames=60, min_errors=5, batch_frames=4, record_time=False)
    serial = run_sweep(cfg)
    parallel = run_sweep(replace(cfg, workers=3))
    assert records_to_csv(serial) == records_to_csv(parallel)


def test_stop_ber_ends_sweep():
    cfg = ExperimentConfig(code="ldpc", ebn0_db=(25.0, 26.0), iterations=(1,), max_frames=10,
                           batch_frames=10)
    recs = run_sweep(cfg)
    assert [r.ebn0_db for r in recs] == [25.0]


def test_statistical_floor():
    cfg = ExperimentConfig(mode="coherent", code="conv", iterations=(1,), max_frames=5000,
                           min_errors=100, batch_frames=10)
    frames, be, sq, fe, _ = run_point(cfg, 10.0)
    assert fe[0] >= 100
    assert relative_std_error(frames, be, sq)[0] <= 0.10


def test_relative_std_error_arithmetic():
    # per-frame errors 0, 2, 4: mean 2, sample variance 4, se = 2/sqrt(3)
    assert relative_std_error(3, [6], [20])[0] == pytest.approx(1 / np.sqrt(3))
    assert relative_std_error(3, [0], [0])[0] == np.inf


def _rec(ebn0, ber, it=1):
    return BerRecord("coherent", "ldpc", 0.03, ebn0, it, 10, int(ber * 1e4), ber, 1, 0.0)


def test_csv_round_trip(tmp_path):
    recs = [_rec(1.0, 0.1), _rec(2.0, 1e-5, 2), _rec(3.0, 0.0)]
    path = write_csv(recs, tmp_path / "x.csv")
    assert path.read_text().splitlines()[0] == ",".join(CSV_HEADER)
    assert read_csv(path) == recs


def test_csv_header_checked(tmp_path):
    (tmp_path / "bad.csv").write_text("a,b\n1,2\n")
    with pytest.raises(ValueError, match="header"):
        read_csv(tmp_path / "bad.csv")


class TestRequiredEbn0:
    def test_log_linear_interpolation(self):
        recs = [_rec(10.0, 1e-3), _rec(12.0, 1e-5)]
        assert required_ebn0(recs, 1) == pytest.approx(11.0)

    def test_zero_error_point(self):
        assert required_ebn0([_rec(10.0, 1e-3), _rec(11.0, 0.0)], 1) == 11.0

    def test_never_crosses(self):
        assert np.isnan(required_ebn0([_rec(10.0, 1e-2), _rec(11.0, 1e-3)], 1))
