import subprocess
import sys

import pytest

from turbodpsk.cli import main
from turbodpsk.sim import read_csv

TINY = """mode = coherent
code = conv
ebn0_db = 20
iterations = 1,2
max_frames = 4
batch_frames = 2
record_time = false
"""


def test_sweep_writes_outputs(tmp_path, capsys):
    cfg = tmp_path / "c.cfg"
    cfg.write_text(TINY)
    out = tmp_path / "out"
    assert main(["sweep", "--config", str(cfg), "--out", str(out), "--seed", "4"]) == 0
    csv_path = out / "ber_coherent_conv.csv"
    recs = read_csv(csv_path)
    assert [r.iteration for r in recs] == [1, 2]
    assert all(r.frames == 4 for r in recs)
    assert (out / "ber_coherent_conv.svg").exists()
    assert "seed = 4" in (out / "config.txt").read_text()
    assert str(csv_path) in capsys.readouterr().out


def test_bad_config_exits_2(tmp_path, capsys):
    cfg = tmp_path / "c.cfg"
    cfg.write_text("fdTs = -1\n")
    assert main(["sweep", "--config", str(cfg), "--out", str(tmp_path)]) == 2
    assert "fdTs" in capsys.readouterr().err


def test_plot_subcommand(tmp_path):
    cfg = tmp_path / "c.cfg"
    cfg.write_text(TINY)
    main(["sweep", "--config", str(cfg), "--out", str(tmp_path), "--no-plot"])
    csv_path = tmp_path / "ber_coherent_conv.csv"
    assert not csv_path.with_suffix(".svg").exists()
    assert main(["plot", str(csv_path), "--out", str(tmp_path / "f.svg")]) == 0
    assert (tmp_path / "f.svg").read_text().startswith("<?xml")


def test_oracle_subcommand(capsys):
    assert main(["oracle", "--mode", "noncoherent", "--epochs", "4"]) == 0
    line = capsys.readouterr().out.strip().splitlines()[-1]
    assert float(line.split(":")[1]) < 1e-9


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "turbodpsk", "--help"], capture_output=True, text=True)
    assert res.returncode == 0 and "sweep" in res.stdout


def test_missing_subcommand():
    with pytest.raises(SystemExit):
        main([])
