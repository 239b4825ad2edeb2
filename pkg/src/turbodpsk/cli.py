"""Command-line entry point: ``turbodpsk sweep | plot``."""

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from turbodpsk.sim import ConfigError, format_config, read_csv, run_sweep, validate_config


def _cmd_sweep(args):
    raw = Path(args.config).read_text() if args.config else ""
    try:
        cfg = validate_config(raw, seed=args.seed, workers=args.workers, out=args.out)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "config.txt").write_text(format_config(cfg))
    csv_path = out / f"ber_{cfg.mode}_{cfg.code}.csv"
    records = run_sweep(cfg, csv_path)
    print(csv_path)
    if not args.no_plot and records:
        from turbodpsk.plot import emit_plot

        svg = csv_path.with_suffix(".svg")
        emit_plot(records, svg)
        print(svg)
    return 0


def _cmd_plot(args):
    from turbodpsk.plot import emit_plot

    records = read_csv(args.csv)
    out = Path(args.out) if args.out else Path(args.csv).with_suffix(".svg")
    emit_plot(records, out)
    print(out)
    return 0


def _cmd_oracle(args):
    from turbodpsk.channel import ChannelParams, draw_realization, mac_transmit
    from turbodpsk.oracle import exhaustive_joint_map
    from turbodpsk.signal import differential_encode
    from turbodpsk.trellis import demodulate

    rng = np.random.default_rng(args.seed)
    params = ChannelParams(delta_sq=args.delta_sq)
    c1 = rng.integers(0, 2, args.epochs)
    c2 = rng.integers(0, 2, args.epochs)
    ch = draw_realization(args.epochs + 1, params, rng)
    r = mac_transmit(differential_encode(c1), differential_encode(c2), ch)
    _, app = demodulate(r, args.mode, params, csi=ch)
    ref = exhaustive_joint_map(r, args.mode, params, csi=ch)
    np.set_printoptions(precision=6, suppress=True)
    print("demodulator APP:\n", app)
    print("exhaustive APP:\n", ref.app)
    print(f"max abs difference: {np.abs(app - ref.app).max():.3e}")
    return 0


def build_parser():
    p = argparse.ArgumentParser(prog="turbodpsk", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, metavar="{sweep,plot}")

    s = sub.add_parser("sweep", help="run a Monte Carlo XOR-BER sweep")
    s.add_argument("--config", help="flat key = value config file (defaults if omitted)")
    s.add_argument("--seed", type=int)
    s.add_argument("--workers", type=int)
    s.add_argument("--out", help="output directory")
    s.add_argument("--no-plot", action="store_true")
    s.set_defaults(func=_cmd_sweep)

    pl = sub.add_parser("plot", help="render a sweep CSV as an SVG figure")
    pl.add_argument("csv")
    pl.add_argument("--out")
    pl.set_defaults(func=_cmd_plot)

    o = sub.add_parser("oracle")
    o.add_argument("--mode", choices=("coherent", "noncoherent"), default="coherent")
    o.add_argument("--epochs", type=int, default=6)
    o.add_argument("--delta-sq", type=float, default=0.25)
    o.add_argument("--seed", type=int, default=0)
    o.set_defaults(func=_cmd_oracle)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(asctime)s %(levelname)s %(message)s")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
