"""Monte Carlo XOR-BER sweeps at the relay.

Every frame draws its bits, fading and unit noise from a stream derived
from ``(seed, frame_index)`` alone, so results do not depend on the worker
count and all SNR points share the same frames (only the noise scale
changes). Frames are run in fixed-size batches that are merged in index
order; a point stops at the first batch boundary where every tracked
iteration has seen ``min_errors`` error events (frames with at least one
XOR bit error) and the relative standard error of the BER estimate is at
most ``max_rse``, or at ``max_frames``. Counting frames rather than bits
keeps the events roughly independent, since coded errors arrive in bursts;
the burst sizes vary, hence the extra standard-error check.
"""

import csv
import io
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, fields
from pathlib import Path

import numpy as np

from turbodpsk.channel import ChannelParams, draw_realization, ebn0_to_noise_var, mac_transmit
from turbodpsk.codes.outer import make_outer
from turbodpsk.signal import differential_encode, xor_reference
from turbodpsk.turbo import TurboConfig, relay_receive

log = logging.getLogger(__name__)

CSV_HEADER = ("mode", "code", "fdTs", "ebn0_db", "iteration", "frames", "bit_errors",
              "ber", "frame_errors", "seconds")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    mode: str = "coherent"
    code: str = "ldpc"
    fdTs: float = 0.03
    sigma1_sq: float = 0.5
    sigma2_sq: float = 0.5
    Es: float = 1.0
    ebn0_db: tuple = tuple(np.arange(4.0, 16.0 + 1e-9, 1.0).round(6))
    iterations: tuple = (1, 2, 3, 5)
    max_frames: int = 2000
    min_errors: int = 100
    max_rse: float = 0.10
    seed: int = 1
    workers: int = 1
    out: str = "results"
    batch_frames: int = 20
    stop_ber: float = 0.0
    record_time: bool = True
    demod_output: str = "extrinsic"
    early_exit: bool = True

    def __post_init__(self):
        checks = [
            ("mode", self.mode in ("coherent", "noncoherent"), "one of coherent, noncoherent"),
            ("code", self.code in ("ldpc", "conv"), "one of ldpc, conv"),
            ("fdTs", self.fdTs >= 0, ">= 0"),
            ("sigma1_sq", self.sigma1_sq > 0, "> 0"),
            ("sigma2_sq", self.sigma2_sq > 0, "> 0"),
            ("Es", self.Es > 0, "> 0"),
            ("ebn0_db", len(self.ebn0_db) > 0, "a non-empty sweep"),
            ("iterations", len(self.iterations) > 0 and min(self.iterations) >= 1,
             "a non-empty list of positive counts"),
            ("max_frames", self.max_frames >= 1, ">= 1"),
            ("min_errors", self.min_errors >= 1, ">= 1"),
            ("max_rse", self.max_rse > 0, "> 0"),
            ("seed", self.seed >= 0, ">= 0"),
            ("workers", self.workers >= 1, ">= 1"),
            ("batch_frames", self.batch_frames >= 1, ">= 1"),
            ("demod_output", self.demod_output in ("posterior", "extrinsic"), "one of posterior, extrinsic"),
        ]
        for key, ok, what in checks:
            if not ok:
                raise ConfigError(f"{key}: must be {what}, got {getattr(self, key)!r}")

    @property
    def num_turbo_iterations(self):
        return max(self.iterations)

    def turbo_config(self):
        return TurboConfig(mode=self.mode, code=self.code, num_iterations=self.num_turbo_iterations,
                           early_exit=self.early_exit, demod_output=self.demod_output)


@dataclass(frozen=True)
class BerRecord:
    mode: str
    code: str
    fdTs: float
    ebn0_db: float
    iteration: int
    frames: int
    bit_errors: int
    ber: float
    frame_errors: int
    seconds: float


def _parse_sweep(text):
    text = text.strip()
    if ":" in text:
        parts = [float(p) for p in text.split(":")]
        if len(parts) != 3:
            raise ValueError("expected start:step:stop")
        start, step, stop = parts
        if step <= 0 or stop < start:
            raise ValueError("need step > 0 and stop >= start")
        n = int(np.floor((stop - start) / step + 1e-9)) + 1
        return tuple(round(start + i * step, 6) for i in range(n))
    return tuple(float(v) for v in text.split(",") if v.strip())


def _parse_bool(text):
    low = text.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError("expected a boolean")


_PARSERS = {
    "mode": str.strip, "code": str.strip, "out": str.strip, "demod_output": str.strip,
    "fdTs": float, "sigma1_sq": float, "sigma2_sq": float, "Es": float, "stop_ber": float,
    "max_rse": float,
    "max_frames": int, "min_errors": int, "seed": int, "workers": int, "batch_frames": int,
    "ebn0_db": _parse_sweep,
    "iterations": lambda t: tuple(sorted({int(v) for v in t.split(",") if v.strip()})),
    "record_time": _parse_bool, "early_exit": _parse_bool,
}


def validate_config(raw, **overrides):
    """Parse flat ``key = value`` text (``#`` starts a comment) into a config.

    Unknown keys and out-of-range values raise :class:`ConfigError` naming
    the offending key. ``overrides`` (e.g. from CLI flags) win over the file.
    """
    values = {}
    for lineno, line in enumerate(raw.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key = value")
        key, val = (s.strip() for s in line.split("=", 1))
        if key not in _PARSERS:
            raise ConfigError(f"{key}: unknown key")
        try:
            values[key] = _PARSERS[key](val)
        except ValueError as exc:
            raise ConfigError(f"{key}: cannot parse {val!r} ({exc})") from None
    values.update({k: v for k, v in overrides.items() if v is not None})
    return ExperimentConfig(**values)


def format_config(cfg):
    out = []
    for f in fields(cfg):
        v = getattr(cfg, f.name)
        if f.name == "ebn0_db":
            v = ",".join(f"{x:g}" for x in v)
        elif f.name == "iterations":
            v = ",".join(map(str, v))
        elif isinstance(v, bool):
            v = str(v).lower()
        out.append(f"{f.name} = {v}")
    return "\n".join(out) + "\n"


def channel_params(cfg, ebn0_db):
    outer = make_outer(cfg.code)
    delta_sq = ebn0_to_noise_var(ebn0_db, outer.rate, cfg.Es, cfg.sigma1_sq, cfg.sigma2_sq)
    return ChannelParams(cfg.sigma1_sq, cfg.sigma2_sq, delta_sq, cfg.Es, cfg.fdTs)


def frame_rng(seed, frame_index):
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(frame_index,)))


def simulate_frame(cfg, params, frame_index, turbo=None):
    """Run one relay frame; returns per-iteration XOR bit errors (length max iterations)."""
    outer = make_outer(cfg.code)
    turbo = turbo or cfg.turbo_config()
    rng = frame_rng(cfg.seed, frame_index)
    d1 = rng.integers(0, 2, outer.k)
    d2 = rng.integers(0, 2, outer.k)
    c1, c2 = outer.encode(d1), outer.encode(d2)
    pi = outer.interleaver
    x1 = differential_encode(pi.interleave(c1), Es=params.Es)
    x2 = differential_encode(pi.interleave(c2), Es=params.Es)
    realization = draw_realization(outer.n + 1, params, rng)
    r = mac_transmit(x1, x2, realization)
    csi = realization if cfg.mode == "coherent" else None
    _, trace = relay_receive(r, turbo, params, csi=csi, reference=xor_reference(c1, c2), outer=outer)
    return np.asarray(trace.bit_errors, dtype=np.int64)


def _run_batch(cfg, ebn0_db, start, stop):
    params = channel_params(cfg, ebn0_db)
    turbo = cfg.turbo_config()
    errs = np.stack([simulate_frame(cfg, params, i, turbo) for i in range(start, stop)])
    return errs.sum(axis=0), (errs ** 2).sum(axis=0), (errs > 0).sum(axis=0), stop - start


def _batches(cfg):
    b = cfg.batch_frames
    for start in range(0, cfg.max_frames, b):
        yield start, min(start + b, cfg.max_frames)


def relative_std_error(frames, err_sum, err_sq_sum):
    """Relative standard error of the mean per-frame error count (inf if undefined)."""
    err_sum = np.asarray(err_sum, dtype=float)
    if frames < 2:
        return np.full(err_sum.shape, np.inf)
    var = (np.asarray(err_sq_sum, dtype=float) - err_sum ** 2 / frames) / (frames - 1)
    with np.errstate(divide="ignore", invalid="ignore"):
        rse = np.sqrt(np.maximum(var, 0.0) / frames) / (err_sum / frames)
    return np.where(err_sum > 0, rse, np.inf)


def _point_done(cfg, frames, bit_errors, sq_errors, frame_errors):
    idx = [i - 1 for i in cfg.iterations]
    if frame_errors[idx].min() < cfg.min_errors:
        return False
    return relative_std_error(frames, bit_errors[idx], sq_errors[idx]).max() <= cfg.max_rse


def run_point(cfg, ebn0_db, pool=None):
    """Aggregate one Eb/N0 point.

    Returns ``(frames, bit_errors, squared_bit_errors, frame_errors, seconds)``
    with per-iteration arrays; squared errors are summed per frame.
    """
    t0 = time.perf_counter()
    n_it = cfg.num_turbo_iterations
    bit_errors = np.zeros(n_it, dtype=np.int64)
    sq_errors = np.zeros(n_it, dtype=np.int64)
    frame_errors = np.zeros(n_it, dtype=np.int64)
    frames = 0
    batches = list(_batches(cfg))
    if pool is None:
        results = (_run_batch(cfg, ebn0_db, a, b) for a, b in batches)
    else:
        results = _ordered_parallel(pool, cfg, ebn0_db, batches, lookahead=2 * cfg.workers)
    for be, sq, fe, nf in results:
        bit_errors += be
        sq_errors += sq
        frame_errors += fe
        frames += nf
        if _point_done(cfg, frames, bit_errors, sq_errors, frame_errors):
            break
    if pool is not None:
        results.close()
    return frames, bit_errors, sq_errors, frame_errors, time.perf_counter() - t0


def _ordered_parallel(pool, cfg, ebn0_db, batches, lookahead):
    pending = []
    it = iter(batches)
    try:
        for a, b in it:
            pending.append(pool.submit(_run_batch, cfg, ebn0_db, a, b))
            if len(pending) >= lookahead:
                break
        while pending:
            fut = pending.pop(0)
            nxt = next(it, None)
            if nxt is not None:
                pending.append(pool.submit(_run_batch, cfg, ebn0_db, *nxt))
            yield fut.result()
    finally:
        for fut in pending:
            fut.cancel()


def _warm_worker(code):
    make_outer(code)


def run_sweep(cfg, csv_path=None):
    """Run every Eb/N0 point and return the list of :class:`BerRecord`.

    Writes the CSV when ``csv_path`` is given. The sweep ends early after a
    point where every tracked iteration's BER is at most ``stop_ber``.
    """
    outer = make_outer(cfg.code)
    records = []
    pool = None
    if cfg.workers > 1:
        pool = ProcessPoolExecutor(max_workers=cfg.workers, initializer=_warm_worker, initargs=(cfg.code,))
    try:
        for ebn0 in cfg.ebn0_db:
            frames, be, _, fe, secs = run_point(cfg, ebn0, pool)
            point = []
            for it in cfg.iterations:
                ber = be[it - 1] / (frames * outer.n)
                point.append(BerRecord(cfg.mode, cfg.code, cfg.fdTs, float(ebn0), it, frames,
                                       int(be[it - 1]), float(ber), int(fe[it - 1]),
                                       round(secs, 3) if cfg.record_time else 0.0))
            records.extend(point)
            log.info("Eb/N0 %.2f dB: %d frames, BER %s", ebn0, frames,
                     " ".join(f"it{r.iteration}={r.ber:.3e}" for r in point))
            if max(r.ber for r in point) <= cfg.stop_ber:
                break
    finally:
        if pool is not None:
            pool.shutdown(cancel_futures=True)
    if csv_path is not None:
        write_csv(records, csv_path)
    return records


def _fmt(v):
    if isinstance(v, float):
        return repr(v)
    return str(v)


def records_to_csv(records):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for rec in records:
        d = asdict(rec)
        w.writerow([_fmt(d[k]) for k in CSV_HEADER])
    return buf.getvalue()


def write_csv(records, path):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(records_to_csv(records))
    return path


def read_csv(path):
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != CSV_HEADER:
            raise ValueError(f"{path}: unexpected CSV header {reader.fieldnames}")
        out = []
        for row in reader:
            out.append(BerRecord(
                row["mode"], row["code"], float(row["fdTs"]), float(row["ebn0_db"]),
                int(row["iteration"]), int(row["frames"]), int(row["bit_errors"]),
                float(row["ber"]), int(row["frame_errors"]), float(row["seconds"])))
    return out


def required_ebn0(records, iteration, target_ber=1e-4):
    """Eb/N0 where one iteration's curve crosses ``target_ber``.

    Linear interpolation of log10(BER) between the last point above and the
    first point at or below the target. Zero-error points count as below.
    Returns NaN when the curve never crosses.
    """
    pts = sorted((r.ebn0_db, r.ber) for r in records if r.iteration == iteration)
    for (x0, y0), (x1, y1) in zip(pts, pts[1:]):
        if y0 > target_ber >= y1:
            if y1 <= 0:
                return x1
            t = (np.log10(y0) - np.log10(target_ber)) / (np.log10(y0) - np.log10(y1))
            return float(x0 + t * (x1 - x0))
    return float("nan")
