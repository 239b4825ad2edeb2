"""BER-versus-Eb/N0 figures, one curve per turbo iteration count."""

from collections import defaultdict
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

CENSORED_MARKER = "v"


def plot_floor(records):
    """Lower plot limit: a decade below the smallest non-zero BER (1e-6 if none)."""
    positive = [r.ber for r in records if r.ber > 0]
    if not positive:
        return 1e-6
    return min(positive) / 10


def emit_plot(records, path=None, title=None):
    """Draw log-scale BER curves and optionally save them as a vector file.

    Points with zero observed errors are drawn as hollow downward triangles
    at the plot floor instead of being dropped. Returns the figure.
    """
    records = list(records)
    if not records:
        raise ValueError("no records to plot")
    floor = plot_floor(records)
    curves = defaultdict(list)
    for r in records:
        curves[r.iteration].append((r.ebn0_db, r.ber))

    fig, ax = plt.subplots(figsize=(6, 4.5))
    for it in sorted(curves):
        pts = sorted(curves[it])
        xs = [x for x, _ in pts]
        ys = [y if y > 0 else float("nan") for _, y in pts]
        (line,) = ax.semilogy(xs, ys, marker="o", label=f"{it} iteration" + ("s" if it > 1 else ""))
        cx = [x for x, y in pts if y <= 0]
        if cx:
            ax.semilogy(cx, [floor] * len(cx), linestyle="none", marker=CENSORED_MARKER,
                        markerfacecolor="none", color=line.get_color(), gid=f"censored-{it}")
    ax.set_ylim(bottom=floor / 2)
    ax.set_xlabel("Eb/N0 (dB)")
    ax.set_ylabel("XOR BER")
    r0 = records[0]
    ax.set_title(title or f"{r0.mode}, {r0.code}, fdTs={r0.fdTs:g}")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend()
    fig.tight_layout()
    if path is not None:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        fig.savefig(path, metadata={"Date": None})
    return fig
