"""Regenerate the shipped code assets (parity-check matrix and interleavers)."""

import sys

from turbodpsk.codes import asset_dir
from turbodpsk.codes.interleaver import INTERLEAVER_SEED, Interleaver
from turbodpsk.codes.ldpc import DEFAULT_ALIST, gf2_rref, girth_at_least_6, peg_regular, write_alist

PEG_SEED = 0


def main():
    out = asset_dir()
    out.mkdir(parents=True, exist_ok=True)
    H = peg_regular(1008, 504, 3, 6, seed=PEG_SEED)
    _, pivots = gf2_rref(H)
    print(f"rank {len(pivots)}, girth>=6: {girth_at_least_6(H)}", file=sys.stderr)
    write_alist(H, out / DEFAULT_ALIST)
    for n in (1008, 1016):
        Interleaver.random(n, INTERLEAVER_SEED + n).save(out / f"interleaver_{n}.txt")


if __name__ == "__main__":
    main()
